//! C ABI for `fanobound`.
//!
//! Every function returns an [`FbStatus`]. Results are written through out-pointers,
//! and nothing is written on failure. Objects are opaque handles that must be released
//! with their matching `*_free` function. After a failure, `fb_last_error_message`
//! returns a description of it for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fanobound::attack_sim::{run_game, Adversary, MechanismInstance, TrialReport};
use fanobound::fano::{
    best_generalized_fano, default_alpha_grid, fano_advantage_bound, generalized_fano_bound,
    rero_baseline_bound, AdvantageBound, BoundMethod,
};
use fanobound::info_theory::{entropy, Prior};
use fanobound::mi_bounds::{
    gaussian_mi_bound_thm2, gaussian_mi_monte_carlo, rr_epsilon_dp, rr_exact_mi, Encodings,
    GaussianSpec, MiBound, MiKind, RdpCurve, RrSpec,
};
use fanobound::Error;

/// Status codes returned by every function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NumericFailure = 4,
    Panic = 5,
}

/// Adversary used by the simulators.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbAdversary {
    /// Bayes-optimal guess using the prior.
    Map = 0,
    /// Maximum-likelihood guess that ignores the prior.
    MaximumLikelihood = 1,
}

/// Inequality behind an `FbAdvantageBound`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbMethod {
    Fano = 0,
    GeneralizedFano = 1,
    Rero = 2,
}

/// Advantage upper bound. `alpha` is infinite when the baseline is attained in the limit.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbAdvantageBound {
    pub t_star: f64,
    pub success_upper: f64,
    pub p_star: f64,
    pub advantage: f64,
    pub alpha: f64,
    pub info_bound: f64,
    pub m: u64,
    pub method: FbMethod,
    pub vacuous: bool,
}

/// Outcome of a simulated attack campaign, with 95% Wilson intervals.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbTrialReport {
    pub n_trials: u64,
    pub successes: u64,
    pub empirical_success: f64,
    pub empirical_advantage: f64,
    pub success_ci_low: f64,
    pub success_ci_high: f64,
    pub advantage_ci_low: f64,
    pub advantage_ci_high: f64,
    pub p_star: f64,
    pub seed: u64,
}

/// Opaque prior over candidate indices.
pub struct FbPrior(Prior);

/// Opaque Gaussian mechanism: encodings, noise scale and prior.
pub struct FbGaussian(GaussianSpec);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> FbStatus {
    match e {
        Error::DimensionMismatch { .. } => FbStatus::DimensionMismatch,
        Error::NumericAssertion(_) => FbStatus::NumericFailure,
        _ => FbStatus::InvalidArgument,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guard<F>(body: F) -> FbStatus
where
    F: FnOnce() -> Result<(), FbFailure>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => FbStatus::Ok,
        Ok(Err(FbFailure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            FbStatus::Panic
        }
    }
}

struct FbFailure(FbStatus, String);

impl From<Error> for FbFailure {
    fn from(e: Error) -> Self {
        FbFailure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> FbFailure {
    FbFailure(FbStatus::NullPointer, format!("{name} is null"))
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, FbFailure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn write_out<T>(p: *mut T, v: T, name: &str) -> Result<(), FbFailure> {
    if p.is_null() {
        return Err(null(name));
    }
    p.write(v);
    Ok(())
}

unsafe fn slice<'a>(p: *const f64, len: usize, name: &str) -> Result<&'a [f64], FbFailure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn to_c_bound(b: &AdvantageBound) -> FbAdvantageBound {
    FbAdvantageBound {
        t_star: b.t_star,
        success_upper: b.success_upper,
        p_star: b.p_star,
        advantage: b.advantage,
        alpha: b.alpha,
        info_bound: b.info_bound,
        m: b.m as u64,
        method: match b.method {
            BoundMethod::Fano => FbMethod::Fano,
            BoundMethod::GeneralizedFano { .. } => FbMethod::GeneralizedFano,
            BoundMethod::Rero { .. } => FbMethod::Rero,
        },
        vacuous: b.vacuous,
    }
}

fn to_c_report(r: &TrialReport) -> FbTrialReport {
    FbTrialReport {
        n_trials: r.n_trials,
        successes: r.successes,
        empirical_success: r.empirical_success,
        empirical_advantage: r.empirical_advantage,
        success_ci_low: r.success_ci_low,
        success_ci_high: r.success_ci_high,
        advantage_ci_low: r.ci_low,
        advantage_ci_high: r.ci_high,
        p_star: r.p_star,
        seed: r.seed,
    }
}

fn adversary(a: u32) -> Result<Adversary, FbFailure> {
    match a {
        x if x == FbAdversary::Map as u32 => Ok(Adversary::Map),
        x if x == FbAdversary::MaximumLikelihood as u32 => Ok(Adversary::MaximumLikelihood),
        other => Err(FbFailure(
            FbStatus::InvalidArgument,
            format!("unknown adversary {other}"),
        )),
    }
}

fn size(m: u64) -> Result<usize, FbFailure> {
    usize::try_from(m)
        .map_err(|_| FbFailure(FbStatus::InvalidArgument, format!("M = {m} is too large")))
}

/// Copies the calling thread's last error message into `buf` (NUL-terminated, truncated
/// to fit) and returns the full message length excluding the terminator. Returns 0 when
/// there is no message.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn fb_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a prior from `len` probabilities summing to 1.
///
/// # Safety
/// `probs` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fb_prior_new(
    probs: *const f64,
    len: usize,
    out: *mut *mut FbPrior,
) -> FbStatus {
    guard(|| {
        let p = Prior::new(slice(probs, len, "probs")?.to_vec())?;
        write_out(out, Box::into_raw(Box::new(FbPrior(p))), "out")
    })
}

/// Creates the uniform prior over `m` candidates. Very large `m` is stored symbolically.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fb_prior_uniform(m: u64, out: *mut *mut FbPrior) -> FbStatus {
    guard(|| {
        let p = Prior::uniform(size(m)?)?;
        write_out(out, Box::into_raw(Box::new(FbPrior(p))), "out")
    })
}

/// Releases a prior. Null is ignored.
///
/// # Safety
/// `prior` must come from `fb_prior_new`/`fb_prior_uniform` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fb_prior_free(prior: *mut FbPrior) {
    if !prior.is_null() {
        drop(Box::from_raw(prior));
    }
}

/// Number of candidates.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_prior_size(prior: *const FbPrior, out: *mut u64) -> FbStatus {
    guard(|| write_out(out, deref(prior, "prior")?.0.m() as u64, "out"))
}

/// Shannon entropy of the prior in nats.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_prior_entropy(prior: *const FbPrior, out: *mut f64) -> FbStatus {
    guard(|| write_out(out, entropy(&deref(prior, "prior")?.0), "out"))
}

/// Exact mutual information of randomized response with parameter `q`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_rr_exact_mi(q: f64, prior: *const FbPrior, out: *mut f64) -> FbStatus {
    guard(|| {
        let prior = &deref(prior, "prior")?.0;
        let mi = rr_exact_mi(&RrSpec::new(q, prior.m())?, prior)?;
        write_out(out, mi.value(), "out")
    })
}

/// Pure-DP parameter of randomized response over `m` candidates (infinite at `q = 0`).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fb_rr_epsilon_dp(q: f64, m: u64, out: *mut f64) -> FbStatus {
    guard(|| write_out(out, rr_epsilon_dp(&RrSpec::new(q, size(m)?)?), "out"))
}

/// Closed-form mutual-information bound for the Gaussian mechanism with sensitivity `delta`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_gaussian_thm2_mi(
    prior: *const FbPrior,
    delta: f64,
    sigma: f64,
    out: *mut f64,
) -> FbStatus {
    guard(|| {
        let mi = gaussian_mi_bound_thm2(&deref(prior, "prior")?.0, delta, sigma)?;
        write_out(out, mi.value(), "out")
    })
}

/// Creates a Gaussian mechanism over `m` encodings of dimension `d`, stored row-major.
/// The prior is copied.
///
/// # Safety
/// `encodings` must point to `m * d` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_gaussian_new(
    encodings: *const f64,
    m: usize,
    d: usize,
    sigma: f64,
    prior: *const FbPrior,
    out: *mut *mut FbGaussian,
) -> FbStatus {
    guard(|| {
        let n = m
            .checked_mul(d)
            .ok_or_else(|| FbFailure(FbStatus::InvalidArgument, "m * d overflows".into()))?;
        if d == 0 {
            return Err(FbFailure(
                FbStatus::InvalidArgument,
                "dimension must be positive".into(),
            ));
        }
        let data = slice(encodings, n, "encodings")?;
        let rows = data.chunks(d).map(<[f64]>::to_vec).collect();
        let spec = GaussianSpec::new(
            Encodings::from_rows(rows)?,
            sigma,
            deref(prior, "prior")?.0.clone(),
        )?;
        write_out(out, Box::into_raw(Box::new(FbGaussian(spec))), "out")
    })
}

/// Releases a Gaussian mechanism. Null is ignored.
///
/// # Safety
/// `g` must come from `fb_gaussian_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fb_gaussian_free(g: *mut FbGaussian) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// L2 sensitivity (largest pairwise encoding distance).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_gaussian_sensitivity(g: *const FbGaussian, out: *mut f64) -> FbStatus {
    guard(|| write_out(out, deref(g, "mechanism")?.0.sensitivity(), "out"))
}

/// Monte-Carlo estimate of the mechanism's mutual information and its standard error.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_gaussian_mc_mi(
    g: *const FbGaussian,
    n_samples: usize,
    seed: u64,
    value: *mut f64,
    stderr: *mut f64,
) -> FbStatus {
    guard(|| {
        if value.is_null() {
            return Err(null("value"));
        }
        if stderr.is_null() {
            return Err(null("stderr"));
        }
        let mi = gaussian_mi_monte_carlo(&deref(g, "mechanism")?.0, n_samples, seed)?;
        write_out(value, mi.value(), "value")?;
        write_out(stderr, mi.stderr().unwrap_or(0.0), "stderr")
    })
}

/// Fano bound from a mutual-information budget in nats.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_fano_bound(
    mi_nats: f64,
    prior: *const FbPrior,
    out: *mut FbAdvantageBound,
) -> FbStatus {
    guard(|| {
        let b = fano_advantage_bound(&MiBound::supplied(mi_nats)?, &deref(prior, "prior")?.0)?;
        write_out(out, to_c_bound(&b), "out")
    })
}

/// Generalized Fano bound from an order-`alpha` Arimoto-information budget.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_generalized_fano_bound(
    info_nats: f64,
    alpha: f64,
    prior: *const FbPrior,
    out: *mut FbAdvantageBound,
) -> FbStatus {
    guard(|| {
        let ib = MiBound::new(info_nats, alpha, MiKind::AnalyticBound, None, "supplied")?;
        let b = generalized_fano_bound(&ib, &deref(prior, "prior")?.0)?;
        write_out(out, to_c_bound(&b), "out")
    })
}

/// Tightest generalized Fano bound for the linear RDP curve `slope * alpha`, searched
/// over `n_alphas` orders (the default grid when `alphas` is null).
///
/// # Safety
/// `alphas` must be null or point to `n_alphas` doubles; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_generalized_fano_linear(
    slope: f64,
    alphas: *const f64,
    n_alphas: usize,
    prior: *const FbPrior,
    out: *mut FbAdvantageBound,
) -> FbStatus {
    guard(|| {
        let grid = if alphas.is_null() {
            default_alpha_grid()
        } else {
            slice(alphas, n_alphas, "alphas")?.to_vec()
        };
        let curve = RdpCurve::linear(slope)?;
        let b = best_generalized_fano(&curve, &deref(prior, "prior")?.0, &grid)?;
        write_out(out, to_c_bound(&b), "out")
    })
}

/// Reconstruction-robustness baseline for the linear RDP curve `slope * alpha`.
/// Requires a uniform prior.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_rero_linear(
    slope: f64,
    prior: *const FbPrior,
    out: *mut FbAdvantageBound,
) -> FbStatus {
    guard(|| {
        let b = rero_baseline_bound(&RdpCurve::linear(slope)?, &deref(prior, "prior")?.0)?;
        write_out(out, to_c_bound(&b), "out")
    })
}

/// Simulates the reconstruction game against randomized response. `adv` is an `FbAdversary`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_simulate_rr(
    q: f64,
    prior: *const FbPrior,
    adv: u32,
    n_trials: u64,
    seed: u64,
    out: *mut FbTrialReport,
) -> FbStatus {
    guard(|| {
        let prior = &deref(prior, "prior")?.0;
        let mech = MechanismInstance::RandomizedResponse(RrSpec::new(q, prior.m())?);
        let r = run_game(&mech, adversary(adv)?, prior, n_trials, seed)?;
        write_out(out, to_c_report(&r), "out")
    })
}

/// Simulates the reconstruction game against a Gaussian mechanism, using its prior.
/// `adv` is an `FbAdversary`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fb_simulate_gaussian(
    g: *const FbGaussian,
    adv: u32,
    n_trials: u64,
    seed: u64,
    out: *mut FbTrialReport,
) -> FbStatus {
    guard(|| {
        let spec = &deref(g, "mechanism")?.0;
        let mech = MechanismInstance::Gaussian(spec.clone());
        let r = run_game(&mech, adversary(adv)?, spec.prior(), n_trials, seed)?;
        write_out(out, to_c_report(&r), "out")
    })
}
