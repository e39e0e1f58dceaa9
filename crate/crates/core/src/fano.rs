//! Fano-type conversion of information bounds into reconstruction-advantage bounds.
//!
//! For an information budget `I(X; Y) <= eps`, every adversary's error probability `t`
//! satisfies `f_eps(t) <= 0` with
//! `f_eps(t) = H(X) - eps + t ln t + (1 - t) ln(1 - t) - t ln(M - 1)`.
//! `f_eps` decreases on `[0, 1 - 1/M]`, so the smallest feasible error is found by
//! bisection on that bracket. The order-`alpha` variant replaces the Shannon terms by
//! the Rényi entropy and the Bernoulli Rényi divergence to `Bernoulli(1 - 1/M)`.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::info_theory::{entropy, renyi_divergence, renyi_entropy, Prior};
use crate::mi_bounds::{mi_from_rdp, MiBound, RdpCurve};
use crate::numeric::{bisect_first_nonpositive, golden_section_min, log_space, xlogx};

/// Bisection stops once the bracket is narrower than this.
pub const BISECTION_TOLERANCE: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;
/// Step of the sign pre-scan used before bisecting the order-`alpha` constraint.
pub const PRESCAN_STEP: f64 = 1e-3;
/// Slack on the endpoint condition `f(1 - 1/M) <= 0`, absorbing rounding in `H(X)`.
const ENDPOINT_SLACK: f64 = 1e-12;

/// Smallest order on the baseline's search grid, `1 + 2^-6`.
pub const RERO_MIN_ORDER: f64 = 1.0 + 1.0 / 64.0;
/// Largest order on the baseline's search grid, `2^12`.
pub const RERO_MAX_ORDER: f64 = 4096.0;
const RERO_GRID_POINTS: usize = 257;

/// Which inequality produced a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMethod {
    Fano,
    GeneralizedFano { alpha: f64 },
    Rero { alpha: f64 },
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundMethod::Fano => f.write_str("fano"),
            BoundMethod::GeneralizedFano { alpha } => write!(f, "generalized-fano({alpha})"),
            BoundMethod::Rero { .. } => f.write_str("rero"),
        }
    }
}

impl Serialize for BoundMethod {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Upper bound on the reconstruction advantage of any adversary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdvantageBound {
    /// Lower bound on the error probability.
    pub t_star: f64,
    /// Upper bound on the success probability, `1 - t_star`.
    pub success_upper: f64,
    pub p_star: f64,
    /// `(success_upper - p_star) / (1 - p_star)` clamped to `[0, 1]`.
    pub advantage: f64,
    pub method: BoundMethod,
    /// Order of the information quantity consumed.
    pub alpha: f64,
    /// Information budget consumed, in nats.
    pub info_bound: f64,
    pub m: usize,
    /// True when the budget reaches the prior's entropy and nothing can be concluded.
    pub vacuous: bool,
}

impl AdvantageBound {
    fn vacuous(prior: &Prior, method: BoundMethod, alpha: f64, info_bound: f64) -> Self {
        Self {
            t_star: 0.0,
            success_upper: 1.0,
            p_star: prior.p_star(),
            advantage: 1.0,
            method,
            alpha,
            info_bound,
            m: prior.m(),
            vacuous: true,
        }
    }

    fn from_error_bound(
        t_star: f64,
        prior: &Prior,
        method: BoundMethod,
        alpha: f64,
        info_bound: f64,
    ) -> Result<Self> {
        let success_upper = 1.0 - t_star;
        Ok(Self {
            t_star,
            success_upper,
            p_star: prior.p_star(),
            advantage: advantage_from_success(success_upper, prior.p_star())?,
            method,
            alpha,
            info_bound,
            m: prior.m(),
            vacuous: false,
        })
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("{name} = {v} must lie in [0, 1]")));
    }
    Ok(())
}

/// Unclamped advantage; negative when the adversary does worse than the Bayes baseline.
pub fn advantage_from_success_unclamped(success: f64, p_star: f64) -> Result<f64> {
    check_probability("success", success)?;
    check_probability("p_star", p_star)?;
    if p_star >= 1.0 {
        return Err(Error::invalid("advantage is undefined when p_star = 1"));
    }
    Ok((success - p_star) / (1.0 - p_star))
}

/// Advantage clamped to `[0, 1]`, the form used for reporting bounds.
pub fn advantage_from_success(success: f64, p_star: f64) -> Result<f64> {
    advantage_from_success_unclamped(success, p_star).map(|a| a.clamp(0.0, 1.0))
}

/// Advantage bound implied by `(0, gamma)`-reconstruction robustness under zero-one loss.
pub fn rero_to_advantage(gamma: f64, p_star: f64) -> Result<f64> {
    check_probability("gamma", gamma)?;
    advantage_from_success(gamma, p_star)
}

/// Fano constraint `f_eps(t)` for an information budget `eps` and prior entropy `h`.
pub fn f_eps(t: f64, h: f64, eps: f64, m: usize) -> f64 {
    h - eps + xlogx(t) + xlogx(1.0 - t) - t * ((m as f64) - 1.0).ln()
}

fn fano_from_budget(eps: f64, prior: &Prior, method: BoundMethod) -> Result<AdvantageBound> {
    let h = entropy(prior);
    let m = prior.m();
    if eps >= h {
        return Ok(AdvantageBound::vacuous(prior, method, 1.0, eps));
    }
    let hi = 1.0 - 1.0 / m as f64;
    if eps == 0.0 && prior.is_uniform() {
        // The root sits exactly at the tangency point, where bisection only resolves ~1e-8.
        return AdvantageBound::from_error_bound(hi, prior, method, 1.0, eps);
    }
    let f = |t: f64| f_eps(t, h, eps, m);
    let (f0, fhi) = (f(0.0), f(hi));
    if !(f0 > 0.0) {
        return Err(Error::NumericAssertion(format!(
            "f_eps(0) = {f0} is not > 0 (H = {h}, eps = {eps})"
        )));
    }
    if !(fhi <= ENDPOINT_SLACK * (1.0 + h)) {
        return Err(Error::NumericAssertion(format!(
            "f_eps(1 - 1/M) = {fhi} is not <= 0 (H = {h}, eps = {eps}, M = {m})"
        )));
    }
    let t_star = bisect_first_nonpositive(f, 0.0, hi, BISECTION_TOLERANCE, BISECTION_MAX_ITER);
    AdvantageBound::from_error_bound(t_star, prior, method, 1.0, eps)
}

/// Fano advantage bound from an order-1 information bound.
pub fn fano_advantage_bound(mi: &MiBound, prior: &Prior) -> Result<AdvantageBound> {
    if mi.order() != 1.0 {
        return Err(Error::invalid(format!(
            "Fano's inequality needs an order-1 bound, got order {}",
            mi.order()
        )));
    }
    fano_from_budget(mi.value(), prior, BoundMethod::Fano)
}

/// Order-`alpha` Fano constraint:
/// `H_alpha(p) - eps - ln M + D_alpha(Bernoulli(t) || Bernoulli(1 - 1/M))`.
pub fn generalized_fano_constraint(t: f64, h_alpha: f64, eps: f64, m: usize, alpha: f64) -> f64 {
    let inv_m = 1.0 / m as f64;
    let div =
        renyi_divergence(&[t, 1.0 - t], &[1.0 - inv_m, inv_m], alpha).unwrap_or(f64::INFINITY);
    h_alpha - eps - (m as f64).ln() + div
}

/// Generalized Fano advantage bound from an order-`alpha` Arimoto-information bound.
///
/// At `alpha = 1` this is exactly [`fano_advantage_bound`].
pub fn generalized_fano_bound(ib: &MiBound, prior: &Prior) -> Result<AdvantageBound> {
    let alpha = ib.order();
    let eps = ib.value();
    let method = BoundMethod::GeneralizedFano { alpha };
    if alpha == 1.0 {
        return fano_from_budget(eps, prior, method);
    }
    let h_alpha = renyi_entropy(prior, alpha)?;
    let m = prior.m();
    if eps >= h_alpha {
        return Ok(AdvantageBound::vacuous(prior, method, alpha, eps));
    }
    let hi = 1.0 - 1.0 / m as f64;
    if eps == 0.0 && prior.is_uniform() {
        return AdvantageBound::from_error_bound(hi, prior, method, alpha, eps);
    }
    let g = |t: f64| generalized_fano_constraint(t, h_alpha, eps, m, alpha);
    let g0 = g(0.0);
    if !(g0 > 0.0) {
        return Err(Error::NumericAssertion(format!(
            "order-{alpha} constraint at t = 0 is {g0}, not > 0"
        )));
    }
    let slack = ENDPOINT_SLACK * (1.0 + h_alpha);
    let ghi = g(hi);
    if !(ghi <= slack) {
        return Err(Error::NumericAssertion(format!(
            "order-{alpha} constraint at t = 1 - 1/M is {ghi}, not <= 0"
        )));
    }

    // Seed the bracket with the first sign change on a coarse scan, so a
    // non-monotone constraint still yields the smallest feasible t.
    let steps = (hi / PRESCAN_STEP).ceil() as usize;
    let mut lo = 0.0;
    let mut upper = hi;
    for i in 1..=steps {
        let t = if i == steps {
            hi
        } else {
            i as f64 * PRESCAN_STEP
        };
        let v = g(t);
        if v <= 0.0 || (i == steps && v <= slack) {
            upper = t;
            break;
        }
        lo = t;
    }
    let t_star = if lo >= upper {
        upper
    } else {
        bisect_first_nonpositive(g, lo, upper, BISECTION_TOLERANCE, BISECTION_MAX_ITER)
    };
    AdvantageBound::from_error_bound(t_star, prior, method, alpha, eps)
}

/// Tightest generalized Fano bound over a grid of orders for an RDP curve.
pub fn best_generalized_fano(
    curve: &RdpCurve,
    prior: &Prior,
    alpha_grid: &[f64],
) -> Result<AdvantageBound> {
    if alpha_grid.is_empty() {
        return Err(Error::invalid("order grid is empty"));
    }
    if let Some(bad) = alpha_grid.iter().find(|a| !(**a >= 1.0)) {
        return Err(Error::invalid(format!("order {bad} must be >= 1")));
    }
    let mut best: Option<AdvantageBound> = None;
    for &alpha in alpha_grid {
        let bound = generalized_fano_bound(&mi_from_rdp(curve, alpha)?, prior)?;
        if best
            .as_ref()
            .is_none_or(|b| bound.success_upper < b.success_upper)
        {
            best = Some(bound);
        }
    }
    Ok(best.expect("grid is nonempty"))
}

/// Default order grid for the generalized Fano search.
pub fn default_alpha_grid() -> Vec<f64> {
    vec![
        1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 64.0,
    ]
}

/// `ln` of the baseline success bound `(e^eps(alpha) / M)^((alpha - 1) / alpha)`.
fn rero_log_success(curve: &RdpCurve, alpha: f64, log_m: f64) -> f64 {
    match curve.eval(alpha) {
        Ok(eps) if eps.is_finite() => (alpha - 1.0) / alpha * (eps - log_m),
        Ok(_) => f64::INFINITY,
        Err(_) => f64::INFINITY,
    }
}

/// Baseline success bound derived from reconstruction robustness of RDP mechanisms,
/// minimized over the order.
///
/// Orders are scanned on a log-spaced grid over `[1 + 2^-6, 2^12]` (intersected with the
/// curve domain), refined by golden-section search around the best grid point, and the
/// `alpha -> inf` limit is included when the curve knows it. Restricted to uniform priors.
pub fn rero_baseline_bound(curve: &RdpCurve, prior: &Prior) -> Result<AdvantageBound> {
    if !prior.is_uniform() {
        return Err(Error::invalid(
            "the reconstruction-robustness baseline needs a uniform prior",
        ));
    }
    let m = prior.m();
    let log_m = (m as f64).ln();
    let (dmin, dmax) = curve.domain();
    let grid: Vec<f64> = log_space(RERO_MIN_ORDER, RERO_MAX_ORDER, RERO_GRID_POINTS)
        .into_iter()
        .filter(|&a| a > 1.0 && a >= dmin && a <= dmax)
        .collect();

    let mut best_alpha = f64::NAN;
    let mut best_log = f64::INFINITY;
    if !grid.is_empty() {
        let values: Vec<f64> = grid
            .iter()
            .map(|&a| rero_log_success(curve, a, log_m))
            .collect();
        let (i, &v) =
            values.iter().enumerate().fold(
                (0, &values[0]),
                |acc, (i, v)| if *v < *acc.1 { (i, v) } else { acc },
            );
        best_alpha = grid[i];
        best_log = v;
        if v.is_finite() {
            let a = grid[i.saturating_sub(1)];
            let b = grid[(i + 1).min(grid.len() - 1)];
            if b > a {
                let (ra, rv) =
                    golden_section_min(|x| rero_log_success(curve, x, log_m), a, b, 1e-10, 200);
                if rv < best_log {
                    best_alpha = ra;
                    best_log = rv;
                }
            }
        }
    }
    let mut info_bound = curve.eval(best_alpha).unwrap_or(f64::INFINITY);
    if let Some(limit) = curve.limit_at_infinity() {
        if dmax == f64::INFINITY && limit.is_finite() && limit - log_m < best_log {
            best_log = limit - log_m;
            best_alpha = f64::INFINITY;
            info_bound = limit;
        }
    }
    let success = if best_log >= 0.0 {
        1.0
    } else {
        best_log.exp().min(1.0)
    };
    let method = BoundMethod::Rero { alpha: best_alpha };
    let mut out =
        AdvantageBound::from_error_bound(1.0 - success, prior, method, best_alpha, info_bound)?;
    out.vacuous = success >= 1.0;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mi_bounds::{gaussian_rdp_curve, rr_exact_mi, MiKind, RrSpec};

    fn mi(v: f64) -> MiBound {
        MiBound::supplied(v).unwrap()
    }

    #[test]
    fn advantage_examples() {
        assert_eq!(advantage_from_success(0.3, 0.3).unwrap(), 0.0);
        assert_eq!(advantage_from_success(1.0, 0.3).unwrap(), 1.0);
        assert!((advantage_from_success(0.55, 0.1).unwrap() - 0.5).abs() < 1e-15);
        assert!(advantage_from_success(0.5, 1.0).is_err());
        assert_eq!(advantage_from_success(0.2, 0.3).unwrap(), 0.0);
        assert!(advantage_from_success_unclamped(0.2, 0.3).unwrap() < 0.0);
    }

    #[test]
    fn rero_to_advantage_examples() {
        assert_eq!(rero_to_advantage(0.1, 0.1).unwrap(), 0.0);
        assert_eq!(rero_to_advantage(1.0, 0.1).unwrap(), 1.0);
        let a = rero_to_advantage(0.485, 0.1).unwrap();
        assert!((a - 0.385 / 0.9).abs() < 1e-15);
        assert!(rero_to_advantage(0.5, 1.0).is_err());
    }

    #[test]
    fn f_eps_examples() {
        let h = 10f64.ln();
        assert!(f_eps(0.9, h, 0.0, 10).abs() < 1e-14);
        assert_eq!(f_eps(0.0, 1.3, 0.2, 7), 1.3 - 0.2);
        // ln 10 - ln 2 - 0.5 ln 9
        let v = f_eps(0.5, h, 0.0, 10);
        assert!((v - (h - 2f64.ln() - 0.5 * 9f64.ln())).abs() < 1e-14);
        assert!((v - 0.510_825_623_765_990_7).abs() < 1e-12);
    }

    #[test]
    fn fano_vacuous_branch() {
        let u = Prior::uniform(10).unwrap();
        let b = fano_advantage_bound(&mi(10f64.ln()), &u).unwrap();
        assert!(b.vacuous);
        assert_eq!(b.advantage, 1.0);
        assert_eq!(b.t_star, 0.0);
        assert_eq!(fano_advantage_bound(&mi(99.0), &u).unwrap().advantage, 1.0);
    }

    #[test]
    fn fano_zero_budget_gives_zero_advantage() {
        for m in [2usize, 3, 10, 1000] {
            let b = fano_advantage_bound(&mi(0.0), &Prior::uniform(m).unwrap()).unwrap();
            assert_eq!(b.t_star, 1.0 - 1.0 / m as f64, "m={m}");
            assert!(b.advantage < 1e-15, "m={m} {b:?}");
        }
    }

    #[test]
    fn fano_tight_for_randomized_response() {
        let u = Prior::uniform(10).unwrap();
        let exact = rr_exact_mi(&RrSpec::new(0.5, 10).unwrap(), &u).unwrap();
        let b = fano_advantage_bound(&exact, &u).unwrap();
        assert!((b.t_star - 0.45).abs() < 1e-9, "{b:?}");
        assert!((b.advantage - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fano_rejects_higher_order() {
        let b = MiBound::new(0.1, 2.0, MiKind::RdpDerived, None, "").unwrap();
        assert!(fano_advantage_bound(&b, &Prior::uniform(3).unwrap()).is_err());
    }

    #[test]
    fn generalized_reduces_to_fano() {
        let p = Prior::new(vec![0.5, 0.3, 0.2]).unwrap();
        for eps in [0.0, 0.1, 0.5, 0.9] {
            let a = fano_advantage_bound(&mi(eps), &p).unwrap();
            let g = generalized_fano_bound(&mi(eps), &p).unwrap();
            assert_eq!(a.t_star, g.t_star);
            assert_eq!(a.advantage, g.advantage);
        }
    }

    #[test]
    fn generalized_vacuous_branch() {
        let p = Prior::new(vec![0.7, 0.2, 0.1]).unwrap();
        let h2 = renyi_entropy(&p, 2.0).unwrap();
        let b = MiBound::new(h2, 2.0, MiKind::RdpDerived, None, "").unwrap();
        let out = generalized_fano_bound(&b, &p).unwrap();
        assert!(out.vacuous);
        assert_eq!(out.advantage, 1.0);
    }

    #[test]
    fn generalized_zero_budget_is_baseline() {
        let u = Prior::uniform(10).unwrap();
        let b = MiBound::new(0.0, 3.0, MiKind::RdpDerived, None, "").unwrap();
        let out = generalized_fano_bound(&b, &u).unwrap();
        assert_eq!(out.advantage, 0.0);
    }

    #[test]
    fn best_generalized_examples() {
        let u = Prior::uniform(10).unwrap();
        let zero = RdpCurve::constant(0.0).unwrap();
        let b = best_generalized_fano(&zero, &u, &default_alpha_grid()).unwrap();
        assert_eq!(b.advantage, 0.0);
        let g = gaussian_rdp_curve(2f64.sqrt(), 1.0).unwrap();
        let only_one = best_generalized_fano(&g, &u, &[1.0]).unwrap();
        let plain = fano_advantage_bound(&mi(1.0), &u).unwrap();
        assert_eq!(only_one.advantage, plain.advantage);
        assert!(best_generalized_fano(&g, &u, &[]).is_err());
        assert!(best_generalized_fano(&g, &u, &[0.5]).is_err());
    }

    #[test]
    fn rero_zero_curve_reaches_baseline() {
        let u = Prior::uniform(10).unwrap();
        let b = rero_baseline_bound(&RdpCurve::constant(0.0).unwrap(), &u).unwrap();
        assert!(b.advantage < 1e-12, "{b:?}");
        let lin = rero_baseline_bound(&RdpCurve::linear(0.0).unwrap(), &u).unwrap();
        assert!(lin.advantage < 1e-12);
    }

    #[test]
    fn rero_constant_curve_above_log_m_clamps() {
        let u = Prior::uniform(10).unwrap();
        let b = rero_baseline_bound(&RdpCurve::constant(11f64.ln()).unwrap(), &u).unwrap();
        assert_eq!(b.success_upper, 1.0);
        assert_eq!(b.advantage, 1.0);
    }

    #[test]
    fn rero_gaussian_matches_stationary_point() {
        let u = Prior::uniform(10).unwrap();
        let (delta, sigma) = (2f64.sqrt(), 1.5);
        let slope = delta * delta / (2.0 * sigma * sigma);
        let log_m = 10f64.ln();
        let a_star = (log_m / slope).sqrt();
        let s_star = ((a_star - 1.0) / a_star * (slope * a_star - log_m)).exp();
        let b = rero_baseline_bound(&gaussian_rdp_curve(delta, sigma).unwrap(), &u).unwrap();
        assert!((a_star - 2.276).abs() < 1e-3);
        assert!(
            (b.success_upper - s_star).abs() < 1e-12,
            "{b:?} vs {s_star}"
        );
        assert!((b.success_upper - 0.485).abs() < 1e-3);
        assert!((b.advantage - 0.428).abs() < 1e-3);
        match b.method {
            BoundMethod::Rero { alpha } => assert!((alpha - a_star).abs() < 1e-4),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rero_rejects_non_uniform() {
        let p = Prior::new(vec![0.5, 0.3, 0.2]).unwrap();
        assert!(rero_baseline_bound(&RdpCurve::constant(0.1).unwrap(), &p).is_err());
    }

    #[test]
    fn method_names() {
        assert_eq!(BoundMethod::Fano.to_string(), "fano");
        assert_eq!(
            BoundMethod::GeneralizedFano { alpha: 2.0 }.to_string(),
            "generalized-fano(2)"
        );
        assert_eq!(BoundMethod::Rero { alpha: 3.0 }.to_string(), "rero");
    }
}
