use serde::Serialize;

use crate::error::{Error, Result};
use crate::info_theory::{mutual_information, renyi_divergence, ChannelMatrix, Prior};

use super::{MiBound, MiKind, RdpCurve};

/// Generalized randomized response: release the secret with probability `1 - q`,
/// otherwise a uniformly random candidate (which may coincide with the secret).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RrSpec {
    q: f64,
    m: usize,
}

impl RrSpec {
    pub fn new(q: f64, m: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::invalid(format!("q = {q} must lie in [0, 1]")));
        }
        if m < 2 {
            return Err(Error::invalid(format!("M = {m} must be >= 2")));
        }
        Ok(Self { q, m })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `P(Y = x | X = x)`.
    pub fn keep_probability(&self) -> f64 {
        1.0 - self.q + self.q / self.m as f64
    }

    /// `P(Y = y | X = x)` for `y != x`.
    pub fn flip_probability(&self) -> f64 {
        self.q / self.m as f64
    }
}

pub fn rr_channel(spec: &RrSpec) -> ChannelMatrix {
    let m = spec.m();
    let (keep, flip) = (spec.keep_probability(), spec.flip_probability());
    let mut data = vec![flip; m * m];
    for x in 0..m {
        data[x * m + x] = keep;
    }
    ChannelMatrix::new(m, m, data).expect("randomized-response rows are distributions")
}

/// Pure-DP level of randomized response; `+inf` at `q = 0`.
pub fn rr_epsilon_dp(spec: &RrSpec) -> f64 {
    if spec.q() == 0.0 {
        return f64::INFINITY;
    }
    (spec.keep_probability() / spec.flip_probability()).ln()
}

/// Exact `I(X; Y)` of randomized response under `prior`.
pub fn rr_exact_mi(spec: &RrSpec, prior: &Prior) -> Result<MiBound> {
    if prior.m() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            got: prior.m(),
        });
    }
    let mi = mutual_information(prior, &rr_channel(spec))?;
    MiBound::new(
        mi.max(0.0),
        1.0,
        MiKind::Exact,
        None,
        format!(
            "exact randomized-response MI (q={}, M={})",
            spec.q(),
            spec.m()
        ),
    )
}

/// Constant curve at the pure-DP level, valid because max divergence dominates every order.
pub fn rr_rdp_curve(spec: &RrSpec) -> RdpCurve {
    RdpCurve::constant(rr_epsilon_dp(spec)).expect("epsilon-DP level is nonnegative")
}

/// Exact Rényi-DP curve of randomized response: the order-`alpha` divergence between two
/// distinct rows of the channel. Tends to [`rr_epsilon_dp`] as `alpha -> inf`.
pub fn rr_exact_rdp_curve(spec: &RrSpec) -> RdpCurve {
    let spec = *spec;
    let eps_dp = rr_epsilon_dp(&spec);
    let m = spec.m();
    let row = move |x: usize| -> Vec<f64> {
        (0..m)
            .map(|y| {
                if y == x {
                    spec.keep_probability()
                } else {
                    spec.flip_probability()
                }
            })
            .collect()
    };
    let (r0, r1) = (row(0), row(1));
    RdpCurve::from_fn(
        format!("randomized-response(q={}, M={m})", spec.q()),
        1.0,
        f64::INFINITY,
        move |a| renyi_divergence(&r0, &r1, a).unwrap_or(f64::INFINITY),
    )
    .expect("Rényi divergence is nondecreasing in the order")
    .with_limit(eps_dp)
}
