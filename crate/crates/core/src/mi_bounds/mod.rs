//! Mutual- and Arimoto-information bounds for concrete mechanisms.

mod gaussian;
mod rdp;
mod rr;

pub use gaussian::{
    gaussian_mi_bound_thm2, gaussian_mi_monte_carlo, pairwise_sensitivity, Encodings, GaussianSpec,
    DEFAULT_MC_SAMPLES, MIN_MC_SAMPLES,
};
pub use rdp::{dpsgd_rdp_curve, gaussian_rdp_curve, mi_from_rdp, RdpCurve, MONOTONICITY_GRID};
pub use rr::{rr_channel, rr_epsilon_dp, rr_exact_mi, rr_exact_rdp_curve, rr_rdp_curve, RrSpec};

use serde::Serialize;

use crate::error::{Error, Result};

/// Where an information value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiKind {
    Exact,
    AnalyticBound,
    RdpDerived,
    MonteCarlo,
}

impl std::fmt::Display for MiKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MiKind::Exact => "exact",
            MiKind::AnalyticBound => "analytic-bound",
            MiKind::RdpDerived => "rdp-derived",
            MiKind::MonteCarlo => "monte-carlo",
        })
    }
}

/// An upper bound on (or estimate of) `I_alpha(X; Y)` in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiBound {
    value: f64,
    order: f64,
    kind: MiKind,
    stderr: Option<f64>,
    description: String,
}

impl MiBound {
    pub fn new(
        value: f64,
        order: f64,
        kind: MiKind,
        stderr: Option<f64>,
        description: impl Into<String>,
    ) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::invalid(format!(
                "information value {value} must be >= 0"
            )));
        }
        if !(order >= 1.0) {
            return Err(Error::invalid(format!("order {order} must be >= 1")));
        }
        match (kind, stderr) {
            (MiKind::MonteCarlo, Some(s)) if s >= 0.0 && s.is_finite() => {}
            (MiKind::MonteCarlo, _) => {
                return Err(Error::invalid(
                    "a Monte-Carlo estimate needs a finite stderr >= 0",
                ))
            }
            (_, Some(_)) => {
                return Err(Error::invalid("only Monte-Carlo estimates carry a stderr"))
            }
            (_, None) => {}
        }
        Ok(Self {
            value,
            order,
            kind,
            stderr,
            description: description.into(),
        })
    }

    /// A caller-supplied order-1 bound `I(X; Y) <= value`.
    pub fn supplied(value: f64) -> Result<Self> {
        Self::new(
            value,
            1.0,
            MiKind::AnalyticBound,
            None,
            "supplied mutual-information bound",
        )
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn kind(&self) -> MiKind {
        self.kind
    }

    pub fn stderr(&self) -> Option<f64> {
        self.stderr
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}
