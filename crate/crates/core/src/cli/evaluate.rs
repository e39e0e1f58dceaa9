//! Evaluation of every applicable bound family at a single parameter point.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fano::{
    best_generalized_fano, fano_advantage_bound, rero_baseline_bound, AdvantageBound,
};
use crate::info_theory::Prior;
use crate::mi_bounds::{
    gaussian_mi_bound_thm2, gaussian_mi_monte_carlo, gaussian_rdp_curve, mi_from_rdp, rr_exact_mi,
    rr_rdp_curve, GaussianSpec, MiBound, RdpCurve, RrSpec,
};

/// Bound families, named as in the CLI output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Fano with a caller-supplied information bound.
    Fano,
    FanoExact,
    FanoThm1,
    FanoThm2,
    FanoMc,
    GenFano,
    Rero,
}

impl BoundKind {
    pub const SWEEP_COLUMNS: [BoundKind; 6] = [
        BoundKind::FanoExact,
        BoundKind::FanoThm1,
        BoundKind::FanoThm2,
        BoundKind::FanoMc,
        BoundKind::GenFano,
        BoundKind::Rero,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::Fano => "fano",
            BoundKind::FanoExact => "fano-exact",
            BoundKind::FanoThm1 => "fano-thm1",
            BoundKind::FanoThm2 => "fano-thm2",
            BoundKind::FanoMc => "fano-mc",
            BoundKind::GenFano => "gen-fano",
            BoundKind::Rero => "rero",
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [BoundKind::Fano]
            .into_iter()
            .chain(BoundKind::SWEEP_COLUMNS)
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown bound {s:?}")))
    }
}

/// What produces the information budget at one point.
#[derive(Debug, Clone)]
pub enum PointSource {
    RandomizedResponse(RrSpec),
    Gaussian(GaussianSpec),
    /// Gaussian mechanism known only through its sensitivity and noise scale.
    GaussianSensitivity {
        delta: f64,
        sigma: f64,
    },
    Curve(RdpCurve),
    MutualInformation(f64),
}

impl PointSource {
    pub fn applicable(&self) -> &'static [BoundKind] {
        match self {
            PointSource::RandomizedResponse(_) => &[
                BoundKind::FanoExact,
                BoundKind::FanoThm1,
                BoundKind::GenFano,
                BoundKind::Rero,
            ],
            PointSource::Gaussian(_) => &[
                BoundKind::FanoThm1,
                BoundKind::FanoThm2,
                BoundKind::FanoMc,
                BoundKind::GenFano,
                BoundKind::Rero,
            ],
            PointSource::GaussianSensitivity { .. } => &[
                BoundKind::FanoThm1,
                BoundKind::FanoThm2,
                BoundKind::GenFano,
                BoundKind::Rero,
            ],
            PointSource::Curve(_) => &[BoundKind::FanoThm1, BoundKind::GenFano, BoundKind::Rero],
            PointSource::MutualInformation(_) => &[BoundKind::Fano],
        }
    }

    fn curve(&self) -> Result<RdpCurve> {
        match self {
            PointSource::RandomizedResponse(s) => Ok(rr_rdp_curve(s)),
            PointSource::Gaussian(g) => gaussian_rdp_curve(g.sensitivity(), g.sigma()),
            PointSource::GaussianSensitivity { delta, sigma } => gaussian_rdp_curve(*delta, *sigma),
            PointSource::Curve(c) => Ok(c.clone()),
            PointSource::MutualInformation(_) => {
                Err(Error::invalid("a bare information bound has no RDP curve"))
            }
        }
    }
}

/// Knobs shared by every evaluation.
#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub alpha_grid: Vec<f64>,
    pub mc_samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct EvaluatedBound {
    pub kind: BoundKind,
    pub bound: AdvantageBound,
    /// Standard error of the consumed information value (Monte-Carlo only).
    pub info_stderr: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct PointResult {
    pub bounds: Vec<EvaluatedBound>,
    pub monte_carlo: Option<MiBound>,
}

impl PointResult {
    pub fn get(&self, kind: BoundKind) -> Option<&AdvantageBound> {
        self.bounds
            .iter()
            .find(|b| b.kind == kind)
            .map(|b| &b.bound)
    }
}

/// Computes the requested bounds, in the order given.
pub fn evaluate_point(
    source: &PointSource,
    prior: &Prior,
    kinds: &[BoundKind],
    opts: &EvalOptions,
) -> Result<PointResult> {
    let mut out = PointResult::default();
    for &kind in kinds {
        if !source.applicable().contains(&kind) {
            return Err(Error::invalid(format!(
                "bound {kind} does not apply to this source"
            )));
        }
        let mut info_stderr = None;
        let bound = match (kind, source) {
            (BoundKind::Fano, PointSource::MutualInformation(v)) => {
                fano_advantage_bound(&MiBound::supplied(*v)?, prior)?
            }
            (BoundKind::FanoExact, PointSource::RandomizedResponse(s)) => {
                fano_advantage_bound(&rr_exact_mi(s, prior)?, prior)?
            }
            (BoundKind::FanoThm1, _) => {
                fano_advantage_bound(&mi_from_rdp(&source.curve()?, 1.0)?, prior)?
            }
            (BoundKind::FanoThm2, PointSource::Gaussian(g)) => fano_advantage_bound(
                &gaussian_mi_bound_thm2(prior, g.sensitivity(), g.sigma())?,
                prior,
            )?,
            (BoundKind::FanoThm2, PointSource::GaussianSensitivity { delta, sigma }) => {
                fano_advantage_bound(&gaussian_mi_bound_thm2(prior, *delta, *sigma)?, prior)?
            }
            (BoundKind::FanoMc, PointSource::Gaussian(g)) => {
                let mc = gaussian_mi_monte_carlo(g, opts.mc_samples, opts.seed)?;
                info_stderr = mc.stderr();
                let b = fano_advantage_bound(&mc, prior)?;
                out.monte_carlo = Some(mc);
                b
            }
            (BoundKind::GenFano, _) => {
                best_generalized_fano(&source.curve()?, prior, &opts.alpha_grid)?
            }
            (BoundKind::Rero, _) => rero_baseline_bound(&source.curve()?, prior)?,
            (kind, _) => {
                return Err(Error::invalid(format!(
                    "bound {kind} does not apply to this source"
                )))
            }
        };
        out.bounds.push(EvaluatedBound {
            kind,
            bound,
            info_stderr,
        });
    }
    Ok(out)
}

/// Every applicable bound, dropping the baseline when the prior is not uniform.
pub fn default_kinds(source: &PointSource, prior: &Prior) -> Vec<BoundKind> {
    source
        .applicable()
        .iter()
        .copied()
        .filter(|k| *k != BoundKind::Rero || prior.is_uniform())
        .collect()
}
