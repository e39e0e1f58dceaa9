//! Simulation of the reconstruction game: draw a secret index from the prior, release
//! it through a mechanism, let an adversary guess, and score exact recovery.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fano::advantage_from_success_unclamped;
use crate::info_theory::Prior;
use crate::mi_bounds::{GaussianSpec, RrSpec};
use crate::rng::{stream_rng, DOMAIN_GAME};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq)]
pub enum MechanismInstance {
    RandomizedResponse(RrSpec),
    Gaussian(GaussianSpec),
}

impl MechanismInstance {
    pub fn m(&self) -> usize {
        match self {
            MechanismInstance::RandomizedResponse(s) => s.m(),
            MechanismInstance::Gaussian(s) => s.m(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MechanismInstance::RandomizedResponse(_) => "randomized-response",
            MechanismInstance::Gaussian(_) => "gaussian",
        }
    }
}

/// Adversary strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adversary {
    /// Posterior maximizer using the prior.
    Map,
    /// Likelihood maximizer that ignores the prior.
    MaximumLikelihood,
}

impl Adversary {
    pub fn name(&self) -> &'static str {
        match self {
            Adversary::Map => "map",
            Adversary::MaximumLikelihood => "ml",
        }
    }
}

impl std::str::FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "map" => Ok(Adversary::Map),
            "ml" | "mle" => Ok(Adversary::MaximumLikelihood),
            other => Err(Error::invalid(format!("unknown adversary {other:?}"))),
        }
    }
}

/// Outcome of a simulated attack campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub n_trials: u64,
    pub successes: u64,
    pub empirical_success: f64,
    /// `(success - p_star) / (1 - p_star)`, not clamped.
    pub empirical_advantage: f64,
    /// 95% Wilson interval on the success rate.
    pub success_ci_low: f64,
    pub success_ci_high: f64,
    /// The Wilson interval mapped through the advantage transform.
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_star: f64,
    pub seed: u64,
    pub adversary_name: String,
}

impl TrialReport {
    /// Wilson standard error of the success rate, the interval half-width over `z`.
    pub fn success_stderr(&self) -> f64 {
        (self.success_ci_high - self.success_ci_low) / (2.0 * Z_95)
    }

    /// Wilson standard error mapped to the advantage scale.
    pub fn advantage_stderr(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z_95)
    }

    pub fn error_rate(&self) -> f64 {
        1.0 - self.empirical_success
    }
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = successes as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

pub fn sample_secret<R: Rng + ?Sized>(prior: &Prior, rng: &mut R) -> usize {
    prior.sample(rng)
}

/// Randomized response on secret `k`; the uniform branch may re-emit `k`.
pub fn run_rr<R: Rng + ?Sized>(k: usize, spec: &RrSpec, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    if u < 1.0 - spec.q() {
        k
    } else {
        rng.random_range(0..spec.m())
    }
}

/// Gaussian mechanism on secret `k`: `e_k` plus independent `N(0, sigma^2)` noise.
pub fn run_gaussian<R: Rng + ?Sized>(k: usize, spec: &GaussianSpec, rng: &mut R) -> Vec<f64> {
    let sigma = spec.sigma();
    spec.encodings()
        .row(k)
        .iter()
        .map(|&e| {
            let z: f64 = StandardNormal.sample(rng);
            e + sigma * z
        })
        .collect()
}

/// First index of the largest score.
fn argmax(scores: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, v) in scores.enumerate() {
        if v > best_v || (i == 0 && v == f64::NEG_INFINITY) {
            best = i;
            best_v = v;
        }
    }
    best
}

fn rr_guess(y: usize, spec: &RrSpec, prior: &Prior) -> usize {
    let (keep, flip) = (spec.keep_probability(), spec.flip_probability());
    argmax((0..spec.m()).map(|m| if m == y { keep } else { flip } * prior.prob(m)))
}

/// MAP estimate of the secret from a randomized-response output.
pub fn map_adversary_rr(y: usize, spec: &RrSpec, prior: &Prior) -> Result<usize> {
    if prior.m() != spec.m() {
        return Err(Error::DimensionMismatch {
            expected: spec.m(),
            got: prior.m(),
        });
    }
    if y >= spec.m() {
        return Err(Error::invalid(format!(
            "output {y} is not a candidate index"
        )));
    }
    Ok(rr_guess(y, spec, prior))
}

fn gaussian_guess(y: &[f64], spec: &GaussianSpec, with_prior: bool) -> usize {
    let scale = 2.0 * spec.sigma() * spec.sigma();
    let enc = spec.encodings();
    let prior = spec.prior();
    argmax((0..spec.m()).map(|m| {
        let d2: f64 = y
            .iter()
            .zip(enc.row(m))
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let log_lik = -d2 / scale;
        if with_prior {
            let p = prior.prob(m);
            if p > 0.0 {
                log_lik + p.ln()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            log_lik
        }
    }))
}

/// MAP (or, without the prior, maximum-likelihood) estimate from a Gaussian output.
pub fn map_adversary_gaussian(y: &[f64], spec: &GaussianSpec, with_prior: bool) -> Result<usize> {
    if y.len() != spec.encodings().d() {
        return Err(Error::DimensionMismatch {
            expected: spec.encodings().d(),
            got: y.len(),
        });
    }
    Ok(gaussian_guess(y, spec, with_prior))
}

/// Plays `n_trials` independent rounds of the reconstruction game.
///
/// Trial `i` draws all of its randomness from its own stream keyed by `(seed, i)`, so
/// the report is identical for a fixed seed no matter how trials are scheduled.
pub fn run_game(
    mech: &MechanismInstance,
    adversary: Adversary,
    prior: &Prior,
    n_trials: u64,
    seed: u64,
) -> Result<TrialReport> {
    if n_trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if mech.m() != prior.m() {
        return Err(Error::DimensionMismatch {
            expected: mech.m(),
            got: prior.m(),
        });
    }
    if let MechanismInstance::Gaussian(g) = mech {
        if g.prior() != prior {
            return Err(Error::invalid(
                "the Gaussian mechanism's prior must match the game prior",
            ));
        }
    }
    let p_star = prior.p_star();
    if p_star >= 1.0 {
        return Err(Error::invalid(
            "advantage is undefined for a degenerate prior",
        ));
    }
    let uniform = Prior::uniform(prior.m())?;
    let belief = match adversary {
        Adversary::Map => prior,
        Adversary::MaximumLikelihood => &uniform,
    };

    let trial = |i: u64| -> u64 {
        let mut rng = stream_rng(seed, DOMAIN_GAME, i);
        let k = sample_secret(prior, &mut rng);
        let guess = match mech {
            MechanismInstance::RandomizedResponse(spec) => {
                let y = run_rr(k, spec, &mut rng);
                rr_guess(y, spec, belief)
            }
            MechanismInstance::Gaussian(spec) => {
                let y = run_gaussian(k, spec, &mut rng);
                gaussian_guess(&y, spec, adversary == Adversary::Map)
            }
        };
        u64::from(guess == k)
    };
    let successes: u64 = (0..n_trials).into_par_iter().map(trial).sum();

    let empirical_success = successes as f64 / n_trials as f64;
    let (lo, hi) = wilson_interval(successes, n_trials, Z_95);
    Ok(TrialReport {
        n_trials,
        successes,
        empirical_success,
        empirical_advantage: advantage_from_success_unclamped(empirical_success, p_star)?,
        success_ci_low: lo,
        success_ci_high: hi,
        ci_low: advantage_from_success_unclamped(lo, p_star)?,
        ci_high: advantage_from_success_unclamped(hi, p_star)?,
        p_star,
        seed,
        adversary_name: adversary.name().to_string(),
    })
}
