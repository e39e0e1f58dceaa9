use std::borrow::Cow;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the probability sum of a validated distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Categorical distribution over the `M` candidate secrets.
///
/// A uniform prior is stored symbolically so that very large candidate sets
/// (e.g. `M = 10^10`) can be used by the closed-form bound routines without
/// materializing the probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior {
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Uniform { m: usize },
    Explicit { probs: Vec<f64>, p_star: f64 },
}

impl Prior {
    /// Validates and wraps an explicit probability vector. Never renormalizes.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probabilities(&probs)?;
        if probs.len() < 2 {
            return Err(Error::InvalidDistribution(format!(
                "a prior needs at least 2 candidates, got {}",
                probs.len()
            )));
        }
        let p_star = probs.iter().copied().fold(0.0, f64::max);
        Ok(Self {
            repr: Repr::Explicit { probs, p_star },
        })
    }

    /// Builds a prior from nonnegative weights, rescaling them to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidDistribution(format!(
                "a prior needs at least 2 candidates, got {m}"
            )));
        }
        Ok(Self {
            repr: Repr::Uniform { m },
        })
    }

    /// Number of candidates `M`.
    pub fn m(&self) -> usize {
        match &self.repr {
            Repr::Uniform { m } => *m,
            Repr::Explicit { probs, .. } => probs.len(),
        }
    }

    /// Bayes baseline success rate, the largest entry.
    pub fn p_star(&self) -> f64 {
        match &self.repr {
            Repr::Uniform { m } => 1.0 / *m as f64,
            Repr::Explicit { p_star, .. } => *p_star,
        }
    }

    pub fn prob(&self, i: usize) -> f64 {
        match &self.repr {
            Repr::Uniform { m } => {
                if i < *m {
                    1.0 / *m as f64
                } else {
                    0.0
                }
            }
            Repr::Explicit { probs, .. } => probs.get(i).copied().unwrap_or(0.0),
        }
    }

    /// The probability vector; materialized on demand for uniform priors.
    pub fn probs(&self) -> Cow<'_, [f64]> {
        match &self.repr {
            Repr::Uniform { m } => Cow::Owned(vec![1.0 / *m as f64; *m]),
            Repr::Explicit { probs, .. } => Cow::Borrowed(probs),
        }
    }

    /// Index of the most likely candidate (lowest index on ties).
    pub fn argmax(&self) -> usize {
        match &self.repr {
            Repr::Uniform { .. } => 0,
            Repr::Explicit { probs, p_star } => probs.iter().position(|p| p == p_star).unwrap_or(0),
        }
    }

    /// True when every entry equals `1/M` within `1e-12`.
    pub fn is_uniform(&self) -> bool {
        match &self.repr {
            Repr::Uniform { .. } => true,
            Repr::Explicit { probs, .. } => {
                let u = 1.0 / probs.len() as f64;
                probs.iter().all(|p| (p - u).abs() <= 1e-12)
            }
        }
    }

    pub(crate) fn is_symbolic_uniform(&self) -> bool {
        matches!(self.repr, Repr::Uniform { .. })
    }

    /// Draws a candidate index by inverse-CDF sampling on one uniform variate.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.repr {
            Repr::Uniform { m } => rng.random_range(0..*m),
            Repr::Explicit { probs, .. } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut last = 0;
                for (i, &p) in probs.iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    acc += p;
                    last = i;
                    if u < acc {
                        return i;
                    }
                }
                last
            }
        }
    }

    /// Reorders candidates so that entry `i` of the result is entry `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: perm.len(),
            });
        }
        let probs = self.probs();
        Self::new(perm.iter().map(|&j| probs[j]).collect())
    }
}

impl Serialize for Prior {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.probs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Prior {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        Prior::new(probs).map_err(serde::de::Error::custom)
    }
}

/// Checks nonnegativity, finiteness and the unit sum of a probability vector.
pub fn validate_probabilities(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty distribution".into()));
    }
    if let Some((i, v)) = p
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "entry {i} = {v} is not a probability"
        )));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}, expected 1"
        )));
    }
    Ok(())
}
