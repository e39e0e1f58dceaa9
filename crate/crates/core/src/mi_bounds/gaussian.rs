use std::io::Read;
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info_theory::Prior;
use crate::numeric::log_sum_exp;
use crate::rng::{stream_rng, DOMAIN_MONTE_CARLO};

use super::{MiBound, MiKind};

pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const MIN_MC_SAMPLES: usize = 1_000;

/// The candidate encodings `e_1 .. e_M`, an `M x d` real matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Encodings {
    m: usize,
    d: usize,
    data: Vec<f64>,
}

impl Encodings {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if m < 2 {
            return Err(Error::invalid(format!(
                "need at least 2 encodings, got {m}"
            )));
        }
        if d == 0 {
            return Err(Error::invalid("encodings must have at least one column"));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: bad.len(),
            });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("encodings must be finite"));
        }
        Ok(Self { m, d, data })
    }

    /// Standard basis vectors in `R^m`.
    pub fn one_hot(m: usize) -> Result<Self> {
        Self::from_rows(
            (0..m)
                .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        )
    }

    /// Parses headerless CSV: one encoding per row, `d` numeric columns.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Input(format!("encodings row {}: {e}", i + 1)))?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::Input(format!("encodings row {}: bad number {f:?}", i + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Self::from_csv_reader(file)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// L2-sensitivity: the largest pairwise distance between encodings.
pub fn pairwise_sensitivity(enc: &Encodings) -> f64 {
    let mut best = 0.0f64;
    for i in 0..enc.m() {
        for j in i + 1..enc.m() {
            best = best.max(sq_dist(enc.row(i), enc.row(j)));
        }
    }
    best.sqrt()
}

/// Gaussian mechanism `Y = e_X + N(0, sigma^2 I)` with secret prior `prior`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    encodings: Encodings,
    sigma: f64,
    prior: Prior,
}

impl GaussianSpec {
    pub fn new(encodings: Encodings, sigma: f64, prior: Prior) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::invalid(format!("sigma {sigma} must be > 0")));
        }
        if prior.m() != encodings.m() {
            return Err(Error::DimensionMismatch {
                expected: encodings.m(),
                got: prior.m(),
            });
        }
        Ok(Self {
            encodings,
            sigma,
            prior,
        })
    }

    pub fn encodings(&self) -> &Encodings {
        &self.encodings
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn m(&self) -> usize {
        self.encodings.m()
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.encodings.clone(), sigma, self.prior.clone())
    }

    pub fn sensitivity(&self) -> f64 {
        pairwise_sensitivity(&self.encodings)
    }
}

/// Closed-form mixture-entropy bound on `I(X; Y)` for the Gaussian mechanism:
/// `-sum_m p_m ln(p_m + (1 - p_m) exp(-delta^2 / (2 sigma^2)))`.
pub fn gaussian_mi_bound_thm2(prior: &Prior, delta: f64, sigma: f64) -> Result<MiBound> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma {sigma} must be > 0")));
    }
    if !(delta >= 0.0) {
        return Err(Error::invalid(format!("sensitivity {delta} must be >= 0")));
    }
    let overlap = (-(delta * delta) / (2.0 * sigma * sigma)).exp();
    let value = if prior.is_symbolic_uniform() {
        let p = 1.0 / prior.m() as f64;
        -(p + (1.0 - p) * overlap).ln()
    } else {
        -prior
            .probs()
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * (p + (1.0 - p) * overlap).ln())
            .sum::<f64>()
    };
    let value = value.max(0.0);
    MiBound::new(
        value,
        1.0,
        MiKind::AnalyticBound,
        None,
        format!("gaussian mixture bound (delta={delta}, sigma={sigma})"),
    )
}

/// Per-sample term `ln phi(y; e_k) - ln sum_m p_m phi(y; e_m)`, normalizers cancelled.
fn mc_term(spec: &GaussianSpec, log_p: &[f64], seed: u64, index: u64) -> f64 {
    let mut rng = stream_rng(seed, DOMAIN_MONTE_CARLO, index);
    let k = spec.prior.sample(&mut rng);
    let enc = &spec.encodings;
    let sigma = spec.sigma;
    let y: Vec<f64> = enc
        .row(k)
        .iter()
        .map(|&e| {
            let z: f64 = StandardNormal.sample(&mut rng);
            e + sigma * z
        })
        .collect();
    let own = sq_dist(&y, enc.row(k));
    let scale = 2.0 * sigma * sigma;
    let mut all_zero = true;
    let shifted: Vec<f64> = (0..enc.m())
        .filter(|&m| log_p[m] > f64::NEG_INFINITY)
        .map(|m| {
            let diff = sq_dist(&y, enc.row(m)) - own;
            all_zero &= diff == 0.0;
            log_p[m] - diff / scale
        })
        .collect();
    if all_zero {
        return 0.0;
    }
    -log_sum_exp(shifted)
}

/// Monte-Carlo estimate of `I(X; Y)` for the Gaussian mechanism.
///
/// Each sample draws `k ~ prior` and `y ~ N(e_k, sigma^2 I)` from its own counter-based
/// stream and contributes `ln phi(y; e_k) - ln sum_m p_m phi(y; e_m)`. Samples are
/// evaluated in parallel but reduced in index order, so the result is bit-identical
/// for a fixed `(spec, n_samples, seed)` whatever the thread count.
pub fn gaussian_mi_monte_carlo(
    spec: &GaussianSpec,
    n_samples: usize,
    seed: u64,
) -> Result<MiBound> {
    if n_samples < MIN_MC_SAMPLES {
        return Err(Error::invalid(format!(
            "n_samples = {n_samples} is below the minimum of {MIN_MC_SAMPLES}"
        )));
    }
    let log_p: Vec<f64> = spec
        .prior
        .probs()
        .iter()
        .map(|&p| if p > 0.0 { p.ln() } else { f64::NEG_INFINITY })
        .collect();
    let terms: Vec<f64> = (0..n_samples as u64)
        .into_par_iter()
        .map(|i| mc_term(spec, &log_p, seed, i))
        .collect();
    let n = terms.len() as f64;
    let mean = terms.iter().sum::<f64>() / n;
    let var = terms.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    MiBound::new(
        mean.max(0.0),
        1.0,
        MiKind::MonteCarlo,
        Some(stderr),
        format!(
            "monte-carlo gaussian MI (sigma={}, n={n_samples}, seed={seed}, raw mean={mean})",
            spec.sigma
        ),
    )
}
