//! Parameter sweeps and the figure presets built on them.

use std::io::Write;

use rayon::prelude::*;

use crate::attack_sim::{run_game, Adversary, MechanismInstance};
use crate::error::{Error, Result};
use crate::fano::default_alpha_grid;
use crate::info_theory::Prior;
use crate::mi_bounds::{Encodings, GaussianSpec, RdpCurve, RrSpec, DEFAULT_MC_SAMPLES};
use crate::numeric::log_space;

use super::evaluate::{evaluate_point, BoundKind, EvalOptions, PointSource};

/// Column order of every sweep CSV.
pub const CSV_HEADER: [&str; 15] = [
    "param",
    "value",
    "bound_fano_exact",
    "bound_fano_thm1",
    "bound_fano_thm2",
    "bound_fano_mc",
    "bound_gen_fano",
    "bound_rero",
    "mc_mi",
    "mc_mi_stderr",
    "empirical_adv",
    "emp_ci_low",
    "emp_ci_high",
    "n_trials",
    "seed",
];

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_FIGURE_SEED: u64 = 7;

/// The mechanism family a sweep varies, which also fixes the swept parameter.
#[derive(Debug, Clone)]
pub enum MechanismTemplate {
    /// Randomized response over `m` candidates; sweeps `q`.
    RandomizedResponse { m: usize },
    /// Gaussian mechanism on fixed encodings; sweeps `sigma`.
    Gaussian { encodings: Encodings },
    /// Linear RDP curve `epsilon(alpha) = epsilon * alpha`; sweeps `epsilon`.
    RdpLinear { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Q,
    Sigma,
    Epsilon,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Q => "q",
            SweepParam::Sigma => "sigma",
            SweepParam::Epsilon => "epsilon",
        }
    }
}

impl MechanismTemplate {
    pub fn param(&self) -> SweepParam {
        match self {
            MechanismTemplate::RandomizedResponse { .. } => SweepParam::Q,
            MechanismTemplate::Gaussian { .. } => SweepParam::Sigma,
            MechanismTemplate::RdpLinear { .. } => SweepParam::Epsilon,
        }
    }

    pub fn m(&self) -> usize {
        match self {
            MechanismTemplate::RandomizedResponse { m } | MechanismTemplate::RdpLinear { m } => *m,
            MechanismTemplate::Gaussian { encodings } => encodings.m(),
        }
    }

    fn instantiate(&self, value: f64, prior: &Prior) -> Result<PointSource> {
        Ok(match self {
            MechanismTemplate::RandomizedResponse { m } => {
                PointSource::RandomizedResponse(RrSpec::new(value, *m)?)
            }
            MechanismTemplate::Gaussian { encodings } => {
                PointSource::Gaussian(GaussianSpec::new(encodings.clone(), value, prior.clone())?)
            }
            MechanismTemplate::RdpLinear { .. } => PointSource::Curve(RdpCurve::linear(value)?),
        })
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub template: MechanismTemplate,
    pub grid: Vec<f64>,
    pub prior: Prior,
    pub bounds: Vec<BoundKind>,
    /// Attack trials per grid point; 0 disables simulation.
    pub trials: u64,
    pub seed: u64,
    pub mc_samples: usize,
    pub alpha_grid: Vec<f64>,
}

impl SweepConfig {
    pub fn new(template: MechanismTemplate, grid: Vec<f64>, prior: Prior) -> Self {
        let bounds = applicable_columns(&template);
        Self {
            template,
            grid,
            prior,
            bounds,
            trials: DEFAULT_TRIALS,
            seed: 0,
            mc_samples: DEFAULT_MC_SAMPLES,
            alpha_grid: default_alpha_grid(),
        }
    }

    pub fn param(&self) -> SweepParam {
        self.template.param()
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("sweep grid is empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("sweep grid values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("sweep grid must be sorted ascending"));
        }
        if self.prior.m() != self.template.m() {
            return Err(Error::DimensionMismatch {
                expected: self.template.m(),
                got: self.prior.m(),
            });
        }
        let allowed = applicable_columns(&self.template);
        if let Some(bad) = self.bounds.iter().find(|b| !allowed.contains(b)) {
            return Err(Error::invalid(format!(
                "bound {bad} is not available when sweeping {}",
                self.param().name()
            )));
        }
        if self.bounds.contains(&BoundKind::Rero) && !self.prior.is_uniform() {
            return Err(Error::invalid("the rero baseline needs a uniform prior"));
        }
        if self.trials > 0 && matches!(self.template, MechanismTemplate::RdpLinear { .. }) {
            return Err(Error::invalid(
                "an epsilon sweep has no mechanism to simulate; use --trials 0",
            ));
        }
        Ok(())
    }
}

fn applicable_columns(template: &MechanismTemplate) -> Vec<BoundKind> {
    let probe = match template {
        MechanismTemplate::RandomizedResponse { m } => {
            PointSource::RandomizedResponse(RrSpec::new(0.5, (*m).max(2)).expect("valid"))
        }
        MechanismTemplate::Gaussian { .. } => {
            return vec![
                BoundKind::FanoThm1,
                BoundKind::FanoThm2,
                BoundKind::FanoMc,
                BoundKind::GenFano,
                BoundKind::Rero,
            ]
        }
        MechanismTemplate::RdpLinear { .. } => {
            PointSource::Curve(RdpCurve::linear(1.0).expect("valid"))
        }
    };
    probe.applicable().to_vec()
}

/// One output row; `None` fields are written as empty CSV cells.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub bound_fano_exact: Option<f64>,
    pub bound_fano_thm1: Option<f64>,
    pub bound_fano_thm2: Option<f64>,
    pub bound_fano_mc: Option<f64>,
    pub bound_gen_fano: Option<f64>,
    pub bound_rero: Option<f64>,
    pub mc_mi: Option<f64>,
    pub mc_mi_stderr: Option<f64>,
    pub empirical_adv: Option<f64>,
    pub emp_ci_low: Option<f64>,
    pub emp_ci_high: Option<f64>,
    pub n_trials: u64,
    pub seed: u64,
}

impl SweepRow {
    pub fn bound(&self, kind: BoundKind) -> Option<f64> {
        match kind {
            BoundKind::FanoExact => self.bound_fano_exact,
            BoundKind::FanoThm1 => self.bound_fano_thm1,
            BoundKind::FanoThm2 => self.bound_fano_thm2,
            BoundKind::FanoMc => self.bound_fano_mc,
            BoundKind::GenFano => self.bound_gen_fano,
            BoundKind::Rero => self.bound_rero,
            BoundKind::Fano => None,
        }
    }

    fn fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        vec![
            self.param.clone(),
            fmt_f64(self.value),
            opt(self.bound_fano_exact),
            opt(self.bound_fano_thm1),
            opt(self.bound_fano_thm2),
            opt(self.bound_fano_mc),
            opt(self.bound_gen_fano),
            opt(self.bound_rero),
            opt(self.mc_mi),
            opt(self.mc_mi_stderr),
            opt(self.empirical_adv),
            opt(self.emp_ci_low),
            opt(self.emp_ci_high),
            self.n_trials.to_string(),
            self.seed.to_string(),
        ]
    }

    /// Parses a record written by [`write_csv`].
    pub fn from_record(rec: &csv::StringRecord) -> Result<Self> {
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::Input(format!(
                "expected {} fields, got {}",
                CSV_HEADER.len(),
                rec.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| {
                Error::Input(format!(
                    "column {}: bad number {:?}",
                    CSV_HEADER[i], &rec[i]
                ))
            })
        };
        let opt = |i: usize| -> Result<Option<f64>> {
            if rec[i].is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let int = |i: usize| -> Result<u64> {
            rec[i].parse::<u64>().map_err(|_| {
                Error::Input(format!(
                    "column {}: bad integer {:?}",
                    CSV_HEADER[i], &rec[i]
                ))
            })
        };
        Ok(Self {
            param: rec[0].to_string(),
            value: num(1)?,
            bound_fano_exact: opt(2)?,
            bound_fano_thm1: opt(3)?,
            bound_fano_thm2: opt(4)?,
            bound_fano_mc: opt(5)?,
            bound_gen_fano: opt(6)?,
            bound_rero: opt(7)?,
            mc_mi: opt(8)?,
            mc_mi_stderr: opt(9)?,
            empirical_adv: opt(10)?,
            emp_ci_low: opt(11)?,
            emp_ci_high: opt(12)?,
            n_trials: int(13)?,
            seed: int(14)?,
        })
    }
}

/// Shortest representation that parses back to the identical `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

/// Error raised at a specific grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointError {
    pub param: &'static str,
    pub value: f64,
    pub source: Error,
}

impl std::fmt::Display for PointError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "grid point {}={}: {}",
            self.param, self.value, self.source
        )
    }
}

fn evaluate_row(cfg: &SweepConfig, value: f64) -> Result<SweepRow> {
    let source = cfg.template.instantiate(value, &cfg.prior)?;
    let opts = EvalOptions {
        alpha_grid: cfg.alpha_grid.clone(),
        mc_samples: cfg.mc_samples,
        seed: cfg.seed,
    };
    let result = evaluate_point(&source, &cfg.prior, &cfg.bounds, &opts)?;
    let adv = |k: BoundKind| result.get(k).map(|b| b.advantage);

    let mut row = SweepRow {
        param: cfg.param().name().to_string(),
        value,
        bound_fano_exact: adv(BoundKind::FanoExact),
        bound_fano_thm1: adv(BoundKind::FanoThm1),
        bound_fano_thm2: adv(BoundKind::FanoThm2),
        bound_fano_mc: adv(BoundKind::FanoMc),
        bound_gen_fano: adv(BoundKind::GenFano),
        bound_rero: adv(BoundKind::Rero),
        mc_mi: result.monte_carlo.as_ref().map(|m| m.value()),
        mc_mi_stderr: result.monte_carlo.as_ref().and_then(|m| m.stderr()),
        empirical_adv: None,
        emp_ci_low: None,
        emp_ci_high: None,
        n_trials: cfg.trials,
        seed: cfg.seed,
    };
    if cfg.trials > 0 {
        let mech = match source {
            PointSource::RandomizedResponse(s) => MechanismInstance::RandomizedResponse(s),
            PointSource::Gaussian(g) => MechanismInstance::Gaussian(g),
            _ => unreachable!("validated: only mechanisms are simulated"),
        };
        let report = run_game(&mech, Adversary::Map, &cfg.prior, cfg.trials, cfg.seed)?;
        row.empirical_adv = Some(report.empirical_advantage);
        row.emp_ci_low = Some(report.ci_low);
        row.emp_ci_high = Some(report.ci_high);
    }
    Ok(row)
}

/// Evaluates every grid point (concurrently) and returns rows in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> std::result::Result<Vec<SweepRow>, PointError> {
    cfg.validate().map_err(|e| PointError {
        param: cfg.param().name(),
        value: f64::NAN,
        source: e,
    })?;
    let results: Vec<Result<SweepRow>> =
        cfg.grid.par_iter().map(|&v| evaluate_row(cfg, v)).collect();
    results
        .into_iter()
        .zip(&cfg.grid)
        .map(|(r, &value)| {
            r.map_err(|source| PointError {
                param: cfg.param().name(),
                value,
                source,
            })
        })
        .collect()
}

pub fn write_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Input(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in rows {
        w.write_record(row.fields()).map_err(io)?;
    }
    w.flush()
        .map_err(|e| Error::Input(format!("writing CSV: {e}")))?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r
        .headers()
        .map_err(|e| Error::Input(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Input("unexpected CSV header".into()));
    }
    r.records()
        .map(|rec| SweepRow::from_record(&rec.map_err(|e| Error::Input(e.to_string()))?))
        .collect()
}

/// Figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Advantage vs. the order-1 RDP parameter for several candidate-set sizes.
    Fig2,
    /// Randomized response, M = 10, sweeping q.
    Fig3a,
    /// Gaussian mechanism on one-hot encodings, M = 10, sweeping sigma.
    Fig3b,
}

impl std::str::FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3a" => Ok(Figure::Fig3a),
            "fig3b" => Ok(Figure::Fig3b),
            other => Err(Error::invalid(format!("unknown figure preset {other:?}"))),
        }
    }
}

/// Candidate-set sizes plotted in the advantage-vs-epsilon figure.
pub const FIG2_SIZES: [usize; 4] = [2, 10, 10_000, 10_000_000_000];

/// Shared epsilon grid for the advantage-vs-epsilon figure: 196 log-spaced points on
/// `[1e-3, 30]` plus `ln M` for every plotted `M`, 200 points in total.
pub fn fig2_grid() -> Vec<f64> {
    let mut grid = log_space(1e-3, 30.0, 196);
    grid.extend(FIG2_SIZES.iter().map(|&m| (m as f64).ln()));
    grid.sort_by(f64::total_cmp);
    grid
}

/// `q` grid of the randomized-response figure: 0.1, 0.2, ..., 1.0.
pub fn fig3a_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// `sigma` grid of the Gaussian figure: 0.25, 0.5, ..., 3.0.
pub fn fig3b_grid() -> Vec<f64> {
    (1..=12).map(|i| i as f64 * 0.25).collect()
}

/// Run-time knobs shared by all presets.
#[derive(Debug, Clone, Copy)]
pub struct PresetOptions {
    pub trials: u64,
    pub seed: u64,
    pub mc_samples: usize,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_FIGURE_SEED,
            mc_samples: DEFAULT_MC_SAMPLES,
        }
    }
}

/// The sweeps making up a preset, each with its output file stem.
pub fn preset_configs(fig: Figure, opts: PresetOptions) -> Result<Vec<(String, SweepConfig)>> {
    let with = |mut cfg: SweepConfig, trials: u64| {
        cfg.trials = trials;
        cfg.seed = opts.seed;
        cfg.mc_samples = opts.mc_samples;
        cfg
    };
    Ok(match fig {
        Figure::Fig2 => FIG2_SIZES
            .iter()
            .map(|&m| {
                let cfg = SweepConfig::new(
                    MechanismTemplate::RdpLinear { m },
                    fig2_grid(),
                    Prior::uniform(m)?,
                );
                Ok((format!("fig2_M{m}"), with(cfg, 0)))
            })
            .collect::<Result<Vec<_>>>()?,
        Figure::Fig3a => {
            let cfg = SweepConfig::new(
                MechanismTemplate::RandomizedResponse { m: 10 },
                fig3a_grid(),
                Prior::uniform(10)?,
            );
            vec![("fig3a".to_string(), with(cfg, opts.trials))]
        }
        Figure::Fig3b => {
            let cfg = SweepConfig::new(
                MechanismTemplate::Gaussian {
                    encodings: Encodings::one_hot(10)?,
                },
                fig3b_grid(),
                Prior::uniform(10)?,
            );
            vec![("fig3b".to_string(), with(cfg, opts.trials))]
        }
    })
}
