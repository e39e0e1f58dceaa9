//! The `fanobound` command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage or input errors, 3 when a numeric
//! consistency check fails.

pub mod args;
pub mod evaluate;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use crate::attack_sim::{run_game, MechanismInstance};
use crate::error::Error;
use crate::fano::default_alpha_grid;
use crate::info_theory::Prior;
use crate::mi_bounds::{dpsgd_rdp_curve, Encodings, GaussianSpec, RdpCurve, RrSpec};

use args::{
    parse_dpsgd, BoundArgs, Cli, Command, EvalArgs, FiguresArgs, PriorArgs, SimulateArgs,
    SourceArgs, SweepArgs,
};
use evaluate::{default_kinds, evaluate_point, BoundKind, EvalOptions, PointSource};
use sweep::{
    preset_configs, run_sweep, write_csv, MechanismTemplate, PresetOptions, SweepConfig, SweepRow,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// A failure together with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self {
            code: if e.is_numeric() {
                EXIT_NUMERIC
            } else {
                EXIT_USAGE
            },
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `argv` and runs the command, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Bound(a) => cmd_bound(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Figures(a) => cmd_figures(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::usage(format!("I/O error: {e}"))
}

fn load_prior(args: &PriorArgs, implied_m: Option<usize>) -> CliResult<Prior> {
    let m = match (args.m, implied_m) {
        (Some(a), Some(b)) if a != b => {
            return Err(CliError::usage(format!(
                "--M {a} disagrees with the mechanism's {b} candidates"
            )))
        }
        (a, b) => a.or(b),
    };
    match &args.prior {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("reading {}: {e}", path.display())))?;
            let prior: Prior = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("prior {}: {e}", path.display())))?;
            if let Some(m) = m {
                if prior.m() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: prior.m(),
                    }
                    .into());
                }
            }
            Ok(prior)
        }
        None => {
            let m =
                m.ok_or_else(|| CliError::usage("the number of candidates is unknown; pass --M"))?;
            Ok(Prior::uniform(m)?)
        }
    }
}

fn load_encodings(path: Option<&Path>, onehot: Option<usize>) -> CliResult<Option<Encodings>> {
    Ok(match (path, onehot) {
        (Some(p), _) => Some(Encodings::load_csv(p)?),
        (None, Some(m)) => Some(Encodings::one_hot(m)?),
        (None, None) => None,
    })
}

fn eval_options(e: &EvalArgs) -> EvalOptions {
    EvalOptions {
        alpha_grid: e.alpha_grid.clone().unwrap_or_else(default_alpha_grid),
        mc_samples: e.mc_samples,
        seed: e.seed,
    }
}

/// Resolves the source flags into a point source and its prior.
fn resolve_source(src: &SourceArgs, prior_args: &PriorArgs) -> CliResult<(PointSource, Prior)> {
    let chosen = [
        src.rr.is_some(),
        src.gaussian,
        src.mi.is_some(),
        src.rdp_linear.is_some(),
        src.dpsgd.is_some(),
    ]
    .iter()
    .filter(|b| **b)
    .count();
    if chosen != 1 {
        return Err(CliError::usage(
            "give exactly one of --rr, --gaussian, --mi, --rdp-linear, --dpsgd",
        ));
    }
    if !src.gaussian
        && (src.encodings.is_some()
            || src.onehot.is_some()
            || src.delta.is_some()
            || src.sigma.is_some())
    {
        return Err(CliError::usage(
            "--encodings, --onehot, --delta and --sigma need --gaussian",
        ));
    }

    if src.gaussian {
        let sigma = src
            .sigma
            .ok_or_else(|| CliError::usage("--gaussian needs --sigma"))?;
        let enc = load_encodings(src.encodings.as_deref(), src.onehot)?;
        return match (enc, src.delta) {
            (Some(enc), _) => {
                let prior = load_prior(prior_args, Some(enc.m()))?;
                Ok((
                    PointSource::Gaussian(GaussianSpec::new(enc, sigma, prior.clone())?),
                    prior,
                ))
            }
            (None, Some(delta)) => {
                let prior = load_prior(prior_args, None)?;
                Ok((PointSource::GaussianSensitivity { delta, sigma }, prior))
            }
            (None, None) => Err(CliError::usage(
                "--gaussian needs --encodings, --onehot or --delta",
            )),
        };
    }
    let prior = load_prior(prior_args, None)?;
    let source = if let Some(q) = src.rr {
        PointSource::RandomizedResponse(RrSpec::new(q, prior.m())?)
    } else if let Some(v) = src.mi {
        PointSource::MutualInformation(v)
    } else if let Some(slope) = src.rdp_linear {
        PointSource::Curve(RdpCurve::linear(slope)?)
    } else {
        let toks = src.dpsgd.as_deref().unwrap_or_default();
        let (steps, sigma, clip) = parse_dpsgd(toks).map_err(CliError::usage)?;
        PointSource::Curve(dpsgd_rdp_curve(steps, sigma, clip)?)
    };
    Ok((source, prior))
}

fn parse_kinds(names: &[String]) -> CliResult<Vec<BoundKind>> {
    names
        .iter()
        .map(|s| s.trim().parse::<BoundKind>().map_err(CliError::from))
        .collect()
}

fn prior_json(prior: &Prior) -> serde_json::Value {
    if prior.is_uniform() {
        json!("uniform")
    } else {
        json!(prior.probs())
    }
}

fn source_json(source: &PointSource) -> serde_json::Value {
    match source {
        PointSource::RandomizedResponse(s) => {
            json!({"mechanism": "randomized-response", "q": s.q()})
        }
        PointSource::Gaussian(g) => json!({
            "mechanism": "gaussian",
            "sigma": g.sigma(),
            "sensitivity": g.sensitivity(),
            "dimension": g.encodings().d(),
        }),
        PointSource::GaussianSensitivity { delta, sigma } => {
            json!({"mechanism": "gaussian", "sigma": sigma, "sensitivity": delta})
        }
        PointSource::Curve(c) => json!({"mechanism": "rdp-curve", "curve": c.label()}),
        PointSource::MutualInformation(v) => json!({"mechanism": "mutual-information", "nats": v}),
    }
}

#[derive(Serialize)]
struct BoundEntry {
    method: BoundKind,
    inequality: String,
    alpha: f64,
    info_bound_nats: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    info_stderr: Option<f64>,
    t_star: f64,
    success_upper: f64,
    advantage: f64,
    vacuous: bool,
}

fn cmd_bound(a: BoundArgs, out: &mut dyn Write) -> CliResult<()> {
    let (source, prior) = resolve_source(&a.source, &a.prior)?;
    let kinds = match &a.bounds {
        Some(names) => parse_kinds(names)?,
        None => default_kinds(&source, &prior),
    };
    let opts = eval_options(&a.eval);
    let result = evaluate_point(&source, &prior, &kinds, &opts)?;
    let bounds: Vec<BoundEntry> = result
        .bounds
        .iter()
        .map(|e| BoundEntry {
            method: e.kind,
            inequality: e.bound.method.to_string(),
            alpha: e.bound.alpha,
            info_bound_nats: e.bound.info_bound,
            info_stderr: e.info_stderr,
            t_star: e.bound.t_star,
            success_upper: e.bound.success_upper,
            advantage: e.bound.advantage,
            vacuous: e.bound.vacuous,
        })
        .collect();
    let doc = json!({
        "inputs": {
            "source": source_json(&source),
            "m": prior.m(),
            "prior": prior_json(&prior),
            "p_star": prior.p_star(),
            "alpha_grid": opts.alpha_grid,
            "mc_samples": opts.mc_samples,
            "seed": opts.seed,
        },
        "bounds": bounds,
    });
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::usage(e.to_string()))?;
    writeln!(out).map_err(io_err)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> CliResult<()> {
    let (source, prior) = resolve_source(&a.source, &a.prior)?;
    let (mech, param, value) = match &source {
        PointSource::RandomizedResponse(s) => {
            (MechanismInstance::RandomizedResponse(*s), "q", s.q())
        }
        PointSource::Gaussian(g) => (MechanismInstance::Gaussian(g.clone()), "sigma", g.sigma()),
        _ => {
            return Err(CliError::usage(
                "simulation needs --rr or --gaussian with --encodings/--onehot",
            ))
        }
    };
    if a.trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let opts = eval_options(&a.eval);
    let kinds = match &a.bounds {
        Some(names) => parse_kinds(names)?,
        None => Vec::new(),
    };
    let bounds = evaluate_point(&source, &prior, &kinds, &opts)?;
    let report = run_game(&mech, a.adversary, &prior, a.trials, a.eval.seed)?;
    let adv = |k| bounds.get(k).map(|b| b.advantage);
    let row = SweepRow {
        param: param.to_string(),
        value,
        bound_fano_exact: adv(BoundKind::FanoExact),
        bound_fano_thm1: adv(BoundKind::FanoThm1),
        bound_fano_thm2: adv(BoundKind::FanoThm2),
        bound_fano_mc: adv(BoundKind::FanoMc),
        bound_gen_fano: adv(BoundKind::GenFano),
        bound_rero: adv(BoundKind::Rero),
        mc_mi: bounds.monte_carlo.as_ref().map(|m| m.value()),
        mc_mi_stderr: bounds.monte_carlo.as_ref().and_then(|m| m.stderr()),
        empirical_adv: Some(report.empirical_advantage),
        emp_ci_low: Some(report.ci_low),
        emp_ci_high: Some(report.ci_high),
        n_trials: report.n_trials,
        seed: report.seed,
    };
    Ok(write_csv(out, &[row])?)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> CliResult<()> {
    let template = match a.param.as_str() {
        "sigma" => {
            let enc = load_encodings(a.encodings.as_deref(), a.onehot)?
                .ok_or_else(|| CliError::usage("a sigma sweep needs --encodings or --onehot"))?;
            MechanismTemplate::Gaussian { encodings: enc }
        }
        other => {
            if a.encodings.is_some() || a.onehot.is_some() {
                return Err(CliError::usage(
                    "--encodings and --onehot only apply to sigma sweeps",
                ));
            }
            let m = load_prior(&a.prior, None)?.m();
            if other == "q" {
                MechanismTemplate::RandomizedResponse { m }
            } else {
                MechanismTemplate::RdpLinear { m }
            }
        }
    };
    let prior = load_prior(&a.prior, Some(template.m()))?;
    let mut cfg = SweepConfig::new(template, a.grid.clone(), prior);
    cfg.trials = a.trials;
    cfg.seed = a.eval.seed;
    cfg.mc_samples = a.eval.mc_samples;
    if let Some(g) = &a.eval.alpha_grid {
        cfg.alpha_grid = g.clone();
    }
    match &a.bounds {
        Some(names) => cfg.bounds = parse_kinds(names)?,
        None => {
            if !cfg.prior.is_uniform() {
                cfg.bounds.retain(|k| *k != BoundKind::Rero);
            }
        }
    }
    cfg.validate()?;
    let rows = run_sweep(&cfg).map_err(|e| CliError {
        code: EXIT_NUMERIC,
        message: e.to_string(),
    })?;
    match &a.out {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::usage(format!("creating {}: {e}", path.display())))?;
            write_csv(std::io::BufWriter::new(file), &rows)?;
        }
        None => write_csv(out, &rows)?,
    }
    Ok(())
}

fn cmd_figures(a: FiguresArgs, out: &mut dyn Write) -> CliResult<()> {
    let opts = PresetOptions {
        trials: a.trials,
        seed: a.seed,
        mc_samples: a.mc_samples,
    };
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| CliError::usage(format!("creating {}: {e}", a.out_dir.display())))?;
    for (stem, cfg) in preset_configs(a.name, opts)? {
        let rows = run_sweep(&cfg).map_err(|e| CliError {
            code: EXIT_NUMERIC,
            message: format!("{stem}: {e}"),
        })?;
        let path = a.out_dir.join(format!("{stem}.csv"));
        let file = fs::File::create(&path)
            .map_err(|e| CliError::usage(format!("creating {}: {e}", path.display())))?;
        write_csv(std::io::BufWriter::new(file), &rows)?;
        writeln!(out, "{}", path.display()).map_err(io_err)?;
    }
    Ok(())
}
