//! End-to-end tests of the `fanobound` binary.

use std::path::Path;
use std::process::{Command, Output};

use fanobound::cli::sweep::{read_csv, SweepRow};
use serde_json::Value;

fn fanobound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanobound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = fanobound(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    fanobound(args).status.code().expect("exited normally")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid JSON")
}

fn rows(text: &str) -> Vec<SweepRow> {
    read_csv(text.as_bytes()).expect("parsable CSV")
}

fn rows_at(path: &Path) -> Vec<SweepRow> {
    read_csv(std::fs::File::open(path).unwrap()).unwrap()
}

fn bound<'a>(doc: &'a Value, method: &str) -> &'a Value {
    doc["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["method"] == method)
        .unwrap_or_else(|| panic!("no {method} in {doc}"))
}

#[test]
fn bound_randomized_response_without_leakage_is_zero() {
    let doc = json(&["bound", "--rr", "q=1", "--M", "10", "--uniform"]);
    let bounds = doc["bounds"].as_array().unwrap();
    assert_eq!(bounds.len(), 4);
    for b in bounds {
        assert_eq!(b["advantage"].as_f64(), Some(0.0), "{b}");
    }
}

#[test]
fn bound_beyond_entropy_is_vacuous() {
    let doc = json(&["bound", "--mi", "99", "--M", "10", "--uniform"]);
    let b = bound(&doc, "fano");
    assert_eq!(b["advantage"].as_f64(), Some(1.0));
    assert_eq!(b["vacuous"].as_bool(), Some(true));
    assert_eq!(b["info_bound_nats"].as_f64(), Some(99.0));
}

#[test]
#[allow(clippy::approx_constant)]
fn bound_gaussian_matches_library() {
    use fanobound::fano::fano_advantage_bound;
    use fanobound::info_theory::Prior;
    use fanobound::mi_bounds::{gaussian_mi_bound_thm2, gaussian_rdp_curve, mi_from_rdp};

    let delta = 1.41421356;
    let doc = json(&[
        "bound",
        "--gaussian",
        "--delta",
        "1.41421356",
        "--sigma",
        "1",
        "--M",
        "10",
        "--uniform",
    ]);
    let thm1 = bound(&doc, "fano-thm1");
    assert!((thm1["info_bound_nats"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(thm1["alpha"].as_f64(), Some(1.0));

    let u = Prior::uniform(10).unwrap();
    let lib1 = fano_advantage_bound(
        &mi_from_rdp(&gaussian_rdp_curve(delta, 1.0).unwrap(), 1.0).unwrap(),
        &u,
    )
    .unwrap();
    assert_eq!(thm1["advantage"].as_f64(), Some(lib1.advantage));
    assert_eq!(thm1["t_star"].as_f64(), Some(lib1.t_star));
    let lib2 = fano_advantage_bound(&gaussian_mi_bound_thm2(&u, delta, 1.0).unwrap(), &u).unwrap();
    assert_eq!(
        bound(&doc, "fano-thm2")["advantage"].as_f64(),
        Some(lib2.advantage)
    );
    for key in [
        "method",
        "alpha",
        "info_bound_nats",
        "t_star",
        "success_upper",
        "advantage",
    ] {
        assert!(thm1.get(key).is_some(), "missing {key}");
    }
    assert!(doc["inputs"].is_object());
}

#[test]
fn bound_accepts_every_source() {
    json(&[
        "bound",
        "--rdp-linear",
        "slope=0.5",
        "--M",
        "1e10",
        "--uniform",
    ]);
    let d = json(&["bound", "--dpsgd", "T=100", "sigma=10", "C=1", "--M", "100"]);
    let thm1 = bound(&d, "fano-thm1");
    assert!((thm1["info_bound_nats"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let g = json(&[
        "bound",
        "--gaussian",
        "--onehot",
        "4",
        "--sigma",
        "1",
        "--mc-samples",
        "2000",
    ]);
    assert!(bound(&g, "fano-mc")["info_stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn bound_with_prior_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prior.json");
    std::fs::write(&path, "[0.367, 0.339, 0.294]").unwrap();
    let p = path.to_str().unwrap();
    let doc = json(&["bound", "--rr", "q=0.5", "--prior", p]);
    assert!(doc["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["method"] != "rero"));
    assert_eq!(doc["inputs"]["m"].as_u64(), Some(3));

    std::fs::write(&path, "[0.5, 0.6]").unwrap();
    assert_eq!(code(&["bound", "--rr", "q=0.5", "--prior", p]), 2);
    std::fs::write(&path, "[0.5, 0.5]").unwrap();
    assert_eq!(
        code(&["bound", "--rr", "q=0.5", "--prior", p, "--M", "3"]),
        2
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["bound", "--M", "10"]), 2);
    assert_eq!(
        code(&["bound", "--rr", "q=0.5", "--mi", "1", "--M", "10"]),
        2
    );
    assert_eq!(code(&["bound", "--rr", "q=0.5"]), 2);
    assert_eq!(code(&["bound", "--rr", "0.5", "--M", "10"]), 2);
    assert_eq!(code(&["bound", "--rr", "q=1.5", "--M", "10"]), 2);
    assert_eq!(
        code(&[
            "bound",
            "--mi",
            "1",
            "--M",
            "10",
            "--uniform",
            "--prior",
            "x.json"
        ]),
        2
    );
    assert_eq!(code(&["bound", "--gaussian", "--onehot", "4"]), 2);
    assert_eq!(
        code(&["bound", "--mi", "1", "--M", "10", "--bounds", "rero"]),
        2
    );
    assert_eq!(code(&["simulate", "--mi", "1", "--M", "10"]), 2);
    assert_eq!(
        code(&[
            "simulate",
            "--rr",
            "q=0.5",
            "--M",
            "10",
            "--adversary",
            "oracle"
        ]),
        2
    );
    assert_eq!(
        code(&["sweep", "--param", "q", "--grid", "0.5,0.1", "--M", "10"]),
        2
    );
    assert_eq!(
        code(&["sweep", "--param", "tau", "--grid", "0.5", "--M", "10"]),
        2
    );
    assert_eq!(code(&["figures", "fig9"]), 2);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn failing_grid_point_exits_3_and_names_it() {
    let out = fanobound(&[
        "sweep",
        "--param",
        "q",
        "--grid",
        "0.2,0.5,1.5",
        "--M",
        "10",
        "--trials",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("q=1.5"), "{err}");
}

#[test]
fn simulate_without_noise_always_wins() {
    let r = rows(&ok(&[
        "simulate", "--rr", "q=0", "--M", "10", "--trials", "1000",
    ]));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].empirical_adv, Some(1.0));
    assert_eq!(r[0].n_trials, 1000);
}

#[test]
fn simulate_rr_half_is_reproducible() {
    let args = [
        "simulate",
        "--rr",
        "q=0.5",
        "--M",
        "10",
        "--uniform",
        "--trials",
        "100000",
        "--seed",
        "7",
    ];
    let first = ok(&args);
    let r = rows(&first);
    assert!(
        (r[0].empirical_adv.unwrap() - 0.5).abs() <= 0.01,
        "{:?}",
        r[0]
    );
    assert_eq!(r[0].seed, 7);
    assert_eq!(ok(&args), first);
}

#[test]
fn simulate_low_noise_gaussian() {
    let r = rows(&ok(&[
        "simulate",
        "--gaussian",
        "--onehot",
        "10",
        "--sigma",
        "0.25",
        "--trials",
        "10000",
    ]));
    assert!(r[0].empirical_adv.unwrap() >= 0.9, "{:?}", r[0]);
    assert_eq!(r[0].param, "sigma");
}

#[test]
fn simulate_with_encodings_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("enc.csv");
    std::fs::write(&path, "0,0\n1,0\n0,1\n").unwrap();
    let p = path.to_str().unwrap();
    let out = ok(&[
        "simulate",
        "--gaussian",
        "--encodings",
        p,
        "--sigma",
        "0.5",
        "--trials",
        "2000",
        "--bounds",
        "fano-thm2",
    ]);
    let r = rows(&out);
    assert!(r[0].bound_fano_thm2.is_some());
    assert!(r[0].bound_fano_thm1.is_none());
}

#[test]
fn sweep_csv_round_trips_exactly() {
    let text = ok(&[
        "sweep",
        "--param",
        "sigma",
        "--grid",
        "0.3,0.7,1.9",
        "--onehot",
        "5",
        "--trials",
        "3000",
        "--mc-samples",
        "2000",
        "--seed",
        "3",
    ]);
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "param,value,bound_fano_exact,bound_fano_thm1,bound_fano_thm2,bound_fano_mc,bound_gen_fano,bound_rero,mc_mi,mc_mi_stderr,empirical_adv,emp_ci_low,emp_ci_high,n_trials,seed"
    );
    let parsed = rows(&text);
    assert_eq!(parsed.len(), 3);
    assert_eq!(
        parsed.iter().map(|r| r.value).collect::<Vec<_>>(),
        vec![0.3, 0.7, 1.9]
    );
    assert!(parsed
        .iter()
        .all(|r| r.bound_fano_exact.is_none() && r.mc_mi.is_some()));

    let mut again = Vec::new();
    fanobound::cli::sweep::write_csv(&mut again, &parsed).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), text);
    for line in text.lines().skip(1) {
        for field in line.split(',').skip(1).filter(|f| !f.is_empty()) {
            let v: f64 = field.parse().unwrap();
            assert_eq!(
                format!("{:.16e}", v).parse::<f64>().unwrap(),
                v,
                "17 significant digits"
            );
        }
    }
}

#[test]
fn sweep_writes_file_and_disables_trials() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eps.csv");
    ok(&[
        "sweep",
        "--param",
        "epsilon",
        "--grid",
        "0.1,1,2.302585092994046",
        "--M",
        "10",
        "--trials",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    let r = rows_at(&out);
    assert!(r
        .iter()
        .all(|r| r.empirical_adv.is_none() && r.n_trials == 0));
    assert_eq!(r[2].bound_fano_thm1, Some(1.0));
}

fn figures(name: &str, dir: &Path, extra: &[&str]) -> Vec<String> {
    let mut args = vec!["figures", name, "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    ok(&args).lines().map(String::from).collect()
}

const QUICK: [&str; 4] = ["--trials", "5000", "--mc-samples", "5000"];

#[test]
fn presets_are_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for fig in ["fig2", "fig3a", "fig3b"] {
        let fa = figures(fig, a.path(), &QUICK);
        let fb = figures(fig, b.path(), &QUICK);
        assert_eq!(fa.len(), fb.len());
        for (x, y) in fa.iter().zip(&fb) {
            let name = Path::new(x).file_name().unwrap();
            assert_eq!(name, Path::new(y).file_name().unwrap());
            assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap(), "{x}");
        }
    }
}

#[test]
fn fig2_vacuity_wall_and_shape() {
    let dir = tempfile::tempdir().unwrap();
    let files = figures("fig2", dir.path(), &[]);
    assert_eq!(files.len(), 4);
    let curves: Vec<(f64, Vec<SweepRow>)> = [2.0, 10.0, 1e4, 1e10]
        .iter()
        .zip(&files)
        .map(|(&m, f)| (m, rows_at(Path::new(f))))
        .collect();
    for (m, rows) in &curves {
        assert_eq!(rows.len(), 200);
        let at_wall = rows
            .iter()
            .find(|r| r.value == m.ln())
            .expect("ln M on the grid");
        assert_eq!(at_wall.bound_fano_thm1, Some(1.0), "M={m}");
        let adv: Vec<f64> = rows.iter().map(|r| r.bound_fano_thm1.unwrap()).collect();
        assert!(adv.windows(2).all(|w| w[1] >= w[0]), "M={m} not monotone");
    }
    for pair in curves.windows(2) {
        for (small, large) in pair[0].1.iter().zip(&pair[1].1) {
            assert!(
                large.bound_fano_thm1.unwrap() <= small.bound_fano_thm1.unwrap(),
                "eps={}",
                small.value
            );
        }
    }
}

fn fig3a_rows() -> Vec<SweepRow> {
    let dir = tempfile::tempdir().unwrap();
    let files = figures("fig3a", dir.path(), &[]);
    rows_at(Path::new(&files[0]))
}

#[test]
fn fig3a_exact_fano_tracks_empirical() {
    for r in fig3a_rows() {
        let exact = r.bound_fano_exact.unwrap();
        let emp = r.empirical_adv.unwrap();
        let half = (r.emp_ci_high.unwrap() - r.emp_ci_low.unwrap()) / 2.0;
        assert!(emp <= exact + 3.0 * half, "q={}: {emp} > {exact}", r.value);
        assert!(exact <= r.bound_fano_thm1.unwrap() + 1e-12, "q={}", r.value);
        if r.value < 1.0 {
            assert!(
                (exact - emp).abs() <= 0.01,
                "q={}: gap {}",
                r.value,
                exact - emp
            );
        }
    }
}

#[test]
fn fig3a_thm1_below_rero() {
    let bad: Vec<String> = fig3a_rows()
        .iter()
        .filter(|r| r.bound_fano_thm1.unwrap() > r.bound_rero.unwrap() + 1e-9)
        .map(|r| {
            format!(
                "q={} thm1={} rero={}",
                r.value,
                r.bound_fano_thm1.unwrap(),
                r.bound_rero.unwrap()
            )
        })
        .collect();
    assert!(bad.is_empty(), "thm1 above rero at {bad:#?}");
}

fn fig3b_rows() -> Vec<SweepRow> {
    let dir = tempfile::tempdir().unwrap();
    let files = figures("fig3b", dir.path(), &[]);
    rows_at(Path::new(&files[0]))
}

#[test]
fn fig3b_thm2_below_thm1() {
    let rows = fig3b_rows();
    assert_eq!(rows.len(), 12);
    for r in rows {
        assert!(
            r.bound_fano_thm2.unwrap() <= r.bound_fano_thm1.unwrap() + 1e-12,
            "sigma={}",
            r.value
        );
    }
}

#[test]
fn fig3b_thm1_below_rero() {
    let bad: Vec<String> = fig3b_rows()
        .iter()
        .filter(|r| r.bound_fano_thm1.unwrap() > r.bound_rero.unwrap())
        .map(|r| {
            format!(
                "sigma={} thm1={} rero={}",
                r.value,
                r.bound_fano_thm1.unwrap(),
                r.bound_rero.unwrap()
            )
        })
        .collect();
    assert!(bad.is_empty(), "thm1 above rero at {bad:#?}");
}
