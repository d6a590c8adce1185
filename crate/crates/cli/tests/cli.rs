use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use casimir_ema::ingestion::load_scenario;
use casimir_ema_cli::{
    cmd_compare_rules, cmd_epsilon_sweep, cmd_eta_vs_filling, cmd_force_vs_separation, exit,
    RunOptions, Table,
};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn scenario(name: &str) -> casimir_ema::ingestion::Scenario {
    load_scenario(data().join("scenarios").join(name)).unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir-ema"))
        .args(args)
        .output()
        .unwrap()
}

fn num(table: &Table, row: &[String], col: &str) -> f64 {
    row[table.column(col).unwrap()].parse().unwrap()
}

/// `(key, value)` pairs of `col` for rows with `rule`.
fn series(table: &Table, key: &str, rule: &str, col: &str) -> Vec<(f64, f64)> {
    table
        .rows_where("rule", rule)
        .map(|r| (num(table, r, key), num(table, r, col)))
        .collect()
}

fn materials_scenario(dir: &Path, body: &str) -> PathBuf {
    let m = data().join("materials");
    let text = body
        .replace("@SIO2", m.join("sio2_oscillator.ini").to_str().unwrap())
        .replace("@AU", m.join("au_tabulated.ini").to_str().unwrap());
    let p = dir.join("s.ini");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn endpoint_fills_return_constituents() {
    let dir = tempfile::tempdir().unwrap();
    let p = materials_scenario(
        dir.path(),
        "[slab1]\nhost = @SIO2\ninclusion = @AU\nf = 0\na_nm = 5\n[separation]\nL_nm = 100\n\
         [rules]\nlist = maxwell-garnett\n[sweep]\naxis = f\nlist = 0, 1\n[zeta]\nvalues_eV = 0.18, 4.5\n",
    );
    let s = load_scenario(&p).unwrap();
    let t = cmd_epsilon_sweep(&s, &RunOptions::default()).unwrap();
    let spec = match &s.base.slab1 {
        casimir_ema::lifshitz::Slab::Composite { spec, .. } => spec.clone(),
        _ => unreachable!(),
    };
    for r in &t.rows {
        let f = num(&t, r, "f");
        let z = casimir_ema::dielectric::ImaginaryFrequency::new(num(&t, r, "zeta_eV")).unwrap();
        let want = if f == 0.0 {
            spec.host.eval(z).unwrap()
        } else {
            spec.inclusion.eval(z).unwrap()
        };
        assert_eq!(r[3], format!("{want:.10e}"));
    }
}

#[test]
fn wiener_lower_never_exceeds_upper() {
    let t = cmd_epsilon_sweep(&scenario("fig1_epsilon.ini"), &RunOptions::default()).unwrap();
    let lo = series(&t, "f", "wiener-lower", "eps_eff");
    let hi = series(&t, "f", "wiener-upper", "eps_eff");
    assert_eq!(lo.len(), hi.len());
    for (a, b) in lo.iter().zip(&hi) {
        assert!(a.1 <= b.1, "{a:?} {b:?}");
    }
}

#[test]
fn bruggeman_shows_percolation_inflection() {
    let t = cmd_epsilon_sweep(&scenario("fig1_epsilon.ini"), &RunOptions::default()).unwrap();
    let col: Vec<(f64, f64)> = t
        .rows_where("rule", "bruggeman")
        .filter(|r| r[2] == "0.18")
        .map(|r| (num(&t, r, "f"), num(&t, r, "eps_eff").ln()))
        .collect();
    // The knee is an inflection of ln ε̃ against f.
    let second: Vec<(f64, f64)> = col
        .windows(3)
        .map(|w| (w[1].0, w[2].1 - 2.0 * w[1].1 + w[0].1))
        .collect();
    let flip = second
        .windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)
        .map(|w| w[1].0)
        .expect("no inflection");
    assert!((0.3..=0.45).contains(&flip), "inflection at f = {flip}");
}

#[test]
fn force_table_anchors_and_trends() {
    let t = cmd_force_vs_separation(&scenario("fig2_f015.ini"), &RunOptions::default()).unwrap();
    for (_, eta) in series(&t, "L_nm", "ideal", "eta") {
        assert!((eta - 1.0).abs() < 1e-4);
    }
    let mg = series(&t, "L_nm", "maxwell-garnett", "eta");
    let br = series(&t, "L_nm", "bruggeman", "eta");
    for (a, b) in mg.iter().zip(&br) {
        assert!((a.1 - b.1).abs() / b.1 < 0.02);
    }
    assert!(t.rows.iter().all(|r| r[5] == "true"));

    let t = cmd_force_vs_separation(&scenario("fig2_f25.ini"), &RunOptions::default()).unwrap();
    let wu = series(&t, "L_nm", "wiener-upper", "eta");
    let br = series(&t, "L_nm", "bruggeman", "eta");
    let rel: Vec<f64> = wu
        .iter()
        .zip(&br)
        .map(|(a, b)| (a.1 - b.1).abs() / b.1)
        .collect();
    assert!(rel.windows(2).all(|w| w[1] > w[0]), "{rel:?}");
}

#[test]
fn validity_flag_is_reported_not_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let p = materials_scenario(
        dir.path(),
        "[slab1]\nhost = @SIO2\ninclusion = @AU\nf = 0.1\na_nm = 2000\n[separation]\nL_nm = 100\n[rules]\nlist = bruggeman\n",
    );
    let t = cmd_force_vs_separation(&load_scenario(&p).unwrap(), &RunOptions::default()).unwrap();
    assert_eq!(t.rows[0][5], "false");
    assert!(num(&t, &t.rows[0], "eta") > 0.0);
}

#[test]
fn eta_vs_filling_properties() {
    let t = cmd_eta_vs_filling(&scenario("fig3_eta_vs_f.ini"), &RunOptions::default()).unwrap();
    let at_zero: Vec<&str> = t.rows_where("f", "0").map(|r| r[2].as_str()).collect();
    assert!(at_zero.len() > 1 && at_zero.iter().all(|v| *v == at_zero[0]));
    let mg = series(&t, "f", "maxwell-garnett", "eta");
    let br = series(&t, "f", "bruggeman", "eta");
    for (a, b) in mg.iter().zip(&br).filter(|(a, _)| a.0 <= 0.025) {
        assert!((a.1 - b.1).abs() / b.1 < 0.01);
    }
    let at = |s: &[(f64, f64)], f: f64| s.iter().find(|p| p.0 == f).unwrap().1;
    assert!(at(&br, 0.4) > at(&mg, 0.4));
}

#[test]
fn identical_rules_compare_to_zero() {
    let (t, s) = cmd_compare_rules(
        &scenario("fig2_f25.ini"),
        "bruggeman",
        "bruggeman",
        &RunOptions::default(),
    )
    .unwrap();
    assert!(t.rows.iter().all(|r| r[4] == format!("{:.10e}", 0.0)));
    assert_eq!(s.max_rel_diff, 0.0);
}

#[test]
fn jobs_do_not_change_output() {
    let s = scenario("fig3_eta_vs_f.ini");
    let one = cmd_eta_vs_filling(
        &s,
        &RunOptions {
            jobs: Some(1),
            ..Default::default()
        },
    )
    .unwrap();
    let many = cmd_eta_vs_filling(
        &s,
        &RunOptions {
            jobs: Some(4),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(one.to_csv(), many.to_csv());
}

#[test]
fn binary_writes_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let sc = data().join("scenarios/fig2_f015.ini");
    let o = run(&[
        "force-vs-L",
        "--scenario",
        sc.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# casimir-ema force-vs-L\n"));
    assert!(text.contains("# scenario_sha256: "));
    assert!(text.contains("# material au: "));
    assert!(text.contains("\nL_nm,rule,eta,F_Pa,quad_err,validity_ok\n"));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn validate_reports_grid() {
    let sc = data().join("scenarios/fig3_eta_vs_f.ini");
    let o = run(&["validate", "--scenario", sc.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("filling fractions: 21"));
}

#[test]
fn exit_codes_separate_failure_classes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "validate",
        "--scenario",
        dir.path().join("none.ini").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(exit::IO));

    let bad = materials_scenario(
        dir.path(),
        "[slab1]\nhost = @SIO2\ninclusion = missing.ini\nf = 0.1\na_nm = 5\n[separation]\nL_nm = 100\n",
    );
    let o = run(&["validate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.ini"));

    let sc = data().join("scenarios/fig2_f015.ini");
    let o = run(&[
        "compare",
        "--scenario",
        sc.to_str().unwrap(),
        "--rule-a",
        "bruggeman",
        "--rule-b",
        "no-such-rule",
    ]);
    assert_eq!(o.status.code(), Some(exit::CONFIG));
}

#[test]
fn numeric_failure_leaves_no_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.csv"), "omega_eV,eps2\n0.5,1\n5,0.5\n").unwrap();
    fs::write(
        dir.path().join("t.ini"),
        "[material]\nname = t\nkind = tabulated\n[tabulated]\npath = t.csv\n",
    )
    .unwrap();
    let sc = dir.path().join("s.ini");
    fs::write(
        &sc,
        "[slab1]\nhost = vacuum\ninclusion = t.ini\nf = 0.2\na_nm = 5\n[separation]\nL_nm = 100\n\
         [rules]\nlist = bruggeman\n[zeta]\nvalues_eV = 1\n",
    )
    .unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&[
        "epsilon-sweep",
        "--scenario",
        sc.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(exit::NUMERIC));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: "));
    assert!(!out.exists());
    assert!(!dir.path().join("out.csv.partial").exists());
}
