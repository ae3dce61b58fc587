use std::path::Path;
use std::process::{Command, Output};

fn gravkick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gravkick")).args(args).env_remove("GRAVKICK_OUT").output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let out = dir.to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    gravkick(&all)
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn quantity(dir: &Path, name: &str) -> String {
    let text = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{name},")).map(str::to_owned))
        .unwrap_or_else(|| panic!("no `{name}` in summary"))
}

fn number(dir: &Path, name: &str) -> f64 {
    quantity(dir, name).parse().unwrap()
}

/// First stderr line must be a JSON object naming the error.
fn json_error(o: &Output) -> serde_json::Value {
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    serde_json::from_str(err.lines().next().unwrap()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn simulate_fig2_preset() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["simulate", "--scenario", "fig2"]));
    assert!((number(t.path(), "exact_mean") - -0.344230278083942).abs() < 1e-8);
    assert!((number(t.path(), "delta_ef") - -0.463517004759994).abs() < 1e-8);
    assert!((number(t.path(), "postselection_probability") - 0.124961322776914).abs() < 1e-8);
    assert!(t.path().join("wavefunction.csv").exists());
    assert!(!t.path().join("fig2.svg").exists());
}

#[test]
fn simulate_amplification_gain() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["simulate", "--scenario", "amplification"]));
    let g = number(t.path(), "gain");
    assert!((g / 1059.88502854004 - 1.0).abs() < 1e-6, "{g}");
    assert!((number(t.path(), "postselection_probability") / 1.8007640806e-7 - 1.0).abs() < 1e-3);
    assert!((number(t.path(), "beta2_minus_alpha2") / 8.48708e-4 - 1.0).abs() < 1e-5);
    assert_eq!(quantity(t.path(), "regime"), "weak");
}

#[test]
fn equal_kicks_agree_exactly() {
    let t = tempfile::tempdir().unwrap();
    let cfg =
        write_config(t.path(), r#"{"units":"natural","source":{"beta":0.8},"kicks":{"delta_A":0.25,"delta_B":0.25}}"#);
    ok(&run_in(&t.path().join("o"), &["simulate", &cfg]));
    let o = t.path().join("o");
    assert_eq!(quantity(&o, "exact_mean"), "2.50000000e-1");
    assert_eq!(quantity(&o, "first_order_mean"), "2.50000000e-1");
    assert!(number(&o, "abs_error") < 1e-15);
}

#[test]
fn si_output_scales_momenta() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["simulate", "--scenario", "caseB"]));
    let si = number(t.path(), "delta_A");
    assert!((si / 2.08571875e-32 - 1.0).abs() < 1e-8);
    ok(&run_in(t.path(), &["simulate", "--scenario", "caseB", "--units", "natural"]));
    assert!((number(t.path(), "delta_A") / 1.97778730322356e-5 - 1.0).abs() < 1e-8);
    let wave = std::fs::read_to_string(t.path().join("wavefunction.csv")).unwrap();
    assert!(wave.starts_with("# units=natural, W=1.00000000e-7\n"));
}

#[test]
fn schema_violation_names_the_field() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(
        t.path(),
        "{\n  \"units\": \"natural\",\n  \"source\": {\"beta\": 0.9},\n  \"kicks\": {\"delta_A\": 0.7, \"delta_C\": 0.1}\n}",
    );
    let o = run_in(&t.path().join("o"), &["simulate", &cfg]);
    let e = json_error(&o);
    assert_eq!(e["error"], "config");
    assert_eq!(e["field"], "kicks.delta_C");
    assert_eq!(e["line"], 4);
    assert!(!t.path().join("o").exists());

    let cfg = write_config(t.path(), r#"{"units":"imperial","source":{"beta":0.9},"kicks":{}}"#);
    assert_eq!(json_error(&run_in(t.path(), &["simulate", &cfg]))["field"], "units");
}

#[test]
fn both_kick_forms_are_rejected() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(
        t.path(),
        r#"{"units":"si","source":{"gain":10},"probe":{"W":1e-7},
            "kicks":{"delta_A":1e-30,"delta_B":1e-31,"M":1e-14,"m":1e-20,"T":0.5,"x_A":4e-7,"x_B":1e-4}}"#,
    );
    let e = json_error(&run_in(t.path(), &["simulate", &cfg]));
    assert_eq!(e["field"], "kicks");
}

#[test]
fn impossible_postselection_fails() {
    let t = tempfile::tempdir().unwrap();
    let cfg = write_config(
        t.path(),
        r#"{"units":"natural","source":{"alpha":0.0,"beta":1.0},"kicks":{"delta_A":0.7,"delta_B":0.1},
            "postselection":{"A":[1.0,0.0],"B":[0.0,0.0]}}"#,
    );
    let o = run_in(&t.path().join("o"), &["simulate", &cfg]);
    assert_eq!(json_error(&o)["error"], "postselection-impossible");
    assert!(String::from_utf8_lossy(&o.stderr).contains("error: "));
    assert!(!t.path().join("o").exists());
}

#[test]
fn missing_config_file_is_io_error() {
    let t = tempfile::tempdir().unwrap();
    let e = json_error(&run_in(t.path(), &["simulate", "/nonexistent/cfg.json"]));
    assert_eq!(e["error"], "io");
}

#[test]
fn feasibility_presets() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["feasibility", "--scenario", "caseB"]));
    assert!((number(t.path(), "abs_ratio") / 1.97778730322356e-3 - 1.0).abs() < 1e-8);
    assert!((number(t.path(), "tau") / 0.474126078413870 - 1.0).abs() < 1e-8);
    let sweep = std::fs::read_to_string(t.path().join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 2);

    ok(&run_in(t.path(), &["feasibility", "--scenario", "caseA", "--solve", "M", "--target", "1e-3"]));
    assert_eq!(quantity(t.path(), "solved_field"), "M");
    let m = number(t.path(), "solved_value");
    assert!((m / 1.57492881974905e-8 - 1.0).abs() < 1e-8, "{m}");
    assert!((number(t.path(), "abs_ratio") - 1e-3).abs() < 1e-12);
    assert!((number(t.path(), "T") / 0.109048998035190 - 1.0).abs() < 1e-8);
}

#[test]
fn feasibility_errors() {
    let t = tempfile::tempdir().unwrap();
    let o = t.path().join("o");
    let e = json_error(&run_in(&o, &["feasibility", "--scenario", "caseA", "--solve", "T", "--target", "0"]));
    assert_eq!(e["error"], "no-solution");
    assert!(!o.exists());
    let e = json_error(&run_in(&o, &["feasibility", "--scenario", "fig2"]));
    assert_eq!(e["field"], "kicks");
    assert!(!run_in(&o, &["feasibility", "--scenario", "caseA", "--solve", "M"]).status.success());
}

#[test]
fn montecarlo_reruns_are_identical() {
    let t = tempfile::tempdir().unwrap();
    let (a, b) = (t.path().join("a"), t.path().join("b"));
    ok(&run_in(&a, &["montecarlo", "--scenario", "fig2"]));
    ok(&run_in(&b, &["montecarlo", "--scenario", "fig2", "--workers", "3"]));
    for f in ["summary.csv", "histogram.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(quantity(&a, "seed"), "42");
    assert_eq!(quantity(&a, "trials"), "100000");
    let est = number(&a, "mean_kick_estimate");
    let se = number(&a, "std_error");
    assert!((est - -0.344230278083942).abs() < 5.0 * se);
    let hist = std::fs::read_to_string(a.join("histogram.csv")).unwrap();
    assert_eq!(hist.lines().count(), 101);
    let total: u64 = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total.to_string(), quantity(&a, "accepted"));
}

#[test]
fn montecarlo_single_trial() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["montecarlo", "--scenario", "fig2", "--trials", "1"]));
    assert!(["0", "1"].contains(&quantity(t.path(), "accepted").as_str()));
    assert_eq!(quantity(t.path(), "std_error"), "NA");
}

#[test]
fn montecarlo_amplification_acceptance_count() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["montecarlo", "--scenario", "amplification"]));
    let accepted = number(t.path(), "accepted");
    let expected = 1e7 * 1.8007640806e-7;
    assert!((accepted - expected).abs() <= 4.0 * expected.sqrt(), "{accepted}");
}

#[test]
fn montecarlo_needs_trials() {
    let t = tempfile::tempdir().unwrap();
    let e = json_error(&run_in(t.path(), &["montecarlo", "--scenario", "caseB"]));
    assert_eq!(e["field"], "montecarlo");
    assert!(!run_in(t.path(), &["montecarlo", "--scenario", "fig2", "--workers", "0"]).status.success());
}

#[test]
fn sweep_is_linear_in_m() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["sweep", "--scenario", "caseB", "--axis", "M=1e-14:2e-14:2"]));
    let text = std::fs::read_to_string(t.path().join("sweep.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    assert!((rows[1][9] / rows[0][9] - 2.0).abs() < 1e-8);
    // first row is the caseB point itself
    assert!((rows[0][9] / -1.97778730322356e-3 - 1.0).abs() < 1e-8);
}

#[test]
fn sweep_two_axes_row_major() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(
        t.path(),
        &["sweep", "--scenario", "caseB", "--axis", "M=1e-15:1e-13:10:log", "--axis2", "xA=2e-7:2e-6:10", "--svg"],
    ));
    let text = std::fs::read_to_string(t.path().join("sweep.csv")).unwrap();
    let rows: Vec<Vec<f64>> =
        text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 100);
    for (k, r) in rows.iter().enumerate() {
        let (i, j) = (k / 10, k % 10);
        let m = 1e-15 * 100f64.powf(i as f64 / 9.0);
        let xa = 2e-7 + 1.8e-6 * j as f64 / 9.0;
        assert!((r[0] / m - 1.0).abs() < 1e-8 && (r[3] / xa - 1.0).abs() < 1e-8, "row {k}");
    }
    let svg = std::fs::read_to_string(t.path().join("sweep.svg")).unwrap();
    assert_eq!(svg.matches("class=\"cell\"").count(), 100);
}

#[test]
fn sweep_rejects_bad_axes() {
    let t = tempfile::tempdir().unwrap();
    let o = t.path().join("o");
    for axis in ["Q=1:2:3", "M=1:2", "xB=1e-4:2e-4:1"] {
        let out = run_in(&o, &["sweep", "--scenario", "caseB", "--axis", axis]);
        assert!(!out.status.success(), "{axis}");
        json_error(&out);
    }
    assert!(!o.exists());
}

fn fig2_samples(dir: &Path) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(dir.join("fig2.csv")).unwrap();
    assert!(text.starts_with("p,branch_b,branch_a,sum_re,sum_im\n"));
    text.lines().skip(1).map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn fig2_curves() {
    let t = tempfile::tempdir().unwrap();
    let svg_path = t.path().join("fig2.svg");
    ok(&gravkick(&["fig2", "--out", svg_path.to_str().unwrap()]));
    let rows = fig2_samples(t.path());
    assert_eq!(rows.len(), 401);
    assert_eq!((rows[0][0], rows[400][0]), (-4.0, 4.0));

    let h = 8.0 / 400.0;
    let trap =
        |f: &dyn Fn(&Vec<f64>) -> f64| h * (rows.iter().map(f).sum::<f64>() - 0.5 * (f(&rows[0]) + f(&rows[400])));
    let mass = trap(&|r| r[3] * r[3]);
    let mean = trap(&|r| r[0] * r[3] * r[3]) / mass;
    // tails beyond |p| = 4 hold about 1e-4 of the probability
    assert!((mass - 1.0).abs() < 1e-3, "{mass}");
    assert!(mean < 0.0 && (mean - -0.344).abs() < 0.01, "{mean}");

    let psi = |p: f64| (2.0 * std::f64::consts::PI).powf(-0.25) * (-p * p / 4.0).exp();
    let mid = &rows[200];
    assert_eq!(mid[0], 0.0);
    assert!((mid[1] - 0.9 * psi(-0.1)).abs() < 1e-8);
    assert!((mid[2] + 0.19f64.sqrt() * psi(-0.7)).abs() < 1e-8);

    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    let lines: Vec<&str> = svg.lines().filter(|l| l.contains("<polyline")).collect();
    assert_eq!(lines.len(), 3);
    for l in lines {
        let pts = l.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert_eq!(pts.split(' ').count(), 401);
        for pair in pts.split(' ') {
            let (x, y) = pair.split_once(',').unwrap();
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((0.0..=640.0).contains(&x) && (0.0..=400.0).contains(&y));
        }
    }
}

#[test]
fn fig2_default_path_uses_env() {
    let t = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gravkick")).arg("fig2").env("GRAVKICK_OUT", t.path()).output().unwrap();
    ok(&o);
    assert!(t.path().join("fig2.svg").exists() && t.path().join("fig2.csv").exists());
}

#[test]
fn fig2_unwritable_path() {
    let t = tempfile::tempdir().unwrap();
    std::fs::write(t.path().join("file"), "").unwrap();
    let svg = t.path().join("file/fig2.svg");
    let o = gravkick(&["fig2", "--out", svg.to_str().unwrap()]);
    assert_eq!(json_error(&o)["error"], "io");
}

#[test]
fn simulate_svg_option() {
    let t = tempfile::tempdir().unwrap();
    ok(&run_in(t.path(), &["simulate", "--scenario", "fig2", "--svg"]));
    let svg = std::fs::read_to_string(t.path().join("fig2.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn out_falls_back_to_env() {
    let t = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gravkick"))
        .args(["simulate", "--scenario", "fig2"])
        .env("GRAVKICK_OUT", t.path().join("env"))
        .output()
        .unwrap();
    ok(&o);
    assert!(t.path().join("env/summary.csv").exists());
    let o = Command::new(env!("CARGO_BIN_EXE_gravkick"))
        .args(["simulate", "--scenario", "fig2", "--out"])
        .arg(t.path().join("flag"))
        .env("GRAVKICK_OUT", t.path().join("env2"))
        .output()
        .unwrap();
    ok(&o);
    assert!(t.path().join("flag/summary.csv").exists() && !t.path().join("env2").exists());
}

#[test]
fn help_lists_flags() {
    let expected: [(&str, &[&str]); 5] = [
        ("simulate", &["--scenario", "--out", "--units", "--svg"]),
        ("feasibility", &["--scenario", "--out", "--units", "--solve", "--target"]),
        ("montecarlo", &["--scenario", "--out", "--units", "--trials", "--seed", "--workers"]),
        ("sweep", &["--scenario", "--out", "--units", "--axis", "--axis2", "--svg", "--workers"]),
        ("fig2", &["--out"]),
    ];
    for (cmd, flags) in expected {
        let o = gravkick(&[cmd, "--help"]);
        ok(&o);
        let text = String::from_utf8_lossy(&o.stdout);
        for f in flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
        assert!(text.contains("GRAVKICK_OUT") || cmd == "fig2");
    }
    ok(&gravkick(&["presets", "--help"]));
}

#[test]
fn unknown_flags_are_errors() {
    for args in [&["simulate", "--scenario", "fig2", "--bogus"][..], &["frobnicate"], &["fig2", "--svg"]] {
        let o = gravkick(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(json_error(&o)["error"], "usage");
    }
}

#[test]
fn presets_list_and_show() {
    let o = gravkick(&["presets", "list"]);
    ok(&o);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "fig2\namplification\ncaseA\ncaseB\n");
    let o = gravkick(&["presets", "show", "caseB"]);
    ok(&o);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kicks"]["x_A"], 4e-7);
    assert_eq!(v["source"]["gain"], 100.0);
    assert!(!gravkick(&["presets", "show", "nope"]).status.success());
}

#[test]
fn preset_files_round_trip_through_config_path() {
    let t = tempfile::tempdir().unwrap();
    let o = gravkick(&["presets", "show", "fig2"]);
    let cfg = write_config(t.path(), &String::from_utf8_lossy(&o.stdout));
    ok(&run_in(&t.path().join("a"), &["simulate", &cfg]));
    ok(&run_in(&t.path().join("b"), &["simulate", "--scenario", "fig2"]));
    assert_eq!(
        std::fs::read(t.path().join("a/summary.csv")).unwrap(),
        std::fs::read(t.path().join("b/summary.csv")).unwrap()
    );
}
