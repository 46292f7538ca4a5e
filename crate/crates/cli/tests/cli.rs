use std::path::PathBuf;
use std::process::{Command, Output};

use cfgain::counterfactual::{check_identities, GainSummary};

fn cfgain(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfgain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn data(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    root.join(name).to_string_lossy().into_owned()
}

fn temp(name: &str, contents: &str) -> String {
    let dir = std::env::temp_dir().join(format!("cfgain-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn three_path_report_json() {
    let o = cfgain(&[
        "report",
        "--scenario",
        "three-path",
        "--format",
        "json",
        "--no-banner",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(o.stderr.is_empty());
    let r: GainSummary = serde_json::from_str(&stdout(&o)).unwrap();
    let want = [(4.0, 1.0), (4.0, 1.0), (16.0, -1.0)];
    for (out, (blocked, kd)) in r.outcomes.iter().zip(want) {
        assert!((out.p_m_given_block - blocked / 27.0).abs() < 1e-11);
        assert!((out.kd - kd / 9.0).abs() < 1e-11);
    }
    assert!((r.gain - 7.0 / 27.0).abs() < 1e-11);
    assert!(check_identities(&r, 1e-10).is_empty());
}

#[test]
fn json_round_trip_is_byte_identical() {
    for name in ["ev", "kd9", "three-path", "mixture"] {
        let o = cfgain(&[
            "report",
            "--scenario",
            name,
            "--format",
            "json",
            "--no-banner",
        ]);
        let text = stdout(&o);
        let parsed: GainSummary = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&parsed).unwrap() + "\n";
        assert_eq!(text, again, "{name}");
    }
}

#[test]
fn identical_runs_give_identical_bytes() {
    let args = [
        "discriminate",
        "--scenario",
        "three-path",
        "--trials",
        "200000",
        "--seed",
        "5",
    ];
    let a = cfgain(&args);
    let b = cfgain(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(stderr(&a).starts_with("cfgain "));
}

#[test]
fn report_from_file_with_self_check() {
    let file = data("three_path.json");
    let o = cfgain(&[
        "report",
        "--input",
        &file,
        "--block",
        "F",
        "--self-check",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: GainSummary = serde_json::from_str(&stdout(&o)).unwrap();
    let d2 = r.probe("D2").unwrap();
    assert!((d2.p_m_given_block - 2.0 / 27.0).abs() < 1e-11);
    assert_eq!(d2.kd, 0.0);

    let scenario = cfgain(&[
        "report",
        "--scenario",
        "three-path",
        "--format",
        "json",
        "--no-banner",
    ]);
    let from_scenario: GainSummary = serde_json::from_str(&stdout(&scenario)).unwrap();
    assert_eq!(r.outcomes, from_scenario.outcomes);
}

#[test]
fn malformed_input_is_line_anchored() {
    let file = temp(
        "broken.json",
        "{\n  \"dim\": 3,\n  \"elements\": [\n    { \"i\": 0, \"j\": 1, \"theta\": }\n  ]\n}\n",
    );
    let o = cfgain(&["report", "--input", &file, "--block", "F"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("broken.json:4:"), "{}", stderr(&o));
}

#[test]
fn unknown_fields_are_rejected() {
    let file = temp(
        "typo.json",
        "{\"dim\": 2, \"elements\": [], \"input\": [[1,0],[0,0]], \"tagged_path\": []}",
    );
    let o = cfgain(&["report", "--input", &file, "--block", "in1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tagged_path"), "{}", stderr(&o));
}

#[test]
fn user_errors_exit_2() {
    let file = data("three_path.json");
    for args in [
        vec!["report", "--scenario", "bomb"],
        vec!["report"],
        vec!["report", "--input", &file, "--block", "nowhere"],
        vec!["report", "--input", &file],
        vec!["report", "--input", &file, "--block", "F", "--pa", "0.3"],
        vec!["sweep", "--grid", "0:1:0"],
        vec!["sweep", "--grid", "0:2:3"],
        vec!["optimize", "--pa", "1.5"],
        vec!["discriminate", "--scenario", "kd9", "--trials", "0"],
        vec!["discriminate", "--scenario", "nope"],
        vec!["frobnicate"],
    ] {
        let o = cfgain(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn sweep_csv() {
    let o = cfgain(&["sweep", "--grid", "0:1:7", "--format", "csv", "--no-banner"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("p_a,max_bound,ev_bound,achieved,saturated")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0], ["0.0", "0.0", "0.0", "0.0", "true"]);
    let third = &rows[2];
    assert_eq!(third[0], "0.333333333333");
    assert_eq!(third[1], "0.333333333333");
    assert_eq!(third[3], "0.333333333333");
    assert_eq!(rows[3][2], "0.25");
}

#[test]
fn sweep_without_false_positives() {
    let o = cfgain(&[
        "sweep",
        "--grid",
        "0.5:0.5:1",
        "--fp-cap",
        "0",
        "--format",
        "json",
        "--no-banner",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["achieved"], 0.25);
    assert_eq!(rows[0]["saturated"], true);
}

#[test]
fn discriminate_examples() {
    let o = cfgain(&[
        "discriminate",
        "--scenario",
        "kd9",
        "--trials",
        "1000000",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let (emp, ana, sig) = (
        v["empirical"].as_f64().unwrap(),
        v["analytic"].as_f64().unwrap(),
        v["sigma"].as_f64().unwrap(),
    );
    assert!((ana - 1.0 / 6.0).abs() < 1e-11);
    assert!((emp - ana).abs() <= 5.0 * sig);
    assert_eq!(v["generator"], "ChaCha8");

    let o = cfgain(&[
        "discriminate",
        "--scenario",
        "ev",
        "--pa",
        "0.3333333",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["analytic"].as_f64().unwrap() - 2.0 / 9.0).abs() < 1e-6);

    for seed in ["0", "1", "2"] {
        let o = cfgain(&[
            "discriminate",
            "--scenario",
            "kd9",
            "--trials",
            "1",
            "--seed",
            seed,
            "--format",
            "json",
        ]);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        let e = v["empirical"].as_f64().unwrap();
        assert!(e == 0.0 || e == 1.0);
    }
}

#[test]
fn scenarios_match_reference() {
    for name in ["ev", "kd9", "three-path", "mixture"] {
        let o = cfgain(&[
            "scenario",
            "--scenario",
            name,
            "--format",
            "json",
            "--no-banner",
        ]);
        assert!(o.status.success(), "{name}: {}", stderr(&o));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["pass"], true);
    }
    let o = cfgain(&[
        "report",
        "--scenario",
        "mixture",
        "--paths",
        "2",
        "--format",
        "json",
    ]);
    let r: GainSummary = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r.gain, 0.0);
    assert_eq!(r.delta_a, 0.5);
}

#[test]
fn optimize_reaches_one_third() {
    let o = cfgain(&[
        "optimize",
        "--pa",
        "0.3333333333333333",
        "--paths",
        "9",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["achieved"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert_eq!(v["saturated"], true);
    assert_eq!(v["outputs"].as_array().unwrap().len(), 9);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("cfgain-out-{}.csv", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    let o = cfgain(&[
        "report",
        "--scenario",
        "kd9",
        "--format",
        "csv",
        "--out",
        &p,
        "--no-banner",
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("label,kind,p_m,"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn tables_render() {
    for args in [
        vec!["report", "--scenario", "kd9"],
        vec!["scenario", "--scenario", "three-path"],
        vec!["sweep", "--grid", "0.1:0.9:3"],
        vec!["optimize", "--pa", "0.2"],
        vec!["discriminate", "--scenario", "mixture", "--trials", "1000"],
    ] {
        let o = cfgain(&args);
        assert!(o.status.success(), "{args:?}");
        assert!(stdout(&o).contains("---"), "{args:?}");
    }
}
