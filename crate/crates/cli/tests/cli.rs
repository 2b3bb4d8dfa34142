use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fnirs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fnirs")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synth(dir: &Path) {
    let o = fnirs(&["synth", "--subjects", "2", "--channels", "4", "--trials", "6", "-o", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let cases: [&[&str]; 5] = [
        &["eval", "--algo", "xgb", "-i", dir],
        &["select", "--threshold", "1.01", "-i", dir],
        &["select", "--top-fraction", "0", "-i", dir],
        &["ttest", "--a-mean", "1", "--a-sd", "1", "--a-n", "1", "--b-mean", "0", "--b-sd", "1", "--b-n", "3"],
        &["eval", "--window", "1", "-i", dir],
    ];
    for args in cases {
        let o = fnirs(args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert!(stderr(&fnirs(cases[0])).contains("unknown algorithm"));
}

#[test]
fn help_exits_0() {
    assert_eq!(fnirs(&["--help"]).status.code(), Some(0));
}

#[test]
fn bad_bundles_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let data = tmp.path().join("S01/data.csv");
    let text = fs::read_to_string(&data).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[3] = lines[3].replacen(|c: char| c.is_ascii_digit(), "x", 1);
    fs::write(&data, lines.join("\n")).unwrap();
    let o = fnirs(&["eval", "-i", tmp.path().to_str().unwrap(), "-o", tmp.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let missing = tmp.path().join("nowhere");
    let o = fnirs(&["eval", "-i", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn channel_out_of_range_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let o = fnirs(&["eval", "--channels", "0,9", "-i", tmp.path().to_str().unwrap(), "-o", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn ttest_prints_welch_result() {
    let o = fnirs(&["ttest", "--a-mean", "88.72", "--a-sd", "6.05", "--a-n", "8", "--b-mean", "63.28", "--b-sd", "8.48", "--b-n", "8"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let t = v["result"]["t_statistic"].as_f64().unwrap();
    assert!((t - 6.91).abs() < 0.01, "{t}");
}

#[test]
fn ttest_on_equal_samples_is_null() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("a.csv");
    fs::write(&csv, "accuracy\n0.8\n0.9\n0.85\n").unwrap();
    let p = csv.to_str().unwrap();
    let o = fnirs(&["ttest", "--a-csv", p, "--b-csv", p]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["t_statistic"].as_f64(), Some(0.0));
    assert_eq!(v["result"]["p_value"].as_f64(), Some(1.0));
}

#[test]
fn eval_and_select_write_their_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let out = tmp.path().join("out");
    let (d, o) = (data.to_str().unwrap(), out.to_str().unwrap());

    let r = fnirs(&["eval", "--algo", "all", "--roc", "-i", d, "-o", o]);
    assert!(r.status.success(), "{}", stderr(&r));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 10);
    for name in ["confusion.txt", "eval_lda.json", "roc_mlp.svg"] {
        assert!(out.join(name).exists(), "{name}");
    }

    let r = fnirs(&["select", "--channels", "1,2,3", "-i", d, "-o", o]);
    assert!(r.status.success(), "{}", stderr(&r));
    let sel: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("selection.json")).unwrap()).unwrap();
    assert_eq!(sel["ranking"]["channels"], serde_json::json!([1, 2, 3]));
    for pair in sel["pairs"].as_array().unwrap() {
        assert!(pair["pearson_r"].as_f64().unwrap() < 0.4);
        assert!(pair["channels"].as_array().unwrap().iter().all(|c| (1..=3).contains(&c.as_u64().unwrap())));
    }
    assert!(out.join("adjacency.svg").exists() && out.join("accuracy_heatmap.svg").exists());

    let r = fnirs(&["features", "-i", d, "-o", o]);
    assert!(r.status.success(), "{}", stderr(&r));
    let header = fs::read_to_string(out.join("features.csv")).unwrap();
    // 4 channels × 16 features after subject, trial and label
    assert_eq!(header.lines().next().unwrap().split(',').count(), 3 + 64);
}

#[test]
fn subject_dependent_holdout_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let out = tmp.path().join("out");
    let r = fnirs(&[
        "eval", "--mode", "subject-dependent", "--protocol", "holdout",
        "-i", data.to_str().unwrap(), "-o", out.to_str().unwrap(),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("lda,oxy,subject-dependent,holdout,"));
}
