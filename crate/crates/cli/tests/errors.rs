//! Error-path behavior: empty corpora, missing inputs, malformed rows in
//! lenient and strict modes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_cascades")
}

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("command runs")
}

#[test]
fn empty_corpus_fails_with_diagnostic() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("empty.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\n",
    )
    .unwrap();
    let output = run(
        &["influence", "--cascades", "empty.csv", "--out-dir", "out"],
        tmp.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("empty corpus"), "stderr: {stderr}");
}

#[test]
fn missing_input_fails_before_any_work() {
    let tmp = tempfile::tempdir().unwrap();
    let output = run(
        &[
            "map",
            "--users",
            "does-not-exist.csv",
            "--influence",
            "also-missing.csv",
            "--out-dir",
            "out",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("missing input"), "stderr: {stderr}");
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn malformed_rows_warn_but_do_not_abort() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cascades.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\n\
         c1,t1,u1,0,5\n\
         c1,t2,u2,oops,5\n\
         c1,t3,u3,20,-1\n\
         c1,t4,u4,30,5\n",
    )
    .unwrap();
    let output = run(
        &["influence", "--cascades", "cascades.csv", "--out-dir", "out"],
        tmp.path(),
    );
    assert!(output.status.success(), "lenient mode must not abort");
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("skipped 2 malformed row(s)"), "stderr: {stderr}");
    assert!(stderr.contains("line 3"), "per-row diagnostic expected: {stderr}");
    let written = std::fs::read_to_string(tmp.path().join("out/tweet_influence.csv")).unwrap();
    assert_eq!(written.lines().count(), 3, "two valid events plus header");
}

#[test]
fn strict_mode_aborts_on_malformed_rows() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cascades.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\n\
         c1,t1,u1,0,5\n\
         c1,t2,u2,oops,5\n",
    )
    .unwrap();
    let output = run(
        &[
            "--strict",
            "influence",
            "--cascades",
            "cascades.csv",
            "--out-dir",
            "out",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("strict mode"), "stderr: {stderr}");
}

#[test]
fn min_size_filter_applies() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cascades.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\n\
         c1,t1,u1,0,5\n\
         c2,t2,u2,0,5\n\
         c2,t3,u3,10,5\n\
         c2,t4,u4,11,5\n",
    )
    .unwrap();
    let output = run(
        &[
            "influence",
            "--cascades",
            "cascades.csv",
            "--min-size",
            "3",
            "--out-dir",
            "out",
        ],
        tmp.path(),
    );
    assert!(output.status.success());
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("1 cascades"), "stdout: {stdout}");
    let written = std::fs::read_to_string(tmp.path().join("out/user_influence.csv")).unwrap();
    assert!(!written.contains("u1"), "singleton cascade must be filtered");
}

#[test]
fn influence_rows_match_distinct_users() {
    let tmp = tempfile::tempdir().unwrap();
    // 3 cascades, 5 distinct users, some authoring several events
    std::fs::write(
        tmp.path().join("cascades.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\n\
         c1,t1,ada,0,5\n\
         c1,t2,bea,10,2\n\
         c2,t3,bea,0,2\n\
         c2,t4,cyd,5,9\n\
         c2,t5,ada,9,5\n\
         c3,t6,dee,0,1\n\
         c3,t7,eli,3,4\n\
         c3,t8,ada,4,5\n",
    )
    .unwrap();
    let output = run(
        &["influence", "--cascades", "cascades.csv", "--out-dir", "out"],
        tmp.path(),
    );
    assert!(output.status.success());
    let written = std::fs::read_to_string(tmp.path().join("out/user_influence.csv")).unwrap();
    assert_eq!(written.lines().count(), 6, "header plus one row per distinct user");
}

#[test]
fn config_file_is_applied_and_rejects_unknown_keys() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(
        tmp.path().join("cascades.csv"),
        "cascade_id,tweet_id,user_id,timestamp,followers\nc1,t1,u1,0,5\nc1,t2,u2,9,5\n",
    )
    .unwrap();
    std::fs::write(tmp.path().join("run.conf"), "min_size = 2\nr = 0.001\n").unwrap();
    let output = run(
        &[
            "--config",
            "run.conf",
            "influence",
            "--cascades",
            "cascades.csv",
            "--out-dir",
            "out",
        ],
        tmp.path(),
    );
    assert!(output.status.success());
    let manifest = std::fs::read_to_string(tmp.path().join("out/manifest.json")).unwrap();
    assert!(manifest.contains("\"min_size\": 2"));
    assert!(manifest.contains("\"r\": 0.001"));

    std::fs::write(tmp.path().join("bad.conf"), "not_a_key = 5\n").unwrap();
    let output = run(
        &[
            "--config",
            "bad.conf",
            "influence",
            "--cascades",
            "cascades.csv",
            "--out-dir",
            "out2",
        ],
        tmp.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown config key"), "stderr: {stderr}");
}

#[test]
fn oracle_rejects_oversized_corpora() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csv = String::from("cascade_id,tweet_id,user_id,timestamp,followers\n");
    for k in 0..12 {
        csv.push_str(&format!("c1,t{k},u{k},{k},5\n"));
    }
    std::fs::write(tmp.path().join("cascades.csv"), csv).unwrap();
    let output = run(
        &["oracle", "--cascades", "cascades.csv", "--out-dir", "out"],
        tmp.path(),
    );
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("oracle cap"), "stderr: {stderr}");
}
