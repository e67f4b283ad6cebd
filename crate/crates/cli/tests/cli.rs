use std::process::{Command, Output};

fn rrt_perc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrt-perc")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn oracle_passes_and_writes_csv_blocks() {
    let out = rrt_perc(&["oracle", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for block in ["# coupling", "# ewens", "# census_chain", "# checks"] {
        assert!(text.contains(block), "missing {block}");
    }
    assert!(text.contains("n,instances,failures,counterexample"));
}

#[test]
fn json_output_mirrors_tables() {
    let out = rrt_perc(&["oracle", "--n", "5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["command"], "oracle");
    assert_eq!(v["passed"], true);
    let rows = v["coupling"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    // (n - 1)! 2^n instances at n = 5
    assert_eq!(rows[4]["instances"], 24 * 32);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn output_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("proportions-{workers}.csv"));
        let out = rrt_perc(&[
            "proportions",
            "--n",
            "20000",
            "--reps",
            "6",
            "--seed",
            "99",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.code().is_some_and(|c| c <= 1), "{out:?}");
        assert!(out.stdout.is_empty());
        files.push(std::fs::read(&path).unwrap());
    }
    assert!(!files[0].is_empty());
    assert_eq!(files[0], files[1]);

    let other = rrt_perc(&["proportions", "--n", "20000", "--reps", "6", "--seed", "100"]);
    assert_ne!(other.stdout, files[0]);
}

#[test]
fn config_errors_exit_with_2() {
    for args in [
        &["proportions", "--p", "1.5", "--n", "100"][..],
        &["largest", "--p", "0.5", "--q", "1.5", "--n-grid", "64,128"][..],
        &["oracle", "--n", "12"][..],
        &["proportions", "--reps", "0", "--n", "100"][..],
        &["grow", "--n", "0"][..],
    ] {
        let out = rrt_perc(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn failed_check_exits_with_1() {
    // the l^q tail share already exceeds 5% at n = 2^16
    let out = rrt_perc(&["largest", "--n-grid", "1024,4096,16384,65536", "--reps", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l.starts_with("lq_tail_share,false")), "{text}");
}

#[test]
fn grow_and_export_dot() {
    let out = rrt_perc(&["grow", "--n", "12", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 12);
    let parents = v["parent"].as_array().unwrap();
    assert_eq!(parents.len(), 11);
    for (i, p) in parents.iter().enumerate() {
        let p = p.as_u64().unwrap() as usize;
        assert!(p >= 1 && p < i + 2);
    }
    assert!(v.get("marks").is_none_or(|m| m.is_null()));

    let marked = rrt_perc(&["grow", "--n", "12", "--seed", "5", "--p", "0.5"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&marked)).unwrap();
    assert_eq!(v["marks"].as_array().unwrap().len(), 12);

    let dot = stdout(&rrt_perc(&["export-dot", "--n", "12", "--seed", "5"]));
    assert!(dot.starts_with("graph rrt {"));
    assert_eq!(dot.matches(" -- ").count(), 11);
}
