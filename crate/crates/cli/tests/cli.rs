use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use opineq::catalog::select;
use opineq::harness::{read_jsonl, Summary};
use opineq::sampler::sample_case;
use tempfile::TempDir;

fn oel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oel"))
        .args(args)
        .env_remove("OEL_SEED")
        .output()
        .expect("run oel")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn summary(path: &Path) -> Summary {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_h1_passes_and_writes_reports() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("h1.jsonl");
    let o = oel(&[
        "verify",
        "--case",
        "H1",
        "--trials",
        "1000",
        "--seed",
        "42",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports = read_jsonl(fs::read(&out).unwrap().as_slice()).unwrap();
    assert_eq!(reports.len(), 2000);
    let s = summary(&dir.path().join("h1.summary.json"));
    assert!(s.passed);
    assert_eq!(s.trials, 2000);
}

#[test]
fn unknown_case_is_usage_error() {
    let o = oel(&["verify", "--case", "NOPE"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("NOPE"));
}

#[test]
fn t1_one_by_one_margins_match_scalar_chain() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("t1.jsonl");
    let o = oel(&[
        "verify",
        "--case",
        "T1",
        "--dims",
        "1",
        "--trials",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports = read_jsonl(fs::read(&out).unwrap().as_slice()).unwrap();
    // T1.lo, T1.hi and both reverses.
    assert_eq!(reports.len(), 400);
    for r in reports {
        let case = &select(&r.case_id).unwrap()[0];
        let trial = sample_case(case, 1, r.seed).unwrap();
        let a = trial.pair.a().matrix()[(0, 0)];
        let t = trial.pair.b().matrix()[(0, 0)] / a;
        let p = r.p.unwrap();
        let tp = (t.powf(p) - 1.0) / p;
        let mut gap = if r.case_id.starts_with("T1.lo") {
            tp - t.powf(p / 2.0) * t.ln()
        } else {
            0.5 * (1.0 + t.powf(p)) * t.ln() - tp
        };
        if r.case_id.ends_with("/rev") {
            gap = -gap;
        }
        assert!((r.margin - a * gap).abs() <= 1e-12 * r.scale, "{r:?}");
    }
}

#[test]
fn worst_seed_replays_in_isolation() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("run.jsonl");
    let o = oel(&[
        "verify",
        "--case",
        "T2.3",
        "--trials",
        "60",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&dir.path().join("run.summary.json"));
    let worst = &s.cases[0];
    let replay = dir.path().join("replay.jsonl");
    let o = oel(&[
        "verify",
        "--case",
        "T2.3",
        "--trials",
        "1",
        "--seed",
        &worst.worst_seed.to_string(),
        "--dims",
        &worst.worst_n.to_string(),
        "--out",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = &read_jsonl(fs::read(&replay).unwrap().as_slice()).unwrap()[0];
    assert!((r.margin / r.scale - worst.worst_margin).abs() <= 1e-12);
}

#[test]
fn seed_env_overrides_default() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.jsonl");
    let o = Command::new(env!("CARGO_BIN_EXE_oel"))
        .args([
            "verify",
            "--case",
            "T0",
            "--trials",
            "1",
            "--out",
            out.to_str().unwrap(),
        ])
        .env("OEL_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let r = &read_jsonl(fs::read(&out).unwrap().as_slice()).unwrap()[0];
    assert_eq!(r.seed, 7);
}

#[test]
fn csv_report_format() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.csv");
    let o = oel(&[
        "verify",
        "--case",
        "W1",
        "--trials",
        "5",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "case_id,seed,n,p,q,c,u,v,margin,scale,holds"
    );
    assert_eq!(lines.count(), 5);
}

#[test]
fn probe_reference_values() {
    for (id, needles) in [
        ("2.3i", vec!["0.071123", "-0.023104"]),
        ("2.3ii", vec!["0.166458", "-0.0416177"]),
        (
            "2.5",
            vec!["0.00118777", "-0.0118756", "-0.890458", "0.795489"],
        ),
    ] {
        let o = oel(&["probe", id]);
        assert_eq!(code(&o), 0, "{id}");
        let text = stdout(&o);
        assert!(!text.contains("FAIL"));
        for n in needles {
            assert!(text.contains(n), "{id}: {n} missing from\n{text}");
        }
    }
}

#[test]
fn probe_errors() {
    assert_eq!(code(&oel(&["probe", "9.9"])), 2);
    assert_eq!(code(&oel(&["probe", "--f", "tsallis", "--x", "-1"])), 2);
    assert_eq!(code(&oel(&["probe", "--f", "no_such_fn"])), 2);
}

#[test]
fn probe_grid_csv() {
    let o = oel(&[
        "probe",
        "--f",
        "thm22_lower",
        "--g",
        "hh_lower",
        "--p",
        "0.25",
        "--x",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    let value: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((value - 0.071123).abs() < 1e-5, "{row}");
}

#[test]
fn integral_defaults_and_node_ordering() {
    assert_eq!(code(&oel(&["integral"])), 0);
    let dir = TempDir::new().unwrap();
    let residual = |nodes: &str| {
        let out = dir.path().join(format!("i{nodes}.json"));
        oel(&[
            "integral",
            "--trials",
            "5",
            "--p-grid",
            "1",
            "--nodes",
            nodes,
            "--tol",
            "1",
            "--out",
            out.to_str().unwrap(),
        ]);
        let rows: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
        rows.as_array()
            .unwrap()
            .iter()
            .map(|r| r["residual"].as_f64().unwrap())
            .fold(0.0, f64::max)
    };
    assert!(residual("2") > residual("32"));
    assert_eq!(code(&oel(&["integral", "--p-grid", "0"])), 2);
}

#[test]
fn report_aggregates_shards() {
    let dir = TempDir::new().unwrap();
    let shard = dir.path().join("a.jsonl");
    oel(&[
        "verify",
        "--case",
        "H2.hi",
        "--trials",
        "30",
        "--out",
        shard.to_str().unwrap(),
    ]);
    let s = shard.to_str().unwrap();
    let out = dir.path().join("sum.json");
    let o = oel(&["report", s, s, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let agg = summary(&out);
    assert_eq!(agg.cases.len(), 1);
    assert_eq!(agg.cases[0].trials, 60);
}

#[test]
fn report_empty_and_malformed() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.jsonl");
    fs::write(&empty, "").unwrap();
    let o = oel(&["report", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 trials"));
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "\n{not json}\n").unwrap();
    let o = oel(&["report", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(code(&oel(&["report", "/no/such/file.jsonl"])), 3);
}

#[test]
fn sample_then_eval_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed": 3, "n": 3, "spectrum": [0.5, 2.0], "sandwich": [1.0, 3.0]}"#,
    )
    .unwrap();
    let pair = dir.path().join("pair.txt");
    let o = oel(&[
        "sample",
        cfg.to_str().unwrap(),
        "--out",
        pair.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = oel(&[
        "eval",
        pair.to_str().unwrap(),
        "--case",
        "T1R.2",
        "--p",
        "0.5",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["holds"], true);
    let o = oel(&[
        "eval",
        pair.to_str().unwrap(),
        "--case",
        "T1R.2/rev",
        "--p",
        "-0.5",
    ]);
    assert_eq!(code(&o), 2, "v > 1 violates the reversed hypothesis");
    fs::write(&pair, "2\n1 0\n0 x\n").unwrap();
    let o = oel(&["eval", pair.to_str().unwrap(), "--case", "H1.hg"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("line 3"));
}

#[test]
fn help_documents_flags() {
    let text = stdout(&oel(&["verify", "--help"]));
    for flag in [
        "--case", "--trials", "--dims", "--seed", "--tol", "--out", "--format", "OEL_SEED",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
    let text = stdout(&oel(&["integral", "--help"]));
    assert!(text.contains("--nodes"));
}
