use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use robust_center_cli::io::read_points;
use robust_center_cli::report::{RunReport, Status};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robust-center"))
}

fn exec(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = exec(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_line(dir: &Path, values: &[f64], weights: Option<&[f64]>) -> PathBuf {
    let path = dir.join("line.jsonl");
    let mut text = String::new();
    for (i, v) in values.iter().enumerate() {
        match weights {
            Some(w) => text += &format!("{{\"id\":{i},\"coords\":[{v}],\"weight\":{}}}\n", w[i]),
            None => text += &format!("{{\"id\":{i},\"coords\":[{v}]}}\n"),
        }
    }
    fs::write(&path, text).unwrap();
    path
}

fn verdicts(out: &Output) -> Vec<(String, String)> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| {
            let mut it = l.split_whitespace();
            (
                it.next().unwrap().to_string(),
                it.next().unwrap().to_string(),
            )
        })
        .collect()
}

#[test]
fn generate_line_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.jsonl");
    ok(&[
        "generate",
        "--n",
        "4",
        "--dim",
        "1",
        "--layout",
        "grid",
        "--out",
        s(&out),
    ]);
    let coords: Vec<Vec<f64>> = read_points(&out)
        .unwrap()
        .into_iter()
        .map(|p| p.coords)
        .collect();
    assert_eq!(coords, [[0.0], [1.0], [2.0], [3.0]]);
}

#[test]
fn generate_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    let c = dir.path().join("c.jsonl");
    let args = |p: &Path, seed: &str| {
        let p = s(p).to_string();
        let seed = seed.to_string();
        move || {
            ok(&[
                "generate",
                "--n",
                "50",
                "--layout",
                "blobs",
                "--outliers",
                "2",
                "--weights",
                "uniform:0.3:1",
                "--categories",
                "3",
                "--seed",
                &seed,
                "--out",
                &p,
            ]);
        }
    };
    args(&a, "11")();
    args(&b, "11")();
    args(&c, "12")();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
}

#[test]
fn generate_plants_exactly_the_requested_outliers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.jsonl");
    ok(&[
        "generate",
        "--n",
        "30",
        "--layout",
        "blobs",
        "--blobs",
        "2",
        "--spread",
        "1",
        "--outliers",
        "1",
        "--displacement",
        "10",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    let pts = read_points(&out).unwrap();
    let d = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    // far means at least the displacement from every other point
    let far: Vec<usize> = (0..pts.len())
        .filter(|&i| (0..pts.len()).all(|j| i == j || d(&pts[i].coords, &pts[j].coords) >= 10.0))
        .collect();
    assert_eq!(far, [29]);
}

#[test]
fn generate_rejects_bad_specs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    assert!(!exec(&["generate", "--n", "0", "--out", s(&out)])
        .status
        .success());
    assert!(
        !exec(&["generate", "--n", "5", "--outliers", "5", "--out", s(&out)])
            .status
            .success()
    );
    assert!(!exec(&[
        "generate",
        "--n",
        "5",
        "--weights",
        "uniform:0.9:0.1",
        "--out",
        s(&out)
    ])
    .status
    .success());
}

#[test]
fn run_seq_rmc_on_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line(dir.path(), &[0.0, 1.0, 2.0, 10.0], None);
    let rep = dir.path().join("r.json");
    ok(&[
        "run",
        "--dataset",
        s(&data),
        "--k",
        "1",
        "--z",
        "1",
        "--report",
        s(&rep),
    ]);
    let r = RunReport::read_json(&rep).unwrap();
    // the optimum is center 1 with the far point dropped: r* = 1
    assert!(r.solution.cost <= 1.5);
    assert_eq!(r.solution.cost, 1.0);
    assert!(r.solution.feasible);
    assert_eq!(r.instance.rank, Some(1));
    assert_eq!(r.solution.eps_prime, Some(0.5 / 3.0));
    let json: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    for key in [
        "schema_version",
        "instance",
        "mode",
        "solution",
        "stats",
        "wall_time_ms",
    ] {
        assert!(json.get(key).is_some(), "missing {key}");
    }
    assert!(json["stats"]["distance_evals"].as_u64().unwrap() > 0);
}

#[test]
fn mr_with_one_partition_matches_seq() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&[
        "generate",
        "--n",
        "40",
        "--outliers",
        "2",
        "--seed",
        "5",
        "--out",
        s(&data),
    ]);
    let seq = dir.path().join("seq.json");
    let mr = dir.path().join("mr.json");
    let base = ["run", "--dataset", s(&data), "--k", "2", "--z", "2"];
    ok(&[&base[..], &["--report", s(&seq)]].concat());
    ok(&[
        &base[..],
        &["--mode", "mr", "--partitions", "1", "--report", s(&mr)],
    ]
    .concat());
    let a = RunReport::read_json(&seq).unwrap();
    let b = RunReport::read_json(&mr).unwrap();
    assert_eq!(a.solution, b.solution);
    assert_eq!(b.stats.rounds, 2);
}

#[test]
fn stream_mode_reports_passes() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&[
        "generate",
        "--n",
        "30",
        "--weights",
        "uniform:0.3:1",
        "--seed",
        "8",
        "--out",
        s(&data),
    ]);
    for problem in ["rmc", "rkc"] {
        let rep = dir.path().join(format!("{problem}.json"));
        ok(&[
            "run",
            "--dataset",
            s(&data),
            "--problem",
            problem,
            "--mode",
            "stream",
            "--k",
            "2",
            "--z",
            "1",
            "--report",
            s(&rep),
        ]);
        let r = RunReport::read_json(&rep).unwrap();
        assert!(r.stats.passes >= 1);
        assert_eq!(r.stats.stream_reads, 30 * r.stats.passes);
        if problem == "rkc" {
            assert_eq!(r.stats.passes, r.trace.unwrap().iterations());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&[
        "generate",
        "--n",
        "60",
        "--weights",
        "uniform:0.3:1",
        "--seed",
        "2",
        "--out",
        s(&data),
    ]);
    for mode in ["seq", "mr", "stream"] {
        let mut reports = Vec::new();
        for i in 0..2 {
            let rep = dir.path().join(format!("{mode}{i}.json"));
            ok(&[
                "run",
                "--dataset",
                s(&data),
                "--problem",
                "rkc",
                "--mode",
                mode,
                "--z",
                "2",
                "--seed",
                "4",
                "--solver",
                "heuristic",
                "--report",
                s(&rep),
            ]);
            let mut r = RunReport::read_json(&rep).unwrap();
            r.wall_time_ms = 0.0;
            reports.push(r);
        }
        assert_eq!(reports[0], reports[1]);
    }
}

#[test]
fn infeasible_inputs_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line(dir.path(), &[0.0, 1.0, 2.0], None);
    let bad = [
        vec!["run", "--dataset", s(&data), "--problem", "rkc"],
        vec!["run", "--dataset", s(&data), "--k", "0"],
        vec!["run", "--dataset", s(&data)],
        vec!["run", "--dataset", s(&data), "--k", "1", "--z", "3"],
        vec!["run", "--dataset", s(&data), "--k", "1", "--epsilon", "1.5"],
    ];
    for args in bad {
        let out = exec(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
    let m = dir.path().join("m.json");
    fs::write(&m, r#"{"type":"partition","quotas":{"0":1}}"#).unwrap();
    let out = exec(&["run", "--dataset", s(&data), "--matroid", s(&m)]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("category"));
}

#[test]
fn matrix_datasets_and_transversal_matroids() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("m.json");
    fs::write(
        &data,
        r#"{"matrix":[[0,1,4,5],[1,0,3,4],[4,3,0,1],[5,4,1,0]],"weights":[0.5,0.5,0.5,0.5]}"#,
    )
    .unwrap();
    let mat = dir.path().join("t.json");
    fs::write(
        &mat,
        r#"{"type":"transversal","slots":2,"adjacency":[[0],[0],[1],[1]]}"#,
    )
    .unwrap();
    let rep = dir.path().join("r.json");
    ok(&[
        "run",
        "--dataset",
        s(&data),
        "--matroid",
        s(&mat),
        "--report",
        s(&rep),
    ]);
    let r = RunReport::read_json(&rep).unwrap();
    assert_eq!(r.solution.cost, 1.0);
    assert_eq!(r.solution.centers.len(), 2);
    let out = ok(&["verify", "--dataset", s(&data), "--report", s(&rep)]);
    assert!(verdicts(&out).iter().all(|(st, _)| st != "FAIL"));
}

#[test]
fn verify_passes_honest_reports_and_flags_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&[
        "generate",
        "--n",
        "20",
        "--outliers",
        "2",
        "--categories",
        "2",
        "--seed",
        "6",
        "--out",
        s(&data),
    ]);
    let mat = dir.path().join("p.json");
    fs::write(&mat, r#"{"type":"partition","quotas":{"0":1,"1":1}}"#).unwrap();
    let rep = dir.path().join("r.json");
    ok(&[
        "run",
        "--dataset",
        s(&data),
        "--matroid",
        s(&mat),
        "--z",
        "2",
        "--report",
        s(&rep),
    ]);
    let checked = dir.path().join("checked.json");
    let out = ok(&[
        "verify",
        "--dataset",
        s(&data),
        "--report",
        s(&rep),
        "--out",
        s(&checked),
    ]);
    let v = verdicts(&out);
    for name in [
        "feasibility",
        "cost",
        "optimality",
        "ratio",
        "C1",
        "P1",
        "P2",
    ] {
        assert!(v.contains(&("PASS".into(), name.into())), "{name}: {v:?}");
    }
    let with = RunReport::read_json(&checked).unwrap();
    assert!(with
        .verification
        .unwrap()
        .iter()
        .all(|x| x.status != Status::Fail));

    // a cost below the optimum cannot be honest
    let mut r = RunReport::read_json(&rep).unwrap();
    r.solution.cost = 0.0;
    let bad = dir.path().join("bad.json");
    r.write_json(&bad).unwrap();
    let out = exec(&["verify", "--dataset", s(&data), "--report", s(&bad)]);
    assert!(!out.status.success());
    assert!(verdicts(&out).contains(&("FAIL".into(), "optimality".into())));

    // two centers of one category violate the partition quota
    let mut r = RunReport::read_json(&rep).unwrap();
    let cats: Vec<u32> = read_points(&data)
        .unwrap()
        .iter()
        .map(|p| p.category.unwrap())
        .collect();
    let first = cats[0];
    let twin = (1..20).find(|&i| cats[i] == first).unwrap();
    r.solution.centers = vec![robust_center::PointId(0), robust_center::PointId(twin)];
    r.write_json(&bad).unwrap();
    let out = exec(&["verify", "--dataset", s(&data), "--report", s(&bad)]);
    assert!(!out.status.success());
    assert!(verdicts(&out).contains(&("FAIL".into(), "feasibility".into())));
}

#[test]
fn verify_mr_emits_one_verdict_per_partition_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&["generate", "--n", "25", "--seed", "9", "--out", s(&data)]);
    let rep = dir.path().join("r.json");
    ok(&[
        "run",
        "--dataset",
        s(&data),
        "--mode",
        "mr",
        "--k",
        "3",
        "--z",
        "1",
        "--report",
        s(&rep),
    ]);
    let out = ok(&["verify", "--dataset", s(&data), "--report", s(&rep)]);
    let v = verdicts(&out);
    for l in [1, 2, 4] {
        assert!(
            v.contains(&("PASS".into(), format!("l-invariance[l={l}]"))),
            "{v:?}"
        );
    }
}

#[test]
fn verify_skips_beyond_oracle_caps() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    ok(&[
        "generate",
        "--n",
        "40",
        "--weights",
        "uniform:0.3:1",
        "--seed",
        "1",
        "--out",
        s(&data),
    ]);
    let rep = dir.path().join("r.json");
    ok(&[
        "run",
        "--dataset",
        s(&data),
        "--problem",
        "rkc",
        "--z",
        "1",
        "--report",
        s(&rep),
    ]);
    let out = ok(&["verify", "--dataset", s(&data), "--report", s(&rep)]);
    let v = verdicts(&out);
    assert!(v.contains(&("SKIPPED".into(), "ratio".into())));
    assert!(v.contains(&("PASS".into(), "lemma4-cost".into())));
    let out = ok(&[
        "verify",
        "--dataset",
        s(&data),
        "--report",
        s(&rep),
        "--rkc-oracle-max-n",
        "40",
    ]);
    assert!(verdicts(&out).contains(&("PASS".into(), "ratio".into())));
}

#[test]
fn csv_rows_share_one_header() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line(
        dir.path(),
        &[0.0, 1.0, 2.0, 10.0],
        Some(&[0.5, 0.5, 0.5, 0.5]),
    );
    let csv = dir.path().join("runs.csv");
    let rep = dir.path().join("r.json");
    for problem in ["rmc", "rkc"] {
        ok(&[
            "run",
            "--dataset",
            s(&data),
            "--problem",
            problem,
            "--k",
            "1",
            "--z",
            "1",
            "--csv",
            s(&csv),
            "--report",
            s(&rep),
        ]);
    }
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("schema_version,dataset,n,problem,mode"));
    assert!(lines[2].contains(",rkc,seq,"));
}

#[test]
fn bench_reports_the_trend() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("b.json");
    let csv = dir.path().join("b.csv");
    ok(&[
        "bench",
        "--n",
        "256",
        "--modes-n",
        "60",
        "--report",
        s(&rep),
        "--csv",
        s(&csv),
    ]);
    let json: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(json["trend"].as_array().unwrap().len(), 8);
    assert_eq!(json["modes"].as_array().unwrap().len(), 6);
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 9);
}
