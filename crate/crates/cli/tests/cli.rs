use std::path::Path;
use std::process::{Command, Output};

use slowtorus_cli::{ratio_rows, CSV_HEADER};
use slowtorus_core::Rat;

const QUICK: [&str; 10] = [
    "--n-max",
    "120",
    "--dense-to",
    "100",
    "--log-samples",
    "8",
    "--grid",
    "16",
    "--interior-samples",
    "2",
];

fn slowtorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowtorus"))
        .args(args)
        .env_remove("SLOWTORUS_THREADS")
        .output()
        .expect("binary runs")
}

fn quick_run(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out-dir", dir.to_str().unwrap()];
    args.extend(QUICK);
    args.extend(extra);
    slowtorus(&args)
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Every row well-formed, `lo <= hi` per column, strictly increasing `N`.
fn check_table(bytes: &[u8]) -> usize {
    let mut rd = csv::Reader::from_reader(bytes);
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let mut prev: Option<Rat> = None;
    let mut rows = 0;
    for rec in rd.records() {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), CSV_HEADER.len());
        let n: Rat = rec[0].parse().unwrap();
        assert!(n.is_integer() && n.is_positive());
        if let Some(p) = &prev {
            assert!(p < &n, "rows out of order at N = {n}");
        }
        for k in (1..rec.len()).step_by(2) {
            let (lo, hi): (Rat, Rat) = (rec[k].parse().unwrap(), rec[k + 1].parse().unwrap());
            assert!(lo <= hi, "{} at N = {n}", CSV_HEADER[k]);
        }
        prev = Some(n);
        rows += 1;
    }
    rows
}

#[test]
fn run_writes_all_outputs_and_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let first = quick_run(&a, &[]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));

    let csv = std::fs::read(a.join("growth.csv")).unwrap();
    // 120 dense rows, a few log samples, two checkpoints
    let rows = check_table(&csv);
    assert!((122..=140).contains(&rows), "{rows}");

    let state: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("state.json")).unwrap()).unwrap();
    assert_eq!(state["N"][1], "65");
    assert_eq!(state["q"][1], "6500");
    let cert: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.join("certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["status"], "PASS");

    let second = Command::new(env!("CARGO_BIN_EXE_slowtorus"))
        .args(["run", "--out-dir", b.to_str().unwrap()])
        .args(QUICK)
        .env("SLOWTORUS_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&second), 0);
    for f in ["state.json", "certificate.json", "growth.csv"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    // no temporary files left behind
    assert_eq!(std::fs::read_dir(&a).unwrap().count(), 3);
}

#[test]
fn config_file_matches_flags_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(
        &cfg,
        "phi = \"power:2,1,1/2\"\nmode = \"desk\"\ndepth = 2\nn_max = 60\ngrid = 16\ninterior_samples = 1\n\
         [schedule]\ndense_to = 40\nlog_samples = 4\ninclude_checkpoints = true\n",
    )
    .unwrap();
    let from_file = tmp.path().join("file");
    let out = slowtorus(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out-dir",
        from_file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let from_flags = tmp.path().join("flags");
    let out = slowtorus(&[
        "run",
        "--phi",
        "power:2,1,1/2",
        "--mode",
        "desk",
        "--depth",
        "2",
        "--n-max",
        "60",
        "--grid",
        "16",
        "--interior-samples",
        "1",
        "--dense-to",
        "40",
        "--log-samples",
        "4",
        "--out-dir",
        from_flags.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for f in ["state.json", "certificate.json", "growth.csv"] {
        assert_eq!(
            std::fs::read(from_file.join(f)).unwrap(),
            std::fs::read(from_flags.join(f)).unwrap(),
            "{f}"
        );
    }

    // a flag overrides the file: n_max below the file's dense_to is rejected
    let out = slowtorus(&["run", "--config", cfg.to_str().unwrap(), "--n-max", "10"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("dense_to"), "{}", stderr(&out));
}

#[test]
fn configuration_errors_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    for (args, needle) in [
        (vec!["run", "--depth", "0"], "depth"),
        (vec!["run", "--precision", "32"], "precision"),
        (vec!["run", "--phi", "log2:1,1/10"], "phi"),
        (vec!["run", "--phi", "cubic:1"], "phi"),
        (vec!["run", "--c", "one"], "c"),
        (vec!["run", "--no-such-flag"], "no-such-flag"),
        (
            vec!["run", "--config", "/nonexistent/run.toml"],
            "cannot read",
        ),
    ] {
        let mut args = args.clone();
        args.extend(["--out-dir", dir]);
        let out = slowtorus(&args);
        assert_eq!(code(&out), 3, "{args:?}");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
    let bad = tmp.path().join("bad.toml");
    std::fs::write(&bad, "dept = 2\n").unwrap();
    assert_eq!(
        code(&slowtorus(&["run", "--config", bad.to_str().unwrap()])),
        3
    );
    // nothing was written
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 1);
}

#[test]
fn paper_depth_four_reports_overflow() {
    let tmp = tempfile::tempdir().unwrap();
    let out = slowtorus(&[
        "run",
        "--depth",
        "4",
        "--out-dir",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4, "{}", stderr(&out));
    assert!(stderr(&out).contains("OVERFLOW at r_3"), "{}", stderr(&out));
    assert_eq!(std::fs::read_dir(tmp.path()).unwrap().count(), 0);
}

#[test]
fn plotdata_reads_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    assert_eq!(code(&quick_run(tmp.path(), &[])), 0);
    let out = slowtorus(&["plotdata", "--out-dir", dir]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let table = std::fs::read(tmp.path().join("growth.csv")).unwrap();
    let plot = std::fs::read(tmp.path().join("gamma_ratio.csv")).unwrap();
    let mut rd = csv::Reader::from_reader(plot.as_slice());
    assert_eq!(
        rd.headers().unwrap().iter().collect::<Vec<_>>(),
        ["N", "ratio_lo", "ratio_hi"]
    );
    let rows: Vec<_> = rd.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), check_table(&table));
    for r in &rows {
        let (lo, hi): (Rat, Rat) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!(lo.is_positive() && lo <= hi, "N = {}", &r[0]);
        // Γ_N <= φ(N)
        assert!(hi <= Rat::one(), "N = {}", &r[0]);
    }
    let state: serde_json::Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("state.json")).unwrap()).unwrap();
    let checkpoints: Vec<&str> = state["N"].as_array().unwrap()[1..]
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(checkpoints.len(), 2);
    for n in checkpoints {
        let row = rows.iter().find(|r| &r[0] == n).expect("checkpoint row");
        let lo: Rat = row[1].parse().unwrap();
        assert!(lo >= Rat::ratio(1, 40_000), "N = {n}");
    }
    assert_eq!(ratio_rows(&table).unwrap().len(), rows.len());
}

#[test]
fn plotdata_empty_and_missing_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    let out = slowtorus(&["plotdata", "--out-dir", dir]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("growth.csv"));

    std::fs::write(tmp.path().join("growth.csv"), CSV_HEADER.join(",") + "\n").unwrap();
    let out = slowtorus(&["plotdata", "--out-dir", dir]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(std::fs::read(tmp.path().join("gamma_ratio.csv"))
        .unwrap()
        .is_empty());
}

#[test]
fn verify_rechecks_saved_state() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&quick_run(tmp.path(), &[])), 0);
    let state = tmp.path().join("state.json");
    let cert = tmp.path().join("again.json");
    let mut args = vec![
        "verify",
        "--state",
        state.to_str().unwrap(),
        "--certificate-out",
        cert.to_str().unwrap(),
    ];
    args.extend(&QUICK[2..]);
    let out = slowtorus(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        std::fs::read(&cert).unwrap(),
        std::fs::read(tmp.path().join("certificate.json")).unwrap()
    );

    args.extend(["--mutate", "m1-to-one"]);
    let out = slowtorus(&args);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("ind-13"), "{}", stderr(&out));

    let out = slowtorus(&["verify", "--state", "/nonexistent.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn zero_coupling_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = quick_run(tmp.path(), &["--c", "0"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("theorem-lower"));
}
