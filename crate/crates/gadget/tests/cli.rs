use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gadget(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gadget")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// 120 points on two features plus a constant one, labelled by the sign of
/// `x1 - x2` with every 17th label forced positive.
fn toy_data(path: &Path, offset: usize) {
    let mut text = String::new();
    for k in 0..120 {
        let a = ((k * 37 + offset) % 101) as f64 / 50.0 - 1.0;
        let b = ((k * 53 + 7 * offset) % 97) as f64 / 48.0 - 1.0;
        let y = if a - b > 0.0 || k % 17 == 0 { "+1" } else { "-1" };
        text.push_str(y);
        for (i, v) in [(1, a), (2, b), (3, 1.0)] {
            if v != 0.0 {
                text.push_str(&format!(" {i}:{v:?}"));
            }
        }
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

#[test]
fn pushsum_demo_averages_four_values() {
    let o = gadget(&["pushsum", "--topology", "ring:4", "--values", "1,2,3,4", "--gamma", "1e-6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("true average = 2.5"), "{out}");
    for line in out.lines().filter(|l| l.starts_with("node ")) {
        let est: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
        assert!((est - 2.5).abs() <= 2.5e-6, "{line}");
    }
}

#[test]
fn pushsum_accepts_negative_values_and_logs_messages() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = gadget(&[
        "pushsum",
        "--topology",
        "complete",
        "--values",
        "-1,1",
        "--gossip-rounds",
        "2",
        "--message-log",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let log = fs::read_to_string(out.join("messages.csv")).unwrap();
    let rows: Vec<&str> = log.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    // round 0 seeds each node's own state; then 2 nodes x 2 destinations x 2 rounds
    assert_eq!(rows.iter().filter(|r| r.starts_with("0,")).count(), 2, "{log}");
    assert_eq!(rows.iter().filter(|r| !r.starts_with("0,")).count(), 8, "{log}");
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().contains("true-average = 0"));
}

#[test]
fn bad_values_name_their_key() {
    let o = gadget(&["pushsum", "--values", "1,2", "--gamma", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`gamma`"), "{}", stderr(&o));

    let o = gadget(&["gadget", "--nodes", "three"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`nodes`"), "{}", stderr(&o));

    let o = gadget(&["pegasos"]);
    assert!(stderr(&o).contains("`train`"), "{}", stderr(&o));
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "[gossip]\ntopology = path\nvalues = 0,0,9\n").unwrap();
    let o = gadget(&["pushsum", "--config", cfg.to_str().unwrap(), "--values", "3,6,9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("true average = 6"), "{}", stdout(&o));

    fs::write(&cfg, "[svm]\ntopology = ring\n").unwrap();
    let o = gadget(&["pushsum", "--config", cfg.to_str().unwrap(), "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("topology"), "{}", stderr(&o));
}

#[test]
fn empty_training_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("empty.svm");
    fs::write(&train, "# nothing here\n\n").unwrap();
    let o = gadget(&["pegasos", "--train", train.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty dataset"), "{}", stderr(&o));
}

#[test]
fn malformed_line_is_reported_with_its_number() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("bad.svm");
    fs::write(&train, "+1 1:0.5\n-1 2:x\n").unwrap();
    let o = gadget(&["pegasos", "--train", train.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.svm: line 2"), "{err}");
}

#[test]
fn gadget_run_writes_traces_and_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = (dir.path().join("toy.train"), dir.path().join("toy.test"));
    toy_data(&train, 0);
    toy_data(&test, 5);
    let out = dir.path().join("run");
    let o = gadget(&[
        "gadget",
        "--train",
        train.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--nodes",
        "4",
        "--topology",
        "ring",
        "--lambda",
        "0.01",
        "--iters",
        "400",
        "--epsilon",
        "0",
        "--trials",
        "2",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trace_seed7.csv", "trace_seed8.csv", "summary_seed7.txt", "summary_seed8.txt", "summary.txt", "timing.txt"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let trace = fs::read_to_string(out.join("trace_seed7.csv")).unwrap();
    let header = trace.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("t,mean_objective,mean_test_error,max_delta,node0_objective"), "{header}");
    assert!(header.ends_with("node3_test_error"), "{header}");
    assert!(trace.contains("# trial-seed = 7"));
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("accuracy-mean-pct = "), "{summary}");
    assert!(stdout(&o).contains("accuracy"), "{}", stdout(&o));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("toy.train");
    toy_data(&train, 0);
    let run = |workers: &str, tag: &str| {
        let out = dir.path().join(tag);
        let o = gadget(&[
            "gadget",
            "--train",
            train.to_str().unwrap(),
            "--nodes",
            "5",
            "--gossip-mode",
            "randomized",
            "--gossip-rounds",
            "3",
            "--lambda",
            "0.05",
            "--iters",
            "300",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        ["trace_seed0.csv", "summary_seed0.txt", "summary.txt"].map(|f| fs::read(out.join(f)).unwrap())
    };
    let one = run("1", "a");
    assert_eq!(one, run("1", "b"));
    assert_eq!(one, run("4", "c"));
}

#[test]
fn pegasos_run_writes_its_trace() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("toy.train");
    toy_data(&train, 0);
    let out = dir.path().join("run");
    let o = gadget(&[
        "pegasos",
        "--train",
        train.to_str().unwrap(),
        "--lambda",
        "0.01",
        "--iters",
        "1000",
        "--trace-every",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let trace = fs::read_to_string(out.join("trace_seed0.csv")).unwrap();
    let rows: Vec<&str> = trace.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,objective,train_error");
    assert!(rows.len() >= 2 && rows.len() <= 11, "{}", rows.len());
}
