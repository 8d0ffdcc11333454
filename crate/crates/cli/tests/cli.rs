use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn tbr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbr")).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = tbr(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn small_config(dir: &Path) {
    fs::write(
        dir.join("c.json"),
        r#"{"params":{"population_size":30,"generations":60,"transfer_period":10},"metric_cadence":10,"target_count":12}"#,
    )
    .unwrap();
}

#[test]
fn evolve_is_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    ok(d, &["evolve", "--config", "c.json", "--seed", "1", "--out", "a"]);
    ok(d, &["--config", "c.json", "--seed", "1", "evolve", "--out", "b"]);
    ok(d, &["evolve", "--config", "c.json", "--seed", "2", "--out", "c"]);
    for name in ["archive.csv", "metrics.csv", "stats.csv", "transfers.csv"] {
        assert_eq!(fs::read(d.join("a").join(name)).unwrap(), fs::read(d.join("b").join(name)).unwrap(), "{name}");
    }
    assert_ne!(fs::read(d.join("a/archive.csv")).unwrap(), fs::read(d.join("c/archive.csv")).unwrap());
    assert_eq!(fs::read_to_string(d.join("a/transfers.csv")).unwrap().lines().count(), 1 + 6);
}

#[test]
fn baselines_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    for kind in ["ns", "nslc", "per-target-nearest", "per-target-orientation", "reference-transfer"] {
        ok(d, &["baseline", kind, "--config", "c.json", "--seed", "5", "--out", &format!("{kind}-1")]);
        ok(d, &["baseline", kind, "--config", "c.json", "--seed", "5", "--out", &format!("{kind}-2")]);
        let a = fs::read_to_string(d.join(format!("{kind}-1/archive.csv"))).unwrap();
        let b = fs::read_to_string(d.join(format!("{kind}-2/archive.csv"))).unwrap();
        assert_eq!(a, b, "{kind}");
        assert!(a.lines().skip(1).all(|l| l.split(',').nth(1) == Some(kind)), "{kind} source column");
    }
    let picks = fs::read_to_string(d.join("per-target-nearest-1/archive.csv")).unwrap();
    assert_eq!(picks.lines().count(), 1 + 12);
}

#[test]
fn metrics_rows_have_increasing_evaluations() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    ok(d, &["evolve", "--config", "c.json", "--seed", "3", "--out", "run"]);
    let text = ok(d, &["metrics", "run/archive.csv", "--config", "c.json"]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("evaluations,archive_size,sparseness,orientation_error,median_orientation_error,transferable")
    );
    let evals: Vec<u64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(!evals.is_empty());
    assert!(evals.windows(2).all(|w| w[0] < w[1]));

    let again = ok(d, &["metrics", "run/archive.csv", "--config", "c.json"]);
    assert_eq!(text, again);
}

#[test]
fn selection_and_transfer_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    small_config(d);
    ok(d, &["evolve", "--config", "c.json", "--seed", "4", "--out", "run"]);
    ok(d, &["select30", "run/archive.csv", "-o", "sel.csv"]);
    let sel = fs::read_to_string(d.join("sel.csv")).unwrap();
    assert!(sel.starts_with("lobe,angular,radial,id,source,g0"));
    let rows = sel.lines().count() - 1;
    assert!(rows <= 30);
    let acc = ok(d, &["transfer-eval", "sel.csv", "--config", "c.json"]);
    assert_eq!(acc.lines().count(), rows + 1);
    for line in acc.lines().skip(1) {
        let a: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(a >= 0.0);
    }
}

#[test]
fn replay_of_the_zero_genotype_stands_still() {
    let dir = tempfile::tempdir().unwrap();
    let zero = vec!["0"; 24].join(",");
    let text = ok(dir.path(), &["replay", &zero]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "tick,x,y,yaw");
    assert_eq!(lines.len(), 1 + 101);
    for (t, l) in lines[1..].iter().enumerate() {
        assert_eq!(*l, format!("{t},0,0,0"));
    }
}

#[test]
fn targets_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let a = ok(d, &["targets", "--seed", "9"]);
    let b = ok(d, &["targets", "--seed", "9"]);
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 101);
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.json"), r#"{"params":{"population":3}}"#).unwrap();
    fs::write(d.join("broken.json"), "{").unwrap();
    fs::write(d.join("noprofile.json"), r#"{"profile":"nowhere.json"}"#).unwrap();
    fs::write(d.join("junk.csv"), "a,b\n1,2\n").unwrap();
    let cases: &[&[&str]] = &[
        &["evolve"],
        &["evolve", "--config", "missing.json", "--seed", "1"],
        &["evolve", "--config", "bad.json", "--seed", "1"],
        &["evolve", "--config", "broken.json", "--seed", "1"],
        &["evolve", "--config", "noprofile.json", "--seed", "1"],
        &["baseline", "magic", "--seed", "1"],
        &["metrics", "junk.csv"],
        &["metrics", "absent.csv"],
        &["replay", "0,0,0"],
        &["replay", "0.3,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = tbr(d, args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty(), "{args:?} should explain itself");
    }
}

#[test]
fn help_lists_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let help = ok(dir.path(), &["--help"]);
    for sub in ["evolve", "baseline", "metrics", "select30", "transfer-eval", "replay", "targets", "--config", "--seed"] {
        assert!(help.contains(sub), "{sub} missing from help");
    }
}
