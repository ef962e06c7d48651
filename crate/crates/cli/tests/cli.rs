use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use chiomega_core::dataset::read_dataset;
use chiomega_core::metrics::report::parse_report_csv;

fn chiomega(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiomega"))
        .args(args)
        .env_remove("CHIOMEGA_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = chiomega(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    chiomega(args).status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn generate(dir: &Path, name: &str, max_order: usize, per_order: usize, seed: u64, split: &str) -> PathBuf {
    let out = dir.join(name);
    ok(&[
        "generate",
        "--max-order",
        &max_order.to_string(),
        "--per-order",
        &per_order.to_string(),
        "--seed",
        &seed.to_string(),
        "--split",
        split,
        "--out",
        p(&out),
    ]);
    out
}

#[test]
fn generate_counts_records_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.chrg", 8, 10, 1, "train");
    let b = generate(dir.path(), "b.chrg", 8, 10, 1, "train");
    let ds = read_dataset(&a).unwrap();
    assert_eq!(ds.len(), 70);
    assert_eq!(ds.order, 8);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.chrg.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["seeds"][0][1], 1);
    assert_eq!(manifest["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.chrg");
    let out = Command::new(env!("CARGO_BIN_EXE_chiomega"))
        .args(["generate", "--max-order", "12", "--per-order", "6", "--seed", "3", "--out", p(&one)])
        .env("CHIOMEGA_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let many = dir.path().join("many.chrg");
    ok(&["--threads", "3", "generate", "--max-order", "12", "--per-order", "6", "--seed", "3", "--out", p(&many)]);
    assert_eq!(fs::read(&one).unwrap(), fs::read(&many).unwrap());

    let bad = Command::new(env!("CARGO_BIN_EXE_chiomega"))
        .args(["arch", "--arch", "dense"])
        .env("CHIOMEGA_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn labeling_later_matches_labeling_at_generation() {
    let dir = tempfile::tempdir().unwrap();
    let labeled = generate(dir.path(), "l.chrg", 9, 5, 4, "test");
    let raw = dir.path().join("raw.chrg");
    ok(&[
        "generate", "--max-order", "9", "--per-order", "5", "--seed", "4", "--split", "test", "--no-label", "--out",
        p(&raw),
    ]);
    assert!(read_dataset(&raw).unwrap().records.iter().all(|r| !r.is_labeled()));
    let relabeled = dir.path().join("relabeled.chrg");
    ok(&["label", "--in", p(&raw), "--out", p(&relabeled)]);
    assert_eq!(fs::read(&labeled).unwrap(), fs::read(&relabeled).unwrap());

    // Training on unlabeled data is a data error.
    let prefix = dir.path().join("m");
    assert_eq!(
        code(&["train", "--arch", "regression", "--target", "chi", "--train", p(&raw), "--out", p(&prefix)]),
        3
    );
}

#[test]
fn usage_and_data_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.chrg");
    assert_eq!(code(&["generate", "--max-order", "1", "--per-order", "3", "--seed", "1", "--out", p(&out)]), 2);
    assert_eq!(code(&["stats", "--in", p(&out), "--target", "delta", "--out", "x.csv"]), 2);
    assert_eq!(code(&["stats", "--in", p(&out), "--target", "chi", "--out", "x.csv"]), 3);
    assert_eq!(code(&["arch", "--arch", "dense", "--scale", "2"]), 2);
    fs::write(&out, b"CHRG garbage").unwrap();
    assert_eq!(code(&["export-csv", "--in", p(&out), "--out", p(&dir.path().join("x.csv"))]), 3);
}

#[test]
fn stats_split_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate(dir.path(), "d.chrg", 10, 20, 5, "train");
    let csv = dir.path().join("chi.csv");
    let svg = dir.path().join("chi.svg");
    let stdout = ok(&["stats", "--in", p(&ds), "--target", "chi", "--out", p(&csv), "--svg", p(&svg)]);
    assert!(stdout.contains("n=180"));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("value,count\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 180);
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let prefix = dir.path().join("parts");
    ok(&["split", "--in", p(&ds), "--fractions", "0.5,0.25,0.25", "--seed", "9", "--out-prefix", p(&prefix)]);
    let sizes: Vec<usize> = ["train", "valid", "test"]
        .iter()
        .map(|s| read_dataset(dir.path().join(format!("parts.{s}.chrg"))).unwrap().len())
        .collect();
    assert_eq!(sizes, vec![90, 45, 45]);

    let exported = dir.path().join("d.csv");
    ok(&["export-csv", "--in", p(&ds), "--out", p(&exported)]);
    assert_eq!(fs::read_to_string(&exported).unwrap().lines().count(), 181);
}

#[test]
fn arch_dump_matches_golden_file() {
    let golden = include_str!("../../core/tests/golden/wide_cnn_50.arch");
    assert_eq!(ok(&["arch", "--arch", "wide_cnn", "--scale", "1"]), golden);
    let summary = ok(&["arch", "--arch", "seq_cnn", "--summary"]);
    assert!(summary.contains("flatten flatten  from=4 -> 7744"), "{summary}");
}

#[test]
fn train_eval_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let train = generate(d, "train.chrg", 10, 30, 11, "train");
    let valid = generate(d, "valid.chrg", 10, 8, 12, "valid");
    let test = generate(d, "test.chrg", 10, 8, 13, "test");

    let reg = d.join("reg_chi");
    ok(&["train", "--arch", "regression", "--target", "chi", "--train", p(&train), "--out", p(&reg)]);
    assert!(fs::read_to_string(d.join("reg_chi.reg")).unwrap().contains("slope = "));

    for target in ["chi", "omega"] {
        let prefix = d.join(format!("dense_{target}"));
        ok(&[
            "train", "--arch", "dense", "--scale", "0.02", "--target", target, "--train", p(&train), "--valid",
            p(&valid), "--out", p(&prefix), "--epochs", "4", "--seed", "1", "--learning-rate", "0.05",
        ]);
        for ext in [".arch", ".ckpt", ".history.csv", ".manifest.json"] {
            assert!(d.join(format!("dense_{target}{ext}")).exists(), "{target}{ext}");
        }
    }
    assert_ne!(
        fs::read(d.join("dense_chi.ckpt")).unwrap(),
        fs::read(d.join("dense_omega.ckpt")).unwrap()
    );
    let history = fs::read_to_string(d.join("dense_chi.history.csv")).unwrap();
    assert!(history.starts_with("epoch,train_mae,valid_mae\n"));
    assert!(history.lines().count() >= 2);

    let mut reports = Vec::new();
    for (model, name) in [(p(&reg).to_string(), "regression"), (p(&d.join("dense_chi")).to_string(), "dense")] {
        let out = d.join(format!("eval_{name}"));
        ok(&[
            "eval", "--model", &model, "--test", p(&test), "--target", "chi", "--out-dir", p(&out), "--name", name,
        ]);
        for f in ["report.csv", "grouped_ae.csv", "grouped_ape.csv", "boxplot_ae.svg", "boxplot_ape.svg"] {
            assert!(out.join(f).exists(), "{name}/{f}");
        }
        reports.push(out.join("report.csv"));
    }

    let oracle = d.join("eval_oracle");
    let stdout = ok(&["eval", "--model", "oracle", "--test", p(&test), "--target", "chi", "--out-dir", p(&oracle)]);
    assert!(stdout.contains("MAE 0.0000"), "{stdout}");
    let rows = parse_report_csv(&fs::read_to_string(oracle.join("report.csv")).unwrap()).unwrap();
    let value = |m: &str| rows.iter().find(|r| r.metric == m).unwrap().value;
    assert_eq!(value("mae"), 0.0);
    assert_eq!(value("p_1"), 1.0);
    assert_eq!(value("n"), 72.0);

    let table = d.join("comparison.csv");
    ok(&["report", p(&reports[0]), p(&reports[1]), "--out", p(&table)]);
    let text = fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("target,model,mae,p_0.5,p_1,mape,n,mae_improvement_pct\n"));
    let reg_line = text.lines().find(|l| l.starts_with("chi,regression,")).unwrap();
    assert!(reg_line.ends_with(",0"), "{reg_line}");

    // An architecture file that does not match the checkpoint is refused.
    fs::copy(d.join("dense_chi.ckpt"), d.join("other.ckpt")).unwrap();
    let other = ok(&["arch", "--arch", "dense", "--scale", "0.03", "--order", "10"]);
    fs::write(d.join("other.arch"), other).unwrap();
    let out = d.join("eval_other");
    assert_eq!(
        code(&["eval", "--model", p(&d.join("other")), "--test", p(&test), "--target", "chi", "--out-dir", p(&out)]),
        3
    );
}
