use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chiomega_core::dataset::{
    build_dataset, compute_stats, csv, label_dataset, read_dataset, split_dataset, write_dataset, Dataset, Target,
};
use chiomega_core::generator::GenConfig;
use chiomega_core::learner::{fit_regression, ArchKind, ArchitectureId, RegressionModel};
use chiomega_core::metrics::report::{grouped_csv, parse_report_csv, report_csv};
use chiomega_core::metrics::svg::{boxplot_svg, histogram_svg};
use chiomega_core::metrics::{grouped_boxplot_stats, ErrorMode, EvalReport};
use chiomega_core::nn::{load_checkpoint, predict_batch, save_checkpoint, train as train_net, ModelSpec, Network, TrainConfig};
use chiomega_core::oracles::{label_graph_with_budget, DEFAULT_NODE_BUDGET};
use rayon::prelude::*;

use crate::manifest::{manifest_path, Recorder};
use crate::{exit, usage, ArchArgs, Classified, EvalArgs, ExportArgs, GenerateArgs, LabelArgs, ReportArgs, SplitArgs,
    StatsArgs, TrainArgs};

fn load(path: &Path) -> Result<Dataset> {
    read_dataset(path).with_context(|| format!("reading {}", path.display()))
}

fn save(ds: &Dataset, path: &Path) -> Result<()> {
    write_dataset(ds, path).with_context(|| format!("writing {}", path.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn require_labels(ds: &Dataset, path: &Path) -> Result<()> {
    if let Some(i) = ds.records.iter().position(|r| !r.is_labeled()) {
        bail!("{}: record {i} is unlabeled; run `chiomega label` first", path.display());
    }
    Ok(())
}

/// `out/model` + `.ckpt` → `out/model.ckpt`.
fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn generate(a: GenerateArgs) -> Result<()> {
    let mut rec = Recorder::new("generate");
    let cfg = GenConfig::new(a.max_order, a.per_order, a.seed).map_err(|e| usage(e.to_string()))?;
    rec.seed("seed", a.seed);
    let (ds, report) = build_dataset(&cfg, a.split, a.node_budget, !a.no_label)?;
    save(&ds, &a.out)?;
    rec.output(&a.out);
    rec.finish(&manifest_path(&a.out))?;
    println!(
        "wrote {} {} records of order {} to {} ({} regenerated after exceeding the solver budget)",
        ds.len(),
        ds.split,
        ds.order,
        a.out.display(),
        report.regenerated.len()
    );
    Ok(())
}

pub fn label(a: LabelArgs) -> Result<()> {
    let mut rec = Recorder::new("label");
    let mut ds = load(&a.input)?;
    rec.input(&a.input);
    label_dataset(&mut ds, a.node_budget)?;
    save(&ds, &a.out)?;
    rec.output(&a.out);
    rec.finish(&manifest_path(&a.out))?;
    println!("labeled {} records into {}", ds.len(), a.out.display());
    Ok(())
}

fn parse_fractions(s: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("--fractions '{s}' must be three numbers")))?;
    match parts.as_slice() {
        [a, b, c] => Ok((*a, *b, *c)),
        _ => Err(usage(format!("--fractions '{s}' must be three numbers"))),
    }
}

pub fn split(a: SplitArgs) -> Result<()> {
    let mut rec = Recorder::new("split");
    let fractions = parse_fractions(&a.fractions)?;
    let ds = load(&a.input)?;
    rec.input(&a.input);
    rec.seed("seed", a.seed);
    let (tr, va, te) = split_dataset(ds.records, fractions, a.seed)?;
    for part in [&tr, &va, &te] {
        let path = with_suffix(&a.out_prefix, &format!(".{}.chrg", part.split));
        save(part, &path)?;
        rec.output(&path);
        println!("wrote {} records to {}", part.len(), path.display());
    }
    rec.finish(&with_suffix(&a.out_prefix, ".split.manifest.json"))?;
    Ok(())
}

pub fn stats(a: StatsArgs) -> Result<()> {
    let mut rec = Recorder::new("stats");
    let ds = load(&a.input)?;
    rec.input(&a.input);
    require_labels(&ds, &a.input)?;
    let stats = compute_stats(&ds, a.target)?;
    write_text(&a.out, &stats.to_csv())?;
    rec.output(&a.out);
    if let Some(svg) = &a.svg {
        let title = format!("{} distribution ({} records)", a.target, stats.total);
        write_text(svg, &histogram_svg(&stats.bins(), &title, &a.target.to_string()))?;
        rec.output(svg);
    }
    rec.finish(&manifest_path(&a.out))?;
    println!(
        "{}: n={} min={} median={} max={} below 10: {:.1}%",
        a.target,
        stats.total,
        stats.min,
        stats.median,
        stats.max,
        100.0 * stats.fraction_below(10)
    );
    Ok(())
}

pub fn export_csv(a: ExportArgs) -> Result<()> {
    let mut rec = Recorder::new("export-csv");
    let ds = load(&a.input)?;
    rec.input(&a.input);
    write_text(&a.out, &csv::to_csv(&ds))?;
    rec.output(&a.out);
    rec.finish(&manifest_path(&a.out))?;
    println!("exported {} records to {}", ds.len(), a.out.display());
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let mut rec = Recorder::new("train");
    let arch = ArchitectureId::new(a.arch, a.scale)?;
    let train_set = load(&a.train)?;
    rec.input(&a.train);
    require_labels(&train_set, &a.train)?;

    if a.arch == ArchKind::Regression {
        let model = fit_regression(&train_set, a.target)?;
        let path = with_suffix(&a.out, ".reg");
        write_text(&path, &model.to_text())?;
        rec.output(&path);
        rec.finish(&manifest_path(&path))?;
        println!(
            "{}: {} = {:.6} · |E| + {:.6} ({} training records) → {}",
            a.arch,
            a.target,
            model.slope,
            model.intercept,
            train_set.len(),
            path.display()
        );
        return Ok(());
    }

    let valid_path = a
        .valid
        .as_ref()
        .ok_or_else(|| usage(format!("--valid is required for {}", a.arch)))?;
    let valid_set = load(valid_path)?;
    rec.input(valid_path);
    require_labels(&valid_set, valid_path)?;
    if valid_set.order != train_set.order {
        bail!(
            "validation order {} differs from training order {}",
            valid_set.order,
            train_set.order
        );
    }
    let spec = arch.build(train_set.order)?.expect("network architecture");
    let mut net = Network::<f32>::new(spec, a.seed)?;
    let cfg = TrainConfig {
        learning_rate: a.learning_rate,
        batch_size: a.batch_size,
        max_epochs: a.epochs,
        patience: a.patience,
        seed: a.seed,
        ..TrainConfig::default()
    };
    rec.seed("seed", a.seed);
    log::info!("training {} ({} parameters)", a.arch, net.param_count());
    let history = train_net(&mut net, &train_set, &valid_set, a.target, &cfg)?;

    let arch_path = with_suffix(&a.out, ".arch");
    let ckpt_path = with_suffix(&a.out, ".ckpt");
    let hist_path = with_suffix(&a.out, ".history.csv");
    write_text(&arch_path, &net.spec().to_arch_text())?;
    save_checkpoint(&ckpt_path, &net).with_context(|| format!("writing {}", ckpt_path.display()))?;
    write_text(&hist_path, &history.to_csv())?;
    for p in [&arch_path, &ckpt_path, &hist_path] {
        rec.output(p);
    }
    rec.finish(&with_suffix(&a.out, ".manifest.json"))?;
    println!(
        "{} (scale {}) for {}: {} epochs, best validation MAE {:.4} at epoch {} → {}",
        a.arch,
        a.scale,
        a.target,
        history.epochs.len(),
        history.best_valid_mae,
        history.best_epoch,
        ckpt_path.display()
    );
    Ok(())
}

fn oracle_predictions(ds: &Dataset, target: Target) -> Result<Vec<f64>> {
    ds.records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            let labels = label_graph_with_budget(&r.graph, DEFAULT_NODE_BUDGET).map_err(|e| {
                anyhow::Error::from(Classified {
                    code: exit::BUDGET,
                    message: format!("record {i}: {e}"),
                })
            })?;
            Ok(match target {
                Target::Chromatic => labels.chromatic,
                Target::Clique => labels.clique,
            } as f64)
        })
        .collect()
}

fn model_predictions(model: &str, ds: &Dataset, rec: &mut Recorder) -> Result<Vec<f64>> {
    let prefix = Path::new(model);
    let reg_path = with_suffix(prefix, ".reg");
    if reg_path.exists() {
        rec.input(&reg_path);
        let text = fs::read_to_string(&reg_path).with_context(|| format!("reading {}", reg_path.display()))?;
        let m = RegressionModel::from_text(&text)?;
        return Ok(ds.records.iter().map(|r| m.predict(r.edges)).collect());
    }
    let arch_path = with_suffix(prefix, ".arch");
    let ckpt_path = with_suffix(prefix, ".ckpt");
    if !arch_path.exists() {
        bail!(
            "no model at '{model}': expected {} or {}",
            reg_path.display(),
            arch_path.display()
        );
    }
    let text = fs::read_to_string(&arch_path).with_context(|| format!("reading {}", arch_path.display()))?;
    let spec = ModelSpec::from_arch_text(&text)?;
    let net = load_checkpoint(&ckpt_path, &spec).with_context(|| format!("loading {}", ckpt_path.display()))?;
    rec.input(&arch_path);
    rec.input(&ckpt_path);
    let graphs: Vec<_> = ds.graphs().cloned().collect();
    Ok(predict_batch(&net, &graphs)?.into_iter().map(f64::from).collect())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let mut rec = Recorder::new("eval");
    let ds = load(&a.test)?;
    rec.input(&a.test);
    require_labels(&ds, &a.test)?;
    let predicted = if a.model == "oracle" {
        oracle_predictions(&ds, a.target)?
    } else {
        model_predictions(&a.model, &ds, &mut rec)?
    };
    let name = a.name.clone().unwrap_or_else(|| {
        Path::new(&a.model)
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| a.model.clone())
    });
    let actual = ds.targets(a.target);
    let report = EvalReport::compute(&actual, &predicted)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;

    let mut outputs: Vec<(PathBuf, String)> = Vec::new();
    outputs.push((a.out_dir.join("report.csv"), report_csv(&report.rows(&a.target.to_string(), &name))));
    for (mode, tag, label) in [(ErrorMode::Ae, "ae", "absolute error"), (ErrorMode::Ape, "ape", "APE (%)")] {
        let groups = grouped_boxplot_stats(&actual, &predicted, mode, a.bin_width)?;
        outputs.push((a.out_dir.join(format!("grouped_{tag}.csv")), grouped_csv(&groups)));
        let title = format!("{name}: {label} by {}", a.target);
        outputs.push((a.out_dir.join(format!("boxplot_{tag}.svg")), boxplot_svg(&groups, &title, label)));
    }
    let mut preds = String::from("index,actual,predicted\n");
    for (i, (y, p)) in actual.iter().zip(&predicted).enumerate() {
        let _ = writeln!(preds, "{i},{y},{p}");
    }
    outputs.push((a.out_dir.join("predictions.csv"), preds));
    for (path, text) in &outputs {
        write_text(path, text)?;
        rec.output(path);
    }
    rec.finish(&a.out_dir.join("eval.manifest.json"))?;
    println!(
        "{name} on {} ({} records, {}): MAE {:.4}, P_0.5 {:.4}, P_1 {:.4}, MAPE {:.2}%",
        a.test.display(),
        report.n,
        a.target,
        report.mae,
        report.p_half,
        report.p_one,
        report.mape
    );
    Ok(())
}

pub fn report(a: ReportArgs) -> Result<()> {
    let mut rec = Recorder::new("report");
    // (target, model) → metric → value
    let mut table: BTreeMap<(String, String), BTreeMap<String, f64>> = BTreeMap::new();
    for path in &a.reports {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        rec.input(path);
        for row in parse_report_csv(&text).with_context(|| format!("parsing {}", path.display()))? {
            table
                .entry((row.target, row.model))
                .or_default()
                .insert(row.metric, row.value);
        }
    }
    let metrics = ["mae", "p_0.5", "p_1", "mape", "n"];
    let mut out = String::from("target,model,mae,p_0.5,p_1,mape,n,mae_improvement_pct\n");
    for ((target, model), values) in &table {
        let base = table
            .get(&(target.clone(), a.baseline.clone()))
            .and_then(|m| m.get("mae"))
            .copied();
        let cells: Vec<String> = metrics
            .iter()
            .map(|m| values.get(*m).map(|v| v.to_string()).unwrap_or_default())
            .collect();
        let improvement = match (base, values.get("mae")) {
            (Some(b), Some(&m)) if b > 0.0 => (100.0 * (b - m) / b).to_string(),
            _ => String::new(),
        };
        let _ = writeln!(out, "{target},{model},{},{improvement}", cells.join(","));
    }
    write_text(&a.out, &out)?;
    rec.output(&a.out);
    rec.finish(&manifest_path(&a.out))?;
    print!("{out}");
    Ok(())
}

pub fn arch(a: ArchArgs) -> Result<()> {
    let id = ArchitectureId::new(a.arch, a.scale)?;
    match id.build(a.order)? {
        None => println!("regression: prediction = slope · |E| + intercept (no network)"),
        Some(spec) if a.summary => print!("{}", spec.summary()?),
        Some(spec) => print!("{}", spec.to_arch_text()),
    }
    Ok(())
}
