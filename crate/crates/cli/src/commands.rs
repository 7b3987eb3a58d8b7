use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use log::{info, warn};
use serde::Serialize;

use crowdtruth::bwa::{worker_accuracy, BwaHyperParams, EpsilonStrategy, MultiClassResult};
use crowdtruth::dataset::{load_labels, load_predictions, load_truth, save_predictions, GroundTruth, LabelMatrix};
use crowdtruth::evaluation::{accuracy, build_report, RunInput, BASELINE_METHOD};
use crowdtruth::synthetic::{generate, SynthSpec};

use crate::method::{BwaArgs, Method};
use crate::{SweepArgs, SynthArgs};

const LABEL_FILE: &str = "answer.csv";
const TRUTH_FILE: &str = "truth.csv";

#[derive(Serialize)]
struct RunSummary<'a> {
    method: &'a str,
    iterations: usize,
    converged: bool,
    final_objective: f64,
    epsilon: f64,
    a_v: f64,
    b_v: f64,
    lambda: f64,
}

pub fn aggregate(labels: &Path, method: &str, bwa: &BwaArgs, k: Option<usize>, out: &Path) -> Result<()> {
    let method = Method::parse(method, bwa)?;
    ensure!(labels != out, "--out must differ from --labels");
    let matrix = load_labels(labels, k)?;
    let outcome = method.run(&matrix)?;
    save_predictions(&matrix, &outcome.predictions, out)?;
    info!("wrote {} predictions to {}", outcome.predictions.len(), out.display());

    if let Some(result) = &outcome.bwa {
        write_worker_weights(&matrix, result, &sibling(out, "workers.csv"))?;
        let summary = RunSummary {
            method: method.name(),
            iterations: result.iterations(),
            converged: result.converged(),
            final_objective: result.final_objective(),
            epsilon: result.epsilon,
            a_v: result.params.a_v,
            b_v: result.params.b_v,
            lambda: result.params.lambda,
        };
        let path = sibling(out, "summary.json");
        fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        if !result.converged() {
            warn!("BWA stopped at the iteration cap without converging");
        }
    }
    Ok(())
}

/// `<dir>/<stem>.<suffix>` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map_or_else(|| "predictions".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_worker_weights(matrix: &LabelMatrix, result: &MultiClassResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["worker", "weight", "accuracy"])?;
    for (j, weight) in result.worker_weights().into_iter().enumerate() {
        let acc = worker_accuracy(weight)?;
        w.write_record([matrix.worker_id(j), &weight.to_string(), &acc.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

struct Dataset {
    name: String,
    labels: LabelMatrix,
    truth: GroundTruth,
}

fn load_datasets(dir: &Path) -> Result<Vec<Dataset>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading dataset directory {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();

    let mut datasets = Vec::new();
    for path in dirs {
        let name = path.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let (label_path, truth_path) = (path.join(LABEL_FILE), path.join(TRUTH_FILE));
        if !label_path.is_file() {
            warn!("skipping {name}: no {LABEL_FILE}");
            continue;
        }
        if !truth_path.is_file() {
            warn!("skipping {name}: no {TRUTH_FILE}");
            continue;
        }
        let labels = load_labels(&label_path, None)?;
        let truth = load_truth(&truth_path, &labels)?;
        if truth.is_empty() {
            warn!("skipping {name}: {TRUTH_FILE} has no rows");
            continue;
        }
        datasets.push(Dataset { name, labels, truth });
    }
    if datasets.is_empty() {
        bail!("no datasets with {LABEL_FILE} and {TRUTH_FILE} under {}", dir.display());
    }
    Ok(datasets)
}

pub fn bench(dir: &Path, methods: &[String], bwa: &BwaArgs, out: &Path) -> Result<()> {
    let mut parsed = vec![Method::Mv];
    for name in methods {
        let m = Method::parse(name, bwa)?;
        if !parsed.iter().any(|p| p.name() == m.name()) {
            parsed.push(m);
        }
    }
    let datasets = load_datasets(dir)?;

    let mut runs = Vec::new();
    for ds in &datasets {
        for method in &parsed {
            let start = Instant::now();
            let outcome = method.run(&ds.labels).with_context(|| format!("{} on {}", method.name(), ds.name))?;
            let secs = start.elapsed().as_secs_f64();
            info!("{} on {}: {:.3}s", method.name(), ds.name, secs);
            runs.push((method.name().to_owned(), ds, outcome.predictions, secs));
        }
    }
    let inputs: Vec<RunInput> = runs
        .iter()
        .map(|(method, ds, predictions, secs)| RunInput {
            method,
            dataset: &ds.name,
            predictions,
            truth: &ds.truth,
            runtime_secs: *secs,
        })
        .collect();
    let report = build_report(&inputs)?;
    debug_assert!(report.methods.iter().any(|m| m.method == BASELINE_METHOD));

    fs::write(out, report.to_json()? + "\n").with_context(|| format!("writing {}", out.display()))?;
    let table = report.render_table();
    let table_path = out.with_extension("txt");
    fs::write(&table_path, &table).with_context(|| format!("writing {}", table_path.display()))?;
    print!("{table}");
    Ok(())
}

pub fn sweep(args: &SweepArgs) -> Result<()> {
    ensure!(!args.grid.is_empty(), "--grid must list at least one a_v value");
    let matrix = load_labels(&args.labels, args.k)?;
    let truth = load_truth(&args.truth, &matrix)?;

    let mut w = csv::Writer::from_path(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    w.write_record(["a_v", "strategy", "epsilon", "b_v", "accuracy"])?;
    for &a_v in &args.grid {
        for strategy in [EpsilonStrategy::Original, EpsilonStrategy::Adjusted] {
            let hp = BwaHyperParams {
                lambda: args.lambda,
                a_v,
                strategy,
                tolerance: args.tolerance,
                max_iters: args.max_iters,
                ..BwaHyperParams::default()
            };
            hp.validate().with_context(|| format!("grid value a_v = {a_v}"))?;
            let result = crowdtruth::bwa::aggregate_multiclass(&matrix, &hp)?;
            let acc = accuracy(&result.hard_labels, &truth)?;
            w.write_record([
                a_v.to_string(),
                strategy.to_string(),
                result.epsilon.to_string(),
                result.params.b_v.to_string(),
                acc.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn synth(args: &SynthArgs) -> Result<()> {
    let [low, high] = args.accuracy[..] else {
        bail!("--accuracy takes exactly two values: low,high");
    };
    let spec = SynthSpec::symmetric(args.items, args.workers, args.k, args.redundancy, (low, high), args.seed);
    let crowd = generate(&spec)?;
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    crowd.labels.save(args.out.join(LABEL_FILE))?;
    crowd.truth.save(&crowd.labels, args.out.join(TRUTH_FILE))?;
    println!(
        "items={} workers={} k={} redundancy={} accuracy={},{} seed={} labels={}",
        spec.num_items,
        spec.num_workers,
        spec.num_classes,
        spec.redundancy,
        low,
        high,
        spec.seed,
        crowd.labels.num_labels()
    );
    Ok(())
}

pub fn eval(labels: &Path, truth: &Path, pred: &Path, k: Option<usize>) -> Result<()> {
    let matrix = load_labels(labels, k)?;
    let truth = load_truth(truth, &matrix)?;
    let predictions = load_predictions(pred, &matrix)?;
    let acc = accuracy(&predictions, &truth)?;
    println!("accuracy={acc:.6} evaluated={}", truth.len());
    Ok(())
}
