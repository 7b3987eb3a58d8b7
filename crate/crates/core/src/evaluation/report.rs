use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use super::{accuracy, wilcoxon_one_sided, WilcoxonResult};
use crate::dataset::GroundTruth;
use crate::error::{Error, Result};

/// Method name every other method is compared against.
pub const BASELINE_METHOD: &str = "mv";

/// One aggregation run to be scored.
#[derive(Debug, Clone, Copy)]
pub struct RunInput<'a> {
    pub method: &'a str,
    pub dataset: &'a str,
    pub predictions: &'a [usize],
    pub truth: &'a GroundTruth,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub dataset: String,
    pub accuracy: f64,
    /// Number of items with ground truth.
    pub evaluated: usize,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub mean_accuracy: f64,
    pub datasets: usize,
    /// Comparison against the baseline; absent for the baseline itself and
    /// when every paired difference is zero.
    pub wilcoxon: Option<WilcoxonResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Sorted by (method, dataset).
    pub runs: Vec<RunRecord>,
    /// Sorted by method name.
    pub methods: Vec<MethodSummary>,
}

/// Scores every run and compares each method with [`BASELINE_METHOD`] on the
/// datasets both were run on.
pub fn build_report(runs: &[RunInput<'_>]) -> Result<EvalReport> {
    let mut by_key: BTreeMap<(String, String), RunRecord> = BTreeMap::new();
    for run in runs {
        let record = RunRecord {
            method: run.method.to_owned(),
            dataset: run.dataset.to_owned(),
            accuracy: accuracy(run.predictions, run.truth)?,
            evaluated: run.truth.len(),
            runtime_secs: run.runtime_secs,
        };
        let key = (record.method.clone(), record.dataset.clone());
        if by_key.insert(key, record).is_some() {
            return Err(Error::Validation(format!(
                "duplicate run for method '{}' on dataset '{}'",
                run.method, run.dataset
            )));
        }
    }

    let baseline: BTreeMap<&str, f64> = by_key
        .values()
        .filter(|r| r.method == BASELINE_METHOD)
        .map(|r| (r.dataset.as_str(), r.accuracy))
        .collect();
    if baseline.is_empty() {
        return Err(Error::Validation(format!("report requires the '{BASELINE_METHOD}' baseline")));
    }

    let methods: BTreeSet<&str> = by_key.keys().map(|(m, _)| m.as_str()).collect();
    let mut summaries = Vec::new();
    for method in methods {
        let records: Vec<&RunRecord> = by_key.values().filter(|r| r.method == method).collect();
        let mean_accuracy = records.iter().map(|r| r.accuracy).sum::<f64>() / records.len() as f64;
        let wilcoxon = if method == BASELINE_METHOD {
            None
        } else {
            let diffs: Vec<f64> = records
                .iter()
                .filter_map(|r| baseline.get(r.dataset.as_str()).map(|b| r.accuracy - b))
                .collect();
            match wilcoxon_one_sided(&diffs) {
                Ok(w) => Some(w),
                Err(e) => {
                    warn!("no Wilcoxon comparison for '{method}': {e}");
                    None
                }
            }
        };
        summaries.push(MethodSummary {
            method: method.to_owned(),
            mean_accuracy,
            datasets: records.len(),
            wilcoxon,
        });
    }

    Ok(EvalReport { runs: by_key.into_values().collect(), methods: summaries })
}

impl EvalReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Validation(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Validation(e.to_string()))
    }

    /// Aligned plain-text rendering: per-run accuracies, then per-method means
    /// and the Wilcoxon comparison when any method has one.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let mw = self.runs.iter().map(|r| r.method.len()).chain([6]).max().unwrap_or(6);
        let dw = self.runs.iter().map(|r| r.dataset.len()).chain([7]).max().unwrap_or(7);

        let _ = writeln!(out, "{:<mw$}  {:<dw$}  {:>8}  {:>7}  {:>10}", "method", "dataset", "accuracy", "items", "runtime_s");
        for r in &self.runs {
            let _ = writeln!(
                out,
                "{:<mw$}  {:<dw$}  {:>8.4}  {:>7}  {:>10.4}",
                r.method, r.dataset, r.accuracy, r.evaluated, r.runtime_secs
            );
        }

        out.push('\n');
        let _ = writeln!(out, "{:<mw$}  {:>13}  {:>8}", "method", "mean_accuracy", "datasets");
        for m in &self.methods {
            let _ = writeln!(out, "{:<mw$}  {:>13.4}  {:>8}", m.method, m.mean_accuracy, m.datasets);
        }

        if self.methods.iter().any(|m| m.wilcoxon.is_some()) {
            out.push('\n');
            let _ = writeln!(
                out,
                "{:<mw$}  {:>4}  {:>7}  {:>7}  {:>8}  {:>8}",
                "method", "N_r", "W-", "W+", "p_approx", "p_exact"
            );
            for m in &self.methods {
                if let Some(w) = &m.wilcoxon {
                    let exact = w.p_exact.map_or_else(|| "-".to_owned(), |p| format!("{p:.4}"));
                    let _ = writeln!(
                        out,
                        "{:<mw$}  {:>4}  {:>7.1}  {:>7.1}  {:>8.4}  {:>8}",
                        m.method, w.n_r, w.w_minus, w.w_plus, w.p_approx, exact
                    );
                }
            }
        }
        out
    }
}
