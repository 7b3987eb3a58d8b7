use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{estimate_error_rate, run_em_binary, BinaryResult, BwaHyperParams, EmParams};
use crate::dataset::{binary_view, LabelMatrix};
use crate::error::{Error, Result};

/// Output of [`aggregate_multiclass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiClassResult {
    /// Per-item label: the smallest class index with the highest score.
    pub hard_labels: Vec<usize>,
    /// One binary run per class; `per_class[k].scores[i]` is z_ki.
    pub per_class: Vec<BinaryResult>,
    /// Error rate estimated from the data, after the floor.
    pub epsilon: f64,
    /// Parameters shared by all K binary runs.
    pub params: EmParams,
}

impl MultiClassResult {
    pub fn num_classes(&self) -> usize {
        self.per_class.len()
    }

    pub fn score(&self, class: usize, item: usize) -> f64 {
        self.per_class[class].scores[item]
    }

    /// Per-worker E_q v_j averaged over the K one-versus-rest runs.
    pub fn worker_weights(&self) -> Vec<f64> {
        let k = self.per_class.len() as f64;
        let workers = self.per_class.first().map_or(0, |r| r.worker_weights.len());
        (0..workers)
            .map(|j| self.per_class.iter().map(|r| r.worker_weights[j]).sum::<f64>() / k)
            .collect()
    }

    pub fn converged(&self) -> bool {
        self.per_class.iter().all(|r| r.converged)
    }

    /// Largest iteration count among the K runs.
    pub fn iterations(&self) -> usize {
        self.per_class.iter().map(|r| r.iterations).max().unwrap_or(0)
    }

    /// Sum of the final objectives of the K runs.
    pub fn final_objective(&self) -> f64 {
        self.per_class.iter().filter_map(|r| r.nll_trace.last()).sum()
    }
}

/// One-versus-rest BWA: a single `b_v` is derived from the whole dataset and
/// shared by K independent binary runs, one per class.
pub fn aggregate_multiclass(labels: &LabelMatrix, hp: &BwaHyperParams) -> Result<MultiClassResult> {
    let k = labels.num_classes();
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 classes, got K={k}")));
    }
    let params = hp.em_params(labels)?;
    let epsilon = estimate_error_rate(labels, hp.epsilon_floor)?;

    let per_class = (0..k)
        .into_par_iter()
        .map(|class| run_em_binary(&binary_view(labels, class)?, &params))
        .collect::<Result<Vec<_>>>()?;

    let hard_labels = (0..labels.num_items())
        .map(|i| {
            let mut best = 0;
            for class in 1..k {
                if per_class[class].scores[i] > per_class[best].scores[i] {
                    best = class;
                }
            }
            best
        })
        .collect();

    Ok(MultiClassResult { hard_labels, per_class, epsilon, params })
}
