//! Dawid-Skene: per-worker K x K confusion matrices fitted by EM.
//!
//! Every M-step adds `smoothing` to each confusion-matrix cell and to each
//! class-prior count, which makes it the MAP update under a symmetric
//! Dirichlet(1 + smoothing) prior. The objective reported per iteration is
//! therefore the log marginal likelihood plus that log prior, and it is
//! non-decreasing.

use serde::{Deserialize, Serialize};

use super::argmax_first;
use crate::dataset::{vote_counts, LabelMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DsParams {
    pub max_iters: usize,
    /// Stop once no class posterior moves by more than this.
    pub tolerance: f64,
    pub smoothing: f64,
}

impl Default for DsParams {
    fn default() -> Self {
        Self { max_iters: 100, tolerance: 1e-4, smoothing: 0.01 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DsResult {
    pub hard_labels: Vec<usize>,
    /// Row-major N x K class posteriors.
    pub posteriors: Vec<f64>,
    pub class_prior: Vec<f64>,
    /// Per worker, row-major K x K matrix P(label = l | truth = k).
    pub confusions: Vec<Vec<f64>>,
    /// Smoothed log marginal likelihood after each iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl DsResult {
    pub fn posterior(&self, item: usize) -> &[f64] {
        let k = self.class_prior.len();
        &self.posteriors[item * k..(item + 1) * k]
    }
}

pub fn dawid_skene(labels: &LabelMatrix, params: &DsParams) -> DsResult {
    let n = labels.num_items();
    let k = labels.num_classes();
    let w = labels.num_workers();
    let s = params.smoothing;

    // Soft majority vote start; unlabelled items start uniform.
    let counts = vote_counts(labels);
    let mut post = vec![0.0; n * k];
    for i in 0..n {
        let c = counts.counts(i);
        let total: usize = c.iter().sum();
        for class in 0..k {
            post[i * k + class] = if total == 0 { 1.0 / k as f64 } else { c[class] as f64 / total as f64 };
        }
    }

    let mut prior = vec![0.0; k];
    let mut conf = vec![vec![0.0; k * k]; w];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut next = vec![0.0; n * k];
    let mut log_terms = vec![0.0; k];

    while iterations < params.max_iters {
        iterations += 1;

        // M-step.
        for (class, p) in prior.iter_mut().enumerate() {
            let mass: f64 = (0..n).map(|i| post[i * k + class]).sum();
            *p = (mass + s) / (n as f64 + k as f64 * s);
        }
        for (j, cm) in conf.iter_mut().enumerate() {
            cm.iter_mut().for_each(|c| *c = s);
            for l in labels.worker_labels(j) {
                for truth in 0..k {
                    cm[truth * k + l.class] += post[l.item * k + truth];
                }
            }
            for truth in 0..k {
                let row = &mut cm[truth * k..(truth + 1) * k];
                let total: f64 = row.iter().sum();
                row.iter_mut().for_each(|c| *c /= total);
            }
        }

        // E-step.
        let mut log_marginal = 0.0;
        for i in 0..n {
            for (class, t) in log_terms.iter_mut().enumerate() {
                *t = prior[class].ln()
                    + labels
                        .item_labels(i)
                        .iter()
                        .map(|l| conf[l.worker][class * k + l.class].ln())
                        .sum::<f64>();
            }
            let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + log_terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln();
            log_marginal += lse;
            for class in 0..k {
                next[i * k + class] = (log_terms[class] - lse).exp();
            }
        }
        let log_prior = s * prior.iter().map(|p| p.ln()).sum::<f64>()
            + s * conf.iter().flat_map(|cm| cm.iter()).map(|c| c.ln()).sum::<f64>();
        trace.push(log_marginal + log_prior);

        let change = post.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        std::mem::swap(&mut post, &mut next);
        if change <= params.tolerance {
            converged = true;
            break;
        }
    }

    let hard_labels = (0..n).map(|i| argmax_first(post[i * k..(i + 1) * k].iter().copied())).collect();
    DsResult {
        hard_labels,
        posteriors: post,
        class_prior: prior,
        confusions: conf,
        objective_trace: trace,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::majority_vote;

    #[test]
    fn single_item_single_worker() {
        let m = LabelMatrix::from_dense(1, 1, 3, [(0, 0, 1)]).unwrap();
        assert_eq!(dawid_skene(&m, &DsParams::default()).hard_labels, vec![1]);
    }

    #[test]
    fn unanimous_data_matches_majority_vote() {
        // Every worker labels every item and all of them agree.
        let truth = [2, 0, 1, 0, 2];
        let triples = truth.iter().enumerate().flat_map(|(i, &t)| (0..3).map(move |j| (i, j, t)));
        let m = LabelMatrix::from_dense(5, 3, 3, triples).unwrap();
        let ds = dawid_skene(&m, &DsParams::default());
        assert_eq!(ds.hard_labels, majority_vote(&m).labels);
        assert_eq!(ds.hard_labels, truth.to_vec());
    }

    #[test]
    fn dissenting_worker_is_outvoted() {
        // Workers 0 and 1 agree on every item; worker 2 always says the opposite.
        let truth = [1, 0, 1];
        let triples = truth.iter().enumerate().flat_map(|(i, &t)| [(i, 0, t), (i, 1, t), (i, 2, 1 - t)]);
        let m = LabelMatrix::from_dense(3, 3, 2, triples).unwrap();
        let ds = dawid_skene(&m, &DsParams::default());
        assert_eq!(ds.hard_labels, truth.to_vec());
        for i in 0..3 {
            let p = ds.posterior(i);
            assert!(p[truth[i]] > 0.5, "{p:?}");
        }
    }

    #[test]
    fn posteriors_are_normalised() {
        let m = LabelMatrix::from_dense(3, 3, 3, [(0, 0, 0), (0, 1, 1), (1, 1, 2), (1, 2, 2), (2, 0, 1)]).unwrap();
        let ds = dawid_skene(&m, &DsParams::default());
        for i in 0..3 {
            assert!((ds.posterior(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
