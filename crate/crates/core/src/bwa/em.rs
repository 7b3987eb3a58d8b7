use serde::{Deserialize, Serialize};

use super::EmParams;
use crate::dataset::BinaryView;
use crate::error::{Error, Result};
use crate::numeric::ordered_sum;

/// Smallest denominator used in the relative-change stopping rule.
pub const CONVERGENCE_FLOOR: f64 = 1e-8;

/// Iterate of the binary EM solver.
#[derive(Debug, Clone, PartialEq)]
pub struct BwaState {
    /// Continuous truth estimate per item, in [0, 1].
    pub z: Vec<f64>,
    /// Prior mean of the truth estimates.
    pub mu: f64,
    /// Posterior mean precision E_q v_j per worker.
    pub eqv: Vec<f64>,
    /// Sum of squared errors per worker against the current `z`.
    pub sse: Vec<f64>,
    /// Objective at (`z`, `mu`), additive constant omitted.
    pub nll: f64,
    pub iteration: usize,
}

impl BwaState {
    /// Starts from the soft majority vote: `z_i` is the fraction of item `i`'s
    /// labels equal to 1 (0.5 when unlabelled) and `mu` their mean. Worker
    /// precisions are then filled in by an E-step.
    pub fn init(view: &BinaryView<'_>, params: &EmParams) -> Self {
        let z = (0..view.num_items())
            .map(|i| {
                let (ones, total) = view
                    .item_labels(i)
                    .fold((0usize, 0usize), |(o, t), (_, y)| (o + (y == 1.0) as usize, t + 1));
                if total == 0 {
                    0.5
                } else {
                    ones as f64 / total as f64
                }
            })
            .collect::<Vec<_>>();
        let mu = mean(&z);
        let mut state = Self {
            z,
            mu,
            eqv: vec![0.0; view.num_workers()],
            sse: vec![0.0; view.num_workers()],
            nll: 0.0,
            iteration: 0,
        };
        state.e_step(view, params);
        state.nll = state.cached_objective(view, params);
        state
    }

    /// `SSE_j = sum_{i in N_j} (z_i - y_ij)^2` and
    /// `E_q v_j = (a_v + |N_j|) / (b_v + SSE_j)`.
    pub fn e_step(&mut self, view: &BinaryView<'_>, params: &EmParams) {
        let mut terms = Vec::new();
        for j in 0..view.num_workers() {
            terms.clear();
            terms.extend(view.worker_labels(j).map(|(i, y)| {
                let d = self.z[i] - y;
                d * d
            }));
            let count = terms.len() as f64;
            self.sse[j] = ordered_sum(&mut terms);
            self.eqv[j] = (params.a_v + count) / (params.b_v + self.sse[j]);
        }
    }

    /// Weighted average of the prior mean and the item's labels, using the
    /// current `mu`; `mu` is then reset to the mean of the new estimates.
    pub fn m_step(&mut self, view: &BinaryView<'_>, params: &EmParams) {
        let lambda = params.lambda;
        let mut weighted = Vec::new();
        let mut weights = Vec::new();
        for i in 0..view.num_items() {
            weighted.clear();
            weights.clear();
            for (j, y) in view.item_labels(i) {
                weighted.push(self.eqv[j] * y);
                weights.push(self.eqv[j]);
            }
            self.z[i] = if weights.is_empty() {
                self.mu
            } else {
                (lambda * self.mu + ordered_sum(&mut weighted)) / (lambda + ordered_sum(&mut weights))
            };
        }
        self.mu = mean(&self.z);
    }

    /// `sum_i lambda/2 (z_i - mu)^2 + sum_j (a_v + |N_j|)/2 ln(b_v + SSE_j)`,
    /// with SSE recomputed from `z`.
    pub fn neg_log_likelihood(&self, view: &BinaryView<'_>, params: &EmParams) -> f64 {
        let mut terms = Vec::new();
        let sse: Vec<f64> = (0..view.num_workers())
            .map(|j| {
                terms.clear();
                terms.extend(view.worker_labels(j).map(|(i, y)| (self.z[i] - y).powi(2)));
                ordered_sum(&mut terms)
            })
            .collect();
        objective(view, params, &self.z, self.mu, &sse)
    }

    fn cached_objective(&self, view: &BinaryView<'_>, params: &EmParams) -> f64 {
        objective(view, params, &self.z, self.mu, &self.sse)
    }

    /// One M-step followed by an E-step and an objective evaluation.
    pub fn iterate(&mut self, view: &BinaryView<'_>, params: &EmParams) {
        self.m_step(view, params);
        self.e_step(view, params);
        self.nll = self.cached_objective(view, params);
        self.iteration += 1;
    }
}

fn objective(view: &BinaryView<'_>, params: &EmParams, z: &[f64], mu: f64, sse: &[f64]) -> f64 {
    let mut prior: Vec<f64> = z.iter().map(|&zi| 0.5 * params.lambda * (zi - mu).powi(2)).collect();
    let mut workers: Vec<f64> = sse
        .iter()
        .enumerate()
        .map(|(j, &s)| {
            let count = view.labels().worker_labels(j).len() as f64;
            0.5 * (params.a_v + count) * (params.b_v + s).ln()
        })
        .collect();
    ordered_sum(&mut prior) + ordered_sum(&mut workers)
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.5;
    }
    let mut buf = values.to_vec();
    ordered_sum(&mut buf) / values.len() as f64
}

/// Output of [`run_em_binary`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryResult {
    /// Final `z_i` per item.
    pub scores: Vec<f64>,
    /// 1 where the score exceeds 0.5, otherwise 0.
    pub hard_labels: Vec<usize>,
    pub mu: f64,
    /// Final E_q v_j per worker.
    pub worker_weights: Vec<f64>,
    /// Objective at initialisation followed by one value per iteration.
    pub nll_trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Runs EM from the soft majority vote until every `z_i` moves by at most
/// `tolerance` relative to its previous value, or `max_iters` is reached.
pub fn run_em_binary(view: &BinaryView<'_>, params: &EmParams) -> Result<BinaryResult> {
    run_em_binary_with(view, params, |_| {})
}

/// As [`run_em_binary`], calling `observe` on the initial state and after
/// every iteration.
pub fn run_em_binary_with(
    view: &BinaryView<'_>,
    params: &EmParams,
    mut observe: impl FnMut(&BwaState),
) -> Result<BinaryResult> {
    params.validate()?;
    if view.labels().num_labels() == 0 {
        return Err(Error::Empty("binary EM needs at least one label".into()));
    }

    let mut state = BwaState::init(view, params);
    observe(&state);
    let mut trace = vec![state.nll];
    let mut previous = state.z.clone();
    let mut converged = false;

    while state.iteration < params.max_iters {
        previous.copy_from_slice(&state.z);
        state.iterate(view, params);
        observe(&state);
        trace.push(state.nll);
        converged = state.z.iter().zip(&previous).all(|(&z, &z_prev)| {
            (z - z_prev).abs() / z_prev.abs().max(CONVERGENCE_FLOOR) <= params.tolerance
        });
        if converged {
            break;
        }
    }

    let hard_labels = state.z.iter().map(|&z| usize::from(z > 0.5)).collect();
    Ok(BinaryResult {
        scores: state.z,
        hard_labels,
        mu: state.mu,
        worker_weights: state.eqv,
        nll_trace: trace,
        converged,
        iterations: state.iteration,
    })
}
