//! Data-driven choice of the prior mistake count `b_v`.

use log::warn;

use crate::dataset::{vote_counts, LabelMatrix};
use crate::error::{Error, Result};
use crate::numeric::ordered_sum;

/// Disagreement of worker labels with the soft majority vote, pooled over
/// the one-versus-rest views:
///
/// ```text
/// eps = sum_k sum_i n_ik (|W_i| - n_ik) / |W_i|  /  (K * sum_i |W_i|)
/// ```
///
/// For K = 2 this is `sum_i n_i0 n_i1 / (n_i0 + n_i1) / sum_i |W_i|`, which is
/// bounded above by 1/4. No floor is applied.
pub fn raw_error_rate(labels: &LabelMatrix) -> Result<f64> {
    let total = labels.num_labels();
    if total == 0 {
        return Err(Error::Empty("error rate needs at least one label".into()));
    }
    let counts = vote_counts(labels);
    let k = labels.num_classes();
    let mut terms: Vec<f64> = (0..labels.num_items())
        .filter_map(|i| {
            let n = counts.counts(i);
            let w: usize = n.iter().sum();
            if w == 0 {
                return None;
            }
            // Integer numerator, exact for any realistic count.
            let disagreements: u64 = n.iter().map(|&c| (c * (w - c)) as u64).sum();
            Some(disagreements as f64 / w as f64)
        })
        .collect();
    Ok(ordered_sum(&mut terms) / (k as f64 * total as f64))
}

/// [`raw_error_rate`] clamped below at `floor`.
pub fn estimate_error_rate(labels: &LabelMatrix, floor: f64) -> Result<f64> {
    Ok(raw_error_rate(labels)?.max(floor))
}

/// Stretches an error rate from `[0, 1/4]` to `[0, 1 - 1/K]`.
pub fn adjust_error_rate(eps: f64, num_classes: usize) -> f64 {
    eps * 4.0 * (1.0 - 1.0 / num_classes as f64)
}

/// `b_v = a_v * max(eps, floor)`.
pub fn derive_bv(a_v: f64, eps: f64, floor: f64) -> f64 {
    let b_v = a_v * eps.max(floor);
    if b_v > a_v {
        warn!("b_v = {b_v} exceeds a_v = {a_v}; workers may receive weights below 1");
    }
    b_v
}
