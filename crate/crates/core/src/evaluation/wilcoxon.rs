//! One-sided Wilcoxon signed-rank test of a method against a baseline.
//!
//! Inputs are per-dataset differences `method - baseline`. Zero differences
//! are dropped, the remaining absolute differences are ranked with average
//! ranks on ties, and `W-` is the rank sum of the negative differences. Small
//! `W-` is evidence that the method beats the baseline, so both p-values are
//! lower-tail probabilities of `W-` under the symmetric null.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest effective sample size for which the exact null distribution is computed.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Number of non-zero differences.
    pub n_r: usize,
    pub w_minus: f64,
    pub w_plus: f64,
    /// Normal approximation without continuity correction.
    pub p_approx: f64,
    /// Exact lower-tail probability, when `n_r <= EXACT_LIMIT`.
    pub p_exact: Option<f64>,
}

pub fn wilcoxon_one_sided(diffs: &[f64]) -> Result<WilcoxonResult> {
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(Error::InvalidParameter("differences must not be NaN".into()));
    }
    let mut nonzero: Vec<f64> = diffs.iter().copied().filter(|&d| d != 0.0).collect();
    if nonzero.is_empty() {
        return Err(Error::Empty("all differences are zero".into()));
    }
    nonzero.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let n_r = nonzero.len();

    // Doubled average ranks are integers: positions p..q (1-based) share p + q.
    let mut doubled = vec![0u64; n_r];
    let mut start = 0;
    while start < n_r {
        let mut end = start;
        while end + 1 < n_r && nonzero[end + 1].abs() == nonzero[start].abs() {
            end += 1;
        }
        let shared = (start + 1 + end + 1) as u64;
        doubled[start..=end].iter_mut().for_each(|r| *r = shared);
        start = end + 1;
    }

    let minus2: u64 = nonzero.iter().zip(&doubled).filter(|(d, _)| **d < 0.0).map(|(_, r)| r).sum();
    let total2: u64 = doubled.iter().sum();
    let w_minus = minus2 as f64 / 2.0;
    let w_plus = (total2 - minus2) as f64 / 2.0;

    let p_exact = (n_r <= EXACT_LIMIT).then(|| exact_lower_tail(&doubled, minus2));
    Ok(WilcoxonResult { n_r, w_minus, w_plus, p_approx: normal_approx_p(w_minus, n_r), p_exact })
}

/// `Phi((W- - n(n+1)/4) / sqrt(n(n+1)(2n+1)/24))`.
pub fn normal_approx_p(w_minus: f64, n_r: usize) -> f64 {
    let n = n_r as f64;
    let mean = n * (n + 1.0) / 4.0;
    let sd = (n * (n + 1.0) * (2.0 * n + 1.0) / 24.0).sqrt();
    Normal::standard().cdf((w_minus - mean) / sd)
}

/// P(W- <= observed) with every rank's sign an independent fair coin, by
/// counting sign patterns per attainable (doubled) rank sum.
fn exact_lower_tail(doubled_ranks: &[u64], observed: u64) -> f64 {
    let max: u64 = doubled_ranks.iter().sum();
    let mut ways = vec![0u64; max as usize + 1];
    ways[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if ways[s] > 0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let hits: u64 = ways[..=observed as usize].iter().sum();
    hits as f64 / (1u64 << doubled_ranks.len()) as f64
}
