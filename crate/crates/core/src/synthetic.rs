//! Seeded confusion-matrix crowd simulator.
//!
//! # Random stream
//!
//! All randomness comes from SplitMix64: the state starts at `seed` and each
//! draw adds `0x9E3779B97F4A7C15` to the state and returns
//!
//! ```text
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! (wrapping arithmetic). Derived draws:
//!
//! * uniform `[0, 1)`: `(next >> 11) * 2^-53`;
//! * uniform integer below `n`: `next % n`, redrawing while
//!   `next >= floor(2^64 / n) * n`;
//! * categorical over `p`: the first index whose running sum exceeds a
//!   uniform draw (the last index if rounding leaves none).
//!
//! # Draw order
//!
//! 1. For symmetric workers, one uniform per worker `j = 0..W`, giving accuracy
//!    `low + (high - low) u`.
//! 2. For each item `i = 0..N`: its true class (categorical over the class
//!    prior); then `r` distinct workers by a partial Fisher-Yates shuffle of a
//!    worker pool that starts as `0..W` and persists across items (for
//!    `s = 0..r`, swap position `s` with `s + below(W - s)`); then one label per
//!    selected worker in selection order, categorical over that worker's
//!    confusion row for the true class.
//!
//! Items are named `i<index>`, workers `w<index>` and classes by their index.

use crate::dataset::{GroundTruth, LabelMatrix};
use crate::error::{Error, Result};

/// SplitMix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.next_f64();
        let mut acc = 0.0;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return k;
            }
        }
        probs.len() - 1
    }
}

/// How worker confusion matrices are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum WorkerModel {
    /// Accuracy drawn uniformly from `[low, high]` per worker; errors spread
    /// evenly over the other K - 1 classes.
    Symmetric { low: f64, high: f64 },
    /// Explicit row-major K x K matrix per worker, rows indexed by true class.
    Confusion(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub num_items: usize,
    pub num_workers: usize,
    pub num_classes: usize,
    /// Labels per item, each from a distinct worker.
    pub redundancy: usize,
    pub class_prior: Vec<f64>,
    pub workers: WorkerModel,
    pub seed: u64,
}

impl SynthSpec {
    /// Uniform class prior with symmetric workers.
    pub fn symmetric(
        num_items: usize,
        num_workers: usize,
        num_classes: usize,
        redundancy: usize,
        accuracy: (f64, f64),
        seed: u64,
    ) -> Self {
        Self {
            num_items,
            num_workers,
            num_classes,
            redundancy,
            class_prior: vec![1.0 / num_classes as f64; num_classes],
            workers: WorkerModel::Symmetric { low: accuracy.0, high: accuracy.1 },
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_classes;
        if k < 2 {
            return Err(Error::InvalidParameter("need at least 2 classes".into()));
        }
        if self.redundancy > self.num_workers {
            return Err(Error::InvalidParameter(format!(
                "redundancy {} exceeds the number of workers {}",
                self.redundancy, self.num_workers
            )));
        }
        check_distribution("class prior", &self.class_prior, k)?;
        match &self.workers {
            WorkerModel::Symmetric { low, high } => {
                if !(0.0 <= *low && low <= high && *high <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "accuracy interval [{low}, {high}] must lie within [0, 1]"
                    )));
                }
            }
            WorkerModel::Confusion(matrices) => {
                if matrices.len() != self.num_workers {
                    return Err(Error::InvalidParameter(format!(
                        "{} confusion matrices for {} workers",
                        matrices.len(),
                        self.num_workers
                    )));
                }
                for (j, m) in matrices.iter().enumerate() {
                    if m.len() != k * k {
                        return Err(Error::InvalidParameter(format!("worker {j}: matrix is not {k}x{k}")));
                    }
                    for row in m.chunks(k) {
                        check_distribution(&format!("worker {j} confusion row"), row, k)?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_distribution(what: &str, p: &[f64], k: usize) -> Result<()> {
    if p.len() != k || p.iter().any(|&x| !(x >= 0.0)) || (p.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("{what} must be {k} non-negative values summing to 1")));
    }
    Ok(())
}

/// Generated crowd with the confusion matrices that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCrowd {
    pub labels: LabelMatrix,
    pub truth: GroundTruth,
    /// Row-major K x K per worker, indexed like `labels`' workers.
    pub confusions: Vec<Vec<f64>>,
}

impl SyntheticCrowd {
    /// Probability that each worker labels an item correctly under the class prior.
    pub fn worker_accuracies(&self, class_prior: &[f64]) -> Vec<f64> {
        let k = class_prior.len();
        self.confusions
            .iter()
            .map(|m| (0..k).map(|c| class_prior[c] * m[c * k + c]).sum())
            .collect()
    }
}

pub fn generate(spec: &SynthSpec) -> Result<SyntheticCrowd> {
    spec.validate()?;
    let k = spec.num_classes;
    let w = spec.num_workers;
    let mut rng = SplitMix64::new(spec.seed);

    let confusions: Vec<Vec<f64>> = match &spec.workers {
        WorkerModel::Confusion(m) => m.clone(),
        WorkerModel::Symmetric { low, high } => (0..w)
            .map(|_| {
                let acc = low + (high - low) * rng.next_f64();
                let off = (1.0 - acc) / (k - 1) as f64;
                (0..k * k).map(|cell| if cell / k == cell % k { acc } else { off }).collect()
            })
            .collect(),
    };

    let mut pool: Vec<usize> = (0..w).collect();
    let mut truth = GroundTruth::new();
    let mut triples = Vec::with_capacity(spec.num_items * spec.redundancy);
    for item in 0..spec.num_items {
        let class = rng.categorical(&spec.class_prior);
        truth.insert(item, class);
        for s in 0..spec.redundancy {
            let pick = s + rng.below((w - s) as u64) as usize;
            pool.swap(s, pick);
        }
        for &worker in &pool[..spec.redundancy] {
            let label = rng.categorical(&confusions[worker][class * k..(class + 1) * k]);
            triples.push((item, worker, label));
        }
    }

    let labels = LabelMatrix::from_dense(spec.num_items, w, k, triples)?;
    Ok(SyntheticCrowd { labels, truth, confusions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::majority_vote;
    use crate::evaluation::accuracy;

    #[test]
    fn splitmix_reference_values() {
        // Reference outputs of SplitMix64 seeded with 0.
        let mut r = SplitMix64::new(0);
        assert_eq!(r.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(r.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(r.next_u64(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn below_stays_in_range() {
        let mut r = SplitMix64::new(9);
        for n in 1..50 {
            assert!(r.below(n) < n);
        }
    }

    #[test]
    fn perfect_workers_reproduce_truth() {
        let eye = vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        let spec = SynthSpec {
            num_items: 200,
            num_workers: 6,
            num_classes: 3,
            redundancy: 3,
            class_prior: vec![0.2, 0.3, 0.5],
            workers: WorkerModel::Confusion(vec![eye; 6]),
            seed: 3,
        };
        let crowd = generate(&spec).unwrap();
        for t in crowd.labels.triples() {
            assert_eq!(Some(t.class), crowd.truth.get(t.item));
        }
        assert_eq!(accuracy(&majority_vote(&crowd.labels).labels, &crowd.truth).unwrap(), 1.0);
    }

    #[test]
    fn random_workers_give_coin_flip_majority() {
        let spec = SynthSpec::symmetric(10_000, 10, 2, 3, (0.5, 0.5), 11);
        let crowd = generate(&spec).unwrap();
        let acc = accuracy(&majority_vote(&crowd.labels).labels, &crowd.truth).unwrap();
        assert!((acc - 0.5).abs() <= 0.05, "{acc}");
    }

    #[test]
    fn same_seed_same_output() {
        let spec = SynthSpec::symmetric(50, 8, 3, 4, (0.6, 0.9), 42);
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let other = SynthSpec { seed: 43, ..spec.clone() };
        assert_ne!(generate(&spec).unwrap().labels, generate(&other).unwrap().labels);
    }

    #[test]
    fn infeasible_redundancy() {
        let spec = SynthSpec::symmetric(10, 5, 2, 6, (0.6, 0.9), 1);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn every_item_gets_r_distinct_workers() {
        let spec = SynthSpec::symmetric(300, 7, 2, 4, (0.6, 0.9), 5);
        let crowd = generate(&spec).unwrap();
        for i in 0..300 {
            assert_eq!(crowd.labels.item_labels(i).len(), 4);
        }
    }

    #[test]
    fn empirical_accuracy_tracks_the_confusion_diagonal() {
        let spec = SynthSpec::symmetric(20_000, 10, 3, 3, (0.4, 0.95), 8);
        let crowd = generate(&spec).unwrap();
        for j in 0..10 {
            let labels = crowd.labels.worker_labels(j);
            let n = labels.len() as f64;
            let hits = labels.iter().filter(|l| crowd.truth.get(l.item) == Some(l.class)).count() as f64;
            let p = crowd.confusions[j][0];
            let se = (p * (1.0 - p) / n).sqrt();
            assert!((hits / n - p).abs() <= 3.0 * se + 1e-12, "worker {j}: {} vs {p}", hits / n);
        }
    }
}
