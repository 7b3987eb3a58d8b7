//! Reference aggregators: majority vote and Dawid-Skene.

mod dawid_skene;

pub use dawid_skene::{dawid_skene, DsParams, DsResult};

use crate::dataset::{vote_counts, LabelMatrix};

/// Majority vote per item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MajorityVote {
    /// Most frequent class, ties to the smallest index; 0 for unlabelled items.
    pub labels: Vec<usize>,
    /// True where the item received no labels at all.
    pub unlabelled: Vec<bool>,
}

pub fn majority_vote(labels: &LabelMatrix) -> MajorityVote {
    let counts = vote_counts(labels);
    let mut out = MajorityVote {
        labels: Vec::with_capacity(labels.num_items()),
        unlabelled: Vec::with_capacity(labels.num_items()),
    };
    for i in 0..labels.num_items() {
        let n = counts.counts(i);
        out.labels.push(argmax_first(n.iter().copied()));
        out.unlabelled.push(n.iter().all(|&c| c == 0));
    }
    out
}

/// Index of the first maximum.
pub(crate) fn argmax_first<T: PartialOrd>(values: impl IntoIterator<Item = T>) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (k, v) in values.into_iter().enumerate() {
        match &best {
            Some((_, b)) if !(v > *b) => {}
            _ => best = Some((k, v)),
        }
    }
    best.map_or(0, |(k, _)| k)
}
