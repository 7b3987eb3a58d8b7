//! Accuracy against ground truth and paired comparison with majority vote.

mod report;
mod wilcoxon;

pub use report::{build_report, EvalReport, MethodSummary, RunInput, RunRecord, BASELINE_METHOD};
pub use wilcoxon::{normal_approx_p, wilcoxon_one_sided, WilcoxonResult, EXACT_LIMIT};

use crate::dataset::GroundTruth;
use crate::error::{Error, Result};

/// Fraction of truth-covered items whose prediction equals the truth.
/// Predictions for items without truth are ignored.
pub fn accuracy(predictions: &[usize], truth: &GroundTruth) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::Empty("accuracy needs at least one truth label".into()));
    }
    let mut correct = 0usize;
    for (item, class) in truth.iter() {
        let predicted = predictions.get(item).ok_or_else(|| {
            Error::Validation(format!("no prediction for item {item} ({} predictions)", predictions.len()))
        })?;
        correct += usize::from(*predicted == class);
    }
    Ok(correct as f64 / truth.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accuracy_examples() {
        let truth = GroundTruth::from_pairs([(0, 1), (1, 0), (2, 2), (3, 1)]);
        assert_eq!(accuracy(&[1, 0, 2, 1], &truth).unwrap(), 1.0);
        assert_eq!(accuracy(&[1, 0, 0, 0], &truth).unwrap(), 0.5);
    }

    #[test]
    fn items_without_truth_are_ignored() {
        let truth = GroundTruth::from_pairs([(0, 1), (2, 0)]);
        let a = accuracy(&[1, 0, 0], &truth).unwrap();
        let b = accuracy(&[1, 1, 0], &truth).unwrap();
        assert_eq!(a, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_truth_is_an_error() {
        assert!(accuracy(&[0, 1], &GroundTruth::new()).is_err());
    }

    #[test]
    fn missing_prediction_is_an_error() {
        assert!(accuracy(&[0], &GroundTruth::from_pairs([(3, 0)])).is_err());
    }
}
