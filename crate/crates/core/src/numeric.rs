//! Summation helpers shared by the iterative solvers.

/// Sums `terms` in ascending value order.
///
/// The result depends only on the multiset of values, so it is bit-identical
/// under any permutation of the input. `terms` is reordered in place.
pub(crate) fn ordered_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    terms.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_does_not_matter() {
        let mut a = vec![1e16, 1.0, -1e16, 3.5, 0.1, 0.2];
        let mut b = vec![0.2, -1e16, 3.5, 1.0, 0.1, 1e16];
        assert_eq!(ordered_sum(&mut a).to_bits(), ordered_sum(&mut b).to_bits());
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(ordered_sum(&mut []), 0.0);
    }
}
