//! Index-space calculus of the swapping gain.
//!
//! A cross recombination between a pair of index m and a pair of index n−m
//! leaves behind a pair of index n (singlet outcome, weight ¼) or n+1
//! (triplet outcome, weight ¾). Summed over partners this is a weighted
//! Cauchy product of the two index sequences. Under the weighting xⁿ with
//! x = −1/3 the two channels cancel exactly:
//! ¼·A(x)B(x) + ¾·x·A(x)B(x) = 0.

use thiserror::Error;

/// Weight of the singlet channel in a meeting of uncorrelated fragments.
pub const SINGLET_WEIGHT: f64 = 0.25;
/// Weight of the (isotropic) triplet channel.
pub const TRIPLET_WEIGHT: f64 = 0.75;
/// Evaluation point at which the swapping channels cancel.
pub const XI_WEIGHT: f64 = -1.0 / 3.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SequenceError {
    #[error("sequence lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sequence needs truncation N >= 1, got {0} entries")]
    TooShort(usize),
    #[error("entry {index} is {value}, expected a finite nonnegative value")]
    BadEntry { index: usize, value: f64 },
}

/// Channel weights of the swapping gain; the physical values are ¼ and ¾.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapWeights {
    pub singlet: f64,
    pub triplet: f64,
}

impl Default for SwapWeights {
    fn default() -> Self {
        Self {
            singlet: SINGLET_WEIGHT,
            triplet: TRIPLET_WEIGHT,
        }
    }
}

/// Nonnegative pair densities a₀ … a_N indexed by Werner index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSequence {
    values: Vec<f64>,
}

impl IndexSequence {
    pub fn new(values: Vec<f64>) -> Result<Self, SequenceError> {
        if values.len() < 2 {
            return Err(SequenceError::TooShort(values.len()));
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(SequenceError::BadEntry { index, value });
        }
        Ok(Self { values })
    }

    pub fn zeros(truncation: usize) -> Self {
        Self {
            values: vec![0.0; truncation.max(1) + 1],
        }
    }

    /// Index of the last retained entry.
    pub fn truncation(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Weighted Cauchy product into `out`, keeping indices `0..out.len()`.
///
/// Works on arbitrary real coefficients so it can be applied to transformed
/// profiles as well as to densities.
pub fn swap_gain_into(a: &[f64], b: &[f64], weights: SwapWeights, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let len = out.len();
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || i >= len {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            let n = i + j;
            if n >= len {
                break;
            }
            let prod = ai * bj;
            out[n] += weights.singlet * prod;
            if n + 1 < len {
                out[n + 1] += weights.triplet * prod;
            }
        }
    }
}

fn check_lengths(a: &IndexSequence, b: &IndexSequence) -> Result<(), SequenceError> {
    if a.values.len() != b.values.len() {
        return Err(SequenceError::LengthMismatch(a.values.len(), b.values.len()));
    }
    Ok(())
}

/// gainₙ = ¼ Σ_{m≤n} aₘ b_{n−m} + ¾ Σ_{m≤n−1} aₘ b_{n−m−1}, truncated at N.
pub fn swap_gain(a: &IndexSequence, b: &IndexSequence) -> Result<IndexSequence, SequenceError> {
    swap_gain_weighted(a, b, SwapWeights::default())
}

pub fn swap_gain_weighted(
    a: &IndexSequence,
    b: &IndexSequence,
    weights: SwapWeights,
) -> Result<IndexSequence, SequenceError> {
    check_lengths(a, b)?;
    let mut out = vec![0.0; a.values.len()];
    swap_gain_into(&a.values, &b.values, weights, &mut out);
    Ok(IndexSequence { values: out })
}

/// The full, untruncated gain (indices 0..=2N+1).
pub fn swap_gain_full(a: &[f64], b: &[f64], weights: SwapWeights) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len()];
    swap_gain_into(a, b, weights, &mut out);
    out
}

/// Σₙ xⁿ aₙ by Horner's rule.
pub fn xi_weighted_sum(a: &[f64], x: f64) -> f64 {
    a.iter().rev().fold(0.0, |acc, &v| acc * x + v)
}

/// Σ_{n>N} |x|ⁿ |gainₙ| for the part of the gain dropped by truncating at
/// the caller's N.
pub fn truncation_loss_bound(a: &IndexSequence, b: &IndexSequence, x: f64) -> Result<f64, SequenceError> {
    check_lengths(a, b)?;
    let full = swap_gain_full(&a.values, &b.values, SwapWeights::default());
    let keep = a.values.len();
    Ok(full
        .iter()
        .enumerate()
        .skip(keep)
        .map(|(n, g)| x.abs().powi(n as i32) * g.abs())
        .sum())
}

/// ξ-weighted sum of the untruncated swapping gain. Vanishes identically
/// for the physical weights.
pub fn cancellation_residual(a: &IndexSequence, b: &IndexSequence) -> f64 {
    cancellation_residual_at(a.values(), b.values(), XI_WEIGHT, SwapWeights::default())
}

pub fn cancellation_residual_at(a: &[f64], b: &[f64], x: f64, weights: SwapWeights) -> f64 {
    xi_weighted_sum(&swap_gain_full(a, b, weights), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn seq(v: &[f64]) -> IndexSequence {
        IndexSequence::new(v.to_vec()).unwrap()
    }

    /// Direct double sum over (m, n−m) pairs, no shared code with the kernel.
    fn gain_oracle(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
        (0..len)
            .map(|n| {
                let singlet: f64 = (0..=n)
                    .filter(|&m| m < a.len() && n - m < b.len())
                    .map(|m| a[m] * b[n - m])
                    .sum();
                let triplet: f64 = if n == 0 {
                    0.0
                } else {
                    (0..n)
                        .filter(|&m| m < a.len() && n - m - 1 < b.len())
                        .map(|m| a[m] * b[n - m - 1])
                        .sum()
                };
                0.25 * singlet + 0.75 * triplet
            })
            .collect()
    }

    #[test]
    fn gain_of_pure_singlets() {
        let a = seq(&[1.0, 0.0, 0.0, 0.0]);
        let g = swap_gain(&a, &a).unwrap();
        assert_eq!(g.values(), &[0.25, 0.75, 0.0, 0.0]);
    }

    #[test]
    fn gain_of_zero_is_zero() {
        let a = IndexSequence::zeros(5);
        let b = seq(&[0.3, 1.0, 2.0, 0.0, 0.1, 4.0]);
        assert!(swap_gain(&a, &b).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gain_of_two_level_sequence() {
        let a = seq(&[1.0, 1.0, 0.0, 0.0, 0.0]);
        let g = swap_gain(&a, &a).unwrap();
        assert_eq!(g.values(), &[0.25, 1.25, 1.75, 0.75, 0.0]);
        assert_eq!(gain_oracle(a.values(), a.values(), 5), g.values());
    }

    #[test]
    fn gain_length_mismatch() {
        let a = seq(&[1.0, 0.0]);
        let b = seq(&[1.0, 0.0, 0.0]);
        assert_eq!(swap_gain(&a, &b), Err(SequenceError::LengthMismatch(2, 3)));
    }

    #[test]
    fn sequence_invariants() {
        assert!(matches!(IndexSequence::new(vec![1.0]), Err(SequenceError::TooShort(1))));
        assert!(matches!(
            IndexSequence::new(vec![1.0, -0.5]),
            Err(SequenceError::BadEntry { index: 1, .. })
        ));
    }

    #[test]
    fn weighted_sum_examples() {
        assert_eq!(xi_weighted_sum(&[1.0, 0.0, 0.0], 0.7), 1.0);
        assert_abs_diff_eq!(xi_weighted_sum(&[0.0, 1.0, 0.0], XI_WEIGHT), -1.0 / 3.0);
        let n_max = 11;
        let ones = vec![1.0; n_max + 1];
        let geometric = (1.0 - XI_WEIGHT.powi(n_max as i32 + 1)) * 0.75;
        assert_abs_diff_eq!(xi_weighted_sum(&ones, XI_WEIGHT), geometric, epsilon = 1e-15);
    }

    #[test]
    fn simplest_cancellation() {
        let a = seq(&[1.0, 0.0]);
        assert_abs_diff_eq!(cancellation_residual(&a, &a), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn cancellation_is_specific_to_minus_one_third() {
        let a = [1.0, 0.5, 0.2];
        let b = [0.3, 0.0, 1.0];
        let r = cancellation_residual_at(&a, &b, -0.5, SwapWeights::default());
        // (¼ − ⅜)·A(−½)·B(−½)
        let expected = (0.25 - 0.375) * xi_weighted_sum(&a, -0.5) * xi_weighted_sum(&b, -0.5);
        assert_abs_diff_eq!(r, expected, epsilon = 1e-15);
        assert!(r.abs() > 1e-3);
    }

    #[test]
    fn truncation_loss_bound_covers_dropped_terms() {
        let a = seq(&[1.0, 1.0]);
        // Untruncated gain is (¼, 5/4, 7/4, ¾); entries 2 and 3 are dropped.
        let bound = truncation_loss_bound(&a, &a, XI_WEIGHT).unwrap();
        let expected = 1.75 / 9.0 + 0.75 / 27.0;
        assert_abs_diff_eq!(bound, expected, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn gain_matches_double_sum(
            a in proptest::collection::vec(0.0f64..10.0, 2..10),
            b_seed in proptest::collection::vec(0.0f64..10.0, 10),
        ) {
            let b = &b_seed[..a.len()];
            let got = swap_gain(&seq(&a), &seq(b)).unwrap();
            let want = gain_oracle(&a, b, a.len());
            for (g, w) in got.values().iter().zip(&want) {
                prop_assert!((g - w).abs() <= 1e-12 * (1.0 + w.abs()));
            }
        }

        #[test]
        fn cancellation_holds(
            a in proptest::collection::vec(0.0f64..1.0, 12),
            b in proptest::collection::vec(0.0f64..1.0, 12),
        ) {
            let (sa, sb) = (seq(&a), seq(&b));
            let scale = sa.l1_norm() * sb.l1_norm();
            prop_assert!(cancellation_residual(&sa, &sb).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn mass_is_multiplicative(
            a in proptest::collection::vec(0.0f64..1.0, 2..15),
            b_seed in proptest::collection::vec(0.0f64..1.0, 15),
        ) {
            let b = &b_seed[..a.len()];
            let total: f64 = swap_gain_full(&a, b, SwapWeights::default()).iter().sum();
            let product = a.iter().sum::<f64>() * b.iter().sum::<f64>();
            prop_assert!((total - product).abs() <= 1e-12 * (1.0 + product));
        }

        #[test]
        fn gain_is_bilinear(
            a1 in proptest::collection::vec(0.0f64..1.0, 8),
            a2 in proptest::collection::vec(0.0f64..1.0, 8),
            b in proptest::collection::vec(0.0f64..1.0, 8),
            s in 0.0f64..5.0,
        ) {
            let mix: Vec<f64> = a1.iter().zip(&a2).map(|(x, y)| x + s * y).collect();
            let lhs = swap_gain(&seq(&mix), &seq(&b)).unwrap();
            let g1 = swap_gain(&seq(&a1), &seq(&b)).unwrap();
            let g2 = swap_gain(&seq(&a2), &seq(&b)).unwrap();
            for ((l, x), y) in lhs.values().iter().zip(g1.values()).zip(g2.values()) {
                prop_assert!((l - (x + s * y)).abs() <= 1e-12 * (1.0 + l.abs()));
            }
        }
    }
}
