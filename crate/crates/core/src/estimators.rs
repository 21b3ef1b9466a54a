//! Reductions of simulator output: ν_S/ν_T with intervals, ξ̂ estimators,
//! and the two-proportion test between swap modes.

use crate::kmc_sim::{periodic_distance2, Charge, RecombinationTally, Snapshot};
use crate::pde_solver::nu_ratio_from_xi;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use std::collections::HashMap;
use thiserror::Error;

/// Significance level of the swap-mode equality test.
pub const MODE_TEST_ALPHA: f64 = 0.01;
/// Minimum events per tally for [`compare_modes`].
pub const MIN_COMPARISON_EVENTS: u64 = 10_000;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("no triplet events; the ratio is unbounded")]
    NoTripletEvents,
    #[error("tally is empty")]
    EmptyTally,
    #[error("need at least {required} events per tally, got {exact} and {reset}")]
    InsufficientEvents { exact: u64, reset: u64, required: u64 },
    #[error("invalid binning: {0}")]
    InvalidBinning(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntervalMethod {
    Delta,
    Bootstrap,
}

/// ν_S/ν_T with a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_events: u64,
    pub singlets: u64,
    pub triplets: u64,
    pub method: IntervalMethod,
}

impl RatioEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    pub fn singlet_fraction(&self) -> f64 {
        self.singlets as f64 / self.n_events as f64
    }
}

fn ratio_counts(singlets: u64, triplets: u64) -> Result<(u64, f64), EstimatorError> {
    if triplets == 0 {
        return Err(EstimatorError::NoTripletEvents);
    }
    Ok((singlets + triplets, singlets as f64 / triplets as f64))
}

/// ν_S/ν_T over all encounter classes, with the delta-method interval
/// propagated from the binomial singlet fraction p through p/(1−p).
pub fn nu_ratio(tally: &RecombinationTally) -> Result<RatioEstimate, EstimatorError> {
    nu_ratio_from_counts(tally.singlets(), tally.triplets())
}

pub fn nu_ratio_from_counts(singlets: u64, triplets: u64) -> Result<RatioEstimate, EstimatorError> {
    let (n, value) = ratio_counts(singlets, triplets)?;
    let p = singlets as f64 / n as f64;
    let se = (p * (1.0 - p) / n as f64).sqrt() / ((1.0 - p) * (1.0 - p));
    Ok(RatioEstimate {
        value,
        ci_low: (value - Z95 * se).max(0.0),
        ci_high: value + Z95 * se,
        n_events: n,
        singlets,
        triplets,
        method: IntervalMethod::Delta,
    })
}

/// Same point estimate with a parametric-bootstrap percentile interval.
pub fn nu_ratio_bootstrap(
    tally: &RecombinationTally,
    resamples: usize,
    seed: u64,
) -> Result<RatioEstimate, EstimatorError> {
    let (singlets, triplets) = (tally.singlets(), tally.triplets());
    let (n, value) = ratio_counts(singlets, triplets)?;
    let p = singlets as f64 / n as f64;
    let binom = Binomial::new(n, p).expect("fraction in [0, 1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws: Vec<f64> = (0..resamples.max(1))
        .map(|_| {
            let s = binom.sample(&mut rng);
            s as f64 / (n - s) as f64
        })
        .collect();
    draws.sort_by(f64::total_cmp);
    let at = |q: f64| draws[((q * (draws.len() - 1) as f64).round() as usize).min(draws.len() - 1)];
    Ok(RatioEstimate {
        value,
        ci_low: at(0.025).min(value),
        ci_high: at(0.975).max(value),
        n_events: n,
        singlets,
        triplets,
        method: IntervalMethod::Bootstrap,
    })
}

/// Inverse of ν_S/ν_T = (1+3ξ₀)/(3−3ξ₀).
pub fn xi0_from_ratio(ratio: f64) -> f64 {
    (3.0 * ratio - 1.0) / (3.0 * ratio + 3.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeComparison {
    pub exact: RatioEstimate,
    pub reset: RatioEstimate,
    pub singlet_fraction_exact: f64,
    pub singlet_fraction_reset: f64,
    pub z: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// Pooled two-proportion z-test of the singlet fractions of two tallies,
/// two-sided at α = 0.01.
pub fn compare_modes(
    exact: &RecombinationTally,
    reset: &RecombinationTally,
) -> Result<ModeComparison, EstimatorError> {
    compare_counts(
        (exact.singlets(), exact.triplets()),
        (reset.singlets(), reset.triplets()),
    )
}

pub fn compare_counts(exact: (u64, u64), reset: (u64, u64)) -> Result<ModeComparison, EstimatorError> {
    let n1 = exact.0 + exact.1;
    let n2 = reset.0 + reset.1;
    if n1 < MIN_COMPARISON_EVENTS || n2 < MIN_COMPARISON_EVENTS {
        return Err(EstimatorError::InsufficientEvents {
            exact: n1,
            reset: n2,
            required: MIN_COMPARISON_EVENTS,
        });
    }
    let p1 = exact.0 as f64 / n1 as f64;
    let p2 = reset.0 as f64 / n2 as f64;
    let pooled = (exact.0 + reset.0) as f64 / (n1 + n2) as f64;
    let se = (pooled * (1.0 - pooled) * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let z = if se > 0.0 { (p1 - p2) / se } else { 0.0 };
    let p_value = erfc(z.abs() / std::f64::consts::SQRT_2);
    Ok(ModeComparison {
        exact: nu_ratio_from_counts(exact.0, exact.1)?,
        reset: nu_ratio_from_counts(reset.0, reset.1)?,
        singlet_fraction_exact: p1,
        singlet_fraction_reset: p2,
        z,
        p_value,
        alpha: MODE_TEST_ALPHA,
        pass: p_value > MODE_TEST_ALPHA,
    })
}

/// Measured ν_S/ν_T next to the value predicted from ξ̂(0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioConsistency {
    pub measured: RatioEstimate,
    pub xi0_hat: f64,
    pub predicted: f64,
    pub within_interval: bool,
}

pub fn ratio_consistency(tally: &RecombinationTally) -> Result<RatioConsistency, EstimatorError> {
    let measured = nu_ratio(tally)?;
    let xi0_hat = tally.xi_mean().ok_or(EstimatorError::EmptyTally)?;
    let predicted = nu_ratio_from_xi(xi0_hat).unwrap_or(f64::INFINITY);
    Ok(RatioConsistency {
        measured,
        xi0_hat,
        predicted,
        within_interval: measured.contains(predicted),
    })
}

/// Binomial z-score of `successes` out of `trials` against probability `p`.
pub fn binomial_z(successes: u64, trials: u64, p: f64) -> f64 {
    let n = trials as f64;
    let sd = (n * p * (1.0 - p)).sqrt();
    if sd == 0.0 {
        if successes as f64 == n * p {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (successes as f64 - n * p) / sd
    }
}

/// Two-sided p-value of a standard normal score.
pub fn normal_two_sided_p(z: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).expect("unit normal");
    2.0 * (1.0 - n.cdf(z.abs()))
}

/// Uniform separation bins on [0, r_max).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Binning {
    pub r_max: f64,
    pub bins: usize,
}

impl Binning {
    pub fn width(&self) -> f64 {
        self.r_max / self.bins as f64
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins).map(|i| (i as f64 + 0.5) * self.width()).collect()
    }
}

/// Binned ξ̂(r) from one snapshot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairStateProfile {
    pub centers: Vec<f64>,
    /// All +− combinations per bin.
    pub combinations: Vec<u64>,
    /// Registry pairs per bin.
    pub correlated: Vec<u64>,
    /// None for empty bins.
    pub xi: Vec<Option<f64>>,
    pub std_error: Vec<Option<f64>>,
}

/// ξ̂(r) = Σ_{registry pairs in bin} (−1/3)ⁿ / #(all +− combinations in bin).
/// Uncorrelated combinations enter the denominator only.
pub fn average_pair_state(snapshot: &Snapshot, binning: Binning) -> Result<PairStateProfile, EstimatorError> {
    let l = snapshot.box_side;
    if !(binning.bins > 0 && binning.r_max > 0.0 && binning.r_max <= l / 2.0) {
        return Err(EstimatorError::InvalidBinning(format!(
            "{} bins up to {} in a box of side {l}",
            binning.bins, binning.r_max
        )));
    }
    let width = binning.width();
    let bin_of = |d2: f64| {
        let b = (d2.sqrt() / width) as usize;
        (b < binning.bins).then_some(b)
    };
    let mut combinations = vec![0u64; binning.bins];
    let plus: Vec<_> = snapshot
        .radicals
        .iter()
        .filter(|r| r.alive && r.charge == Charge::Plus)
        .collect();
    let minus: Vec<_> = snapshot
        .radicals
        .iter()
        .filter(|r| r.alive && r.charge == Charge::Minus)
        .collect();
    for p in &plus {
        for m in &minus {
            if let Some(b) = bin_of(periodic_distance2(&p.position, &m.position, l)) {
                combinations[b] += 1;
            }
        }
    }
    let position: HashMap<u64, [f64; 3]> = snapshot
        .radicals
        .iter()
        .filter(|r| r.alive)
        .map(|r| (r.id, r.position))
        .collect();
    let mut sum = vec![0.0; binning.bins];
    let mut sum2 = vec![0.0; binning.bins];
    let mut correlated = vec![0u64; binning.bins];
    for pair in &snapshot.pairs {
        let (Some(a), Some(b)) = (position.get(&pair.plus), position.get(&pair.minus)) else {
            continue;
        };
        if let Some(k) = bin_of(periodic_distance2(a, b, l)) {
            let xi = crate::spin_algebra::xi_of_index(pair.index);
            sum[k] += xi;
            sum2[k] += xi * xi;
            correlated[k] += 1;
        }
    }
    let mut xi = Vec::with_capacity(binning.bins);
    let mut std_error = Vec::with_capacity(binning.bins);
    for k in 0..binning.bins {
        let n = combinations[k] as f64;
        if combinations[k] == 0 {
            xi.push(None);
            std_error.push(None);
            continue;
        }
        let mean = sum[k] / n;
        let var = (sum2[k] / n - mean * mean).max(0.0);
        xi.push(Some(mean));
        std_error.push(Some((var / n).sqrt()));
    }
    Ok(PairStateProfile {
        centers: binning.centers(),
        combinations,
        correlated,
        xi,
        std_error,
    })
}
