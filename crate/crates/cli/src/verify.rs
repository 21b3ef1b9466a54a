//! Self-check of the algebraic identities the solvers rely on.

use radswap_core::spin_algebra::{rho_n, swap_singlet_exact, swap_triplet_exact};
use radswap_core::swap_calculus::{cancellation_residual_at, swap_gain_full, SwapWeights, XI_WEIGHT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const MAX_INDEX: u32 = 8;
pub const SEQUENCE_PAIRS: usize = 1000;
pub const SEQUENCE_LENGTH: usize = 12;
pub const TOLERANCE: f64 = 1e-12;
const SEQUENCE_SEED: u64 = 20_240_101;

/// Deliberate corruption used to prove the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Triplet-channel weight 1/2 instead of 3/4.
    TripletWeightHalf,
}

impl Fault {
    fn weights(self) -> SwapWeights {
        match self {
            Self::None => SwapWeights::default(),
            Self::TripletWeightHalf => SwapWeights {
                singlet: 0.25,
                triplet: 0.5,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    /// Largest deviation observed.
    pub worst: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:<34} {:>6} {:>12} {:>10}  result\n",
            "check", "cases", "worst", "tolerance"
        );
        for c in &self.checks {
            s += &format!(
                "{:<34} {:>6} {:>12.3e} {:>10.0e}  {}\n",
                c.name,
                c.cases,
                c.worst,
                c.tolerance,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        s += if self.passed { "all checks passed\n" } else { "verification FAILED\n" };
        s
    }
}

fn check(name: &'static str, cases: usize, worst: f64, tolerance: f64) -> CheckResult {
    CheckResult {
        name,
        cases,
        worst,
        tolerance,
        passed: worst.is_finite() && worst < tolerance,
    }
}

/// Frobenius errors of the exact conditional maps against the closed forms,
/// and the outcome probabilities, for all 0 ≤ n, m ≤ 8.
fn algebra_sweep() -> [CheckResult; 3] {
    let mut singlet = 0.0f64;
    let mut triplet = 0.0f64;
    let mut prob = 0.0f64;
    let mut cases = 0;
    for n in 0..=MAX_INDEX {
        for m in 0..=MAX_INDEX {
            let (a, b) = (rho_n(n), rho_n(m));
            let s = swap_singlet_exact(&a, &b);
            let t = swap_triplet_exact(&a, &b);
            match (s, t) {
                (Ok(s), Ok(t)) => {
                    singlet = singlet.max(s.state.frobenius_distance(&rho_n(n + m)).unwrap_or(f64::INFINITY));
                    triplet = triplet.max(t.state.frobenius_distance(&rho_n(n + m + 1)).unwrap_or(f64::INFINITY));
                    prob = prob
                        .max((s.probability - 0.25).abs())
                        .max((t.probability - 0.75).abs());
                }
                _ => {
                    singlet = f64::INFINITY;
                    triplet = f64::INFINITY;
                }
            }
            cases += 1;
        }
    }
    [
        check("singlet swap = rho(n+m)", cases, singlet, TOLERANCE),
        check("triplet swap = rho(n+m+1)", cases, triplet, TOLERANCE),
        check("meeting-pair probabilities 1/4, 3/4", cases, prob, TOLERANCE),
    ]
}

fn random_sequences(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let mut draw = || (0..SEQUENCE_LENGTH).map(|_| rng.random::<f64>()).collect::<Vec<_>>();
    (draw(), draw())
}

/// Relative cancellation residual and gain-mass error over random pairs.
fn sequence_checks(weights: SwapWeights) -> [CheckResult; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(SEQUENCE_SEED);
    let mut residual = 0.0f64;
    let mut mass = 0.0f64;
    for _ in 0..SEQUENCE_PAIRS {
        let (a, b) = random_sequences(&mut rng);
        let norm = a.iter().sum::<f64>() * b.iter().sum::<f64>();
        residual = residual.max(cancellation_residual_at(&a, &b, XI_WEIGHT, weights).abs() / norm);
        let total: f64 = swap_gain_full(&a, &b, weights).iter().sum();
        mass = mass.max((total / norm - 1.0).abs());
    }
    [
        check("xi-weighted gain cancels", SEQUENCE_PAIRS, residual, TOLERANCE),
        check("gain mass = product of masses", SEQUENCE_PAIRS, mass, TOLERANCE),
    ]
}

pub fn run_verify(fault: Fault) -> VerifyReport {
    let mut checks: Vec<CheckResult> = algebra_sweep().into();
    checks.extend(sequence_checks(fault.weights()));
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let r = run_verify(Fault::None);
        assert!(r.passed, "{}", r.table());
        assert_eq!(r.checks.len(), 5);
    }

    #[test]
    fn injected_fault_breaks_cancellation() {
        let r = run_verify(Fault::TripletWeightHalf);
        assert!(!r.passed);
        let c = r.checks.iter().find(|c| c.name == "xi-weighted gain cancels").unwrap();
        assert!(!c.passed && c.worst > 1e-3);
    }
}
