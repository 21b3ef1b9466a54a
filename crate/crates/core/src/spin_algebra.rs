//! Dense operator algebra for two and four spin-½ particles.
//!
//! Subsystems are numbered 1..=4 and laid out in Kronecker order, so
//! subsystem 1 owns the most significant bit of a basis index. The
//! conditional swapping maps act on a product state of pairs {1,2} and
//! {3,4}, project the middle pair {2,3} onto a recombination channel and
//! return the post-measurement state of the outer pair {1,4}.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Tolerance used for Hermiticity, trace and family-membership checks.
pub const OPERATOR_TOL: f64 = 1e-12;
/// Tolerance for the axis-consistency test in [`werner_param`].
pub const WERNER_TOL: f64 = 1e-10;
/// Smallest admissible outcome probability in the conditional maps.
pub const MIN_PROBABILITY: f64 = 1e-14;

const MAX_SUBSYSTEMS: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("tensor product would act on {0} spins, at most 4 are supported")]
    DimensionOverflow(usize),
    #[error("operator acts on {found} spins, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bad subsystem set {0:?}: need two distinct indices in 1..=4")]
    BadSubsystemSet(Vec<usize>),
    #[error("conditioning outcome has probability {0:e}")]
    ZeroProbability(f64),
    #[error("operator is not of Werner form: {0}")]
    NotWernerForm(String),
    #[error("Werner parameter {0} outside [-1/3, 1]")]
    ParameterOutOfRange(f64),
    #[error("matrix of size {0} is not a power-of-two square")]
    BadShape(usize),
}

/// A dense complex matrix on `subsystems` spin-½ particles.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    subsystems: usize,
    entries: DMatrix<Complex64>,
}

impl SpinOperator {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self, AlgebraError> {
        let dim = entries.nrows();
        if dim != entries.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(AlgebraError::BadShape(dim));
        }
        let subsystems = dim.trailing_zeros() as usize;
        if subsystems > MAX_SUBSYSTEMS {
            return Err(AlgebraError::DimensionOverflow(subsystems));
        }
        Ok(Self { subsystems, entries })
    }

    pub fn identity(subsystems: usize) -> Self {
        let dim = 1 << subsystems;
        Self {
            subsystems,
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(subsystems: usize) -> Self {
        let dim = 1 << subsystems;
        Self {
            subsystems,
            entries: DMatrix::zeros(dim, dim),
        }
    }

    /// Number of spin-½ subsystems the operator acts on.
    pub fn subsystems(&self) -> usize {
        self.subsystems
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            subsystems: self.subsystems,
            entries: self.entries.adjoint(),
        }
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            subsystems: self.subsystems,
            entries: self.entries.map(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.expect_same_shape(other)?;
        Ok(Self {
            subsystems: self.subsystems,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.expect_same_shape(other)?;
        Ok(Self {
            subsystems: self.subsystems,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.expect_same_shape(other)?;
        Ok(Self {
            subsystems: self.subsystems,
            entries: &self.entries * &other.entries,
        })
    }

    /// Frobenius norm of `self - other`.
    pub fn frobenius_distance(&self, other: &Self) -> Result<f64, AlgebraError> {
        self.expect_same_shape(other)?;
        Ok((&self.entries - &other.entries).norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.entries - self.entries.adjoint()).norm() <= tol
    }

    /// Eigenvalues of the Hermitian part, sorted ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.entries + self.entries.adjoint()).map(|z| z * 0.5);
        let mut values: Vec<f64> = SymmetricEigen::new(herm).eigenvalues.iter().copied().collect();
        values.sort_by(|a, b| a.total_cmp(b));
        values
    }

    /// Hermitian, unit trace and positive semidefinite (eigenvalues ≥ −1e-10).
    pub fn is_state(&self) -> bool {
        let tr = self.trace();
        self.is_hermitian(OPERATOR_TOL)
            && (tr.re - 1.0).abs() <= OPERATOR_TOL
            && tr.im.abs() <= OPERATOR_TOL
            && self.eigenvalues().iter().all(|&v| v >= -WERNER_TOL)
    }

    fn expect_subsystems(&self, expected: usize) -> Result<(), AlgebraError> {
        if self.subsystems == expected {
            Ok(())
        } else {
            Err(AlgebraError::DimensionMismatch {
                expected,
                found: self.subsystems,
            })
        }
    }

    fn expect_same_shape(&self, other: &Self) -> Result<(), AlgebraError> {
        other.expect_subsystems(self.subsystems)
    }
}

/// The identity and the three Pauli matrices.
#[derive(Debug, Clone)]
pub struct PauliBasis {
    pub identity: SpinOperator,
    pub x: SpinOperator,
    pub y: SpinOperator,
    pub z: SpinOperator,
}

impl PauliBasis {
    pub fn new() -> Self {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let mat = |e: [Complex64; 4]| SpinOperator {
            subsystems: 1,
            entries: DMatrix::from_row_slice(2, 2, &e),
        };
        Self {
            identity: SpinOperator::identity(1),
            x: mat([c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            y: mat([c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            z: mat([c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        }
    }

    /// The spatial Pauli matrices x, y, z.
    pub fn axes(&self) -> [&SpinOperator; 3] {
        [&self.x, &self.y, &self.z]
    }
}

impl Default for PauliBasis {
    fn default() -> Self {
        Self::new()
    }
}

/// Σₖ σₖ ⊗ σₖ on two spins.
fn sigma_dot_sigma() -> SpinOperator {
    let basis = PauliBasis::new();
    basis
        .axes()
        .iter()
        .map(|s| tensor(s, s).expect("two spins"))
        .fold(SpinOperator::zeros(2), |acc, t| acc.add(&t).expect("same shape"))
}

/// A member of the isotropic two-spin family
/// ρ(ξ) = ¼[σ₀⊗σ₀ − ξ σₖ⊗σₖ], labelled by index n (ξ = (−1/3)ⁿ) or by ξ directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WernerState {
    Index(u32),
    Param(f64),
}

impl WernerState {
    pub fn singlet() -> Self {
        Self::Index(0)
    }

    pub fn isotropic_triplet() -> Self {
        Self::Index(1)
    }

    pub fn maximally_mixed() -> Self {
        Self::Param(0.0)
    }

    pub fn from_param(xi: f64) -> Result<Self, AlgebraError> {
        if !(-1.0 / 3.0 - OPERATOR_TOL..=1.0 + OPERATOR_TOL).contains(&xi) {
            return Err(AlgebraError::ParameterOutOfRange(xi));
        }
        Ok(Self::Param(xi))
    }

    pub fn index(&self) -> Option<u32> {
        match *self {
            Self::Index(n) => Some(n),
            Self::Param(_) => None,
        }
    }

    pub fn xi(&self) -> f64 {
        match *self {
            Self::Index(n) => xi_of_index(n),
            Self::Param(xi) => xi,
        }
    }

    pub fn to_operator(&self) -> SpinOperator {
        rho_xi(self.xi())
    }
}

/// (−1/3)ⁿ.
pub fn xi_of_index(n: u32) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    sign * 3f64.powi(-(n as i32))
}

/// ρ(ξ) = ¼[σ₀⊗σ₀ − ξ σₖ⊗σₖ].
pub fn rho_xi(xi: f64) -> SpinOperator {
    let identity = SpinOperator::identity(2);
    identity
        .sub(&sigma_dot_sigma().scale(xi))
        .expect("two spins")
        .scale(0.25)
}

/// ρ⁽ⁿ⁾: n = 0 is the singlet, n = 1 the isotropic triplet.
pub fn rho_n(n: u32) -> SpinOperator {
    rho_xi(xi_of_index(n))
}

/// Projector onto the two-spin singlet.
pub fn singlet_projector() -> SpinOperator {
    rho_n(0)
}

/// Projector onto the triplet manifold, σ₀⊗σ₀ − P_S.
pub fn triplet_projector() -> SpinOperator {
    SpinOperator::identity(2)
        .sub(&singlet_projector())
        .expect("two spins")
}

/// Recovers ξ from a Werner-form state, checking all three axes agree and
/// that nothing outside the family is present.
pub fn werner_param(rho: &SpinOperator) -> Result<f64, AlgebraError> {
    rho.expect_subsystems(2)?;
    let basis = PauliBasis::new();
    let mut per_axis = [0.0; 3];
    for (slot, s) in per_axis.iter_mut().zip(basis.axes()) {
        let corr = rho.mul(&tensor(s, s)?)?.trace();
        *slot = -corr.re;
    }
    let xi = per_axis[0];
    if per_axis.iter().any(|v| (v - xi).abs() > WERNER_TOL) {
        return Err(AlgebraError::NotWernerForm(format!(
            "axis correlations disagree: {per_axis:?}"
        )));
    }
    let residual = rho.frobenius_distance(&rho_xi(xi))?;
    if residual > WERNER_TOL {
        return Err(AlgebraError::NotWernerForm(format!(
            "off-family residual {residual:e}"
        )));
    }
    Ok(xi)
}

/// Kronecker product; `a` occupies the leading subsystems.
pub fn tensor(a: &SpinOperator, b: &SpinOperator) -> Result<SpinOperator, AlgebraError> {
    let subsystems = a.subsystems + b.subsystems;
    if subsystems > MAX_SUBSYSTEMS {
        return Err(AlgebraError::DimensionOverflow(subsystems));
    }
    Ok(SpinOperator {
        subsystems,
        entries: a.entries.kronecker(&b.entries),
    })
}

/// Bit of basis index `idx` belonging to 1-based subsystem `s` of `k` spins.
#[inline]
fn spin_bit(idx: usize, s: usize, k: usize) -> usize {
    (idx >> (k - s)) & 1
}

fn validate_pair(pair: [usize; 2], k: usize) -> Result<(), AlgebraError> {
    let [a, b] = pair;
    if a == b || a == 0 || b == 0 || a > k || b > k {
        return Err(AlgebraError::BadSubsystemSet(pair.to_vec()));
    }
    Ok(())
}

/// Embeds a two-spin operator acting on subsystems `pair` (in that order)
/// into the four-spin space, with identity on the remaining two.
pub fn embed_pair(op: &SpinOperator, pair: [usize; 2]) -> Result<SpinOperator, AlgebraError> {
    op.expect_subsystems(2)?;
    validate_pair(pair, MAX_SUBSYSTEMS)?;
    let rest: Vec<usize> = (1..=MAX_SUBSYSTEMS).filter(|s| !pair.contains(s)).collect();
    let dim = 1 << MAX_SUBSYSTEMS;
    let local = |idx: usize| 2 * spin_bit(idx, pair[0], 4) + spin_bit(idx, pair[1], 4);
    let spectator = |idx: usize| (spin_bit(idx, rest[0], 4), spin_bit(idx, rest[1], 4));
    let entries = DMatrix::from_fn(dim, dim, |row, col| {
        if spectator(row) == spectator(col) {
            op.entries[(local(row), local(col))]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(SpinOperator {
        subsystems: MAX_SUBSYSTEMS,
        entries,
    })
}

/// Traces a four-spin operator over everything except `keep`, returning
/// an operator ordered as (keep[0], keep[1]).
pub fn partial_trace(op: &SpinOperator, keep: [usize; 2]) -> Result<SpinOperator, AlgebraError> {
    op.expect_subsystems(MAX_SUBSYSTEMS)?;
    validate_pair(keep, MAX_SUBSYSTEMS)?;
    let traced: Vec<usize> = (1..=MAX_SUBSYSTEMS).filter(|s| !keep.contains(s)).collect();
    let compose = |kept: usize, tr: usize| -> usize {
        let mut idx = 0;
        let bits = [
            (keep[0], kept >> 1),
            (keep[1], kept & 1),
            (traced[0], tr >> 1),
            (traced[1], tr & 1),
        ];
        for (s, bit) in bits {
            idx |= bit << (MAX_SUBSYSTEMS - s);
        }
        idx
    };
    let entries = DMatrix::from_fn(4, 4, |row, col| {
        (0..4).map(|t| op.entries[(compose(row, t), compose(col, t))]).sum()
    });
    Ok(SpinOperator {
        subsystems: 2,
        entries,
    })
}

/// Post-measurement state of pair {1,4} and the outcome probability.
#[derive(Debug, Clone)]
pub struct SwapOutcome {
    pub state: SpinOperator,
    pub probability: f64,
}

fn conditional_swap(
    rho_a: &SpinOperator,
    rho_b: &SpinOperator,
    channel: &SpinOperator,
) -> Result<SwapOutcome, AlgebraError> {
    rho_a.expect_subsystems(2)?;
    rho_b.expect_subsystems(2)?;
    let pre = tensor(rho_a, rho_b)?;
    let conditioned = embed_pair(channel, [2, 3])?.mul(&pre)?;
    let probability = conditioned.trace().re;
    if probability < MIN_PROBABILITY {
        return Err(AlgebraError::ZeroProbability(probability));
    }
    let state = partial_trace(&conditioned, [1, 4])?.scale(1.0 / probability);
    Ok(SwapOutcome { state, probability })
}

/// State of {1,4} given singlet recombination of {2,3} from ρ_a(1,2) ⊗ ρ_b(3,4).
pub fn swap_singlet_exact(
    rho_a: &SpinOperator,
    rho_b: &SpinOperator,
) -> Result<SwapOutcome, AlgebraError> {
    conditional_swap(rho_a, rho_b, &singlet_projector())
}

/// As [`swap_singlet_exact`], conditioned on isotropic triplet recombination.
pub fn swap_triplet_exact(
    rho_a: &SpinOperator,
    rho_b: &SpinOperator,
) -> Result<SwapOutcome, AlgebraError> {
    conditional_swap(rho_a, rho_b, &triplet_projector())
}

pub fn swap_singlet_closed(n: u32, m: u32) -> WernerState {
    WernerState::Index(n + m)
}

pub fn swap_triplet_closed(n: u32, m: u32) -> WernerState {
    WernerState::Index(n + m + 1)
}

/// Tr[P_S ρ(ξ)] = (1 + 3ξ)/4. Exact for n = 0 and n = 1.
pub fn singlet_probability(state: WernerState) -> f64 {
    match state {
        WernerState::Index(0) => 1.0,
        WernerState::Index(1) => 0.0,
        other => (1.0 + 3.0 * other.xi()) / 4.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_eigs(op: &SpinOperator, expected: &[f64]) {
        for (got, want) in op.eigenvalues().iter().zip(expected) {
            assert_abs_diff_eq!(got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn pauli_algebra() {
        let basis = PauliBasis::new();
        let id = &basis.identity;
        for s in basis.axes() {
            assert_abs_diff_eq!(s.mul(s).unwrap().frobenius_distance(id).unwrap(), 0.0);
            assert_abs_diff_eq!(s.trace().norm(), 0.0);
        }
        let all = [&basis.identity, &basis.x, &basis.y, &basis.z];
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let t = a.mul(b).unwrap().trace().norm();
                if i == j {
                    assert_abs_diff_eq!(t, 2.0);
                } else {
                    assert_abs_diff_eq!(t, 0.0);
                }
            }
        }
    }

    #[test]
    fn singlet_and_triplet_spectra() {
        assert_eigs(&rho_n(0), &[0.0, 0.0, 0.0, 1.0]);
        assert_eigs(&rho_n(1), &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]);
        let mixed = rho_xi(0.0);
        let quarter = SpinOperator::identity(2).scale(0.25);
        assert_abs_diff_eq!(mixed.frobenius_distance(&quarter).unwrap(), 0.0);
        for n in 0..12 {
            assert!(rho_n(n).is_state(), "rho_n({n}) is not a state");
        }
    }

    #[test]
    fn triplet_is_complement_of_singlet() {
        let expect = triplet_projector().scale(1.0 / 3.0);
        assert!(rho_n(1).frobenius_distance(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn werner_param_examples() {
        assert_abs_diff_eq!(werner_param(&rho_n(0)).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(werner_param(&rho_n(1)).unwrap(), -1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(werner_param(&rho_n(3)).unwrap(), -1.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn werner_param_rejects_off_family() {
        let basis = PauliBasis::new();
        let zz = tensor(&basis.z, &basis.z).unwrap();
        let anisotropic = SpinOperator::identity(2)
            .add(&zz.scale(-0.5))
            .unwrap()
            .scale(0.25);
        assert!(matches!(
            werner_param(&anisotropic),
            Err(AlgebraError::NotWernerForm(_))
        ));
        // |↑↓⟩⟨↑↓| has equal xx and yy correlations but not zz.
        let mut e = DMatrix::zeros(4, 4);
        e[(1, 1)] = Complex64::new(1.0, 0.0);
        let product = SpinOperator::from_matrix(e).unwrap();
        assert!(werner_param(&product).is_err());
        assert!(werner_param(&SpinOperator::identity(1)).is_err());
    }

    #[test]
    fn tensor_shapes_and_overflow() {
        let basis = PauliBasis::new();
        let id2 = tensor(&basis.identity, &basis.identity).unwrap();
        assert_eq!(id2, SpinOperator::identity(2));
        let big = tensor(&rho_n(0), &rho_n(0)).unwrap();
        assert_eq!(big.dim(), 16);
        assert_abs_diff_eq!(big.trace().re, 1.0, epsilon = 1e-15);
        assert_eq!(
            tensor(&big, &basis.x),
            Err(AlgebraError::DimensionOverflow(5))
        );
    }

    #[test]
    fn partial_trace_of_product_state() {
        let pre = tensor(&rho_n(0), &rho_n(1)).unwrap();
        let left = partial_trace(&pre, [1, 2]).unwrap();
        assert!(left.frobenius_distance(&rho_n(0)).unwrap() < 1e-15);
        let right = partial_trace(&pre, [3, 4]).unwrap();
        assert!(right.frobenius_distance(&rho_n(1)).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_bad_sets() {
        let pre = tensor(&rho_n(0), &rho_n(0)).unwrap();
        assert!(matches!(
            partial_trace(&pre, [2, 2]),
            Err(AlgebraError::BadSubsystemSet(_))
        ));
        assert!(matches!(
            partial_trace(&pre, [0, 3]),
            Err(AlgebraError::BadSubsystemSet(_))
        ));
        assert!(matches!(
            partial_trace(&pre, [1, 5]),
            Err(AlgebraError::BadSubsystemSet(_))
        ));
        assert!(matches!(
            partial_trace(&rho_n(0), [1, 2]),
            Err(AlgebraError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn embedded_projector_matches_kronecker_layout() {
        // Pair {2,3} sits in the middle slots: I ⊗ P ⊗ I.
        let basis = PauliBasis::new();
        let p = singlet_projector();
        let direct = tensor(&tensor(&basis.identity, &p).unwrap(), &basis.identity).unwrap();
        let embedded = embed_pair(&p, [2, 3]).unwrap();
        assert!(direct.frobenius_distance(&embedded).unwrap() < 1e-15);
        // Pair {1,2} is just P ⊗ I ⊗ I.
        let id2 = SpinOperator::identity(2);
        let first = embed_pair(&p, [1, 2]).unwrap();
        assert!(first.frobenius_distance(&tensor(&p, &id2).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn singlet_swap_examples() {
        let out = swap_singlet_exact(&rho_n(0), &rho_n(0)).unwrap();
        assert!(out.state.frobenius_distance(&rho_n(0)).unwrap() < 1e-12);
        assert_abs_diff_eq!(out.probability, 0.25, epsilon = 1e-12);
        let out = swap_singlet_exact(&rho_n(1), &rho_n(0)).unwrap();
        assert!(out.state.frobenius_distance(&rho_n(1)).unwrap() < 1e-12);
        let out = swap_singlet_exact(&rho_n(2), &rho_n(3)).unwrap();
        let closed = swap_singlet_closed(2, 3).to_operator();
        assert!(out.state.frobenius_distance(&closed).unwrap() < 1e-12);
    }

    #[test]
    fn triplet_swap_examples() {
        let out = swap_triplet_exact(&rho_n(0), &rho_n(0)).unwrap();
        assert!(out.state.frobenius_distance(&rho_n(1)).unwrap() < 1e-12);
        assert_abs_diff_eq!(out.probability, 0.75, epsilon = 1e-12);
        let out = swap_triplet_exact(&rho_n(0), &rho_n(1)).unwrap();
        assert!(out.state.frobenius_distance(&rho_n(2)).unwrap() < 1e-12);
        for n in 0..=8 {
            for m in 0..=8 {
                let p = swap_triplet_exact(&rho_n(n), &rho_n(m)).unwrap().probability;
                assert_abs_diff_eq!(p, 0.75, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn zero_probability_is_an_error() {
        // Both middle spins fully polarised up: never a singlet.
        let mut up = DMatrix::zeros(4, 4);
        up[(0, 0)] = Complex64::new(1.0, 0.0);
        let up = SpinOperator::from_matrix(up).unwrap();
        assert!(matches!(
            swap_singlet_exact(&up, &up),
            Err(AlgebraError::ZeroProbability(_))
        ));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(swap_singlet_closed(0, 0), WernerState::Index(0));
        assert_eq!(swap_triplet_closed(0, 0), WernerState::Index(1));
        assert_eq!(swap_singlet_closed(4, 7), WernerState::Index(11));
    }

    #[test]
    fn singlet_probability_values() {
        assert_eq!(singlet_probability(WernerState::singlet()), 1.0);
        assert_eq!(singlet_probability(WernerState::isotropic_triplet()), 0.0);
        assert_abs_diff_eq!(singlet_probability(WernerState::maximally_mixed()), 0.25);
        for n in 0..10 {
            let direct = singlet_projector().mul(&rho_n(n)).unwrap().trace().re;
            assert_abs_diff_eq!(singlet_probability(WernerState::Index(n)), direct, epsilon = 1e-14);
        }
    }

    #[test]
    fn param_range_is_enforced() {
        assert!(WernerState::from_param(-0.5).is_err());
        assert!(WernerState::from_param(1.5).is_err());
        assert_abs_diff_eq!(WernerState::from_param(0.2).unwrap().xi(), 0.2);
    }
}
