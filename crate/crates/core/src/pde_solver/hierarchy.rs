//! Explicit integration of the index hierarchy f⁽ⁿ⁾(r) in the relative
//! coordinate of a homogeneous system.
//!
//! Besides the resolved profiles f⁽⁰⁾ … f⁽ᴺ⁾ the field carries three
//! aggregates so that the radical density stays exactly balanced:
//!
//! * `tail`: pairs with index above N, resolved in r but not in n. Their
//!   weight in ξ is at most 3^−(N+1).
//! * `far`: pairs whose separation has left the grid (swapping creates
//!   pairs at the sum of two separations, which can exceed r_max).
//! * `partnerless`: radicals with no correlated partner.

use super::radial::{RadialGrid, RadialTransform};
use super::scalar::XiField;
use super::{KineticParams, SolverError};
use crate::swap_calculus::{swap_gain_into, SwapWeights, XI_WEIGHT};
pub use crate::SwapMode;

const NEGATIVE_TOL: f64 = 1e-12;
const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct HierarchyField {
    grid: RadialGrid,
    pairs: Vec<Vec<f64>>,
    tail: Vec<f64>,
    far: f64,
    partnerless: f64,
    density: f64,
}

impl HierarchyField {
    pub fn empty(grid: RadialGrid, truncation: usize) -> Self {
        let m = grid.shells();
        Self {
            grid,
            pairs: vec![vec![0.0; m]; truncation.max(1) + 1],
            tail: vec![0.0; m],
            far: 0.0,
            partnerless: 0.0,
            density: 0.0,
        }
    }

    /// Pairs of a single index with total density `density` and separation
    /// profile `profile` (rescaled to unit integral).
    pub fn with_pairs(
        grid: RadialGrid,
        truncation: usize,
        index: usize,
        density: f64,
        profile: &[f64],
    ) -> Result<Self, SolverError> {
        grid.check(profile)?;
        let mut field = Self::empty(grid, truncation);
        let mass = grid.integrate(profile);
        if density > 0.0 {
            if mass <= 0.0 {
                return Err(SolverError::ZeroDensity);
            }
            let target = if index < field.pairs.len() {
                &mut field.pairs[index]
            } else {
                &mut field.tail
            };
            for (t, v) in target.iter_mut().zip(profile) {
                *t = density * v / mass;
            }
        }
        field.density = field.integrate_density();
        Ok(field)
    }

    /// Adds uncorrelated radicals (same density of + and −).
    pub fn with_partnerless(mut self, density: f64) -> Self {
        self.partnerless += density;
        self.density = self.integrate_density();
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn truncation(&self) -> usize {
        self.pairs.len() - 1
    }

    /// Radical density g = g₊ = g₋.
    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn profile(&self, index: usize) -> &[f64] {
        &self.pairs[index]
    }

    pub fn profiles(&self) -> &[Vec<f64>] {
        &self.pairs
    }

    pub fn tail(&self) -> &[f64] {
        &self.tail
    }

    pub fn far_mass(&self) -> f64 {
        self.far
    }

    pub fn partnerless(&self) -> f64 {
        self.partnerless
    }

    /// Total density of correlated pairs, on and off the grid.
    pub fn pair_mass(&self) -> f64 {
        self.pairs.iter().map(|f| self.grid.integrate(f)).sum::<f64>()
            + self.grid.integrate(&self.tail)
            + self.far
    }

    /// ∫ f⁽ⁿ⁾ d³r for n = 0..=N.
    pub fn index_masses(&self) -> Vec<f64> {
        self.pairs.iter().map(|f| self.grid.integrate(f)).collect()
    }

    fn integrate_density(&self) -> f64 {
        self.pair_mass() + self.partnerless
    }

    fn check_nonnegative(&self) -> Result<(), SolverError> {
        let scale = self
            .pairs
            .iter()
            .chain(std::iter::once(&self.tail))
            .flat_map(|f| f.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        let floor = -NEGATIVE_TOL * scale;
        for (index, f) in self.pairs.iter().chain(std::iter::once(&self.tail)).enumerate() {
            if let Some((node, &value)) = f.iter().enumerate().find(|(_, v)| **v < floor) {
                return Err(SolverError::NegativeDensity { index, node, value });
            }
        }
        Ok(())
    }
}

/// Time derivative of every component of a [`HierarchyField`].
#[derive(Debug, Clone)]
pub struct HierarchyRate {
    pub pairs: Vec<Vec<f64>>,
    pub tail: Vec<f64>,
    pub far: f64,
    pub partnerless: f64,
}

impl HierarchyRate {
    /// Largest absolute rate over all resolved nodes.
    pub fn max_abs(&self) -> f64 {
        self.pairs
            .iter()
            .chain(std::iter::once(&self.tail))
            .flat_map(|f| f.iter())
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
    }
}

/// Reusable forward-Euler integrator with cached transforms.
#[derive(Debug)]
pub struct HierarchyStepper {
    params: KineticParams,
    transform: RadialTransform,
    source: Vec<f64>,
    mode: SwapMode,
}

impl HierarchyStepper {
    pub fn new(grid: RadialGrid, params: KineticParams) -> Result<Self, SolverError> {
        params.validate()?;
        Ok(Self {
            params,
            source: params.source_profile(&grid),
            transform: RadialTransform::new(grid),
            mode: SwapMode::Exact,
        })
    }

    /// In classical-reset mode cross recombination leaves the orphans
    /// uncorrelated instead of pairing them.
    pub fn with_mode(mut self, mode: SwapMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn grid(&self) -> &RadialGrid {
        self.transform.grid()
    }

    pub fn params(&self) -> &KineticParams {
        &self.params
    }

    pub fn source_profile(&self) -> &[f64] {
        &self.source
    }

    /// Swapping gain per index, for the tail and for off-grid separations.
    fn swapping_gain(&self, state: &HierarchyField) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
        let t = &self.transform;
        let m = t.grid().shells();
        let levels = state.pairs.len();
        if self.mode == SwapMode::ClassicalReset {
            return (vec![vec![0.0; m]; levels], vec![0.0; m], 0.0);
        }
        let spectra: Vec<Vec<f64>> = state.pairs.iter().map(|f| t.forward(f)).collect();
        let tail_spectrum = t.forward(&state.tail);
        let nodes = t.len();
        let mut gain_spectra = vec![vec![0.0; nodes]; levels];
        let mut tail_gain_spectrum = vec![0.0; nodes];
        let mut column = vec![0.0; levels];
        let mut gain = vec![0.0; levels];
        let weights = SwapWeights::default();
        for j in 0..nodes {
            for (c, s) in column.iter_mut().zip(&spectra) {
                *c = s[j];
            }
            swap_gain_into(&column, &column, weights, &mut gain);
            let total = column.iter().sum::<f64>() + tail_spectrum[j];
            let mut resolved = 0.0;
            for (g, out) in gain.iter().zip(gain_spectra.iter_mut()) {
                out[j] = *g;
                resolved += g;
            }
            tail_gain_spectrum[j] = total * total - resolved;
        }
        let mut scratch = vec![0.0; nodes];
        let mut invert = |spectrum: &[f64]| {
            let mut out = vec![0.0; m];
            t.inverse_into(spectrum, &mut scratch, &mut out);
            out
        };
        let gains: Vec<Vec<f64>> = gain_spectra.iter().map(|s| invert(s)).collect();
        let tail_gain = invert(&tail_gain_spectrum);
        let grid = t.grid();
        let on_grid: f64 =
            gains.iter().map(|g| grid.integrate(g)).sum::<f64>() + grid.integrate(&tail_gain);
        let pairs = state.pair_mass();
        (gains, tail_gain, pairs * pairs - on_grid)
    }

    /// Right-hand side of the hierarchy at `state`.
    pub fn rate(&self, state: &HierarchyField) -> Result<HierarchyRate, SolverError> {
        let grid = self.grid();
        if state.grid != *grid {
            return Err(SolverError::GridMismatch {
                expected: grid.shells(),
                found: state.grid.shells(),
            });
        }
        let p = &self.params;
        let g = state.density;
        let d_sum = p.diffusion_sum();
        let loss = 2.0 * p.kappa * g;
        let (gains, tail_gain, far_gain) = self.swapping_gain(state);
        let mut lap = vec![0.0; grid.shells()];
        let mut resolved_rate = |f: &[f64], gain: &[f64], source: f64| -> Vec<f64> {
            grid.laplacian_into(f, &mut lap);
            f.iter()
                .zip(gain)
                .zip(&lap)
                .zip(&self.source)
                .map(|(((v, gn), l), w)| -loss * v + p.kappa * gn + d_sum * l + source * w)
                .collect()
        };
        let pairs = state
            .pairs
            .iter()
            .zip(&gains)
            .enumerate()
            .map(|(n, (f, gain))| {
                let source = match n {
                    0 => p.gamma_singlet,
                    1 => p.gamma_triplet,
                    _ => 0.0,
                };
                resolved_rate(f, gain, source)
            })
            .collect();
        let tail = resolved_rate(&state.tail, &tail_gain, 0.0);
        let far = -loss * state.far + p.kappa * far_gain;
        let u = state.partnerless;
        let mut partnerless = -p.kappa * u * u;
        if self.mode == SwapMode::ClassicalReset {
            let pm = state.pair_mass();
            partnerless += p.kappa * pm * pm;
        }
        Ok(HierarchyRate {
            pairs,
            tail,
            far,
            partnerless,
        })
    }

    pub fn step(&self, state: &HierarchyField, dt: f64) -> Result<HierarchyField, SolverError> {
        let p = &self.params;
        p.check_step(self.grid(), state.density, dt)?;
        let rate = self.rate(state)?;
        let axpy = |f: &[f64], r: &[f64]| -> Vec<f64> {
            f.iter().zip(r).map(|(v, d)| v + dt * d).collect()
        };
        let mut next = HierarchyField {
            grid: state.grid,
            pairs: state
                .pairs
                .iter()
                .zip(&rate.pairs)
                .map(|(f, r)| axpy(f, r))
                .collect(),
            tail: axpy(&state.tail, &rate.tail),
            far: state.far + dt * rate.far,
            partnerless: state.partnerless + dt * rate.partnerless,
            density: 0.0,
        };
        next.density = next.integrate_density();
        next.check_nonnegative()?;
        let g = state.density;
        let expected = g + dt * (p.gamma_total() - p.kappa * g * g);
        if (next.density - expected).abs() > MASS_TOL * expected.abs().max(f64::MIN_POSITIVE) {
            return Err(SolverError::MassInconsistency(format!(
                "g = {} after step, balance predicts {}",
                next.density, expected
            )));
        }
        Ok(next)
    }
}

/// One explicit step of the hierarchy with exact swapping.
pub fn step_hierarchy(
    state: &HierarchyField,
    params: &KineticParams,
    dt: f64,
) -> Result<HierarchyField, SolverError> {
    HierarchyStepper::new(state.grid, *params)?.step(state, dt)
}

/// ξ profile read off a hierarchy, with a bound on the contribution of the
/// unresolved indices.
#[derive(Debug, Clone, PartialEq)]
pub struct XiEstimate {
    pub field: XiField,
    pub truncation_bound: f64,
}

/// ξ(r) = Σₙ (−1/3)ⁿ f⁽ⁿ⁾(r) / g².
pub fn xi_from_hierarchy(state: &HierarchyField) -> Result<XiEstimate, SolverError> {
    let g = state.density;
    if g <= 0.0 {
        return Err(SolverError::ZeroDensity);
    }
    let g2 = g * g;
    let m = state.grid.shells();
    let values = (0..m)
        .map(|i| {
            state
                .pairs
                .iter()
                .rev()
                .fold(0.0, |acc, f| acc * XI_WEIGHT + f[i])
                / g2
        })
        .collect();
    let tail_max = state.tail.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let truncation_bound = (1.0 / 3.0f64).powi(state.truncation() as i32 + 1) * tail_max / g2;
    Ok(XiEstimate {
        field: XiField::new(state.grid, values)?,
        truncation_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form_factor::FormFactor;
    use crate::pde_solver::scalar::analytic_density;
    use approx::assert_relative_eq;

    fn params(gamma: f64, d: f64) -> KineticParams {
        KineticParams {
            kappa: 1.0,
            diff_plus: d / 2.0,
            diff_minus: d / 2.0,
            gamma_singlet: gamma,
            gamma_triplet: 0.0,
            form_factor: FormFactor::Exponential { scale: 1.0 },
        }
    }

    #[test]
    fn pure_decay_follows_second_order_law() {
        let grid = RadialGrid::new(16.0, 64).unwrap();
        let p = params(0.0, 0.0);
        let w = p.source_profile(&grid);
        let g0 = 1.0;
        let stepper = HierarchyStepper::new(grid, p).unwrap();
        let mut state = HierarchyField::with_pairs(grid, 1, 0, g0, &w).unwrap();
        let dt = 1e-3;
        // Five half-lives of 1/(1/g₀ + κt): t = 31/(κg₀).
        let steps = 31_000;
        for k in 1..=steps {
            state = stepper.step(&state, dt).unwrap();
            if k % 3100 == 0 {
                let exact = analytic_density(g0, 1.0, 0.0, k as f64 * dt);
                assert_relative_eq!(state.density(), exact, max_relative = 0.005);
            }
        }
        assert!(state.pair_mass() > 0.0);
    }

    #[test]
    fn linear_source_regime() {
        let grid = RadialGrid::new(16.0, 64).unwrap();
        let p = params(1.0, 0.2);
        let stepper = HierarchyStepper::new(grid, p).unwrap();
        let w = stepper.source_profile().to_vec();
        let mut state = HierarchyField::empty(grid, 4);
        let dt = 1e-4;
        for _ in 0..20 {
            state = stepper.step(&state, dt).unwrap();
        }
        let t = 20.0 * dt;
        let f0 = state.profile(0);
        // Early times: f⁽⁰⁾ ≈ γ w t; diffusion and loss are O(t²).
        let err = f0.iter().zip(&w).map(|(f, w)| (f - w * t).abs()).fold(0.0, f64::max);
        let peak = w.iter().fold(0.0f64, |a, v| a.max(*v)) * t;
        assert!(err < 0.01 * peak, "err {err} vs peak {peak}");
        // Swapping among the new pairs is third order in t.
        assert!(grid.integrate(state.profile(1)) < 1e-3 * grid.integrate(f0));
    }

    #[test]
    fn swapping_populates_higher_indices() {
        let grid = RadialGrid::new(16.0, 64).unwrap();
        let p = params(0.0, 0.0);
        let w = p.source_profile(&grid);
        let stepper = HierarchyStepper::new(grid, p).unwrap();
        let state = HierarchyField::with_pairs(grid, 4, 0, 1.0, &w).unwrap();
        let rate = stepper.rate(&state).unwrap();
        let grow = |n: usize| grid.integrate(&rate.pairs[n]);
        // Singlet–singlet swaps feed index 0 with ¼κg² and index 1 with ¾κg².
        assert_relative_eq!(grow(1), 0.75, max_relative = 1e-3);
        assert_relative_eq!(grow(0), -2.0 + 0.25, max_relative = 1e-3);
    }

    #[test]
    fn stability_guards() {
        let grid = RadialGrid::new(16.0, 64).unwrap();
        let p = params(1.0, 1.0);
        let stepper = HierarchyStepper::new(grid, p).unwrap();
        let state = HierarchyField::empty(grid, 2);
        let limit = grid.diffusion_dt_limit(1.0);
        assert!(matches!(
            stepper.step(&state, 1.01 * limit),
            Err(SolverError::StabilityViolation { .. })
        ));
        let w = p.source_profile(&grid);
        let dense = HierarchyField::with_pairs(grid, 2, 0, 1000.0, &w).unwrap();
        assert!(matches!(
            stepper.step(&dense, 0.5 * limit),
            Err(SolverError::StabilityViolation { .. })
        ));
    }

    #[test]
    fn xi_examples() {
        let grid = RadialGrid::new(8.0, 32).unwrap();
        let w = grid.sample(|r| (-r).exp());
        let g = 2.0;
        let state = HierarchyField::with_pairs(grid, 3, 0, g, &w).unwrap();
        let xi = xi_from_hierarchy(&state).unwrap();
        for (x, f) in xi.field.values().iter().zip(state.profile(0)) {
            assert_relative_eq!(*x, f / (g * g), epsilon = 1e-15);
        }
        // Equal singlet and triplet populations: ξ = (2/3) f⁽⁰⁾/g².
        let mut mixed = state.clone();
        mixed.pairs[1] = mixed.pairs[0].clone();
        mixed.density = mixed.integrate_density();
        let g = mixed.density();
        let xi = xi_from_hierarchy(&mixed).unwrap();
        for (x, f) in xi.field.values().iter().zip(mixed.profile(0)) {
            assert_relative_eq!(*x, 2.0 / 3.0 * f / (g * g), epsilon = 1e-14);
        }
        assert_eq!(
            xi_from_hierarchy(&HierarchyField::empty(grid, 2)),
            Err(SolverError::ZeroDensity)
        );
    }
}
