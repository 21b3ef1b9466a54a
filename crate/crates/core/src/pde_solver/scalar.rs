//! Closed equation for the correlation profile:
//!
//! ∂ₜξ = −2κgξ + (D₊+D₋)Δξ + (γ⁽⁰⁾ − γ⁽¹⁾/3) w(r)/g²
//!
//! When the density g itself is still relaxing, ξ = ψ/g² also picks up the
//! factor (g/g')² over a step; for stationary g this factor is one.

use super::radial::RadialGrid;
use super::{KineticParams, SolverError};

/// Correlation parameter on the radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct XiField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl XiField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self, SolverError> {
        grid.check(&values)?;
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self {
            values: vec![0.0; grid.shells()],
            grid,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value in the innermost shell, the contact value ξ(0).
    pub fn at_contact(&self) -> f64 {
        self.values[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// ‖self − other‖∞ / ‖other‖∞.
    pub fn relative_linf_distance(&self, other: &XiField) -> f64 {
        let diff = self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        let scale = other.max_abs();
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    pub fn in_physical_range(&self, tol: f64) -> bool {
        self.values
            .iter()
            .all(|&v| (-1.0 / 3.0 - tol..=1.0 + tol).contains(&v))
    }
}

/// How the radical density g advances alongside ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityEvolution {
    /// dg/dt = γ_tot − κg².
    Balance,
    /// g held at its initial value.
    Frozen,
}

#[derive(Debug, Clone)]
pub struct XiStepper {
    grid: RadialGrid,
    params: KineticParams,
    source: Vec<f64>,
    density: DensityEvolution,
}

impl XiStepper {
    pub fn new(grid: RadialGrid, params: KineticParams) -> Result<Self, SolverError> {
        params.validate()?;
        Ok(Self {
            source: params.source_profile(&grid),
            grid,
            params,
            density: DensityEvolution::Balance,
        })
    }

    pub fn with_density(mut self, density: DensityEvolution) -> Self {
        self.density = density;
        self
    }

    pub fn source_profile(&self) -> &[f64] {
        &self.source
    }

    pub fn next_density(&self, g: f64, dt: f64) -> f64 {
        match self.density {
            DensityEvolution::Balance => {
                g + dt * (self.params.gamma_total() - self.params.kappa * g * g)
            }
            DensityEvolution::Frozen => g,
        }
    }

    pub fn step(&self, xi: &XiField, g: f64, dt: f64) -> Result<(XiField, f64), SolverError> {
        if xi.grid != self.grid {
            return Err(SolverError::GridMismatch {
                expected: self.grid.shells(),
                found: xi.grid.shells(),
            });
        }
        let p = &self.params;
        p.check_step(&self.grid, g, dt)?;
        let g_next = self.next_density(g, dt);
        if g_next <= 0.0 {
            return if g <= 0.0 && p.xi_source() == 0.0 {
                Ok((XiField::zeros(self.grid), g_next.max(0.0)))
            } else {
                Err(SolverError::ZeroDensity)
            };
        }
        let lap = self.grid.laplacian(&xi.values);
        let g2 = g * g;
        let loss = 2.0 * p.kappa * g;
        let d_sum = p.diffusion_sum();
        let s = p.xi_source();
        let values = xi
            .values
            .iter()
            .zip(&lap)
            .zip(&self.source)
            .map(|((x, l), w)| {
                let homogeneous = x + dt * (-loss * x + d_sum * l);
                (g2 * homogeneous + dt * s * w) / (g_next * g_next)
            })
            .collect();
        Ok((XiField { grid: self.grid, values }, g_next))
    }
}

/// One explicit step of the ξ equation with g advanced by the density balance.
pub fn step_xi(
    xi: &XiField,
    g: f64,
    params: &KineticParams,
    dt: f64,
) -> Result<(XiField, f64), SolverError> {
    XiStepper::new(xi.grid, *params)?.step(xi, g, dt)
}

/// Solves (D₊+D₋)Δξ − 2κgξ = −(γ⁽⁰⁾ − γ⁽¹⁾/3) w/g² at fixed g.
pub fn xi_steady_state(
    grid: &RadialGrid,
    params: &KineticParams,
    g: f64,
) -> Result<XiField, SolverError> {
    params.validate()?;
    if g <= 0.0 {
        return Err(SolverError::ZeroDensity);
    }
    let m = grid.shells();
    let d_sum = params.diffusion_sum();
    let w = params.source_profile(grid);
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for i in 0..m {
        let (lo, up) = grid.laplacian_coefficients(i);
        lower[i] = d_sum * lo;
        upper[i] = d_sum * up;
        diag[i] = -d_sum * (lo + up) - 2.0 * params.kappa * g;
        rhs[i] = -params.xi_source() * w[i] / (g * g);
    }
    let values = solve_tridiagonal(&lower, &diag, &upper, &rhs).ok_or_else(|| {
        SolverError::InvalidParams("singular steady-state system (kappa*g = 0)".into())
    })?;
    XiField::new(*grid, values)
}

/// Thomas algorithm; `lower[0]` and `upper[m-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut denom = diag[0];
    if denom == 0.0 {
        return None;
    }
    c[0] = upper[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..m {
        denom = diag[i] - lower[i] * c[i - 1];
        if denom == 0.0 {
            return None;
        }
        c[i] = upper[i] / denom;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / denom;
    }
    for i in (0..m - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Some(d)
}

/// Solution of dg/dt = γ − κg² from g(0) = g0.
pub fn analytic_density(g0: f64, kappa: f64, gamma: f64, t: f64) -> f64 {
    if kappa == 0.0 {
        return g0 + gamma * t;
    }
    if gamma == 0.0 {
        return g0 / (1.0 + kappa * g0 * t);
    }
    let gs = (gamma / kappa).sqrt();
    let rate = kappa * gs * t;
    let u = g0 / gs;
    if (u - 1.0).abs() < 1e-15 {
        gs
    } else if u < 1.0 {
        gs * (rate + u.atanh()).tanh()
    } else {
        // coth branch: acoth(u) = atanh(1/u)
        gs / (rate + (1.0 / u).atanh()).tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form_factor::FormFactor;
    use approx::assert_relative_eq;

    fn params(g0: f64, g1: f64, d: f64) -> KineticParams {
        KineticParams {
            kappa: 1.0,
            diff_plus: 0.5 * d,
            diff_minus: 0.5 * d,
            gamma_singlet: g0,
            gamma_triplet: g1,
            form_factor: FormFactor::Exponential { scale: 1.0 },
        }
    }

    #[test]
    fn vanishing_source_decays_to_zero() {
        let grid = RadialGrid::new(10.0, 32).unwrap();
        let p = params(1.0 / 3.0, 1.0, 0.5);
        assert_eq!(p.xi_source(), 0.0);
        let stepper = XiStepper::new(grid, p).unwrap();
        let mut xi = XiField::new(grid, grid.sample(|r| 0.5 * (-r).exp())).unwrap();
        let mut g = p.steady_density();
        let dt = 0.01;
        for _ in 0..2000 {
            (xi, g) = stepper.step(&xi, g, dt).unwrap();
        }
        assert!(xi.max_abs() < 1e-10);
    }

    #[test]
    fn frozen_density_exponential_decay() {
        let grid = RadialGrid::new(10.0, 32).unwrap();
        let p = params(0.0, 0.0, 0.0);
        let stepper = XiStepper::new(grid, p).unwrap().with_density(DensityEvolution::Frozen);
        let xi0 = 0.4;
        let mut xi = XiField::new(grid, vec![xi0; 32]).unwrap();
        let g = 0.5;
        let dt = 1e-4;
        let steps = 10_000;
        for _ in 0..steps {
            (xi, _) = stepper.step(&xi, g, dt).unwrap();
        }
        let exact = xi0 * (-2.0 * g * steps as f64 * dt).exp();
        for v in xi.values() {
            assert_relative_eq!(*v, exact, max_relative = 1e-3);
        }
    }

    #[test]
    fn stepping_converges_to_linear_solve() {
        let grid = RadialGrid::new(12.0, 48).unwrap();
        let p = params(2.0 / 3.0, 1.0 / 3.0, 0.5);
        let g = p.steady_density();
        let target = xi_steady_state(&grid, &p, g).unwrap();
        let stepper = XiStepper::new(grid, p).unwrap();
        let mut xi = XiField::zeros(grid);
        let mut gg = g;
        let dt = 0.8 * grid.diffusion_dt_limit(0.5);
        for _ in 0..40_000 {
            (xi, gg) = stepper.step(&xi, gg, dt).unwrap();
        }
        assert_relative_eq!(gg, g, epsilon = 1e-14);
        // Residual of the stationary equation at the stepped solution.
        let lap = grid.laplacian(xi.values());
        let w = stepper.source_profile();
        let residual = xi
            .values()
            .iter()
            .zip(&lap)
            .zip(w)
            .map(|((x, l), w)| (0.5 * l - 2.0 * g * x + p.xi_source() * w / (g * g)).abs())
            .fold(0.0, f64::max);
        assert!(residual < 1e-8, "residual {residual}");
        assert!(xi.relative_linf_distance(&target) < 1e-8);
        assert!(target.in_physical_range(0.0));
    }

    #[test]
    fn start_from_zero_density() {
        let grid = RadialGrid::new(10.0, 32).unwrap();
        let p = params(1.0, 0.0, 0.5);
        let stepper = XiStepper::new(grid, p).unwrap();
        let (xi, g) = stepper.step(&XiField::zeros(grid), 0.0, 1e-3).unwrap();
        assert!(g > 0.0);
        // All pairs are fresh singlets: ξ = f⁽⁰⁾/g² = γ w dt / (γ dt)².
        for (x, w) in xi.values().iter().zip(stepper.source_profile()) {
            assert_relative_eq!(*x, w / g, max_relative = 1e-12);
        }
    }

    #[test]
    fn analytic_density_branches() {
        let (k, gamma) = (2.0, 8.0);
        let gs = 2.0;
        for g0 in [0.0, 0.5, 2.0, 5.0] {
            // Midpoint-rule check of the ODE.
            let h = 1e-6;
            for t in [0.1, 0.7, 3.0] {
                let d = (analytic_density(g0, k, gamma, t + h) - analytic_density(g0, k, gamma, t - h))
                    / (2.0 * h);
                let g = analytic_density(g0, k, gamma, t);
                assert_relative_eq!(d, gamma - k * g * g, epsilon = 1e-5);
            }
            assert_relative_eq!(analytic_density(g0, k, gamma, 0.0), g0, epsilon = 1e-12);
            assert_relative_eq!(analytic_density(g0, k, gamma, 50.0), gs, epsilon = 1e-10);
        }
        assert_relative_eq!(analytic_density(1.0, 1.0, 0.0, 3.0), 0.25);
    }
}
