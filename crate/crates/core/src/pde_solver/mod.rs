//! Deterministic solvers for the spatially homogeneous pair kinetics.
//!
//! Two routes to the correlation profile ξ(r):
//!
//! * [`hierarchy`] integrates the full index hierarchy f⁽ⁿ⁾(r), including
//!   the swapping gain, and reads ξ off the weighted sum Σ(−1/3)ⁿf⁽ⁿ⁾/g².
//! * [`scalar`] integrates the closed equation for ξ directly. It carries no
//!   swapping term at all.
//!
//! Both use the same radial discretisation ([`radial`]) and forward Euler,
//! so agreement between them is limited only by round-off and the index
//! truncation.

pub mod coupled;
pub mod hierarchy;
pub mod radial;
pub mod scalar;

use crate::form_factor::FormFactor;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use coupled::{run_coupled, run_coupled_with, Checkpoint, CoupledConfig, CoupledReport, InitialPairs};
pub use hierarchy::{
    step_hierarchy, xi_from_hierarchy, HierarchyField, HierarchyStepper, SwapMode, XiEstimate,
};
pub use radial::{radial_convolution, RadialGrid, RadialTransform};
pub use scalar::{analytic_density, step_xi, xi_steady_state, DensityEvolution, XiField, XiStepper};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("profile has {found} nodes, grid has {expected}")]
    GridMismatch { expected: usize, found: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid kinetic parameters: {0}")]
    InvalidParams(String),
    #[error("time step {dt} violates stability bound: {reason}")]
    StabilityViolation { dt: f64, reason: String },
    #[error("negative density {value:e} at index {index}, node {node}")]
    NegativeDensity { index: usize, node: usize, value: f64 },
    #[error("radical density is zero")]
    ZeroDensity,
    #[error("pair mass bookkeeping drifted: {0}")]
    MassInconsistency(String),
    #[error("xi0 = {0} is outside [-1/3, 1)")]
    DomainError(f64),
}

/// Rate constants of the pair kinetics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KineticParams {
    /// Bimolecular recombination coefficient κ (volume/time).
    pub kappa: f64,
    pub diff_plus: f64,
    pub diff_minus: f64,
    /// Generation rate of singlet pairs γ⁽⁰⁾ (pairs/volume/time).
    pub gamma_singlet: f64,
    /// Generation rate of isotropic triplet pairs γ⁽¹⁾.
    pub gamma_triplet: f64,
    pub form_factor: FormFactor,
}

impl KineticParams {
    pub fn validate(&self) -> Result<(), SolverError> {
        let named = [
            ("kappa", self.kappa),
            ("diff_plus", self.diff_plus),
            ("diff_minus", self.diff_minus),
            ("gamma_singlet", self.gamma_singlet),
            ("gamma_triplet", self.gamma_triplet),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v >= 0.0) {
                return Err(SolverError::InvalidParams(format!("{name} = {v}")));
            }
        }
        if !self.form_factor.is_valid() {
            return Err(SolverError::InvalidParams(format!(
                "form factor {:?}",
                self.form_factor
            )));
        }
        Ok(())
    }

    pub fn diffusion_sum(&self) -> f64 {
        self.diff_plus + self.diff_minus
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_singlet + self.gamma_triplet
    }

    /// γ⁽⁰⁾ − γ⁽¹⁾/3, the source strength of the ξ equation.
    pub fn xi_source(&self) -> f64 {
        self.gamma_singlet - self.gamma_triplet / 3.0
    }

    /// Steady-state density √(γ/κ).
    pub fn steady_density(&self) -> f64 {
        (self.gamma_total() / self.kappa).sqrt()
    }

    /// w(r) sampled on the grid and renormalised so its grid integral is 1.
    pub fn source_profile(&self, grid: &RadialGrid) -> Vec<f64> {
        let mut w = grid.sample(|r| self.form_factor.density(r));
        let mass = grid.integrate(&w);
        w.iter_mut().for_each(|v| *v /= mass);
        w
    }

    pub(crate) fn check_step(&self, grid: &RadialGrid, g: f64, dt: f64) -> Result<(), SolverError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SolverError::StabilityViolation {
                dt,
                reason: "dt must be positive".into(),
            });
        }
        let limit = grid.diffusion_dt_limit(self.diffusion_sum());
        if dt > limit {
            return Err(SolverError::StabilityViolation {
                dt,
                reason: format!("diffusion requires dt <= {limit:e}"),
            });
        }
        if dt * self.kappa * g > 0.1 {
            return Err(SolverError::StabilityViolation {
                dt,
                reason: format!("dt*kappa*g = {:e} exceeds 0.1", dt * self.kappa * g),
            });
        }
        Ok(())
    }
}

/// νS/νT = (1 + 3ξ₀)/(3 − 3ξ₀).
pub fn nu_ratio_from_xi(xi0: f64) -> Result<f64, SolverError> {
    if !(xi0 >= -1.0 / 3.0 - 1e-12 && xi0 < 1.0) {
        return Err(SolverError::DomainError(xi0));
    }
    Ok((1.0 + 3.0 * xi0) / (3.0 - 3.0 * xi0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn ratio_examples() {
        assert_abs_diff_eq!(nu_ratio_from_xi(0.0).unwrap(), 1.0 / 3.0);
        assert_abs_diff_eq!(nu_ratio_from_xi(-1.0 / 3.0).unwrap(), 0.0);
        assert_abs_diff_eq!(nu_ratio_from_xi(1.0 / 3.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(nu_ratio_from_xi(1.0), Err(SolverError::DomainError(1.0)));
        assert!(nu_ratio_from_xi(-0.5).is_err());
    }

    #[test]
    fn params_validation() {
        let mut p = KineticParams {
            kappa: 1.0,
            diff_plus: 0.1,
            diff_minus: 0.1,
            gamma_singlet: 1.0,
            gamma_triplet: 0.0,
            form_factor: FormFactor::Exponential { scale: 1.0 },
        };
        assert!(p.validate().is_ok());
        p.kappa = -1.0;
        assert!(p.validate().is_err());
        p.kappa = 1.0;
        p.form_factor = FormFactor::Gaussian { width: 0.0 };
        assert!(p.validate().is_err());
    }
}
