//! Runs the hierarchy and the scalar ξ solver side by side from matching
//! initial data and records how closely they agree.

use super::hierarchy::{xi_from_hierarchy, HierarchyField, HierarchyStepper};
use super::radial::RadialGrid;
use super::scalar::{analytic_density, XiField, XiStepper};
use super::{KineticParams, SolverError};
use crate::spin_algebra::xi_of_index;
use serde::{Deserialize, Serialize};

/// Pairs present at t = 0, all of one Werner index, separated according to
/// the generation form factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialPairs {
    pub density: f64,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoupledConfig {
    pub r_max: f64,
    pub shells: usize,
    pub truncation: usize,
    pub params: KineticParams,
    pub initial: InitialPairs,
    pub dt: f64,
    pub t_end: f64,
    /// Number of evenly spaced comparison points after t = 0.
    pub checkpoints: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Checkpoint {
    pub t: f64,
    pub density_hierarchy: f64,
    pub density_scalar: f64,
    pub density_analytic: f64,
    pub xi0_hierarchy: f64,
    pub xi0_scalar: f64,
    /// ‖ξ_hierarchy − ξ_scalar‖∞ / ‖ξ_scalar‖∞
    pub xi_relative_linf: f64,
    pub truncation_bound: f64,
    pub far_mass: f64,
    #[serde(skip)]
    pub xi_hierarchy: Vec<f64>,
    #[serde(skip)]
    pub xi_scalar: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledReport {
    pub steps: usize,
    pub radii: Vec<f64>,
    pub checkpoints: Vec<Checkpoint>,
    pub max_xi_relative_linf: f64,
    /// Largest |g_hierarchy/g_analytic − 1| over the checkpoints.
    pub max_density_relative_error: f64,
}

impl CoupledConfig {
    pub fn grid(&self) -> Result<RadialGrid, SolverError> {
        RadialGrid::new(self.r_max, self.shells)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        self.params.validate()?;
        let grid = self.grid()?;
        if self.truncation < 1 {
            return Err(SolverError::InvalidParams("truncation must be >= 1".into()));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) || self.checkpoints == 0 {
            return Err(SolverError::InvalidParams(
                "t_end must be positive and checkpoints >= 1".into(),
            ));
        }
        if !(self.initial.density.is_finite() && self.initial.density >= 0.0) {
            return Err(SolverError::InvalidParams("initial density".into()));
        }
        // Diffusion bound and the loss bound at the largest density reached.
        let g_peak = self.initial.density.max(self.params.steady_density());
        self.params.check_step(&grid, if g_peak.is_finite() { g_peak } else { 0.0 }, self.dt)
    }
}

fn checkpoint_steps(cfg: &CoupledConfig) -> (usize, Vec<usize>) {
    let total = (cfg.t_end / cfg.dt).round().max(1.0) as usize;
    let marks = (1..=cfg.checkpoints)
        .map(|c| ((c as f64 * total as f64) / cfg.checkpoints as f64).round() as usize)
        .collect();
    (total, marks)
}

/// Steps both solvers to `t_end`, calling `observe` at t = 0 and at every
/// checkpoint.
pub fn run_coupled_with<F>(cfg: &CoupledConfig, mut observe: F) -> Result<CoupledReport, SolverError>
where
    F: FnMut(&Checkpoint),
{
    cfg.validate()?;
    let grid = cfg.grid()?;
    let p = cfg.params;
    let hierarchy = HierarchyStepper::new(grid, p)?;
    let scalar = XiStepper::new(grid, p)?;
    let w = hierarchy.source_profile().to_vec();
    let g0 = cfg.initial.density;
    let mut state =
        HierarchyField::with_pairs(grid, cfg.truncation, cfg.initial.index as usize, g0, &w)?;
    let mut xi = if g0 > 0.0 {
        let scale = xi_of_index(cfg.initial.index) / g0;
        XiField::new(grid, w.iter().map(|v| scale * v).collect())?
    } else {
        XiField::zeros(grid)
    };
    let mut g = g0;
    let (total, marks) = checkpoint_steps(cfg);

    let snapshot = |t: f64, state: &HierarchyField, xi: &XiField, g: f64| -> Result<Checkpoint, SolverError> {
        let (xi_h, bound) = if state.density() > 0.0 {
            let est = xi_from_hierarchy(state)?;
            (est.field, est.truncation_bound)
        } else {
            (XiField::zeros(grid), 0.0)
        };
        Ok(Checkpoint {
            t,
            density_hierarchy: state.density(),
            density_scalar: g,
            density_analytic: analytic_density(g0, p.kappa, p.gamma_total(), t),
            xi0_hierarchy: xi_h.at_contact(),
            xi0_scalar: xi.at_contact(),
            xi_relative_linf: xi_h.relative_linf_distance(xi),
            truncation_bound: bound,
            far_mass: state.far_mass(),
            xi_hierarchy: xi_h.values().to_vec(),
            xi_scalar: xi.values().to_vec(),
        })
    };

    observe(&snapshot(0.0, &state, &xi, g)?);
    let mut checkpoints = Vec::with_capacity(marks.len());
    let mut next_mark = marks.iter().peekable();
    for step in 1..=total {
        state = hierarchy.step(&state, cfg.dt)?;
        (xi, g) = scalar.step(&xi, g, cfg.dt)?;
        if next_mark.peek() == Some(&&step) {
            next_mark.next();
            let cp = snapshot(step as f64 * cfg.dt, &state, &xi, g)?;
            observe(&cp);
            checkpoints.push(cp);
        }
    }
    let max_xi_relative_linf = checkpoints
        .iter()
        .map(|c| c.xi_relative_linf)
        .fold(0.0, f64::max);
    let max_density_relative_error = checkpoints
        .iter()
        .filter(|c| c.density_analytic > 0.0)
        .map(|c| (c.density_hierarchy / c.density_analytic - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(CoupledReport {
        steps: total,
        radii: grid.radii(),
        checkpoints,
        max_xi_relative_linf,
        max_density_relative_error,
    })
}

pub fn run_coupled(cfg: &CoupledConfig) -> Result<CoupledReport, SolverError> {
    run_coupled_with(cfg, |_| {})
}
