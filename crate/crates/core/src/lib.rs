//! Spin-correlation swapping in radical-ion pair recombination.
//!
//! * [`spin_algebra`]: exact two- and four-spin operator algebra and the
//!   conditional swapping maps.
//! * [`swap_calculus`]: the index-space swapping gain and its cancellation
//!   under the ξ weighting.
//! * [`pde_solver`]: deterministic kinetic hierarchy and scalar ξ solvers.
//! * [`kmc_sim`]: stochastic many-particle simulator with a correlation
//!   registry.
//! * [`estimators`]: frequency ratios, ξ estimators and mode comparison.

pub mod estimators;
pub mod form_factor;
pub mod kmc_sim;
pub mod pde_solver;
pub mod spin_algebra;
pub mod swap_calculus;

use serde::{Deserialize, Serialize};

pub use form_factor::FormFactor;

/// What happens to the orphaned partners after a cross recombination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapMode {
    /// Orphans form a new correlated pair (index n+m or n+m+1).
    Exact,
    /// Orphans become uncorrelated.
    ClassicalReset,
}

impl std::fmt::Display for SwapMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::ClassicalReset => "classical-reset",
        })
    }
}
