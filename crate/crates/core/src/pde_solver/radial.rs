//! Cell-centred radial grid, conservative radial Laplacian and the
//! sine-transform convolution of spherically symmetric profiles.

use super::SolverError;
use rustdct::{DctPlanner, TransformType4};
use std::f64::consts::PI;
use std::sync::Arc;

pub const MIN_SHELLS: usize = 16;

/// Shells of width Δr = r_max/M with nodes at rᵢ = (i+½)Δr.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    shells: usize,
}

impl RadialGrid {
    pub fn new(r_max: f64, shells: usize) -> Result<Self, SolverError> {
        if shells < MIN_SHELLS {
            return Err(SolverError::InvalidGrid(format!(
                "need at least {MIN_SHELLS} shells, got {shells}"
            )));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(SolverError::InvalidGrid(format!("r_max = {r_max}")));
        }
        Ok(Self { r_max, shells })
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn shells(&self) -> usize {
        self.shells
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / self.shells as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing()
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.shells).map(|i| self.radius(i)).collect()
    }

    /// Quadrature weight 4π rᵢ² Δr of shell i.
    pub fn shell_weight(&self, i: usize) -> f64 {
        let r = self.radius(i);
        4.0 * PI * r * r * self.spacing()
    }

    /// ∫ f d³r over the grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter()
            .enumerate()
            .map(|(i, v)| self.shell_weight(i) * v)
            .sum()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.shells).map(|i| f(self.radius(i))).collect()
    }

    pub(crate) fn check(&self, f: &[f64]) -> Result<(), SolverError> {
        if f.len() != self.shells {
            return Err(SolverError::GridMismatch {
                expected: self.shells,
                found: f.len(),
            });
        }
        Ok(())
    }

    /// Off-diagonal coefficients (lower, upper) of the discrete Laplacian
    /// in row i. The diagonal is minus their sum.
    pub fn laplacian_coefficients(&self, i: usize) -> (f64, f64) {
        let h2 = self.spacing() * self.spacing();
        let r = self.radius(i);
        let lower = if i > 0 { self.radius(i - 1) / (r * h2) } else { 0.0 };
        let upper = if i + 1 < self.shells {
            self.radius(i + 1) / (r * h2)
        } else {
            0.0
        };
        (lower, upper)
    }

    /// r⁻²∂ᵣ(r²∂ᵣf) in flux form with face areas 4π rᵢrᵢ₊₁ and cell volumes
    /// 4π rᵢ²Δr: exact for quadratics, regular at the origin, zero flux
    /// through r_max, and it conserves [`RadialGrid::integrate`] exactly.
    pub fn laplacian_into(&self, f: &[f64], out: &mut [f64]) {
        let m = self.shells;
        for i in 0..m {
            let (lo, up) = self.laplacian_coefficients(i);
            let mut acc = 0.0;
            if i > 0 {
                acc += lo * (f[i - 1] - f[i]);
            }
            if i + 1 < m {
                acc += up * (f[i + 1] - f[i]);
            }
            out[i] = acc;
        }
    }

    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.shells];
        self.laplacian_into(f, &mut out);
        out
    }

    /// Largest stable explicit step for relative diffusion coefficient `d_sum`.
    pub fn diffusion_dt_limit(&self, d_sum: f64) -> f64 {
        if d_sum <= 0.0 {
            f64::INFINITY
        } else {
            self.spacing() * self.spacing() / (6.0 * d_sum)
        }
    }
}

/// Order-zero spherical (Fourier–Bessel) transform on a zero-padded grid.
///
/// F(k) = (4π/k) ∫ r f(r) sin(kr) dr, sampled at kⱼ = (j+½)π/(2r_max) on a
/// grid of 2M nodes via a DST-IV. Padding to twice the support turns the
/// product of transforms into the linear (not reflected) convolution on
/// [0, r_max).
pub struct RadialTransform {
    grid: RadialGrid,
    padded: usize,
    radii: Vec<f64>,
    wavenumbers: Vec<f64>,
    dst: Arc<dyn TransformType4<f64>>,
}

impl std::fmt::Debug for RadialTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialTransform")
            .field("grid", &self.grid)
            .field("padded", &self.padded)
            .finish()
    }
}

impl RadialTransform {
    pub fn new(grid: RadialGrid) -> Self {
        let padded = 2 * grid.shells();
        let dr = grid.spacing();
        let dk = PI / (padded as f64 * dr);
        let radii = (0..padded).map(|i| (i as f64 + 0.5) * dr).collect();
        let wavenumbers = (0..padded).map(|j| (j as f64 + 0.5) * dk).collect();
        let dst = DctPlanner::new().plan_dst4(padded);
        Self {
            grid,
            padded,
            radii,
            wavenumbers,
            dst,
        }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// Number of spectral nodes.
    pub fn len(&self) -> usize {
        self.padded
    }

    pub fn is_empty(&self) -> bool {
        self.padded == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward_into(&self, profile: &[f64], out: &mut [f64]) {
        let dr = self.grid.spacing();
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, v) in profile.iter().enumerate() {
            out[i] = self.radii[i] * v;
        }
        self.dst.process_dst4(out);
        for (v, k) in out.iter_mut().zip(&self.wavenumbers) {
            *v *= 4.0 * PI * dr / k;
        }
    }

    pub fn forward(&self, profile: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.padded];
        self.forward_into(profile, &mut out);
        out
    }

    /// Inverse transform, clipped to the M nodes inside r_max.
    pub fn inverse_into(&self, spectrum: &[f64], scratch: &mut [f64], out: &mut [f64]) {
        let dk = self.wavenumbers[0] * 2.0;
        for ((s, c), k) in scratch.iter_mut().zip(spectrum).zip(&self.wavenumbers) {
            *s = k * c;
        }
        self.dst.process_dst4(scratch);
        for (i, v) in out.iter_mut().enumerate() {
            *v = dk / (2.0 * PI * PI * self.radii[i]) * scratch[i];
        }
    }

    pub fn inverse(&self, spectrum: &[f64]) -> Vec<f64> {
        let mut scratch = vec![0.0; self.padded];
        let mut out = vec![0.0; self.grid.shells()];
        self.inverse_into(spectrum, &mut scratch, &mut out);
        out
    }

    /// (a ∗ b)(r) for r < r_max.
    pub fn convolve(&self, a: &[f64], b: &[f64]) -> Result<Vec<f64>, SolverError> {
        self.grid.check(a)?;
        self.grid.check(b)?;
        let fa = self.forward(a);
        let fb = self.forward(b);
        let product: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
        Ok(self.inverse(&product))
    }
}

/// Three-dimensional convolution of two radial profiles on `grid`.
pub fn radial_convolution(a: &[f64], b: &[f64], grid: &RadialGrid) -> Result<Vec<f64>, SolverError> {
    RadialTransform::new(*grid).convolve(a, b)
}
