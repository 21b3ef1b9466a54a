//! Distribution of the initial separation of a freshly generated pair.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::f64::consts::PI;

/// Isotropic pair-separation density w(r), normalized so ∫ w d³r = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FormFactor {
    /// w(r) = exp(−r/b) / (8π b³)
    Exponential { scale: f64 },
    /// w(r) = exp(−r²/2s²) / (2π s²)^{3/2}
    Gaussian { width: f64 },
}

impl FormFactor {
    pub fn length(&self) -> f64 {
        match *self {
            Self::Exponential { scale } => scale,
            Self::Gaussian { width } => width,
        }
    }

    pub fn is_valid(&self) -> bool {
        let l = self.length();
        l.is_finite() && l > 0.0
    }

    /// Density per unit relative-position volume.
    pub fn density(&self, r: f64) -> f64 {
        match *self {
            Self::Exponential { scale: b } => (-r / b).exp() / (8.0 * PI * b.powi(3)),
            Self::Gaussian { width: s } => {
                (-r * r / (2.0 * s * s)).exp() / (2.0 * PI * s * s).powf(1.5)
            }
        }
    }

    /// Probability that the separation is below `r`.
    pub fn radial_cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::Exponential { scale } => {
                let x = r / scale;
                1.0 - (-x).exp() * (1.0 + x + 0.5 * x * x)
            }
            Self::Gaussian { width } => {
                let x = r / width;
                erf(x / 2f64.sqrt()) - (2.0 / PI).sqrt() * x * (-0.5 * x * x).exp()
            }
        }
    }

    /// Draws a separation length.
    pub fn sample_distance<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { scale } => Gamma::new(3.0, scale)
                .expect("positive scale")
                .sample(rng),
            Self::Gaussian { width } => {
                let v: [f64; 3] = std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal));
                width * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
            }
        }
    }

    /// Draws a separation vector with isotropic direction.
    pub fn sample_displacement<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 3] {
        let r = self.sample_distance(rng);
        let dir = random_unit_vector(rng);
        [r * dir[0], r * dir[1], r * dir[2]]
    }
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let cos_theta: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let sin_theta = (1.0 - cos_theta * cos_theta).max(0.0).sqrt();
    [sin_theta * phi.cos(), sin_theta * phi.sin(), cos_theta]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shell_integral(w: &FormFactor, r_max: f64) -> f64 {
        // Simpson on 4π r² w(r).
        let n = 20_000;
        let h = r_max / n as f64;
        (0..=n)
            .map(|i| {
                let r = i as f64 * h;
                let c = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
                c * 4.0 * PI * r * r * w.density(r)
            })
            .sum::<f64>()
            * h
            / 3.0
    }

    #[test]
    fn densities_are_normalized() {
        for w in [
            FormFactor::Exponential { scale: 1.3 },
            FormFactor::Gaussian { width: 0.7 },
        ] {
            let r = 40.0 * w.length();
            assert_relative_eq!(shell_integral(&w, r), 1.0, epsilon = 1e-9);
            assert_relative_eq!(w.radial_cdf(r), 1.0, epsilon = 1e-12);
            let half = 1.5 * w.length();
            assert_relative_eq!(w.radial_cdf(half), shell_integral(&w, half), epsilon = 1e-8);
        }
    }

    #[test]
    fn sampled_mean_distance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = FormFactor::Exponential { scale: 2.0 };
        let n = 200_000;
        let mean = (0..n).map(|_| w.sample_distance(&mut rng)).sum::<f64>() / n as f64;
        // Gamma(3, b) has mean 3b.
        assert_relative_eq!(mean, 6.0, max_relative = 0.01);
    }
}
