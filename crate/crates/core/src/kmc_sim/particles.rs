use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Charge {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Radical {
    pub id: u64,
    pub charge: Charge,
    pub position: [f64; 3],
    pub alive: bool,
}

/// Maps a coordinate into [0, side).
pub fn wrap(x: f64, side: f64) -> f64 {
    let y = x.rem_euclid(side);
    // rem_euclid can return `side` itself for tiny negative inputs.
    if y >= side {
        0.0
    } else {
        y
    }
}

pub fn wrap_position(p: [f64; 3], side: f64) -> [f64; 3] {
    p.map(|x| wrap(x, side))
}

/// Minimum-image separation vector b − a.
pub fn periodic_delta(a: &[f64; 3], b: &[f64; 3], side: f64) -> [f64; 3] {
    std::array::from_fn(|k| {
        let mut d = b[k] - a[k];
        d -= side * (d / side).round();
        d
    })
}

pub fn periodic_distance2(a: &[f64; 3], b: &[f64; 3], side: f64) -> f64 {
    periodic_delta(a, b, side).iter().map(|d| d * d).sum()
}

/// Gaussian step of variance 2D·dt per axis for every living radical, in
/// slice order, followed by periodic wrapping.
pub fn diffuse<R: Rng + ?Sized>(
    radicals: &mut [Radical],
    diff_plus: f64,
    diff_minus: f64,
    side: f64,
    dt: f64,
    rng: &mut R,
) {
    let sigma_plus = (2.0 * diff_plus * dt).sqrt();
    let sigma_minus = (2.0 * diff_minus * dt).sqrt();
    for r in radicals.iter_mut().filter(|r| r.alive) {
        let sigma = match r.charge {
            Charge::Plus => sigma_plus,
            Charge::Minus => sigma_minus,
        };
        if sigma == 0.0 {
            continue;
        }
        for x in r.position.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *x = wrap(*x + sigma * z, side);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn wrapping_and_minimum_image() {
        assert_eq!(wrap(-1e-18, 10.0), 0.0);
        assert_eq!(wrap(10.0, 10.0), 0.0);
        assert!((wrap(-0.5, 10.0) - 9.5).abs() < 1e-15);
        let d = periodic_delta(&[0.5, 5.0, 9.8], &[9.5, 5.0, 0.1], 10.0);
        assert!((d[0] + 1.0).abs() < 1e-12 && d[1] == 0.0 && (d[2] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn zero_diffusion_is_a_no_op() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rads = vec![Radical {
            id: 0,
            charge: Charge::Plus,
            position: [1.0, 2.0, 3.0],
            alive: true,
        }];
        diffuse(&mut rads, 0.0, 0.0, 10.0, 0.1, &mut rng);
        assert_eq!(rads[0].position, [1.0, 2.0, 3.0]);
    }
}
