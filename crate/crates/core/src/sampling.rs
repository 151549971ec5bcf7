//! Seeded uniform sampling of the ball, sphere and disks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::BlochVector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the closed unit ball (rejection from the cube).
pub fn ball<R: Rng>(rng: &mut R) -> BlochVector {
    loop {
        let v = BlochVector::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        if v.norm_squared() <= 1.0 {
            return v;
        }
    }
}

/// Uniform point on the unit sphere.
pub fn sphere<R: Rng>(rng: &mut R) -> BlochVector {
    loop {
        let v = ball(rng);
        let n = v.norm();
        if n > 1e-3 {
            return v * (1.0 / n);
        }
    }
}

/// Uniform point in the unit disk of the `y = 0` plane.
pub fn disk_y0<R: Rng>(rng: &mut R) -> BlochVector {
    loop {
        let x: f64 = rng.gen_range(-1.0..=1.0);
        let z: f64 = rng.gen_range(-1.0..=1.0);
        if x * x + z * z <= 1.0 {
            return BlochVector::new(x, 0.0, z);
        }
    }
}
