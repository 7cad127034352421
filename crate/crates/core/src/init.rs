//! Initial magnetization profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Grid, Vec3, VectorField};

/// Unit field built from a few random Neumann-compatible cosine modes, then
/// normalized pointwise. The same seed always gives the same field.
pub fn smooth_random_unit(grid: Grid, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dims = grid.dim().count();
    let base = Vec3::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    );
    let modes: Vec<([u32; 3], Vec3)> = (0..6)
        .map(|_| {
            let mut q = [0u32; 3];
            for qa in q.iter_mut().take(dims) {
                *qa = rng.gen_range(0..3);
            }
            let amp = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            (q, amp)
        })
        .collect();
    let extent = grid.extent().to_vec();
    VectorField::from_fn(grid, |x| {
        let mut v = base;
        for (q, amp) in &modes {
            let mut w = 1.0;
            for a in 0..dims {
                w *= (std::f64::consts::PI * q[a] as f64 * x[a] / extent[a]).cos();
            }
            v += *amp * w;
        }
        if v.norm_sq() < 1e-12 {
            Vec3::Z
        } else {
            v.normalized()
        }
    })
}

/// Independent uniformly distributed unit vectors in every cell.
pub fn random_unit(grid: Grid, seed: u64) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    VectorField::from_fn(grid, |_| loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm_sq();
        if n > 1e-6 && n <= 1.0 {
            break v.normalized();
        }
    })
}
