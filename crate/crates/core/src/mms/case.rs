use crate::{Dim, Grid, Vec3, VectorField};

/// Manufactured solution
///
/// ```text
/// m_e(x, t) = (cos φ sin t², sin φ sin t², cos t²)
/// ```
///
/// with `φ = x̄` on the unit interval and `φ = x̄ ȳ z̄` on the unit cube,
/// where `x̄ = x² (1 - x)²`. `∇φ` vanishes on the boundary, so `m_e`
/// satisfies the homogeneous Neumann condition, and `∂t m_e(·, 0) = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase {
    pub dim: Dim,
    pub alpha: f64,
    pub tau: f64,
}

/// `(p, p', p'')` for `p(s) = s² (1 - s)²`.
fn bump(s: f64) -> (f64, f64, f64) {
    let q = s - s * s;
    (q * q, 2.0 * q * (1.0 - 2.0 * s), 2.0 - 12.0 * s + 12.0 * s * s)
}

/// Time profile `(sin t², cos t²)` and its first two derivatives.
struct Profile {
    s: [f64; 3],
    c: [f64; 3],
}

impl Profile {
    fn at(t: f64) -> Self {
        let (s, c) = (t * t).sin_cos();
        let tt = t * t;
        Profile {
            s: [s, 2.0 * t * c, 2.0 * c - 4.0 * tt * s],
            c: [c, -2.0 * t * s, -2.0 * s - 4.0 * tt * c],
        }
    }
}

impl ManufacturedCase {
    pub fn new(dim: Dim, alpha: f64, tau: f64) -> Self {
        ManufacturedCase { dim, alpha, tau }
    }

    /// Domain length per active axis.
    pub const EXTENT: f64 = 1.0;

    /// Grid with `n` cells per active axis on the case's domain.
    pub fn grid(&self, n: usize) -> Grid {
        match self.dim {
            Dim::One => Grid::line(n, Self::EXTENT),
            Dim::Three => Grid::unit_cube(n),
        }
        .expect("cell count checked by caller")
    }

    /// `(φ, ∇φ, Δφ)` at `x`.
    fn phase(&self, x: Vec3) -> (f64, Vec3, f64) {
        match self.dim {
            Dim::One => {
                let (p, dp, ddp) = bump(x[0]);
                (p, Vec3::new(dp, 0.0, 0.0), ddp)
            }
            Dim::Three => {
                let (px, dx, ddx) = bump(x[0]);
                let (py, dy, ddy) = bump(x[1]);
                let (pz, dz, ddz) = bump(x[2]);
                let grad = Vec3::new(dx * py * pz, px * dy * pz, px * py * dz);
                let lap = ddx * py * pz + px * ddy * pz + px * py * ddz;
                (px * py * pz, grad, lap)
            }
        }
    }

    fn with_profile(&self, x: Vec3, t: f64, order: usize) -> Vec3 {
        let (phi, _, _) = self.phase(x);
        let (sp, cp) = phi.sin_cos();
        let p = Profile::at(t);
        Vec3::new(cp * p.s[order], sp * p.s[order], p.c[order])
    }

    pub fn exact(&self, x: Vec3, t: f64) -> Vec3 {
        self.with_profile(x, t, 0)
    }

    pub fn exact_dt(&self, x: Vec3, t: f64) -> Vec3 {
        self.with_profile(x, t, 1)
    }

    pub fn exact_dtt(&self, x: Vec3, t: f64) -> Vec3 {
        self.with_profile(x, t, 2)
    }

    pub fn exact_laplacian(&self, x: Vec3, t: f64) -> Vec3 {
        let (phi, grad, lap) = self.phase(x);
        let (sp, cp) = phi.sin_cos();
        let g2 = grad.norm_sq();
        let s = (t * t).sin();
        // Δ cos φ = -sin φ Δφ - cos φ |∇φ|², Δ sin φ = cos φ Δφ - sin φ |∇φ|²
        Vec3::new(s * (-sp * lap - cp * g2), s * (cp * lap - sp * g2), 0.0)
    }

    /// Source term that makes `m_e` an exact solution with zero applied field:
    /// `∂t m + m × Δm - α m × (∂t m + τ ∂tt m)`.
    pub fn forcing(&self, x: Vec3, t: f64) -> Vec3 {
        let m = self.exact(x, t);
        let dt = self.exact_dt(x, t);
        let dtt = self.exact_dtt(x, t);
        dt + m.cross(self.exact_laplacian(x, t)) - self.alpha * m.cross(dt + self.tau * dtt)
    }

    /// `m_e × f`. Since `f · m_e = 0`, the source `f` equals `-m_e × (m_e × f)`
    /// and can be applied as this effective field instead.
    pub fn source_field(&self, x: Vec3, t: f64) -> Vec3 {
        self.exact(x, t).cross(self.forcing(x, t))
    }

    /// `m_e(·, t)` sampled at the cell centers of `grid`.
    pub fn sample(&self, grid: Grid, t: f64) -> VectorField {
        VectorField::from_fn(grid, |x| self.exact(x, t))
    }
}
