//! Discrete energies and scalar diagnostics of a magnetization field.

use crate::scheme::SchemeParams;
use crate::{MeshError, Vec3, VectorField};

/// Two-level discrete energy `E(m^{n+1}, m^n)`, split into its parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergySample {
    pub step_index: usize,
    pub time: f64,
    /// `(1/4)(‖∇_h m^{n+1}‖² + ‖∇_h m^n‖²)`
    pub exchange_part: f64,
    /// `(ατ/2)‖(m^{n+1} - m^n)/k‖²`
    pub kinetic_part: f64,
    /// `-(1/2)⟨m^{n+1} + m^n, He⟩`
    pub zeeman_part: f64,
    pub total: f64,
}

impl EnergySample {
    fn new(exchange: f64, kinetic: f64, zeeman: f64) -> Self {
        EnergySample {
            exchange_part: exchange,
            kinetic_part: kinetic,
            zeeman_part: zeeman,
            total: exchange + kinetic + zeeman,
            ..Default::default()
        }
    }

    pub fn at(mut self, step_index: usize, time: f64) -> Self {
        self.step_index = step_index;
        self.time = time;
        self
    }
}

/// Modified energy of the three-level scheme; non-increasing along
/// zero-field trajectories.
pub fn modified_energy(
    m_next: &VectorField,
    m_curr: &VectorField,
    params: &SchemeParams,
) -> Result<EnergySample, MeshError> {
    energy_with_field(m_next, m_curr, Vec3::ZERO, params)
}

/// Modified energy plus the Zeeman term of a spatially constant field.
pub fn energy_with_field(
    m_next: &VectorField,
    m_curr: &VectorField,
    he: Vec3,
    params: &SchemeParams,
) -> Result<EnergySample, MeshError> {
    let (alpha, tau, k) = (params.alpha, params.tau, params.k);
    m_next.check_same_grid(m_curr)?;
    let g = *m_next.grid();
    let next = fresh(m_next);
    let curr = fresh(m_curr);
    let exchange = 0.25 * (next.gradient().norm_sq() + curr.gradient().norm_sq());
    let mut vel = 0.0;
    let mut zee = 0.0;
    for idx in g.interior_indices() {
        let (a, b) = (next.at(idx), curr.at(idx));
        vel += (a - b).norm_sq();
        zee += (a + b).dot(he);
    }
    let vol = g.cell_volume();
    let kinetic = 0.5 * alpha * tau * vel * vol / (k * k);
    let zeeman = -0.5 * zee * vol;
    Ok(EnergySample::new(exchange, kinetic, zeeman))
}

fn fresh(f: &VectorField) -> std::borrow::Cow<'_, VectorField> {
    if f.ghosts_fresh() {
        std::borrow::Cow::Borrowed(f)
    } else {
        std::borrow::Cow::Owned(f.clone().with_ghosts_filled())
    }
}

/// Arithmetic mean of `m` over interior cells.
pub fn averaged_magnetization(m: &VectorField) -> Vec3 {
    let n = m.grid().interior_len() as f64;
    let mut s = Vec3::ZERO;
    for v in m.interior() {
        s += v;
    }
    s / n
}

/// `max_l | |m(x_l)|² - 1 |` over interior cells.
pub fn max_length_deviation(m: &VectorField) -> f64 {
    m.interior()
        .map(|v| (v.norm_sq() - 1.0).abs())
        .fold(0.0, f64::max)
}
