//! Time stepping.
//!
//! The three-level iLLG scheme advances `(m^{n-1}, m^n)` to `m^{n+1}` by
//!
//! ```text
//! (m⁺ - m⁻)/2k - α m̄ × ((m⁺ - m⁻)/2k + τ (m⁺ - 2m + m⁻)/k²) = -m̄ × (Δ_h m̄ + He(tₙ)) + f(tₙ)
//! ```
//!
//! with `m̄ = (m⁺ + m⁻)/2`. Each inner fixed-point iteration freezes the
//! Laplacian at the previous iterate, leaving the per-cell system
//! `v - a × v = r` that [`solve_cross_system`] solves in closed form.

mod cold_start;
mod cross_solve;
mod illg;
mod llg;
mod params;

pub use cold_start::{cold_start, dtt_initial, ColdStart};
pub use cross_solve::solve_cross_system;
pub use illg::{illg_step, inner_system, IllgStepper};
pub use llg::llg_midpoint_step;
pub use params::{Axis, FieldSpec, SchemeParams, DEFAULT_FP_MAX_ITERS, DEFAULT_FP_TOLERANCE};

use crate::{MeshError, Vec3, VectorField};

/// A vector function of position and time.
pub type Forcing<'a> = &'a (dyn Fn(Vec3, f64) -> Vec3 + Sync);

/// Space- and time-dependent source of a forced problem, sampled at `tₙ`.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    /// `f(x, t)` added to the right-hand side of the scheme.
    Additive(Forcing<'a>),
    /// Extra effective field `g(x, t)`, entering like `He` as `-m̄ × g`.
    /// Unlike an additive source this keeps `|m| = 1`; a tangent source `f`
    /// with `f · m = 0` is reproduced by `g = m × f`.
    Field(Forcing<'a>),
    /// `f(x, t)` projected onto the tangent plane of `m̄`, i.e. `-m̄ × (m̄ × f)`.
    /// The projection is lagged along with the Laplacian, so every inner
    /// iterate keeps `|m| = 1`.
    Tangent(Forcing<'a>),
}

impl Source<'_> {
    /// `(extra field, additive term)` at `(x, t)` for magnetization `m`.
    pub fn split(&self, x: Vec3, t: f64, m: Vec3) -> (Vec3, Vec3) {
        match self {
            Source::Additive(f) => (Vec3::ZERO, f(x, t)),
            Source::Field(g) => (g(x, t), Vec3::ZERO),
            Source::Tangent(f) => (m.cross(f(x, t)), Vec3::ZERO),
        }
    }
}

impl std::fmt::Debug for Source<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Additive(_) => f.write_str("Additive(..)"),
            Source::Field(_) => f.write_str("Field(..)"),
            Source::Tangent(_) => f.write_str("Tangent(..)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SchemeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fixed-point iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last_iterate: Box<VectorField>,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Instrumentation of one step's inner iteration.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepReport {
    pub iterations: usize,
    /// ℓ² distance between the last two iterates.
    pub final_residual: f64,
    /// `‖m^{p+1} - m^p‖ / ‖m^p - m^{p-1}‖` for every iteration after the first.
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
}

impl StepReport {
    pub fn max_ratio(&self) -> f64 {
        self.contraction_ratios.iter().copied().fold(0.0, f64::max)
    }
}

/// The two retained time levels of the three-level scheme.
#[derive(Clone, Debug)]
pub struct TimeWindow {
    pub m_prev: VectorField,
    pub m_curr: VectorField,
    /// Time of `m_curr`.
    pub t_curr: f64,
    /// Level index of `m_curr`.
    pub step_index: usize,
    origin: (f64, usize),
}

impl TimeWindow {
    pub fn new(
        m_prev: VectorField,
        m_curr: VectorField,
        t_curr: f64,
        step_index: usize,
    ) -> Result<Self, SchemeError> {
        m_prev.check_same_grid(&m_curr)?;
        Ok(TimeWindow {
            m_prev: m_prev.with_ghosts_filled(),
            m_curr: m_curr.with_ghosts_filled(),
            t_curr,
            step_index,
            origin: (t_curr, step_index),
        })
    }

    /// Window positioned at level 2, ready to produce level 3.
    pub fn from_levels(levels: [VectorField; 3], k: f64) -> Result<Self, SchemeError> {
        let [_, m1, m2] = levels;
        TimeWindow::new(m1, m2, 2.0 * k, 2)
    }

    /// Shifts the window forward by one level.
    pub fn advance(&mut self, m_next: VectorField, k: f64) {
        self.m_prev = std::mem::replace(&mut self.m_curr, m_next);
        self.step_index += 1;
        // times are recomputed from the level count so they do not drift
        let (t0, n0) = self.origin;
        self.t_curr = t0 + (self.step_index - n0) as f64 * k;
    }
}

/// Contraction factor `4 c₀ k / h²` of the lagged-Laplacian iteration.
/// Convergence is only guaranteed below 1.
pub fn check_contraction_bound(k: f64, h: f64, c0: f64) -> f64 {
    4.0 * c0 * k / (h * h)
}

pub(crate) fn warn_if_noncontractive(params: &SchemeParams, h: f64) {
    if params.enforce_cfl_warning {
        let bound = check_contraction_bound(params.k, h, 1.0);
        if bound >= 1.0 {
            log::warn!(
                "4 k / h² = {bound:.3} ≥ 1: the fixed-point iteration is not guaranteed to contract"
            );
        }
    }
}
