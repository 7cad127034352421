use super::SchemeError;
use crate::{Execution, Vec3};

pub const DEFAULT_FP_TOLERANCE: f64 = 1.0e-7;
pub const DEFAULT_FP_MAX_ITERS: usize = 200;

/// Physical and numerical parameters shared by the steppers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeParams {
    /// Gilbert damping α > 0.
    pub alpha: f64,
    /// Inertial relaxation time τ ≥ 0.
    pub tau: f64,
    /// Time step.
    pub k: f64,
    /// Stop the inner iteration once successive iterates differ by at most this in ℓ².
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
    /// Log a warning whenever `4k/h² ≥ 1`, where inner convergence is not guaranteed.
    pub enforce_cfl_warning: bool,
    pub execution: Execution,
}

impl SchemeParams {
    pub fn new(alpha: f64, tau: f64, k: f64) -> Result<Self, SchemeError> {
        let p = SchemeParams {
            alpha,
            tau,
            k,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
            fp_max_iters: DEFAULT_FP_MAX_ITERS,
            enforce_cfl_warning: true,
            execution: Execution::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tolerance(mut self, eps: f64) -> Self {
        self.fp_tolerance = eps;
        self
    }

    pub fn with_max_iters(mut self, n: usize) -> Self {
        self.fp_max_iters = n;
        self
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.execution = exec;
        self
    }

    pub fn with_cfl_warning(mut self, on: bool) -> Self {
        self.enforce_cfl_warning = on;
        self
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        let bad = |m: &str| Err(SchemeError::InvalidArgument(m.to_string()));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha must be positive");
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return bad("tau must be non-negative");
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad("time step k must be positive");
        }
        if !(self.fp_tolerance > 0.0) {
            return bad("fp_tolerance must be positive");
        }
        if self.fp_max_iters == 0 {
            return bad("fp_max_iters must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn unit(self) -> Vec3 {
        match self {
            Axis::X => Vec3::X,
            Axis::Y => Vec3::Y,
            Axis::Z => Vec3::Z,
        }
    }
}

/// Spatially uniform applied field as a function of time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FieldSpec {
    Zero,
    Constant(Vec3),
    /// `amplitude · sin(2π·frequency·t) · axis` for `t ∈ [on, off]`, zero outside.
    WindowedSine {
        amplitude: f64,
        frequency: f64,
        axis: Axis,
        on: f64,
        off: f64,
    },
}

impl FieldSpec {
    pub fn at(&self, t: f64) -> Vec3 {
        match *self {
            FieldSpec::Zero => Vec3::ZERO,
            FieldSpec::Constant(h) => h,
            FieldSpec::WindowedSine {
                amplitude,
                frequency,
                axis,
                on,
                off,
            } => {
                if t >= on && t <= off {
                    axis.unit() * (amplitude * (2.0 * std::f64::consts::PI * frequency * t).sin())
                } else {
                    Vec3::ZERO
                }
            }
        }
    }

    /// Constant in time (including the zero field).
    pub fn is_static(&self) -> bool {
        !matches!(self, FieldSpec::WindowedSine { .. })
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Zero
    }
}
