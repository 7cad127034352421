use super::{ConvergenceRow, ConvergenceTable, ManufacturedCase, MmsError, StudyAxis};
use crate::observables::max_length_deviation;
use crate::par::map_collect;
use crate::scheme::{
    cold_start, ColdStart, FieldSpec, Source, IllgStepper, SchemeParams, TimeWindow, DEFAULT_FP_MAX_ITERS,
    DEFAULT_FP_TOLERANCE,
};
use crate::{Execution, Vec3, VectorField};

/// How levels 1 and 2 of each study run are produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitMode {
    /// Sample the manufactured solution at `t = 0, k, 2k`.
    #[default]
    Exact,
    /// Taylor cold start from `m_e(·, 0)`, including the source term.
    Taylor,
}

/// How the manufactured source enters the scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SourceForm {
    /// `f` added to the right-hand side; `|m|` then drifts with the error.
    #[default]
    Additive,
    /// As the effective field `m_e × f`; keeps `|m| = 1` to solver tolerance.
    Field,
    /// `f` projected onto the tangent plane of the midpoint value.
    Tangent,
}

/// A refinement study: one full forced simulation per resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct StudySpec {
    pub case: ManufacturedCase,
    pub axis: StudyAxis,
    /// Time steps for [`StudyAxis::Time`], mesh sizes for [`StudyAxis::Space`].
    pub resolutions: Vec<f64>,
    /// The mesh size of a time study, or the time step of a space study.
    pub fixed: f64,
    pub final_time: f64,
    pub init: InitMode,
    pub source: SourceForm,
    pub fp_tolerance: f64,
    pub fp_max_iters: usize,
    pub execution: Execution,
}

impl StudySpec {
    pub fn new(
        case: ManufacturedCase,
        axis: StudyAxis,
        resolutions: Vec<f64>,
        fixed: f64,
        final_time: f64,
    ) -> Self {
        StudySpec {
            case,
            axis,
            resolutions,
            fixed,
            final_time,
            init: InitMode::Exact,
            source: SourceForm::Additive,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
            fp_max_iters: DEFAULT_FP_MAX_ITERS,
            execution: Execution::default(),
        }
    }

    /// `(k, h)` for one entry of `resolutions`.
    fn pair(&self, resolution: f64) -> (f64, f64) {
        match self.axis {
            StudyAxis::Time => (resolution, self.fixed),
            StudyAxis::Space => (self.fixed, resolution),
        }
    }

    fn validate(&self) -> Result<(), MmsError> {
        let bad = |m: String| Err(MmsError::InvalidArgument(m));
        if self.resolutions.len() < 3 {
            return bad(format!(
                "a study needs at least 3 resolutions, got {}",
                self.resolutions.len()
            ));
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.final_time));
        }
        for &r in &self.resolutions {
            let (k, h) = self.pair(r);
            cells_per_axis(h)?;
            steps_to(self.final_time, k)?;
        }
        Ok(())
    }
}

/// Number of cells for mesh size `h` on the unit domain.
pub fn cells_per_axis(h: f64) -> Result<usize, MmsError> {
    let n = (ManufacturedCase::EXTENT / h).round();
    if !(h > 0.0) || n < 2.0 || ((n * h - ManufacturedCase::EXTENT).abs() > 1e-9) {
        return Err(MmsError::InvalidArgument(format!(
            "mesh size {h} does not divide the unit domain into at least 2 cells"
        )));
    }
    Ok(n as usize)
}

/// Number of steps of size `k` to reach `final_time`.
pub fn steps_to(final_time: f64, k: f64) -> Result<usize, MmsError> {
    let n = (final_time / k).round();
    if !(k > 0.0) || n < 2.0 || ((n * k - final_time).abs() > 1e-9 * final_time) {
        return Err(MmsError::InvalidArgument(format!(
            "time step {k} does not divide T = {final_time} into at least 2 steps"
        )));
    }
    Ok(n as usize)
}

/// ℓ² and ℓ∞ distance between `numeric` and `m_e(·, t)` at the cell centers.
pub fn measure_error(numeric: &VectorField, case: &ManufacturedCase, t: f64) -> (f64, f64) {
    let g = *numeric.grid();
    let mut sq = 0.0;
    let mut max = 0.0f64;
    for idx in g.interior_indices() {
        let d = numeric.at(idx) - case.exact(g.center_of(idx), t);
        sq += d.norm_sq();
        max = max.max(d.max_abs());
    }
    ((sq * g.cell_volume()).sqrt(), max)
}

/// Runs every resolution of `spec` (concurrently when parallel execution is
/// enabled) and fits the convergence orders.
pub fn run_convergence_study(spec: &StudySpec) -> Result<ConvergenceTable, MmsError> {
    spec.validate()?;
    let rows = map_collect(spec.execution, spec.resolutions.clone(), |r| {
        run_single(spec, r)
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    ConvergenceTable::new(spec.axis, rows)
}

/// One forced simulation to `spec.final_time` at the given resolution.
pub fn run_single(spec: &StudySpec, resolution: f64) -> Result<ConvergenceRow, MmsError> {
    let (k, h) = spec.pair(resolution);
    let case = spec.case;
    let n_cells = cells_per_axis(h)?;
    let n_steps = steps_to(spec.final_time, k)?;
    let grid = case.grid(n_cells);
    let wrap = |step: usize, source| MmsError::Step {
        resolution,
        step,
        source,
    };

    let params = SchemeParams::new(case.alpha, case.tau, k)
        .map_err(|e| wrap(0, e))?
        .with_tolerance(spec.fp_tolerance)
        .with_max_iters(spec.fp_max_iters)
        .with_execution(spec.execution)
        // the harness deliberately runs far beyond 4k/h² < 1
        .with_cfl_warning(false);

    let additive = |x: Vec3, t: f64| case.forcing(x, t);
    let field = |x: Vec3, t: f64| case.source_field(x, t);
    let source = match spec.source {
        SourceForm::Field => Source::Field(&field),
        SourceForm::Additive => Source::Additive(&additive),
        SourceForm::Tangent => Source::Tangent(&additive),
    };
    let exact = |x: Vec3, t: f64| case.exact(x, t);
    let m0 = case.sample(grid, 0.0);
    let mode = match spec.init {
        InitMode::Exact => ColdStart::Exact(&exact),
        InitMode::Taylor => ColdStart::Taylor,
    };
    let levels = cold_start(&m0, Vec3::ZERO, &params, mode, Some(source)).map_err(|e| wrap(0, e))?;
    let mut len_dev = levels.iter().map(max_length_deviation).fold(0.0, f64::max);
    let mut window = TimeWindow::from_levels(levels, k).map_err(|e| wrap(2, e))?;
    let mut stepper = IllgStepper::new(grid, params, FieldSpec::Zero).map_err(|e| wrap(2, e))?;

    let mut max_iters = 0;
    while window.step_index < n_steps {
        let (next, report) = stepper
            .step(&window, Some(source))
            .map_err(|e| wrap(window.step_index + 1, e))?;
        max_iters = max_iters.max(report.iterations);
        len_dev = len_dev.max(max_length_deviation(&next));
        window.advance(next, k);
    }
    let (error_l2, error_linf) = measure_error(&window.m_curr, &case, window.t_curr);
    log::debug!(
        "{} study, resolution {resolution:e}: {n_steps} steps, l2 {error_l2:e}, linf {error_linf:e}",
        spec.axis
    );
    Ok(ConvergenceRow {
        resolution,
        error_l2,
        error_linf,
        steps: n_steps,
        max_len_dev: len_dev,
        max_fp_iters: max_iters,
    })
}
