use super::{
    solve_cross_system, warn_if_noncontractive, FieldSpec, SchemeError, SchemeParams, Source,
    StepReport, TimeWindow,
};
use crate::{Grid, Vec3, VectorField};

/// Per-cell coefficients `(a, r)` of the inner system `v - a × v = r`.
///
/// `lap` is `Δ_h(m^p + m^{n-1})` at the cell, `he` the effective field
/// (applied plus any source field) at `tₙ` and `source` the additive forcing
/// `f(x, tₙ)`:
///
/// ```text
/// a = α m⁻ + (2ατ/k) m + (k/2)(lap + 2He)
/// r = m⁻ + (2ατ/k) m × m⁻ - (k/2) m⁻ × (lap + 2He) + 2k f
/// ```
#[inline]
pub fn inner_system(
    m_prev: Vec3,
    m_curr: Vec3,
    lap: Vec3,
    he: Vec3,
    source: Vec3,
    params: &SchemeParams,
) -> (Vec3, Vec3) {
    let inertia = 2.0 * params.alpha * params.tau / params.k;
    let half_k = 0.5 * params.k;
    let field = lap + 2.0 * he;
    let a = params.alpha * m_prev + inertia * m_curr + half_k * field;
    let r = m_prev + inertia * m_curr.cross(m_prev) - half_k * m_prev.cross(field)
        + 2.0 * params.k * source;
    (a, r)
}

/// Three-level iLLG stepper with reusable scratch fields.
#[derive(Debug)]
pub struct IllgStepper {
    params: SchemeParams,
    field: FieldSpec,
    grid: Grid,
    iterate: VectorField,
    next: VectorField,
    sum: VectorField,
    lap: VectorField,
    extra_field: VectorField,
    additive: VectorField,
}

impl IllgStepper {
    pub fn new(grid: Grid, params: SchemeParams, field: FieldSpec) -> Result<Self, SchemeError> {
        params.validate()?;
        warn_if_noncontractive(&params, grid.min_spacing());
        let z = VectorField::zeros(grid);
        Ok(IllgStepper {
            params,
            field,
            grid,
            iterate: z.clone(),
            next: z.clone(),
            sum: z.clone(),
            lap: z.clone(),
            extra_field: z.clone(),
            additive: z,
        })
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    /// Computes `m^{n+1}` from the window. The window itself is not advanced.
    pub fn step(
        &mut self,
        window: &TimeWindow,
        source: Option<Source<'_>>,
    ) -> Result<(VectorField, StepReport), SchemeError> {
        let p = self.params;
        let g = self.grid;
        if *window.m_curr.grid() != g || *window.m_prev.grid() != g {
            return Err(SchemeError::InvalidArgument(
                "window grid does not match the stepper grid".into(),
            ));
        }

        let t = window.t_curr;
        let he = self.field.at(t);
        let m_prev = &window.m_prev;
        let m_curr = &window.m_curr;
        // fixed per step: the field of Field, f itself for Additive and Tangent
        let (has_field, has_additive, tangent) = match source {
            None => (false, false, false),
            Some(Source::Field(g_fn)) => {
                self.extra_field
                    .fill_interior_with(p.execution, |idx| g_fn(g.center_of(idx), t));
                (true, false, false)
            }
            Some(Source::Additive(f_fn)) => {
                self.additive
                    .fill_interior_with(p.execution, |idx| f_fn(g.center_of(idx), t));
                (false, true, false)
            }
            Some(Source::Tangent(f_fn)) => {
                self.extra_field
                    .fill_interior_with(p.execution, |idx| f_fn(g.center_of(idx), t));
                (false, false, true)
            }
        };

        // extrapolated initial guess 2mⁿ - mⁿ⁻¹
        self.iterate
            .zip_assign(m_curr, m_prev, |c, q| 2.0 * c - q)?;

        let mut report = StepReport::default();
        let mut prev_diff = f64::NAN;
        for iter in 1..=p.fp_max_iters {
            self.sum.zip_assign(&self.iterate, m_prev, |a, b| a + b)?;
            self.sum.laplacian_into(&mut self.lap, p.execution);

            let (lap, extra, additive) = (&self.lap, &self.extra_field, &self.additive);
            let sum = &self.sum;
            self.next.fill_interior_with(p.execution, |idx| {
                let h = if has_field {
                    he + extra.at(idx)
                } else if tangent {
                    // -m̄ × (m̄ × f) with m̄ taken from the current iterate
                    he + (0.5 * sum.at(idx)).cross(extra.at(idx))
                } else {
                    he
                };
                let f = if has_additive { additive.at(idx) } else { Vec3::ZERO };
                let (a, r) = inner_system(m_prev.at(idx), m_curr.at(idx), lap.at(idx), h, f, &p);
                solve_cross_system(a, r)
            });
            self.next.fill_ghost_neumann();

            let diff = self.next.distance_l2(&self.iterate)?;
            std::mem::swap(&mut self.iterate, &mut self.next);
            if iter > 1 && prev_diff > 0.0 {
                report.contraction_ratios.push(diff / prev_diff);
            }
            report.iterations = iter;
            report.final_residual = diff;
            if !diff.is_finite() {
                break;
            }
            if diff <= p.fp_tolerance {
                report.converged = true;
                return Ok((self.iterate.clone(), report));
            }
            prev_diff = diff;
        }
        Err(SchemeError::NonConvergence {
            iterations: report.iterations,
            residual: report.final_residual,
            last_iterate: Box::new(self.iterate.clone()),
        })
    }
}

/// One iLLG step from `window`; allocates a fresh [`IllgStepper`].
pub fn illg_step(
    window: &TimeWindow,
    params: &SchemeParams,
    field: &FieldSpec,
    source: Option<Source<'_>>,
) -> Result<(VectorField, StepReport), SchemeError> {
    IllgStepper::new(*window.m_curr.grid(), *params, *field)?.step(window, source)
}
