use super::{
    solve_cross_system, warn_if_noncontractive, FieldSpec, SchemeError, SchemeParams, StepReport,
};
use crate::{Vec3, VectorField};

/// Two-level implicit midpoint step for the plain LLG equation
///
/// ```text
/// (m⁺ - m)/k = -m½ × (Δ_h m½ + He) + α m½ × (m⁺ - m)/k,   m½ = (m⁺ + m)/2,
/// ```
///
/// solved with the same lagged-Laplacian fixed-point iteration as the iLLG
/// scheme. `t` is the time of `m_curr`; the field is sampled at `t + k/2`.
/// `params.tau` is ignored.
pub fn llg_midpoint_step(
    m_curr: &VectorField,
    t: f64,
    params: &SchemeParams,
    field: &FieldSpec,
) -> Result<(VectorField, StepReport), SchemeError> {
    params.validate()?;
    let g = *m_curr.grid();
    warn_if_noncontractive(params, g.min_spacing());
    let m_curr = if m_curr.ghosts_fresh() {
        std::borrow::Cow::Borrowed(m_curr)
    } else {
        std::borrow::Cow::Owned(m_curr.clone().with_ghosts_filled())
    };
    let m_curr = m_curr.as_ref();
    let he = field.at(t + 0.5 * params.k);
    let half_k = 0.5 * params.k;
    let alpha = params.alpha;

    let mut iterate = m_curr.clone();
    let mut next = VectorField::zeros(g);
    let mut sum = VectorField::zeros(g);
    let mut lap = VectorField::zeros(g);
    let mut report = StepReport::default();
    let mut prev_diff = f64::NAN;
    for iter in 1..=params.fp_max_iters {
        sum.zip_assign(&iterate, m_curr, |a, b| 0.5 * (a + b))?;
        sum.laplacian_into(&mut lap, params.execution);
        let lap_ref = &lap;
        next.fill_interior_with(params.execution, |idx| {
            let m = m_curr.at(idx);
            let heff: Vec3 = lap_ref.at(idx) + he;
            // v - (α m + (k/2) Heff) × v = m - (k/2) m × Heff
            let a = alpha * m + half_k * heff;
            let r = m - half_k * m.cross(heff);
            solve_cross_system(a, r)
        });
        next.fill_ghost_neumann();
        let diff = next.distance_l2(&iterate)?;
        std::mem::swap(&mut iterate, &mut next);
        if iter > 1 && prev_diff > 0.0 {
            report.contraction_ratios.push(diff / prev_diff);
        }
        report.iterations = iter;
        report.final_residual = diff;
        if !diff.is_finite() {
            break;
        }
        if diff <= params.fp_tolerance {
            report.converged = true;
            return Ok((iterate, report));
        }
        prev_diff = diff;
    }
    Err(SchemeError::NonConvergence {
        iterations: report.iterations,
        residual: report.final_residual,
        last_iterate: Box::new(iterate),
    })
}
