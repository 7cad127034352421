use super::{SchemeError, SchemeParams, Source};
use crate::{Vec3, VectorField};

/// How levels 1 and 2 are produced from the initial magnetization.
#[derive(Clone, Copy)]
pub enum ColdStart<'a> {
    /// Second-order Taylor expansion with `∂t m(·,0) = 0`, renormalized.
    Taylor,
    /// `m¹ = m² = m⁰`; only first-order consistent.
    Flat,
    /// Sample a known solution `m(x, t)` at `t = 0, k, 2k`.
    Exact(&'a (dyn Fn(Vec3, f64) -> Vec3 + Sync)),
}

impl std::fmt::Debug for ColdStart<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ColdStart::Taylor => f.write_str("Taylor"),
            ColdStart::Flat => f.write_str("Flat"),
            ColdStart::Exact(_) => f.write_str("Exact(..)"),
        }
    }
}

/// `∂tt m` at `t = 0` implied by the equation when `∂t m(·,0) = 0`:
/// `-(1/ατ) m⁰ × (m⁰ × (Δ_h m⁰ + He⁰ + g⁰) - f⁰)`, where `g⁰` and `f⁰` are
/// the field and additive parts of the optional source at `t = 0`.
pub fn dtt_initial(
    m0: &VectorField,
    he0: Vec3,
    alpha: f64,
    tau: f64,
    source: Option<Source<'_>>,
) -> Result<VectorField, SchemeError> {
    if !(alpha * tau > 0.0) {
        return Err(SchemeError::InvalidArgument(format!(
            "initial acceleration needs α τ > 0, got α = {alpha}, τ = {tau}"
        )));
    }
    let m0 = m0.clone().with_ghosts_filled();
    let lap = m0.laplacian();
    let scale = -1.0 / (alpha * tau);
    let g = *m0.grid();
    let mut out = VectorField::zeros(g);
    for idx in g.interior_indices() {
        let m = m0.at(idx);
        let (extra, f) = source.map_or((Vec3::ZERO, Vec3::ZERO), |s| s.split(g.center_of(idx), 0.0, m));
        out.set_at(idx, scale * m.cross(m.cross(lap.at(idx) + he0 + extra) - f));
    }
    out.fill_ghost_neumann();
    Ok(out)
}

/// Levels `(m⁰, m¹, m²)` at `t = 0, k, 2k`. `source` only affects [`ColdStart::Taylor`].
pub fn cold_start(
    m0: &VectorField,
    he0: Vec3,
    params: &SchemeParams,
    mode: ColdStart<'_>,
    source: Option<Source<'_>>,
) -> Result<[VectorField; 3], SchemeError> {
    params.validate()?;
    let m0 = m0.clone().with_ghosts_filled();
    let k = params.k;
    match mode {
        ColdStart::Flat => Ok([m0.clone(), m0.clone(), m0]),
        ColdStart::Taylor => {
            let acc = dtt_initial(&m0, he0, params.alpha, params.tau, source)?;
            let m1 = m0.zip_map(&acc, |m, a| (m + 0.5 * k * k * a).normalized())?;
            let m2 = m0.zip_map(&acc, |m, a| (m + 2.0 * k * k * a).normalized())?;
            Ok([m0, m1, m2])
        }
        ColdStart::Exact(exact) => {
            let g = *m0.grid();
            let m1 = VectorField::from_fn(g, |x| exact(x, k));
            let m2 = VectorField::from_fn(g, |x| exact(x, 2.0 * k));
            let m0 = VectorField::from_fn(g, |x| exact(x, 0.0));
            Ok([m0, m1, m2])
        }
    }
}
