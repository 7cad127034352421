use crate::Vec3;

/// Solves `v - a × v = b` for `v`.
///
/// The matrix `I - [a]×` has determinant `1 + |a|²` and is never singular;
/// its inverse applied to `b` is `(b + a × b + (a·b) a) / (1 + |a|²)`.
#[inline]
pub fn solve_cross_system(a: Vec3, b: Vec3) -> Vec3 {
    (b + a.cross(b) + a * a.dot(b)) / (1.0 + a.norm_sq())
}
