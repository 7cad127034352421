//! Finite-difference solver for the inertial Landau-Lifshitz-Gilbert equation
//!
//! ```text
//! ∂t m = -m × (Δm + He) + α m × (∂t m + τ ∂tt m),   |m| = 1,   ∂ν m = 0,
//! ```
//!
//! discretized on a uniform cell-centered grid by a three-level implicit
//! midpoint scheme. The nonlinear system of each step is solved by a
//! fixed-point iteration that lags the Laplacian, which turns every inner
//! iteration into independent 3×3 solves, one per cell.
//!
//! * [`mesh`]: grids, ghost-layer fields, stencils, discrete norms, snapshots.
//! * [`scheme`]: the iLLG and two-level LLG steppers, cold start, inner solver.
//! * [`observables`]: discrete energies, averaged magnetization, length drift.
//! * [`mms`]: manufactured solutions and convergence-order studies.
//! * [`config`] and [`experiment`]: run configuration and the drivers behind the CLI.

pub mod config;
pub mod experiment;
pub mod init;
pub mod mesh;
pub mod mms;
pub mod observables;
pub mod par;
pub mod scheme;
mod vec3;

pub use mesh::{Dim, Grid, MeshError, VectorField};
pub use par::Execution;
pub use vec3::Vec3;
