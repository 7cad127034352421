//! Cell-centered grids, ghost-layer fields, stencils and discrete norms.

mod field;
mod grid;
pub mod snapshot;

pub use field::{Gradient, VectorField};
pub use grid::{Dim, Grid};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MeshError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
