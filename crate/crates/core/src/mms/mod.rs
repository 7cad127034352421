//! Manufactured solutions and convergence-order studies.

mod case;
mod study;
mod table;

pub use case::ManufacturedCase;
pub use study::{
    cells_per_axis, measure_error, run_convergence_study, run_single, steps_to, InitMode,
    SourceForm, StudySpec,
};
pub use table::{fit_order, ConvergenceRow, ConvergenceTable, StudyAxis};

use crate::scheme::SchemeError;

#[derive(Debug, thiserror::Error)]
pub enum MmsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resolution {resolution:e}, step {step}: {source}")]
    Step {
        resolution: f64,
        step: usize,
        #[source]
        source: SchemeError,
    },
}
