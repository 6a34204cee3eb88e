//! Incremental ELMVIS.
//!
//! Finds an assignment of unordered data samples (rows of `X`) to fixed input
//! points (rows of `V`) that maximizes how well a random-feature least-squares
//! model reconstructs the data from the points. The model is an extreme
//! learning machine; its hat matrix turns every candidate move into a
//! closed-form change of the criterion, and the in-model set grows batch by
//! batch so that only the projection over placed samples is kept in memory.
//!
//! ```no_run
//! use elmvis_core::prelude::*;
//! # fn main() -> elmvis_core::Result<()> {
//! let x = load_matrix(&MatrixFile::guess("digits.csv"))?;
//! let x = normalize_rows(&x)?;
//! let layout = VisLayout::new(LayoutKind::Normal, 2, 1.0)?;
//! let v = make_layout(&layout, x.nrows(), 7);
//! let fit = run(&v, &x, RunConfig { seed: 7, ..RunConfig::default() })?;
//! println!("S = {}", fit.similarity);
//! # Ok(())
//! # }
//! ```

pub mod dataio;
pub mod elm;
mod error;
pub mod eval;
pub mod format;
pub mod incremental;
pub mod rng;
pub mod swap;

pub use error::{ElmvisError, Result};

pub use nalgebra::DMatrix;

pub mod prelude {
    pub use crate::dataio::{
        load_matrix, make_layout, normalize_rows, shuffle_rows, write_matrix, LayoutKind, MatrixFile, MatrixFormat,
        VisLayout,
    };
    pub use crate::elm::{projection_matrix, pseudoinverse, solve_output_weights, Activation, ElmModel, DEFAULT_RCOND};
    pub use crate::eval::{
        best_permutation_accuracy, confusion, oracle_similarity, reconstruction_accuracy, ConfusionMatrix, Metrics,
    };
    pub use crate::incremental::{run, run_with_progress, FitResult, NeuronSchedule, Partition, RunConfig, SlotOrder};
    pub use crate::swap::{elmvis_plus_run, SimilarityState};
    pub use crate::{DMatrix, ElmvisError, Result};
}
