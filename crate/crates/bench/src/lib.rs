//! Fixtures shared by the benchmarks in `benches/`.

use elmvis_core::dataio::{make_layout, normalize_rows, LayoutKind, VisLayout};
use elmvis_core::elm::{projection_matrix, Activation, ElmModel, DEFAULT_RCOND};
use elmvis_core::swap::SimilarityState;
use elmvis_core::DMatrix;

/// Standard normal `n × d` matrix.
pub fn gaussian(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    make_layout(&VisLayout::new(LayoutKind::Normal, d, 1.0).unwrap(), n, seed)
}

/// Unit-norm data and a 2-D layout with `n` rows each.
pub fn problem(n: usize, d: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
    let x = normalize_rows(&gaussian(n, d, seed)).unwrap();
    (gaussian(n, 2, seed ^ 1), x)
}

/// Hidden matrix of an `neurons`-wide model over a 2-D layout.
pub fn hidden(n: usize, neurons: usize, seed: u64) -> DMatrix<f64> {
    let model = ElmModel::random(2, neurons, Activation::Tanh, seed).unwrap();
    model.hidden(&gaussian(n, 2, seed)).unwrap()
}

/// Similarity state and its pool for `n` samples.
pub fn state(n: usize, neurons: usize, d: usize, seed: u64) -> (SimilarityState, DMatrix<f64>) {
    let (_, x) = problem(n, d, seed);
    let a = projection_matrix(&hidden(n, neurons, seed), DEFAULT_RCOND).unwrap();
    (SimilarityState::new(a, &x).unwrap(), x)
}
