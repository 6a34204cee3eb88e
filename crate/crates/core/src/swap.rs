//! Similarity criterion and its closed-form swap deltas.
//!
//! The maximized quantity is `S = trace(Xᵀ·A·X) = Σ X̂∘X` with `X̂ = A·X`.
//! Replacing row `a` of `X` by `x_a + δ` (with `δ = new − old`) changes it by
//!
//! ```text
//! ΔS = A[a,a]·‖δ‖² + 2·x̂_a·δ
//! ```
//!
//! and the predictions follow with a rank-one update `X̂ += A[:,a]·δᵀ`.
//! Exchanging rows `a` and `b` is the composition of the two row changes,
//! `δ = x_b − x_a`:
//!
//! ```text
//! ΔS = (A[a,a] + A[b,b] − 2·A[a,b])·‖δ‖² + 2·(x̂_a − x̂_b)·δ
//! ```
//!
//! The error `E` of the original formulation is `−S`; a move is accepted when
//! it strictly raises `S`.
//!
//! All operations take the data pool as a separate matrix. Only its first
//! `n` rows (the in-model samples) enter the criterion; rows past `n` are free
//! storage for samples that are not part of the model yet.

use std::io::Write;
use std::ops::Range;

use nalgebra::DMatrix;
use rand::Rng as _;

use crate::error::{arg_err, Result};
use crate::format::sig17;
use crate::rng::rng_from_seed;

/// Accepted updates between full recomputations of `X̂` and `S`.
pub const RESYNC_INTERVAL: usize = 4096;

/// Relative threshold below which a positive delta is treated as a tie.
const ACCEPT_EPS: f64 = 1e-12;

/// Whether a move with gain `delta` should be taken from similarity `s`.
///
/// Ties are rejected; gains within rounding noise of `s` count as ties.
#[inline]
pub fn is_improvement(delta: f64, s: f64) -> bool {
    delta > ACCEPT_EPS * s.abs().max(1.0)
}

/// Running state of the criterion over the first `n` rows of a data pool.
#[derive(Debug, Clone)]
pub struct SimilarityState {
    a: DMatrix<f64>,
    xhat: DMatrix<f64>,
    similarity: f64,
    updates_since_resync: usize,
}

/// Result of a single proposed move.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapOutcome {
    pub accepted: bool,
    pub delta: f64,
    pub swap: (usize, usize),
}

impl SimilarityState {
    /// Builds the state for `A` and data `X` with matching row counts.
    pub fn new(a: DMatrix<f64>, x: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != x.nrows() {
            return arg_err(format!("projection has {} rows but data has {}", a.nrows(), x.nrows()));
        }
        Self::from_pool_prefix(a, x)
    }

    /// Builds the state for `A` (`n × n`) over the first `n` rows of `pool`.
    pub fn from_pool_prefix(a: DMatrix<f64>, pool: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return arg_err(format!("projection must be square, got {:?}", a.shape()));
        }
        if pool.nrows() < a.nrows() {
            return arg_err(format!(
                "pool has {} rows, projection needs {}",
                pool.nrows(),
                a.nrows()
            ));
        }
        let mut state = Self {
            xhat: DMatrix::zeros(a.nrows(), pool.ncols()),
            a,
            similarity: 0.0,
            updates_since_resync: 0,
        };
        state.recompute(pool);
        Ok(state)
    }

    fn recompute(&mut self, pool: &DMatrix<f64>) {
        let n = self.len();
        let x = pool.rows(0, n);
        self.xhat = &self.a * x;
        self.similarity = self.xhat.component_mul(&x).sum();
        self.updates_since_resync = 0;
    }

    /// Re-derives `X̂` and `S` from `A` and the pool, discarding accumulated drift.
    pub fn resync(&mut self, pool: &DMatrix<f64>) -> Result<()> {
        self.check_pool(pool)?;
        self.recompute(pool);
        Ok(())
    }

    /// Number of in-model rows.
    pub fn len(&self) -> usize {
        self.a.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.a.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.xhat.ncols()
    }

    pub fn similarity(&self) -> f64 {
        self.similarity
    }

    pub fn projection(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn predictions(&self) -> &DMatrix<f64> {
        &self.xhat
    }

    /// `‖X̂ − A·X‖_F` for the current pool prefix.
    pub fn prediction_drift(&self, pool: &DMatrix<f64>) -> f64 {
        let x = pool.rows(0, self.len());
        (&self.xhat - &self.a * x).norm()
    }

    fn check_pool(&self, pool: &DMatrix<f64>) -> Result<()> {
        if pool.nrows() < self.len() || pool.ncols() != self.dim() {
            return arg_err(format!(
                "pool shape {:?} incompatible with state ({} rows, dim {})",
                pool.shape(),
                self.len(),
                self.dim()
            ));
        }
        Ok(())
    }

    fn check_row(&self, a: usize) -> Result<()> {
        if a >= self.len() {
            return arg_err(format!("row {a} out of range for {} in-model rows", self.len()));
        }
        Ok(())
    }

    fn check_delta(&self, delta: &[f64]) -> Result<()> {
        if delta.len() != self.dim() {
            return arg_err(format!(
                "delta has length {}, data dimension is {}",
                delta.len(),
                self.dim()
            ));
        }
        if delta.iter().any(|d| !d.is_finite()) {
            return arg_err("delta contains non-finite values");
        }
        Ok(())
    }

    /// Gain in `S` if row `a` changed by `delta`; the state is not modified.
    pub fn delta_row(&self, a: usize, delta: &[f64]) -> Result<f64> {
        self.check_row(a)?;
        self.check_delta(delta)?;
        Ok(self.delta_row_unchecked(a, delta))
    }

    #[inline]
    pub(crate) fn delta_row_unchecked(&self, a: usize, delta: &[f64]) -> f64 {
        let a_aa = self.a[(a, a)];
        delta
            .iter()
            .enumerate()
            .map(|(j, &dj)| a_aa * dj * dj + 2.0 * self.xhat[(a, j)] * dj)
            .sum()
    }

    /// Adds `delta` to row `a` of the pool and updates `X̂` and `S`.
    /// Returns the applied gain.
    pub fn apply_row_update(&mut self, pool: &mut DMatrix<f64>, a: usize, delta: &[f64]) -> Result<f64> {
        self.check_pool(pool)?;
        self.check_row(a)?;
        self.check_delta(delta)?;
        let gain = self.delta_row_unchecked(a, delta);
        self.rank_one(a, delta);
        for (j, &dj) in delta.iter().enumerate() {
            pool[(a, j)] += dj;
        }
        self.similarity += gain;
        self.after_update(pool);
        Ok(gain)
    }

    /// `X̂ += A[:,a]·δᵀ`
    fn rank_one(&mut self, a: usize, delta: &[f64]) {
        let col = self.a.column(a);
        for (j, &dj) in delta.iter().enumerate() {
            if dj != 0.0 {
                self.xhat.column_mut(j).axpy(dj, &col, 1.0);
            }
        }
    }

    fn after_update(&mut self, pool: &DMatrix<f64>) {
        self.updates_since_resync += 1;
        if self.updates_since_resync >= RESYNC_INTERVAL {
            self.recompute(pool);
        }
    }

    /// Gain in `S` if in-model rows `a` and `b` were exchanged.
    pub fn delta_pair_swap(&self, pool: &DMatrix<f64>, a: usize, b: usize) -> Result<f64> {
        self.check_pool(pool)?;
        self.check_row(a)?;
        self.check_row(b)?;
        if a == b {
            return arg_err(format!("swap needs two distinct rows, got {a} twice"));
        }
        Ok(self.delta_pair_swap_unchecked(pool, a, b))
    }

    #[inline]
    pub(crate) fn delta_pair_swap_unchecked(&self, pool: &DMatrix<f64>, a: usize, b: usize) -> f64 {
        let curvature = self.a[(a, a)] + self.a[(b, b)] - 2.0 * self.a[(a, b)];
        let mut sq = 0.0;
        let mut lin = 0.0;
        for j in 0..self.dim() {
            let d = pool[(b, j)] - pool[(a, j)];
            sq += d * d;
            lin += (self.xhat[(a, j)] - self.xhat[(b, j)]) * d;
        }
        curvature * sq + 2.0 * lin
    }

    /// Exchanges in-model rows `a` and `b`. Returns the applied gain.
    pub fn apply_pair_swap(&mut self, pool: &mut DMatrix<f64>, a: usize, b: usize) -> Result<f64> {
        let gain = self.delta_pair_swap(pool, a, b)?;
        self.apply_pair_swap_unchecked(pool, a, b, gain);
        Ok(gain)
    }

    pub(crate) fn apply_pair_swap_unchecked(&mut self, pool: &mut DMatrix<f64>, a: usize, b: usize, gain: f64) {
        let n = self.len();
        for j in 0..self.dim() {
            let d = pool[(b, j)] - pool[(a, j)];
            if d != 0.0 {
                let mut col = self.xhat.column_mut(j);
                for i in 0..n {
                    col[i] += (self.a[(i, a)] - self.a[(i, b)]) * d;
                }
            }
        }
        pool.swap_rows(a, b);
        self.similarity += gain;
        self.after_update(pool);
    }

    /// Replaces in-model row `a` with out-of-model row `b` of the pool and
    /// moves the old content of `a` to `b`. Only row `a` counts toward `S`.
    pub(crate) fn apply_exchange_with_outside(
        &mut self,
        pool: &mut DMatrix<f64>,
        a: usize,
        b: usize,
        delta: &[f64],
        gain: f64,
    ) {
        self.rank_one(a, delta);
        pool.swap_rows(a, b);
        self.similarity += gain;
        self.after_update(pool);
    }
}

/// One accepted move of an optimization loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub a: usize,
    pub b: usize,
    pub delta: f64,
    pub similarity: f64,
}

/// Append-only log of accepted moves.
#[derive(Debug, Clone, Default)]
pub struct AcceptanceTrace {
    records: Vec<TraceRecord>,
}

impl AcceptanceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Writes `step,a,b,delta,similarity` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,a,b,delta,similarity")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.step,
                r.a,
                r.b,
                sig17(r.delta),
                sig17(r.similarity)
            )?;
        }
        Ok(())
    }
}

/// Summary of a pairwise-swap optimization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineReport {
    pub accepted: usize,
    pub proposals: usize,
    pub initial_similarity: f64,
    pub final_similarity: f64,
}

/// Default number of consecutive rejections that ends a pair-swap run over `span` rows.
pub fn default_refine_stagnation(span: usize) -> usize {
    1000.max(20 * span)
}

/// Greedy pair-swap optimization over in-model rows `range`.
///
/// Pairs are drawn uniformly among the rows of `range`; a swap is applied iff it
/// strictly increases `S`. The loop ends after `stagnation` consecutive
/// rejections.
pub fn elmvis_plus_run(
    state: &mut SimilarityState,
    pool: &mut DMatrix<f64>,
    range: Range<usize>,
    stagnation: usize,
    seed: u64,
) -> Result<RefineReport> {
    elmvis_plus_run_traced(state, pool, range, stagnation, seed, None)
}

/// Same as [`elmvis_plus_run`], appending each accepted swap to `trace`.
pub fn elmvis_plus_run_traced(
    state: &mut SimilarityState,
    pool: &mut DMatrix<f64>,
    range: Range<usize>,
    stagnation: usize,
    seed: u64,
    mut trace: Option<&mut AcceptanceTrace>,
) -> Result<RefineReport> {
    let mut step = trace.as_ref().map_or(0, |t| t.len() as u64);
    pair_swap_search(state, pool, range, stagnation, seed, &mut |a, b, delta, similarity| {
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceRecord {
                step,
                a,
                b,
                delta,
                similarity,
            });
            step += 1;
        }
    })
}

/// The pair-swap loop; `on_accept(a, b, delta, similarity)` runs after every applied swap.
pub(crate) fn pair_swap_search(
    state: &mut SimilarityState,
    pool: &mut DMatrix<f64>,
    range: Range<usize>,
    stagnation: usize,
    seed: u64,
    on_accept: &mut dyn FnMut(usize, usize, f64, f64),
) -> Result<RefineReport> {
    state.check_pool(pool)?;
    if range.start >= range.end || range.end > state.len() {
        return arg_err(format!(
            "swap range {range:?} is empty or exceeds {} in-model rows",
            state.len()
        ));
    }
    if stagnation == 0 {
        return arg_err("stagnation window must be at least 1");
    }
    let initial = state.similarity();
    let span = range.end - range.start;
    let mut report = RefineReport {
        accepted: 0,
        proposals: 0,
        initial_similarity: initial,
        final_similarity: initial,
    };
    if span < 2 {
        return Ok(report);
    }

    let mut rng = rng_from_seed(seed);
    let mut rejections = 0usize;
    while rejections < stagnation {
        let a = range.start + rng.random_range(0..span);
        let mut b = range.start + rng.random_range(0..span - 1);
        if b >= a {
            b += 1;
        }
        report.proposals += 1;
        let gain = state.delta_pair_swap_unchecked(pool, a, b);
        if is_improvement(gain, state.similarity()) {
            state.apply_pair_swap_unchecked(pool, a, b, gain);
            report.accepted += 1;
            rejections = 0;
            on_accept(a, b, gain, state.similarity());
        } else {
            rejections += 1;
        }
    }
    report.final_similarity = state.similarity();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elm::{projection_matrix, Activation, ElmModel, DEFAULT_RCOND};
    use crate::rng::rng_from_seed;
    use rand_distr::{Distribution, StandardNormal};

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    /// Small ELM instance: projection for `n` random 2-D points with `l` neurons.
    fn instance(n: usize, l: usize, d: usize, seed: u64) -> (DMatrix<f64>, DMatrix<f64>) {
        let v = random_matrix(n, 2, seed);
        let model = ElmModel::random(2, l, Activation::Tanh, seed + 1).unwrap();
        let a = projection_matrix(&model.hidden(&v).unwrap(), DEFAULT_RCOND).unwrap();
        (a, random_matrix(n, d, seed + 2))
    }

    fn direct_similarity(a: &DMatrix<f64>, x: &DMatrix<f64>) -> f64 {
        (x.transpose() * a * x).trace()
    }

    #[test]
    fn init_state_identity_and_zero() {
        let x = random_matrix(5, 3, 1);
        let s = SimilarityState::new(DMatrix::identity(5, 5), &x).unwrap();
        assert_eq!(s.predictions(), &x);
        assert!((s.similarity() - x.norm_squared()).abs() < 1e-12);

        let s = SimilarityState::new(DMatrix::zeros(5, 5), &x).unwrap();
        assert_eq!(s.similarity(), 0.0);
        assert!(s.predictions().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn init_state_matches_trace() {
        let a = random_matrix(8, 8, 3);
        let x = random_matrix(8, 3, 4);
        let s = SimilarityState::new(a.clone(), &x).unwrap();
        assert!((s.similarity() - direct_similarity(&a, &x)).abs() < 1e-10);
    }

    #[test]
    fn init_state_dimension_errors() {
        let x = random_matrix(4, 2, 0);
        assert!(SimilarityState::new(DMatrix::zeros(3, 3), &x).is_err());
        assert!(SimilarityState::new(DMatrix::zeros(4, 3), &x).is_err());
    }

    #[test]
    fn delta_row_zero_and_identity_cases() {
        let (a, x) = instance(10, 4, 3, 10);
        let s = SimilarityState::new(a, &x).unwrap();
        assert_eq!(s.delta_row(3, &[0.0, 0.0, 0.0]).unwrap(), 0.0);

        let x = random_matrix(4, 3, 12);
        let s = SimilarityState::new(DMatrix::identity(4, 4), &x).unwrap();
        let delta = [0.3, -1.2, 0.7];
        let row: Vec<f64> = x.row(2).iter().copied().collect();
        let before: f64 = row.iter().map(|v| v * v).sum();
        let after: f64 = row.iter().zip(&delta).map(|(v, d)| (v + d) * (v + d)).sum();
        assert!((s.delta_row(2, &delta).unwrap() - (after - before)).abs() < 1e-12);
    }

    #[test]
    fn delta_row_errors() {
        let (a, x) = instance(6, 3, 2, 5);
        let s = SimilarityState::new(a, &x).unwrap();
        assert!(s.delta_row(6, &[0.0, 0.0]).is_err());
        assert!(s.delta_row(0, &[0.0]).is_err());
        assert!(s.delta_row(0, &[f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn row_update_keeps_predictions_consistent_and_reverses() {
        let (a, mut x) = instance(12, 5, 3, 20);
        let mut s = SimilarityState::new(a.clone(), &x).unwrap();
        let s0 = s.similarity();
        let delta = [0.5, -0.25, 1.0];
        let predicted = s.delta_row(4, &delta).unwrap();
        s.apply_row_update(&mut x, 4, &delta).unwrap();
        assert!(s.prediction_drift(&x) < 1e-8 * (1.0 + x.norm()));
        assert!((s.similarity() - direct_similarity(&a, &x)).abs() < 1e-9);
        assert!((s.similarity() - s0 - predicted).abs() < 1e-12);

        let neg: Vec<f64> = delta.iter().map(|d| -d).collect();
        s.apply_row_update(&mut x, 4, &neg).unwrap();
        assert!((s.similarity() - s0).abs() < 1e-9);

        let before = s.similarity();
        s.apply_row_update(&mut x, 1, &[0.0; 3]).unwrap();
        assert_eq!(s.similarity(), before);
    }

    #[test]
    fn pair_swap_matches_sequential_row_updates_and_recomputation() {
        let (a, x) = instance(12, 5, 3, 30);
        let s = SimilarityState::new(a.clone(), &x).unwrap();
        let (ra, rb) = (2, 9);
        let pair = s.delta_pair_swap(&x, ra, rb).unwrap();

        let mut seq = s.clone();
        let mut xs = x.clone();
        let delta: Vec<f64> = (0..3).map(|j| x[(rb, j)] - x[(ra, j)]).collect();
        let neg: Vec<f64> = delta.iter().map(|d| -d).collect();
        let g1 = seq.apply_row_update(&mut xs, ra, &delta).unwrap();
        let g2 = seq.apply_row_update(&mut xs, rb, &neg).unwrap();
        assert!((pair - (g1 + g2)).abs() < 1e-12);

        let mut swapped = x.clone();
        swapped.swap_rows(ra, rb);
        let expect = direct_similarity(&a, &swapped) - direct_similarity(&a, &x);
        assert!((pair - expect).abs() <= 1e-8 * expect.abs().max(1.0));
    }

    #[test]
    fn pair_swap_identical_rows_and_involution() {
        let (a, mut x) = instance(10, 4, 3, 40);
        let row = x.row(1).into_owned();
        x.set_row(6, &row);
        let mut s = SimilarityState::new(a, &x).unwrap();
        let before_x = x.clone();
        let before_s = s.similarity();
        assert_eq!(s.delta_pair_swap(&x, 1, 6).unwrap(), 0.0);
        s.apply_pair_swap(&mut x, 1, 6).unwrap();
        assert!((s.similarity() - before_s).abs() < 1e-12);
        assert_eq!(x, before_x);

        let d1 = s.apply_pair_swap(&mut x, 0, 3).unwrap();
        let d2 = s.apply_pair_swap(&mut x, 0, 3).unwrap();
        assert!((d1 + d2).abs() < 1e-9);
        assert_eq!(x, before_x);
        assert!((s.similarity() - before_s).abs() < 1e-9);
    }

    #[test]
    fn pair_swap_errors() {
        let (a, x) = instance(5, 3, 2, 1);
        let s = SimilarityState::new(a, &x).unwrap();
        assert!(s.delta_pair_swap(&x, 2, 2).is_err());
        assert!(s.delta_pair_swap(&x, 0, 5).is_err());
    }

    #[test]
    fn resync_removes_drift() {
        let (a, mut x) = instance(15, 6, 4, 50);
        let mut s = SimilarityState::new(a.clone(), &x).unwrap();
        let mut rng = rng_from_seed(51);
        for _ in 0..5000 {
            let r = rng.random_range(0..15);
            let delta: Vec<f64> = (0..4).map(|_| rng.random_range(-0.1..0.1)).collect();
            s.apply_row_update(&mut x, r, &delta).unwrap();
        }
        let direct = direct_similarity(&a, &x);
        assert!((s.similarity() - direct).abs() <= 1e-6 * direct.abs());
        s.resync(&x).unwrap();
        assert!((s.similarity() - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        assert!(s.prediction_drift(&x) < 1e-10);
    }

    #[test]
    fn refine_single_element_range_is_noop() {
        let (a, mut x) = instance(6, 3, 2, 60);
        let mut s = SimilarityState::new(a, &x).unwrap();
        let r = elmvis_plus_run(&mut s, &mut x, 2..3, 100, 0).unwrap();
        assert_eq!(r.accepted, 0);
        assert_eq!(r.initial_similarity, r.final_similarity);
        assert!(elmvis_plus_run(&mut s, &mut x, 3..3, 100, 0).is_err());
        assert!(elmvis_plus_run(&mut s, &mut x, 0..7, 100, 0).is_err());
        assert!(elmvis_plus_run(&mut s, &mut x, 0..6, 0, 0).is_err());
    }

    #[test]
    fn refine_reaches_pairwise_local_optimum() {
        let (a, mut x) = instance(10, 4, 3, 70);
        let original = x.clone();
        let mut s = SimilarityState::new(a.clone(), &x).unwrap();
        let mut trace = AcceptanceTrace::new();
        let r = elmvis_plus_run_traced(&mut s, &mut x, 0..10, 1000, 71, Some(&mut trace)).unwrap();
        assert!(r.final_similarity >= r.initial_similarity);
        assert_eq!(trace.len(), r.accepted);
        for w in trace.records().windows(2) {
            assert!(w[1].similarity > w[0].similarity);
        }
        // exhaustive scan: no improving pair remains
        for i in 0..10 {
            for j in (i + 1)..10 {
                let mut y = x.clone();
                y.swap_rows(i, j);
                let gain = direct_similarity(&a, &y) - direct_similarity(&a, &x);
                assert!(gain <= 1e-9, "pair ({i},{j}) still improves by {gain}");
            }
        }
        // rows are a permutation of the original
        let mut left: Vec<Vec<u64>> = original
            .row_iter()
            .map(|r| r.iter().map(|v| v.to_bits()).collect())
            .collect();
        let mut right: Vec<Vec<u64>> = x.row_iter().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
        left.sort();
        right.sort();
        assert_eq!(left, right);

        // second run from the optimum accepts nothing
        let again = elmvis_plus_run(&mut s, &mut x, 0..10, 1000, 72).unwrap();
        assert_eq!(again.accepted, 0);
    }

    #[test]
    fn trace_csv_layout() {
        let mut t = AcceptanceTrace::new();
        t.push(TraceRecord {
            step: 0,
            a: 1,
            b: 2,
            delta: 0.5,
            similarity: 3.0,
        });
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,a,b,delta,similarity");
        assert_eq!(lines[1], "0,1,2,5.0000000000000000e-1,3.0000000000000000e0");
    }
}
