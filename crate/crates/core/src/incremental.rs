//! Incremental growth of the in-model sample set.
//!
//! Samples (rows of the data pool `X`) are split into three contiguous groups
//! by two boundaries:
//!
//! ```text
//! positions  [0, fixed)        fixed      never moved again
//!            [fixed, in_model) candidates currently optimized
//!            [in_model, N)     available  pool, ignored by the criterion
//! ```
//!
//! Boundaries are zero-based and half-open. In 1-based inclusive terms the
//! candidate range `[fixed, in_model)` is `[i_A + 1, i_B]` and the available
//! range `[in_model, N)` is `[i_B + 1, N]`.
//!
//! A candidate step proposes replacing a random candidate with a random
//! available sample and keeps the exchange if it raises the similarity. When a
//! long run of proposals brings no improvement, the candidates are promoted to
//! fixed, the next batch of pool samples becomes the new candidates, and the
//! model grows to cover them. Only the `in_model × in_model` projection is ever
//! materialized.

use std::io::Write;
use std::sync::mpsc::Sender;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::elm::{projection_matrix, solve_output_weights, Activation, ElmModel, DEFAULT_RCOND};
use crate::error::{arg_err, ElmvisError, Result};
use crate::format::sig17;
use crate::rng::{derive_seed, rng_from_seed, Rng};
use crate::swap::{
    default_refine_stagnation, is_improvement, pair_swap_search, AcceptanceTrace, RefineReport, SimilarityState,
    SwapOutcome, TraceRecord,
};

const STREAM_MODEL: u64 = 1;
const STREAM_PROPOSAL: u64 = 2;
const STREAM_REFINE: u64 = 3;
const STREAM_SLOTS: u64 = 4;

pub const DEFAULT_BATCH_SIZE: usize = 8;
pub const MIN_NEURONS: usize = 4;
pub const MAX_NEURONS: usize = 256;

/// Neuron count for `in_model` samples: `clamp(ceil(in_model / 4), 4, 256)`.
pub fn default_neuron_schedule(in_model: usize) -> usize {
    in_model.div_ceil(4).clamp(MIN_NEURONS, MAX_NEURONS)
}

/// Default number of consecutive rejected candidate proposals before promotion.
pub fn default_candidate_stagnation(candidates: usize) -> usize {
    500.max(10 * candidates)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeuronSchedule {
    /// [`default_neuron_schedule`]
    Growing,
    Fixed(usize),
}

impl NeuronSchedule {
    pub fn neurons(&self, in_model: usize) -> usize {
        match *self {
            NeuronSchedule::Growing => default_neuron_schedule(in_model),
            NeuronSchedule::Fixed(l) => l,
        }
    }
}

/// Order in which visualization points are opened for filling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotOrder {
    /// Rows of `V` in file order.
    Given,
    /// A seeded random order, so that growth does not sweep a grid row by row.
    Shuffled,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Candidates admitted per promotion (`k`).
    pub batch_size: usize,
    /// Consecutive rejected candidate proposals before promotion; `None` uses
    /// [`default_candidate_stagnation`].
    pub candidate_stagnation: Option<usize>,
    /// Stagnation window for pair-swap refinement; `None` uses
    /// [`default_refine_stagnation`].
    pub refine_stagnation: Option<usize>,
    pub neuron_schedule: NeuronSchedule,
    /// Run pair-swap refinement over all in-model samples after each batch.
    pub refine_each_iteration: bool,
    pub activation: Activation,
    pub rcond: f64,
    pub seed: u64,
    /// Known `(v_row, x_row)` correspondences pinned as fixed before the run.
    pub initial_pairs: Vec<(usize, usize)>,
    /// Stop once this many positions are filled. `None` fills every row of `V`.
    pub max_samples: Option<usize>,
    pub slot_order: SlotOrder,
    /// Keep a log of every accepted move, per iteration.
    pub record_trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            batch_size: DEFAULT_BATCH_SIZE,
            candidate_stagnation: None,
            refine_stagnation: None,
            neuron_schedule: NeuronSchedule::Growing,
            refine_each_iteration: false,
            activation: Activation::Tanh,
            rcond: DEFAULT_RCOND,
            seed: 0,
            initial_pairs: Vec::new(),
            max_samples: None,
            slot_order: SlotOrder::Shuffled,
            record_trace: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return arg_err("batch size k must be at least 1");
        }
        if self.candidate_stagnation == Some(0) || self.refine_stagnation == Some(0) {
            return arg_err("stagnation windows must be at least 1");
        }
        if let NeuronSchedule::Fixed(0) = self.neuron_schedule {
            return arg_err("fixed neuron count must be at least 1");
        }
        if !(self.rcond > 0.0 && self.rcond.is_finite()) {
            return arg_err("rcond must be positive and finite");
        }
        if self.max_samples == Some(0) {
            return arg_err("max_samples must be at least 1");
        }
        Ok(())
    }
}

/// Assignment of pool samples to positions plus the fixed/candidate boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    perm: Vec<usize>,
    fixed: usize,
    in_model: usize,
}

impl Partition {
    /// Identity assignment over `n` samples with nothing fixed.
    pub fn new(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            fixed: 0,
            in_model: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// `perm[position]` is the index of the sample at that position.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Number of fixed samples (`i_A`).
    pub fn fixed(&self) -> usize {
        self.fixed
    }

    /// Number of fixed plus candidate samples (`i_B`).
    pub fn in_model(&self) -> usize {
        self.in_model
    }

    pub fn candidates(&self) -> std::ops::Range<usize> {
        self.fixed..self.in_model
    }

    pub fn available(&self) -> std::ops::Range<usize> {
        self.in_model..self.perm.len()
    }

    /// Pins `(position, sample)` pairs as the fixed prefix.
    ///
    /// The positions of `m` pairs must be exactly `0..m` in some order; each
    /// sample is moved to its position and `fixed = in_model = m`.
    pub fn seed_fixed(&mut self, pairs: &[(usize, usize)]) -> Result<()> {
        if self.fixed != 0 || self.in_model != 0 {
            return Err(ElmvisError::State("seeding requires an untouched partition".into()));
        }
        let m = pairs.len();
        let n = self.perm.len();
        let mut seen_pos = vec![false; m];
        let mut seen_sample = vec![false; n];
        for &(p, s) in pairs {
            if p >= m {
                return arg_err(format!("seed position {p} outside the fixed prefix 0..{m}"));
            }
            if s >= n {
                return arg_err(format!("seed sample {s} out of range for {n} samples"));
            }
            if std::mem::replace(&mut seen_pos[p], true) {
                return arg_err(format!("seed position {p} appears twice"));
            }
            if std::mem::replace(&mut seen_sample[s], true) {
                return arg_err(format!("seed sample {s} appears twice"));
            }
        }
        let mut where_is: Vec<usize> = vec![0; n];
        for (pos, &s) in self.perm.iter().enumerate() {
            where_is[s] = pos;
        }
        for &(p, s) in pairs {
            let from = where_is[s];
            let displaced = self.perm[p];
            self.perm.swap(p, from);
            where_is[s] = p;
            where_is[displaced] = from;
        }
        self.fixed = m;
        self.in_model = m;
        Ok(())
    }

    /// Freezes the current candidates and opens up to `k` new ones, never past `cap`.
    pub fn advance(&mut self, k: usize, cap: usize) {
        let cap = cap.min(self.perm.len());
        self.fixed = self.in_model;
        self.in_model = (self.in_model + k).min(cap).max(self.fixed);
    }

    /// Marks every in-model sample as fixed.
    pub fn finalize(&mut self) {
        self.fixed = self.in_model;
    }

    pub(crate) fn exchange(&mut self, a: usize, b: usize) {
        self.perm.swap(a, b);
    }
}

/// Picks a candidate position and an available position uniformly at random.
pub fn propose_candidate_swap(rng: &mut Rng, partition: &Partition) -> Result<(usize, usize)> {
    let cand = partition.candidates();
    let avail = partition.available();
    if cand.is_empty() {
        return Err(ElmvisError::State("no candidate samples to replace".into()));
    }
    if avail.is_empty() {
        return Err(ElmvisError::State("no available samples left in the pool".into()));
    }
    let a = rng.random_range(cand);
    let b = rng.random_range(avail);
    Ok((a, b))
}

/// One candidate/available exchange proposal.
///
/// Only the candidate row enters the criterion: `δ = x_b − x_a` is scored on
/// row `a` alone. On acceptance the two rows and their permutation entries are
/// exchanged, so the displaced sample returns to the pool.
pub fn candidate_step(
    state: &mut SimilarityState,
    pool: &mut DMatrix<f64>,
    partition: &mut Partition,
    rng: &mut Rng,
) -> Result<SwapOutcome> {
    if state.len() != partition.in_model() {
        return Err(ElmvisError::State(format!(
            "state covers {} rows but partition has {} in model",
            state.len(),
            partition.in_model()
        )));
    }
    if pool.nrows() != partition.len() {
        return arg_err("pool row count differs from partition size");
    }
    let (a, b) = propose_candidate_swap(rng, partition)?;
    let delta: Vec<f64> = (0..pool.ncols()).map(|j| pool[(b, j)] - pool[(a, j)]).collect();
    let gain = state.delta_row_unchecked(a, &delta);
    let accepted = is_improvement(gain, state.similarity());
    if accepted {
        state.apply_exchange_with_outside(pool, a, b, &delta, gain);
        partition.exchange(a, b);
    }
    Ok(SwapOutcome {
        accepted,
        delta: gain,
        swap: (a, b),
    })
}

/// Snapshot emitted after each batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProgressRecord {
    pub iteration: usize,
    pub fixed: usize,
    pub in_model: usize,
    pub neurons: usize,
    pub similarity: f64,
    pub accepted_swaps: usize,
}

impl ProgressRecord {
    /// One JSON object with keys `iteration, i_A, i_B, L, S, accepted_swaps`.
    pub fn to_json_line(&self) -> String {
        format!(
            "{{\"iteration\":{},\"i_A\":{},\"i_B\":{},\"L\":{},\"S\":{},\"accepted_swaps\":{}}}",
            self.iteration,
            self.fixed,
            self.in_model,
            self.neurons,
            sig17(self.similarity),
            self.accepted_swaps
        )
    }
}

pub trait ProgressSink {
    fn record(&mut self, record: &ProgressRecord) -> Result<()>;
}

impl ProgressSink for Vec<ProgressRecord> {
    fn record(&mut self, record: &ProgressRecord) -> Result<()> {
        self.push(*record);
        Ok(())
    }
}

/// Forwards snapshots to another thread. A dropped receiver is ignored.
impl ProgressSink for Sender<ProgressRecord> {
    fn record(&mut self, record: &ProgressRecord) -> Result<()> {
        let _ = self.send(*record);
        Ok(())
    }
}

/// Writes one JSON object per line.
pub struct JsonLinesSink<W: Write> {
    out: W,
}

impl<W: Write> JsonLinesSink<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> ProgressSink for JsonLinesSink<W> {
    fn record(&mut self, record: &ProgressRecord) -> Result<()> {
        writeln!(self.out, "{}", record.to_json_line()).map_err(|source| ElmvisError::Io {
            path: "<progress sink>".into(),
            source,
        })
    }
}

struct NullSink;

impl ProgressSink for NullSink {
    fn record(&mut self, _: &ProgressRecord) -> Result<()> {
        Ok(())
    }
}

/// Accounting of live projection-matrix storage, in matrix elements.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ProjectionMeter {
    live: usize,
    peak: usize,
}

impl ProjectionMeter {
    fn allocate(&mut self, elements: usize) {
        self.live += elements;
        self.peak = self.peak.max(self.live);
    }

    fn release(&mut self, elements: usize) {
        self.live -= elements;
    }

    pub fn live(&self) -> usize {
        self.live
    }

    pub fn peak(&self) -> usize {
        self.peak
    }
}

/// What happened during one batch (between two promotions).
#[derive(Debug, Clone)]
pub struct IterationReport {
    pub iteration: usize,
    pub fixed: usize,
    pub in_model: usize,
    pub neurons: usize,
    pub initial_similarity: f64,
    /// Similarity after the candidate loop, before refinement.
    pub candidate_similarity: f64,
    pub final_similarity: f64,
    pub candidate_proposals: usize,
    pub accepted_candidate_swaps: usize,
    pub refinement: Option<RefineReport>,
    /// Accepted moves in order, when tracing is enabled.
    pub trace: Option<AcceptanceTrace>,
    /// Class-free snapshot of the in-model assignment (position → sample),
    /// taken at the end of the batch, when tracing is enabled.
    pub assignment: Option<Vec<usize>>,
}

impl IterationReport {
    pub fn accepted_swaps(&self) -> usize {
        self.accepted_candidate_swaps + self.refinement.map_or(0, |r| r.accepted)
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    /// `final_perm[v_row]` is the sample placed at row `v_row` of `V`.
    /// Rows that were never opened (when `max_samples < N`) hold leftover samples.
    pub final_perm: Vec<usize>,
    /// Rows of `V` in the order they were opened; the first `placed` are filled.
    pub slot_order: Vec<usize>,
    pub placed: usize,
    /// `(in_model, S)` at the start and end of each batch.
    pub s_history: Vec<(usize, f64)>,
    pub iterations: Vec<IterationReport>,
    pub model: ElmModel,
    pub model_seed: u64,
    /// Output weights of the final model over the placed samples.
    pub beta: DMatrix<f64>,
    pub similarity: f64,
    pub projection_meter: ProjectionMeter,
}

impl FitResult {
    /// Rows of `V` that received a sample.
    pub fn placed_rows(&self) -> &[usize] {
        &self.slot_order[..self.placed]
    }
}

/// State of an incremental fit in progress.
///
/// Positions are slots: slot `i` is row `slot_order[i]` of the caller's `V`.
pub struct IncrementalRun {
    config: RunConfig,
    v_slots: DMatrix<f64>,
    slot_order: Vec<usize>,
    pool: DMatrix<f64>,
    partition: Partition,
    cap: usize,
    model_seed: u64,
    model: Option<ElmModel>,
    state: Option<SimilarityState>,
    rng: Rng,
    promotions: u64,
    meter: ProjectionMeter,
}

impl IncrementalRun {
    /// Arranges slots, applies seed pairs, and copies `X` into the working pool.
    pub fn new(v: &DMatrix<f64>, x: &DMatrix<f64>, config: RunConfig) -> Result<Self> {
        config.validate()?;
        let n = v.nrows();
        if n == 0 || v.ncols() == 0 || x.ncols() == 0 {
            return arg_err("inputs must be non-empty");
        }
        if x.nrows() != n {
            return arg_err(format!("V has {n} rows but X has {}", x.nrows()));
        }
        if v.iter().chain(x.iter()).any(|e| !e.is_finite()) {
            return Err(ElmvisError::Numeric("inputs contain non-finite values".into()));
        }
        let cap = config.max_samples.unwrap_or(n).min(n);
        let pairs = &config.initial_pairs;
        if pairs.len() > cap {
            return arg_err(format!("{} seed pairs exceed the {cap} positions to fill", pairs.len()));
        }

        let mut seeded = vec![false; n];
        for &(vr, _) in pairs {
            if vr >= n {
                return arg_err(format!("seed row {vr} out of range for {n} points"));
            }
            if std::mem::replace(&mut seeded[vr], true) {
                return arg_err(format!("seed row {vr} appears twice"));
            }
        }
        let mut rest: Vec<usize> = (0..n).filter(|&r| !seeded[r]).collect();
        if config.slot_order == SlotOrder::Shuffled {
            rest.shuffle(&mut rng_from_seed(derive_seed(config.seed, STREAM_SLOTS, 0)));
        }
        let slot_order: Vec<usize> = pairs.iter().map(|&(vr, _)| vr).chain(rest).collect();
        let v_slots = DMatrix::from_fn(n, v.ncols(), |i, j| v[(slot_order[i], j)]);

        let mut partition = Partition::new(n);
        let slot_pairs: Vec<(usize, usize)> = pairs.iter().enumerate().map(|(i, &(_, s))| (i, s)).collect();
        partition.seed_fixed(&slot_pairs)?;
        let pool = DMatrix::from_fn(n, x.ncols(), |i, j| x[(partition.perm()[i], j)]);

        Ok(Self {
            model_seed: derive_seed(config.seed, STREAM_MODEL, 0),
            rng: rng_from_seed(derive_seed(config.seed, STREAM_PROPOSAL, 0)),
            config,
            v_slots,
            slot_order,
            pool,
            partition,
            cap,
            model: None,
            state: None,
            promotions: 0,
            meter: ProjectionMeter::default(),
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn pool(&self) -> &DMatrix<f64> {
        &self.pool
    }

    pub fn slot_inputs(&self) -> &DMatrix<f64> {
        &self.v_slots
    }

    pub fn state(&self) -> Option<&SimilarityState> {
        self.state.as_ref()
    }

    pub fn model(&self) -> Option<&ElmModel> {
        self.model.as_ref()
    }

    pub fn projection_meter(&self) -> ProjectionMeter {
        self.meter
    }

    /// Positions that will be filled before the run stops.
    pub fn capacity(&self) -> usize {
        self.cap
    }

    pub fn is_complete(&self) -> bool {
        self.partition.fixed() >= self.cap
    }

    /// Freezes the candidates, opens the next batch and rebuilds the model
    /// over the first `in_model` slots.
    pub fn promote(&mut self) -> Result<()> {
        self.partition.advance(self.config.batch_size, self.cap);
        self.promotions += 1;
        self.rebuild()
    }

    fn rebuild(&mut self) -> Result<()> {
        if let Some(old) = self.state.take() {
            self.meter.release(old.len() * old.len());
        }
        let n = self.partition.in_model();
        if n == 0 {
            return Ok(());
        }
        let neurons = self.config.neuron_schedule.neurons(n);
        if self.model.as_ref().map(ElmModel::neurons) != Some(neurons) {
            self.model = Some(ElmModel::random(
                self.v_slots.ncols(),
                neurons,
                self.config.activation,
                self.model_seed,
            )?);
        }
        let model = self.model.as_ref().expect("model just built");
        let h = model.hidden(&self.v_slots.rows(0, n).into_owned())?;
        self.meter.allocate(n * n);
        let a = projection_matrix(&h, self.config.rcond)?;
        self.state = Some(SimilarityState::from_pool_prefix(a, &self.pool)?);
        Ok(())
    }

    /// One candidate/available proposal.
    pub fn candidate_step(&mut self) -> Result<SwapOutcome> {
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| ElmvisError::State("no model built yet; promote first".into()))?;
        candidate_step(state, &mut self.pool, &mut self.partition, &mut self.rng)
    }

    /// Runs candidate proposals until the stagnation window passes with no
    /// acceptance. When the pool is exhausted, the candidates are arranged
    /// among themselves with pair swaps instead.
    fn optimize_candidates(&mut self, trace: Option<&mut AcceptanceTrace>) -> Result<(usize, usize)> {
        let cand = self.partition.candidates();
        if cand.is_empty() {
            return Ok((0, 0));
        }
        if self.partition.available().is_empty() {
            if cand.len() < 2 {
                return Ok((0, 0));
            }
            let window = self
                .config
                .refine_stagnation
                .unwrap_or_else(|| default_refine_stagnation(cand.len()));
            let seed = derive_seed(self.config.seed, STREAM_REFINE, 2 * self.promotions + 1);
            let report = self.pair_swaps(cand, window, seed, trace)?;
            return Ok((report.proposals, report.accepted));
        }

        let window = self
            .config
            .candidate_stagnation
            .unwrap_or_else(|| default_candidate_stagnation(cand.len()));
        let mut trace = trace;
        let mut rejections = 0;
        let mut proposals = 0;
        let mut accepted = 0;
        let mut step = trace.as_ref().map_or(0, |t| t.len() as u64);
        while rejections < window {
            let outcome = self.candidate_step()?;
            proposals += 1;
            if outcome.accepted {
                accepted += 1;
                rejections = 0;
                if let Some(t) = trace.as_deref_mut() {
                    t.push(TraceRecord {
                        step,
                        a: outcome.swap.0,
                        b: outcome.swap.1,
                        delta: outcome.delta,
                        similarity: self.state.as_ref().map_or(0.0, SimilarityState::similarity),
                    });
                    step += 1;
                }
            } else {
                rejections += 1;
            }
        }
        Ok((proposals, accepted))
    }

    /// Pair-swap refinement over every in-model sample.
    pub fn refine(&mut self) -> Result<RefineReport> {
        self.refine_traced(None)
    }

    fn refine_traced(&mut self, trace: Option<&mut AcceptanceTrace>) -> Result<RefineReport> {
        let n = self.partition.in_model();
        let window = self
            .config
            .refine_stagnation
            .unwrap_or_else(|| default_refine_stagnation(n));
        let seed = derive_seed(self.config.seed, STREAM_REFINE, 2 * self.promotions);
        self.pair_swaps(0..n, window, seed, trace)
    }

    /// Pair swaps over in-model positions `range`, keeping the permutation in step.
    fn pair_swaps(
        &mut self,
        range: std::ops::Range<usize>,
        window: usize,
        seed: u64,
        mut trace: Option<&mut AcceptanceTrace>,
    ) -> Result<RefineReport> {
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| ElmvisError::State("no model built yet; promote first".into()))?;
        let perm = &mut self.partition.perm;
        let mut step = trace.as_ref().map_or(0, |t| t.len() as u64);
        pair_swap_search(
            state,
            &mut self.pool,
            range,
            window,
            seed,
            &mut |a, b, delta, similarity| {
                perm.swap(a, b);
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
            },
        )
    }

    /// Runs one batch: candidate loop, optional refinement.
    pub fn iterate(&mut self, iteration: usize) -> Result<IterationReport> {
        let initial = self.state.as_ref().map_or(0.0, SimilarityState::similarity);
        let mut trace = self.config.record_trace.then(AcceptanceTrace::new);
        let (proposals, accepted) = self.optimize_candidates(trace.as_mut())?;
        let candidate_similarity = self.state.as_ref().map_or(0.0, SimilarityState::similarity);
        let refinement = if self.config.refine_each_iteration && self.partition.in_model() >= 2 {
            Some(self.refine_traced(trace.as_mut())?)
        } else {
            None
        };
        let final_similarity = self.state.as_ref().map_or(0.0, SimilarityState::similarity);
        Ok(IterationReport {
            iteration,
            fixed: self.partition.fixed(),
            in_model: self.partition.in_model(),
            neurons: self.model.as_ref().map_or(0, ElmModel::neurons),
            initial_similarity: initial,
            candidate_similarity,
            final_similarity,
            candidate_proposals: proposals,
            accepted_candidate_swaps: accepted,
            refinement,
            assignment: self
                .config
                .record_trace
                .then(|| self.partition.perm()[..self.partition.in_model()].to_vec()),
            trace,
        })
    }

    /// Drives batches until every position up to the cap is fixed.
    pub fn run_to_completion(mut self, sink: &mut dyn ProgressSink) -> Result<FitResult> {
        let mut iterations = Vec::new();
        let mut s_history = Vec::new();
        loop {
            self.promote()?;
            if self.partition.candidates().is_empty() {
                break;
            }
            let report = self.iterate(iterations.len())?;
            s_history.push((report.in_model, report.initial_similarity));
            s_history.push((report.in_model, report.final_similarity));
            sink.record(&ProgressRecord {
                iteration: report.iteration,
                fixed: report.fixed,
                in_model: report.in_model,
                neurons: report.neurons,
                similarity: report.final_similarity,
                accepted_swaps: report.accepted_swaps(),
            })?;
            iterations.push(report);
            if self.partition.in_model() >= self.cap {
                self.partition.finalize();
                break;
            }
        }
        self.finish(s_history, iterations)
    }

    fn finish(mut self, s_history: Vec<(usize, f64)>, iterations: Vec<IterationReport>) -> Result<FitResult> {
        let placed = self.partition.in_model();
        if self.state.is_none() || self.model.is_none() {
            self.rebuild()?;
        }
        let model = match self.model.take() {
            Some(m) => m,
            None => ElmModel::random(
                self.v_slots.ncols(),
                self.config.neuron_schedule.neurons(placed.max(1)),
                self.config.activation,
                self.model_seed,
            )?,
        };
        let h = model.hidden(&self.v_slots.rows(0, placed).into_owned())?;
        let beta = solve_output_weights(&h, &self.pool.rows(0, placed).into_owned(), self.config.rcond)?;
        let similarity = self.state.as_ref().map_or(0.0, SimilarityState::similarity);
        let mut final_perm = vec![0; self.partition.len()];
        for (slot, &sample) in self.partition.perm().iter().enumerate() {
            final_perm[self.slot_order[slot]] = sample;
        }
        Ok(FitResult {
            final_perm,
            slot_order: self.slot_order,
            placed,
            s_history,
            iterations,
            model,
            model_seed: self.model_seed,
            beta,
            similarity,
            projection_meter: self.meter,
        })
    }
}

/// Incremental fit of the rows of `X` to the rows of `V`.
pub fn run(v: &DMatrix<f64>, x: &DMatrix<f64>, config: RunConfig) -> Result<FitResult> {
    IncrementalRun::new(v, x, config)?.run_to_completion(&mut NullSink)
}

/// [`run`] reporting a [`ProgressRecord`] after every batch.
pub fn run_with_progress(
    v: &DMatrix<f64>,
    x: &DMatrix<f64>,
    config: RunConfig,
    sink: &mut dyn ProgressSink,
) -> Result<FitResult> {
    IncrementalRun::new(v, x, config)?.run_to_completion(sink)
}
