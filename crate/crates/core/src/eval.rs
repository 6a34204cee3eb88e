//! Ground-truth oracles and experiment metrics.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::elm::{projection_matrix, solve_output_weights, Activation, ElmModel, DEFAULT_RCOND};
use crate::error::{arg_err, ElmvisError, Result};
use crate::format::Sig17;
use crate::rng::{derive_seed, rng_from_seed};
use crate::swap::SimilarityState;

/// Largest class count the exhaustive permutation search accepts.
pub const MAX_EXACT_CLASSES: usize = 10;

/// Similarity recomputed from scratch: `H`, least-squares `β = H†X`,
/// `X̂ = H·β`, and `S = Σ X̂∘X`. No incremental state is involved.
pub fn oracle_similarity(model: &ElmModel, v: &DMatrix<f64>, x: &DMatrix<f64>, rcond: f64) -> Result<f64> {
    if v.nrows() != x.nrows() {
        return arg_err(format!("V has {} rows but X has {}", v.nrows(), x.nrows()));
    }
    let h = model.hidden(v)?;
    let beta = solve_output_weights(&h, x, rcond)?;
    let xhat = h * beta;
    Ok(xhat.component_mul(x).sum())
}

/// Agreement between a running similarity and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleReport {
    pub s_direct: f64,
    pub s_incremental: f64,
    pub rel_error: f64,
}

impl OracleReport {
    pub fn new(s_direct: f64, s_incremental: f64) -> Self {
        Self {
            s_direct,
            s_incremental,
            rel_error: (s_direct - s_incremental).abs() / s_direct.abs().max(1e-10),
        }
    }
}

/// Error of a closed-form delta against an oracle difference: relative, with
/// an absolute floor of `1e-10` at the `1e-8` level.
pub fn delta_error(formula: f64, oracle: f64) -> f64 {
    (formula - oracle).abs() / oracle.abs().max(1e-2)
}

/// Outcome of one randomized oracle trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleTrial {
    pub n: usize,
    pub neurons: usize,
    pub dim: usize,
    pub row_delta_error: f64,
    pub pair_delta_error: f64,
    pub running: OracleReport,
}

impl OracleTrial {
    pub fn max_error(&self) -> f64 {
        self.row_delta_error
            .max(self.pair_delta_error)
            .max(self.running.rel_error)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSummary {
    pub trials: Vec<OracleTrial>,
    pub max_rel_error: f64,
}

fn gaussian(rows: usize, cols: usize, rng: &mut crate::rng::Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// One randomized instance (`n ≤ 30`, `L ≤ 10`, `d ≤ 6`): checks a row delta
/// and a pair-swap delta against oracle differences, then applies `updates`
/// random moves and compares the running similarity with the oracle.
pub fn oracle_trial(seed: u64, updates: usize) -> Result<OracleTrial> {
    let mut rng = rng_from_seed(seed);
    let n = rng.random_range(2..=30);
    let neurons = rng.random_range(1..=10);
    let dim = rng.random_range(1..=6);
    let v_dim = rng.random_range(2..=3);
    let v = gaussian(n, v_dim, &mut rng);
    let mut x = gaussian(n, dim, &mut rng);
    let model = ElmModel::random(v_dim, neurons, Activation::Tanh, derive_seed(seed, 0, 0))?;
    let a = projection_matrix(&model.hidden(&v)?, DEFAULT_RCOND)?;
    let mut state = SimilarityState::new(a, &x)?;
    let s0 = oracle_similarity(&model, &v, &x, DEFAULT_RCOND)?;

    let row = rng.random_range(0..n);
    let delta: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut changed = x.clone();
    for (j, d) in delta.iter().enumerate() {
        changed[(row, j)] += d;
    }
    let row_oracle = oracle_similarity(&model, &v, &changed, DEFAULT_RCOND)? - s0;
    let row_delta_error = delta_error(state.delta_row(row, &delta)?, row_oracle);

    let a_row = rng.random_range(0..n);
    let b_row = (a_row + rng.random_range(1..n)) % n;
    let mut swapped = x.clone();
    swapped.swap_rows(a_row, b_row);
    let pair_oracle = oracle_similarity(&model, &v, &swapped, DEFAULT_RCOND)? - s0;
    let pair_delta_error = delta_error(state.delta_pair_swap(&x, a_row, b_row)?, pair_oracle);

    for _ in 0..updates {
        if rng.random_bool(0.5) {
            let r = rng.random_range(0..n);
            let d: Vec<f64> = (0..dim)
                .map(|_| 0.3 * Distribution::<f64>::sample(&StandardNormal, &mut rng))
                .collect();
            state.apply_row_update(&mut x, r, &d)?;
        } else {
            let a = rng.random_range(0..n);
            let b = (a + rng.random_range(1..n)) % n;
            state.apply_pair_swap(&mut x, a, b)?;
        }
    }
    let running = OracleReport::new(oracle_similarity(&model, &v, &x, DEFAULT_RCOND)?, state.similarity());
    Ok(OracleTrial {
        n,
        neurons,
        dim,
        row_delta_error,
        pair_delta_error,
        running,
    })
}

/// Runs `trials` independent oracle trials with seeds derived from `seed`.
pub fn oracle_trials(trials: usize, seed: u64, updates: usize) -> Result<OracleSummary> {
    let trials = (0..trials)
        .map(|t| oracle_trial(derive_seed(seed, 0x0AC1E, t as u64), updates))
        .collect::<Result<Vec<_>>>()?;
    let max_rel_error = trials.iter().map(OracleTrial::max_error).fold(0.0, f64::max);
    Ok(OracleSummary { trials, max_rel_error })
}

/// Counts of true class (row) against assigned class (column).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let k = counts.len();
        if counts.iter().any(|r| r.len() != k) {
            return arg_err("confusion matrix must be square");
        }
        Ok(Self { counts })
    }

    pub fn classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    /// Rows divided by their sums, in percent. Empty rows stay zero.
    pub fn percentages(&self) -> Vec<Vec<f64>> {
        self.counts
            .iter()
            .map(|row| {
                let sum: u64 = row.iter().sum();
                row.iter()
                    .map(|&c| if sum == 0 { 0.0 } else { 100.0 * c as f64 / sum as f64 })
                    .collect()
            })
            .collect()
    }

    /// Headerless CSV of the integer counts.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.counts {
            let fields: Vec<String> = row.iter().map(u64::to_string).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn confusion(true_labels: &[usize], assigned_labels: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if true_labels.len() != assigned_labels.len() {
        return arg_err(format!(
            "{} true labels but {} assigned labels",
            true_labels.len(),
            assigned_labels.len()
        ));
    }
    let mut counts = vec![vec![0u64; k]; k];
    for (&t, &a) in true_labels.iter().zip(assigned_labels) {
        if t >= k || a >= k {
            return arg_err(format!("label pair ({t}, {a}) out of range for {k} classes"));
        }
        counts[t][a] += 1;
    }
    Ok(ConfusionMatrix { counts })
}

/// Exhaustive search for the column permutation `π` maximizing
/// `Σ_i counts[i][π(i)]`. Returns `(accuracy, π)`; among optimal
/// permutations the lexicographically smallest is returned.
pub fn best_permutation_accuracy(cm: &ConfusionMatrix) -> Result<(f64, Vec<usize>)> {
    let k = cm.classes();
    if k > MAX_EXACT_CLASSES {
        return Err(ElmvisError::Capability(format!(
            "{k} classes exceed the exhaustive limit of {MAX_EXACT_CLASSES}; reduce the class count"
        )));
    }
    let total = cm.total();
    if k == 0 {
        return Ok((0.0, Vec::new()));
    }
    // suffix bound: best case for rows i.. ignoring column conflicts
    let row_max: Vec<u64> = cm.counts.iter().map(|r| r.iter().copied().max().unwrap_or(0)).collect();
    let mut bound = vec![0u64; k + 1];
    for i in (0..k).rev() {
        bound[i] = bound[i + 1] + row_max[i];
    }

    struct Search<'a> {
        counts: &'a [Vec<u64>],
        bound: &'a [u64],
        used: Vec<bool>,
        current: Vec<usize>,
        best_sum: Option<u64>,
        best: Vec<usize>,
    }
    impl Search<'_> {
        fn go(&mut self, row: usize, sum: u64) {
            let k = self.counts.len();
            if row == k {
                if self.best_sum.is_none_or(|b| sum > b) {
                    self.best_sum = Some(sum);
                    self.best.clone_from(&self.current);
                }
                return;
            }
            if self.best_sum.is_some_and(|b| sum + self.bound[row] <= b) {
                return;
            }
            for col in 0..k {
                if !self.used[col] {
                    self.used[col] = true;
                    self.current.push(col);
                    self.go(row + 1, sum + self.counts[row][col]);
                    self.current.pop();
                    self.used[col] = false;
                }
            }
        }
    }
    let mut search = Search {
        counts: &cm.counts,
        bound: &bound,
        used: vec![false; k],
        current: Vec::with_capacity(k),
        best_sum: None,
        best: Vec::new(),
    };
    search.go(0, 0);
    let best_sum = search.best_sum.unwrap_or(0);
    let accuracy = if total == 0 {
        0.0
    } else {
        best_sum as f64 / total as f64
    };
    Ok((accuracy, search.best))
}

/// Class-level and sample-level agreement of an arrangement with ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReconstructionScore {
    /// Fraction of positions whose sample has the class of the true sample.
    pub class_level: f64,
    /// Fraction of positions holding exactly the true sample.
    pub sample_exact: f64,
}

/// `final_perm[p]` and `truth_perm[p]` are the placed and the correct sample at
/// position `p`; `labels[s]` is the class of sample `s`.
pub fn reconstruction_accuracy(
    final_perm: &[usize],
    truth_perm: &[usize],
    labels: &[usize],
) -> Result<ReconstructionScore> {
    if final_perm.len() != truth_perm.len() {
        return arg_err(format!(
            "arrangement has {} positions, ground truth has {}",
            final_perm.len(),
            truth_perm.len()
        ));
    }
    if let Some(&bad) = final_perm.iter().chain(truth_perm).find(|&&s| s >= labels.len()) {
        return arg_err(format!("sample {bad} has no label ({} labels)", labels.len()));
    }
    if final_perm.is_empty() {
        return Ok(ReconstructionScore {
            class_level: 0.0,
            sample_exact: 0.0,
        });
    }
    let n = final_perm.len() as f64;
    let class_hits = final_perm
        .iter()
        .zip(truth_perm)
        .filter(|(&f, &t)| labels[f] == labels[t])
        .count();
    let exact_hits = final_perm.iter().zip(truth_perm).filter(|(f, t)| f == t).count();
    Ok(ReconstructionScore {
        class_level: class_hits as f64 / n,
        sample_exact: exact_hits as f64 / n,
    })
}

/// Document written as `metrics.json`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Metrics {
    pub confusion: Option<Vec<Vec<u64>>>,
    pub best_perm: Option<Vec<usize>>,
    pub accuracy: Option<Sig17>,
    #[serde(rename = "S_history")]
    pub s_history: Vec<(usize, Sig17)>,
}

impl Metrics {
    pub fn new(s_history: &[(usize, f64)]) -> Self {
        Self {
            s_history: s_history.iter().map(|&(i, s)| (i, Sig17(s))).collect(),
            ..Self::default()
        }
    }

    pub fn with_confusion(mut self, cm: &ConfusionMatrix) -> Result<Self> {
        let (accuracy, perm) = best_permutation_accuracy(cm)?;
        self.confusion = Some(cm.counts().to_vec());
        self.best_perm = Some(perm);
        self.accuracy = Some(Sig17(accuracy));
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics serialize")
    }
}
