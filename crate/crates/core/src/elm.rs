//! Extreme learning machine used as the reconstruction cost model.
//!
//! The hidden layer maps visualization coordinates `V` (one row per point) to
//! `L` random nonlinear features. Only the least-squares output layer is ever
//! solved, so everything the optimizer needs reduces to the hat matrix
//! `A = H·H†`, which turns the data rows `X` into their predictions `A·X`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, ElmvisError, Result};
use crate::rng::rng_from_seed;

/// Relative singular-value cutoff used when none is configured.
pub const DEFAULT_RCOND: f64 = 1e-9;

/// Hidden-layer outputs, one row per input point and one column per neuron.
pub type HiddenMatrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Sigmoid,
    Tanh,
    Linear,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Linear => z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Activation::Sigmoid => "sigmoid",
            Activation::Tanh => "tanh",
            Activation::Linear => "linear",
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Activation {
    type Err = ElmvisError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(Activation::Sigmoid),
            "tanh" => Ok(Activation::Tanh),
            "linear" => Ok(Activation::Linear),
            other => arg_err(format!("unknown activation '{other}'")),
        }
    }
}

/// A random, fixed hidden layer.
///
/// `weights` is `d_in × L`, `bias` has length `L`. Both are immutable once the
/// model is built.
#[derive(Debug, Clone, PartialEq)]
pub struct ElmModel {
    weights: DMatrix<f64>,
    bias: DVector<f64>,
    activation: Activation,
}

impl ElmModel {
    pub fn new(weights: DMatrix<f64>, bias: DVector<f64>, activation: Activation) -> Result<Self> {
        if weights.nrows() == 0 || weights.ncols() == 0 {
            return arg_err("hidden weights must have at least one input and one neuron");
        }
        if bias.len() != weights.ncols() {
            return arg_err(format!(
                "bias length {} does not match neuron count {}",
                bias.len(),
                weights.ncols()
            ));
        }
        if weights.iter().chain(bias.iter()).any(|w| !w.is_finite()) {
            return Err(ElmvisError::Numeric("hidden weights contain non-finite values".into()));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    /// Draws a random hidden layer.
    ///
    /// Weights are standard normal scaled by `1/√d_in`, biases standard normal.
    /// Neurons are drawn one after another from a single stream (the `d_in`
    /// weights of a neuron, then its bias), so the model with `L` neurons is
    /// a prefix of the model with `L + m` neurons under the same seed.
    pub fn random(d_in: usize, neurons: usize, activation: Activation, seed: u64) -> Result<Self> {
        if d_in == 0 {
            return arg_err("input dimension must be at least 1");
        }
        if neurons == 0 {
            return arg_err("neuron count must be at least 1");
        }
        let mut rng = rng_from_seed(seed);
        let scale = 1.0 / (d_in as f64).sqrt();
        let mut weights = DMatrix::zeros(d_in, neurons);
        let mut bias = DVector::zeros(neurons);
        for j in 0..neurons {
            for i in 0..d_in {
                let z: f64 = StandardNormal.sample(&mut rng);
                weights[(i, j)] = z * scale;
            }
            bias[j] = StandardNormal.sample(&mut rng);
        }
        Self::new(weights, bias, activation)
    }

    pub fn input_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn neurons(&self) -> usize {
        self.weights.ncols()
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn bias(&self) -> &DVector<f64> {
        &self.bias
    }

    /// Hidden-layer outputs `H[i,j] = φ(Σ_k V[i,k]·W[k,j] + bias[j])`.
    pub fn hidden(&self, v: &DMatrix<f64>) -> Result<HiddenMatrix> {
        if v.ncols() != self.input_dim() {
            return arg_err(format!(
                "input has {} columns, model expects {}",
                v.ncols(),
                self.input_dim()
            ));
        }
        let mut h = v * &self.weights;
        let act = self.activation;
        for (j, mut col) in h.column_iter_mut().enumerate() {
            let b = self.bias[j];
            col.apply(|z| *z = act.apply(*z + b));
        }
        Ok(h)
    }
}

struct TruncatedSvd {
    u: DMatrix<f64>,
    v_t: DMatrix<f64>,
    singular: DVector<f64>,
    rank: usize,
}

fn truncated_svd(h: &DMatrix<f64>, rcond: f64) -> Result<TruncatedSvd> {
    if !(rcond > 0.0 && rcond.is_finite()) {
        return arg_err(format!("rcond must be positive and finite, got {rcond}"));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(ElmvisError::Numeric("matrix contains non-finite entries".into()));
    }
    if h.is_empty() {
        return arg_err("matrix must be non-empty");
    }
    // nalgebra's SVD loses accuracy on exactly rank-deficient input (repeated
    // rows or columns), which one-hot layouts produce; faer's does not.
    let f = faer::Mat::<f64>::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)]);
    let svd = f
        .thin_svd()
        .map_err(|e| ElmvisError::Numeric(format!("singular value decomposition did not converge: {e:?}")))?;
    let (fu, fv, fs) = (svd.U(), svd.V(), svd.S().column_vector());
    let u = DMatrix::from_fn(fu.nrows(), fu.ncols(), |i, j| fu[(i, j)]);
    let v_t = DMatrix::from_fn(fv.ncols(), fv.nrows(), |i, j| fv[(j, i)]);
    let singular = DVector::from_fn(fs.nrows(), |i, _| fs[i]);
    let sigma_max = singular.iter().copied().fold(0.0_f64, f64::max);
    let cutoff = rcond * sigma_max;
    let rank = singular.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    Ok(TruncatedSvd { u, v_t, singular, rank })
}

impl TruncatedSvd {
    /// Indices of the retained singular triplets, largest first.
    fn kept(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.singular.len()).collect();
        idx.sort_by(|&a, &b| self.singular[b].total_cmp(&self.singular[a]));
        idx.truncate(self.rank);
        idx
    }
}

/// Moore–Penrose pseudoinverse through the SVD. Singular values at or below
/// `rcond·σ_max` are treated as zero.
pub fn pseudoinverse(h: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    let svd = truncated_svd(h, rcond)?;
    let mut pinv = DMatrix::zeros(h.ncols(), h.nrows());
    for k in svd.kept() {
        let inv = 1.0 / svd.singular[k];
        let v_col = svd.v_t.row(k).transpose();
        let u_col = svd.u.column(k);
        pinv.ger(inv, &v_col, &u_col, 1.0);
    }
    Ok(pinv)
}

/// Numerical rank of `h` under the same cutoff the pseudoinverse uses.
pub fn numerical_rank(h: &DMatrix<f64>, rcond: f64) -> Result<usize> {
    Ok(truncated_svd(h, rcond)?.rank)
}

/// Hat matrix `A = H·H†`, assembled as `U_r·U_rᵀ` from the retained left
/// singular vectors. The result is exactly symmetric.
pub fn projection_matrix(h: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    let svd = truncated_svd(h, rcond)?;
    let n = h.nrows();
    let kept = svd.kept();
    let mut u_r = DMatrix::zeros(n, kept.len());
    for (c, &k) in kept.iter().enumerate() {
        u_r.set_column(c, &svd.u.column(k));
    }
    drop(svd);
    let mut a = &u_r * u_r.transpose();
    for i in 0..n {
        for j in (i + 1)..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    Ok(a)
}

/// Least-squares output weights `β = H†·X`.
pub fn solve_output_weights(h: &DMatrix<f64>, x: &DMatrix<f64>, rcond: f64) -> Result<DMatrix<f64>> {
    if h.nrows() != x.nrows() {
        return arg_err(format!(
            "hidden matrix has {} rows but targets have {}",
            h.nrows(),
            x.nrows()
        ));
    }
    Ok(pseudoinverse(h, rcond)? * x)
}
