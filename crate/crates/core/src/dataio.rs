//! Matrix files, layouts, normalization and reproducible shuffles.
//!
//! Two on-disk formats are supported:
//!
//! * `csv`: headerless, comma-separated decimal reals, one row per line.
//! * `raw-f64`: `rows` and `cols` as little-endian `u64`, then `rows·cols`
//!   little-endian `f64` values in row-major order.
//!
//! Both round-trip bit-exactly.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{arg_err, ElmvisError, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    RawF64,
}

impl MatrixFormat {
    /// `.bin`, `.f64` and `.raw` are raw-f64; everything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin" | "f64" | "raw") => MatrixFormat::RawF64,
            _ => MatrixFormat::Csv,
        }
    }
}

impl FromStr for MatrixFormat {
    type Err = ElmvisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(MatrixFormat::Csv),
            "raw-f64" | "raw" => Ok(MatrixFormat::RawF64),
            other => arg_err(format!("unknown matrix format '{other}'")),
        }
    }
}

/// A matrix file on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixFile {
    pub path: PathBuf,
    pub format: MatrixFormat,
}

impl MatrixFile {
    pub fn new(path: impl Into<PathBuf>, format: MatrixFormat) -> Self {
        Self {
            path: path.into(),
            format,
        }
    }

    /// Format guessed from the file extension.
    pub fn guess(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let format = MatrixFormat::from_path(&path);
        Self { path, format }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> ElmvisError {
    ElmvisError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, column: usize, message: impl Into<String>) -> ElmvisError {
    ElmvisError::Parse {
        path: path.to_path_buf(),
        line,
        column,
        message: message.into(),
    }
}

pub fn load_matrix(file: &MatrixFile) -> Result<DMatrix<f64>> {
    match file.format {
        MatrixFormat::Csv => {
            let text = fs::read_to_string(&file.path).map_err(|e| io_err(&file.path, e))?;
            parse_csv(&text, &file.path)
        }
        MatrixFormat::RawF64 => {
            let bytes = fs::read(&file.path).map_err(|e| io_err(&file.path, e))?;
            parse_raw(&bytes, &file.path)
        }
    }
}

pub fn write_matrix(file: &MatrixFile, m: &DMatrix<f64>) -> Result<()> {
    let bytes = match file.format {
        MatrixFormat::Csv => to_csv(m).into_bytes(),
        MatrixFormat::RawF64 => to_raw(m),
    };
    fs::write(&file.path, bytes).map_err(|e| io_err(&file.path, e))
}

/// Parses headerless CSV. Blank lines are skipped; line and column numbers in
/// errors are 1-based.
pub fn parse_csv(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (c, tok) in line.split(',').enumerate() {
            let tok = tok.trim();
            let value: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, ln + 1, c + 1, format!("'{tok}' is not a number")))?;
            if !value.is_finite() {
                return Err(parse_err(path, ln + 1, c + 1, format!("non-finite value '{tok}'")));
            }
            data.push(value);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(expected) if expected != count => {
                return Err(parse_err(
                    path,
                    ln + 1,
                    count.min(expected) + 1,
                    format!("row has {count} fields, expected {expected}"),
                ))
            }
            _ => {}
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| parse_err(path, 1, 1, "no data rows"))?;
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

/// CSV text using the shortest representation that parses back to the same bits.
pub fn to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let fields: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_raw(bytes: &[u8], path: &Path) -> Result<DMatrix<f64>> {
    let word = |i: usize| -> Option<[u8; 8]> { bytes.get(8 * i..8 * i + 8).map(|s| s.try_into().unwrap()) };
    let header_err = || parse_err(path, 1, 1, "truncated header");
    let rows = u64::from_le_bytes(word(0).ok_or_else(header_err)?) as usize;
    let cols = u64::from_le_bytes(word(1).ok_or_else(header_err)?) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| parse_err(path, 1, 1, "declared shape overflows"))?;
    if bytes.len() != 16 + 8 * count {
        return Err(parse_err(
            path,
            1,
            1,
            format!(
                "expected {} payload bytes for {rows}x{cols}, found {}",
                8 * count,
                bytes.len().saturating_sub(16)
            ),
        ));
    }
    let mut data = Vec::with_capacity(count);
    for i in 0..count {
        let v = f64::from_le_bytes(word(2 + i).expect("length checked"));
        if !v.is_finite() {
            return Err(parse_err(
                path,
                i / cols.max(1) + 1,
                i % cols.max(1) + 1,
                "non-finite value",
            ));
        }
        data.push(v);
    }
    Ok(DMatrix::from_row_slice(rows, cols, &data))
}

pub fn to_raw(m: &DMatrix<f64>) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * m.len());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    for row in m.row_iter() {
        for v in row.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Scales every row to unit Euclidean norm.
pub fn normalize_rows(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let mut out = x.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        let norm = row.norm();
        if norm == 0.0 {
            return Err(ElmvisError::Data(format!(
                "row {i} is all zeros and cannot be normalized"
            )));
        }
        row /= norm;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutKind {
    Grid,
    Normal,
    Uniform,
}

impl FromStr for LayoutKind {
    type Err = ElmvisError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(LayoutKind::Grid),
            "normal" => Ok(LayoutKind::Normal),
            "uniform" => Ok(LayoutKind::Uniform),
            other => arg_err(format!("unknown layout '{other}' (expected grid, normal or uniform)")),
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutKind::Grid => "grid",
            LayoutKind::Normal => "normal",
            LayoutKind::Uniform => "uniform",
        })
    }
}

/// How visualization points are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisLayout {
    pub kind: LayoutKind,
    pub dims: usize,
    /// Half-width of the grid/uniform box; standard deviation of the normal layout.
    pub extent: f64,
}

impl VisLayout {
    pub fn new(kind: LayoutKind, dims: usize, extent: f64) -> Result<Self> {
        if dims == 0 {
            return arg_err("layout needs at least one dimension");
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return arg_err("layout extent must be positive");
        }
        Ok(Self { kind, dims, extent })
    }
}

/// `n` visualization points.
///
/// A grid uses the smallest side `m` with `m^dims ≥ n`, spaces points evenly
/// over `[−extent, extent]` per axis, enumerates them row-major (last axis
/// fastest) and keeps the first `n`. The seed only affects random layouts.
pub fn make_layout(layout: &VisLayout, n: usize, seed: u64) -> DMatrix<f64> {
    let dims = layout.dims;
    match layout.kind {
        LayoutKind::Grid => {
            let mut side = 1usize;
            while side.checked_pow(dims as u32).is_some_and(|c| c < n) {
                side += 1;
            }
            let coord = |k: usize| {
                if side == 1 {
                    0.0
                } else {
                    -layout.extent + 2.0 * layout.extent * k as f64 / (side - 1) as f64
                }
            };
            DMatrix::from_fn(n, dims, |i, j| {
                let stride = side.pow((dims - 1 - j) as u32);
                coord((i / stride) % side)
            })
        }
        LayoutKind::Normal => {
            let mut rng = rng_from_seed(seed);
            let mut data = Vec::with_capacity(n * dims);
            for _ in 0..n * dims {
                let z: f64 = StandardNormal.sample(&mut rng);
                data.push(z * layout.extent);
            }
            DMatrix::from_row_slice(n, dims, &data)
        }
        LayoutKind::Uniform => {
            let mut rng = rng_from_seed(seed);
            let mut data = Vec::with_capacity(n * dims);
            for _ in 0..n * dims {
                data.push(rng.random_range(-layout.extent..=layout.extent));
            }
            DMatrix::from_row_slice(n, dims, &data)
        }
    }
}

/// Fisher–Yates shuffle of the rows. Returns the shuffled matrix and `perm`
/// with `shuffled.row(i) == x.row(perm[i])`.
pub fn shuffle_rows(x: &DMatrix<f64>, seed: u64) -> (DMatrix<f64>, Vec<usize>) {
    let mut perm: Vec<usize> = (0..x.nrows()).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    (select_rows(x, &perm), perm)
}

/// Rows of `x` in the order given by `rows`.
pub fn select_rows(x: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), x.ncols(), |i, j| x[(rows[i], j)])
}

/// Inverse of a permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// Indicator rows for class labels in `0..k`.
pub fn one_hot(labels: &[usize], k: usize) -> Result<DMatrix<f64>> {
    if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
        return arg_err(format!("label {bad} out of range for {k} classes"));
    }
    Ok(DMatrix::from_fn(labels.len(), k, |i, j| {
        if labels[i] == j {
            1.0
        } else {
            0.0
        }
    }))
}

/// Index of the largest entry of each row (first on ties).
pub fn argmax_rows(m: &DMatrix<f64>) -> Vec<usize> {
    m.row_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(
                    (0, f64::NEG_INFINITY),
                    |best, (j, &v)| if v > best.1 { (j, v) } else { best },
                )
                .0
        })
        .collect()
}

/// One non-negative integer per line (a single-column CSV also works).
pub fn load_labels(path: &Path) -> Result<Vec<usize>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut labels = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        let tok = tok.split(',').next().unwrap_or(tok).trim();
        let label = tok
            .parse::<usize>()
            .or_else(|_| match tok.parse::<f64>() {
                Ok(f) if f >= 0.0 && f.fract() == 0.0 => Ok(f as usize),
                _ => Err(()),
            })
            .map_err(|_| parse_err(path, ln + 1, 1, format!("'{tok}' is not a class label")))?;
        labels.push(label);
    }
    Ok(labels)
}

/// Reads `v_index,x_index` lines. A non-numeric first line is treated as a header.
pub fn load_pairs(path: &Path) -> Result<Vec<(usize, usize)>> {
    load_index_pairs(path)
}

/// Reads an arrangement file (`position,sample_index` with header).
pub fn load_order(path: &Path) -> Result<Vec<(usize, usize)>> {
    load_index_pairs(path)
}

fn load_index_pairs(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut pairs = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(
                path,
                ln + 1,
                1,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let parsed: std::result::Result<Vec<usize>, _> = fields.iter().map(|f| f.parse::<usize>()).collect();
        match parsed {
            Ok(v) => pairs.push((v[0], v[1])),
            Err(_) if ln == 0 && pairs.is_empty() => continue,
            Err(_) => {
                let col = fields.iter().position(|f| f.parse::<usize>().is_err()).unwrap_or(0);
                return Err(parse_err(
                    path,
                    ln + 1,
                    col + 1,
                    format!("'{}' is not an index", fields[col]),
                ));
            }
        }
    }
    Ok(pairs)
}

/// `position,sample_index` lines with a header.
pub fn order_csv(order: &[(usize, usize)]) -> String {
    let mut out = String::from("position,sample_index\n");
    for (p, s) in order {
        out.push_str(&format!("{p},{s}\n"));
    }
    out
}
