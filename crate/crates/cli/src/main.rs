//! `elmvis` command-line front end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use elmvis_core::dataio::{argmax_rows, load_labels, load_order, load_pairs, order_csv, select_rows};
use elmvis_core::eval::{oracle_trial, OracleTrial};
use elmvis_core::format::Sig17;
use elmvis_core::incremental::JsonLinesSink;
use elmvis_core::prelude::*;
use elmvis_core::rng::derive_seed;
use elmvis_core::swap::{default_refine_stagnation, elmvis_plus_run_traced, AcceptanceTrace};

const ORACLE_TOLERANCE: f64 = 1e-7;
const ORACLE_STREAM: u64 = 0x0AC1E;
const REFINE_STREAM: u64 = 0x5EF1;

#[derive(Parser)]
#[command(
    name = "elmvis",
    version,
    about = "Incremental ELMVIS: arrange samples on fixed input points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Arrange data samples on a generated layout.
    Visualize(VisualizeArgs),
    /// Pair output samples with input codes and score the pairing.
    Pair(PairArgs),
    /// Improve an existing arrangement by pairwise swaps.
    Refine(RefineArgs),
    /// Check closed-form deltas against full retraining.
    EvalOracle(OracleArgs),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file; flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hidden activation: tanh, sigmoid or linear.
    #[arg(long)]
    activation: Option<String>,
    /// Keep output rows as loaded instead of scaling them to unit norm.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Args)]
struct VisualizeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: PathBuf,
    /// grid, normal or uniform.
    #[arg(long)]
    layout: Option<String>,
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long)]
    extent: Option<f64>,
    /// Candidates added per iteration.
    #[arg(long)]
    k: Option<usize>,
    /// `schedule` or a fixed neuron count.
    #[arg(long)]
    neurons: Option<String>,
    /// Run pairwise refinement over the in-model set after each iteration.
    #[arg(long)]
    refine: bool,
    /// `v_index,sample_index` pairs fixed before the run.
    #[arg(long)]
    seeds_file: Option<PathBuf>,
    /// Per-sample labels; only used to color the scatter plot.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    max_samples: Option<usize>,
    /// Rejected candidate proposals before a batch is promoted.
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    inputs: PathBuf,
    #[arg(long)]
    outputs: PathBuf,
    #[arg(long)]
    true_labels: PathBuf,
    /// Class of each input row; defaults to the argmax of the row.
    #[arg(long)]
    input_labels: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    neurons: Option<String>,
    /// Skip the pairwise refinement after each iteration.
    #[arg(long)]
    no_refine: bool,
    #[arg(long)]
    max_samples: Option<usize>,
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RefineArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    layout_file: PathBuf,
    /// `position,sample_index` arrangement to start from.
    #[arg(long)]
    order: PathBuf,
    #[arg(long)]
    neurons: Option<usize>,
    /// Rejected proposals in a row before the search stops.
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random accepted updates applied per trial before the running check.
    #[arg(long, default_value_t = 1000)]
    updates: usize,
    /// Worker threads; trials are independent and reported in order.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Bad input from the caller; maps to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Usage>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<ElmvisError>() {
            return match e {
                ElmvisError::Argument(_)
                | ElmvisError::Parse { .. }
                | ElmvisError::Io { .. }
                | ElmvisError::Data(_) => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Visualize(a) => visualize(a),
        Command::Pair(a) => pair(a),
        Command::Refine(a) => refine(a),
        Command::EvalOracle(a) => eval_oracle(a),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// Settings from an optional config file, consulted when a flag is absent.
struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>, allowed: &[&str]) -> Result<Self> {
        let mut values = BTreeMap::new();
        let Some(path) = path else {
            return Ok(Self { values });
        };
        let text =
            fs::read_to_string(path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), ln + 1)))?;
            let key = key.trim().replace('-', "_");
            if !allowed.contains(&key.as_str()) {
                return Err(usage(format!("{}:{}: unknown key '{key}'", path.display(), ln + 1)));
            }
            values.insert(key, value.trim().trim_matches('"').to_string());
        }
        Ok(Self { values })
    }

    fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| usage(format!("config key {key}: '{raw}': {e}"))),
        }
    }

    fn flag(&self, set: bool, key: &str) -> Result<bool> {
        Ok(set || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

fn parse<T: FromStr>(raw: &str, what: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| usage(format!("invalid {what} '{raw}': {e}")))
}

fn parse_neurons(raw: &str) -> Result<NeuronSchedule> {
    if raw == "schedule" {
        return Ok(NeuronSchedule::Growing);
    }
    match raw.parse::<usize>() {
        Ok(n) if n > 0 => Ok(NeuronSchedule::Fixed(n)),
        _ => Err(usage(format!(
            "--neurons must be 'schedule' or a positive integer, got '{raw}'"
        ))),
    }
}

fn nonzero(value: Option<usize>, what: &str) -> Result<Option<usize>> {
    match value {
        Some(0) => Err(usage(format!("{what} must be positive"))),
        v => Ok(v),
    }
}

fn load_data(path: &Path, normalize: bool) -> Result<DMatrix<f64>> {
    if !path.exists() {
        return Err(usage(format!("no such file: {}", path.display())));
    }
    let x = load_matrix(&MatrixFile::guess(path))?;
    Ok(if normalize { normalize_rows(&x)? } else { x })
}

fn check_labels(labels: &[usize], n: usize, path: &Path) -> Result<()> {
    if labels.len() != n {
        return Err(usage(format!(
            "{}: {} labels for {n} samples",
            path.display(),
            labels.len()
        )));
    }
    Ok(())
}

fn write(dir: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("cannot create {}: {e}", dir.display())))
}

struct Resolved {
    seed: u64,
    activation: Activation,
    normalize: bool,
}

fn common(settings: &Settings, c: &Common) -> Result<Resolved> {
    let activation = match settings.pick(c.activation.clone(), "activation")? {
        Some(a) => parse(&a, "activation")?,
        None => Activation::Tanh,
    };
    let no_normalize = settings.flag(c.no_normalize, "no_normalize")?;
    Ok(Resolved {
        seed: settings.pick(c.seed, "seed")?.unwrap_or(0),
        activation,
        normalize: !no_normalize,
    })
}

/// Runs the fit, streaming one progress line per promotion.
fn fit_with_progress(v: &DMatrix<f64>, x: &DMatrix<f64>, config: RunConfig, out: &Path) -> Result<FitResult> {
    let path = out.join("progress.jsonl");
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut sink = JsonLinesSink::new(BufWriter::new(file));
    let fit = run_with_progress(v, x, config, &mut sink)?;
    let mut writer = sink.into_inner();
    std::io::Write::flush(&mut writer).with_context(|| format!("writing {}", path.display()))?;
    Ok(fit)
}

/// `(v_row, original sample)` for every placed position, by increasing `v_row`.
fn placed_order(fit: &FitResult, shuffle: &[usize]) -> Vec<(usize, usize)> {
    let mut rows = fit.placed_rows().to_vec();
    rows.sort_unstable();
    rows.into_iter().map(|r| (r, shuffle[fit.final_perm[r]])).collect()
}

fn visualize(a: VisualizeArgs) -> Result<ExitCode> {
    let settings = Settings::load(
        a.common.config.as_deref(),
        &[
            "seed",
            "activation",
            "no_normalize",
            "layout",
            "dims",
            "extent",
            "k",
            "neurons",
            "refine",
            "max_samples",
            "stagnation",
        ],
    )?;
    let c = common(&settings, &a.common)?;
    let layout_kind: LayoutKind = parse(
        &settings.pick(a.layout, "layout")?.unwrap_or_else(|| "normal".into()),
        "layout",
    )?;
    let dims = settings.pick(a.dims, "dims")?.unwrap_or(2);
    let extent = settings.pick(a.extent, "extent")?.unwrap_or(1.0);
    let layout = VisLayout::new(layout_kind, dims, extent).map_err(|e| usage(e.to_string()))?;
    let neurons = parse_neurons(
        &settings
            .pick(a.neurons, "neurons")?
            .unwrap_or_else(|| "schedule".into()),
    )?;

    let x = load_data(&a.data, c.normalize)?;
    let n = x.nrows();
    let labels = match &a.labels {
        Some(p) => {
            let l = load_labels(p)?;
            check_labels(&l, n, p)?;
            Some(l)
        }
        None => None,
    };
    let (xs, shuffle) = shuffle_rows(&x, c.seed);
    let to_shuffled = elmvis_core::dataio::invert_permutation(&shuffle);
    let initial_pairs = match &a.seeds_file {
        Some(p) => load_pairs(p)?
            .into_iter()
            .map(|(vi, si)| {
                if si >= n {
                    return Err(usage(format!("{}: sample index {si} out of range", p.display())));
                }
                Ok((vi, to_shuffled[si]))
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let v = make_layout(&layout, n, c.seed);
    let config = RunConfig {
        batch_size: nonzero(settings.pick(a.k, "k")?, "--k")?.unwrap_or(RunConfig::default().batch_size),
        candidate_stagnation: nonzero(settings.pick(a.stagnation, "stagnation")?, "--stagnation")?,
        neuron_schedule: neurons,
        refine_each_iteration: settings.flag(a.refine, "refine")?,
        activation: c.activation,
        seed: c.seed,
        initial_pairs,
        max_samples: nonzero(settings.pick(a.max_samples, "max_samples")?, "--max-samples")?,
        ..RunConfig::default()
    };
    config.validate()?;

    create_out(&a.out)?;
    let fit = fit_with_progress(&v, &xs, config, &a.out)?;
    let order = placed_order(&fit, &shuffle);
    write(&a.out, "order.csv", order_csv(&order))?;
    write(&a.out, "layout.csv", elmvis_core::dataio::to_csv(&v))?;
    write(&a.out, "metrics.json", Metrics::new(&fit.s_history).to_json() + "\n")?;
    if dims == 2 {
        write(&a.out, "scatter.svg", scatter_svg(&v, &order, labels.as_deref()))?;
    }
    println!(
        "placed {} of {n} samples, S = {}",
        fit.placed,
        elmvis_core::format::sig17(fit.similarity)
    );
    Ok(ExitCode::SUCCESS)
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

/// One circle per placed sample at its layout point, colored by label if given.
fn scatter_svg(v: &DMatrix<f64>, order: &[(usize, usize)], labels: Option<&[usize]>) -> String {
    const SIZE: f64 = 600.0;
    const MARGIN: f64 = 20.0;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for &(r, _) in order {
        for j in 0..2 {
            lo[j] = lo[j].min(v[(r, j)]);
            hi[j] = hi[j].max(v[(r, j)]);
        }
    }
    let scale = |x: f64, j: usize| {
        let span = if hi[j] > lo[j] { hi[j] - lo[j] } else { 1.0 };
        MARGIN + (x - lo[j]) / span * (SIZE - 2.0 * MARGIN)
    };
    let mut svg = format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    for &(r, s) in order {
        let color = labels.map_or("#333333", |l| PALETTE[l[s] % PALETTE.len()]);
        // y grows downward in SVG
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{color}\" data-sample=\"{s}\"/>",
            scale(v[(r, 0)], 0),
            SIZE - scale(v[(r, 1)], 1)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn pair(a: PairArgs) -> Result<ExitCode> {
    let settings = Settings::load(
        a.common.config.as_deref(),
        &[
            "seed",
            "activation",
            "no_normalize",
            "k",
            "neurons",
            "no_refine",
            "max_samples",
            "stagnation",
        ],
    )?;
    let c = common(&settings, &a.common)?;
    let neurons = parse_neurons(
        &settings
            .pick(a.neurons, "neurons")?
            .unwrap_or_else(|| "schedule".into()),
    )?;

    let v = load_data(&a.inputs, false)?;
    let x = load_data(&a.outputs, c.normalize)?;
    if v.nrows() != x.nrows() {
        return Err(usage(format!("{} input rows but {} output rows", v.nrows(), x.nrows())));
    }
    let n = x.nrows();
    let truth = load_labels(&a.true_labels)?;
    check_labels(&truth, n, &a.true_labels)?;
    let input_class = match &a.input_labels {
        Some(p) => {
            let l = load_labels(p)?;
            check_labels(&l, n, p)?;
            l
        }
        None => argmax_rows(&v),
    };

    let (xs, shuffle) = shuffle_rows(&x, c.seed);
    let config = RunConfig {
        batch_size: nonzero(settings.pick(a.k, "k")?, "--k")?.unwrap_or(RunConfig::default().batch_size),
        candidate_stagnation: nonzero(settings.pick(a.stagnation, "stagnation")?, "--stagnation")?,
        neuron_schedule: neurons,
        refine_each_iteration: !settings.flag(a.no_refine, "no_refine")?,
        activation: c.activation,
        seed: c.seed,
        max_samples: nonzero(settings.pick(a.max_samples, "max_samples")?, "--max-samples")?,
        ..RunConfig::default()
    };
    config.validate()?;

    create_out(&a.out)?;
    let fit = fit_with_progress(&v, &xs, config, &a.out)?;
    let order = placed_order(&fit, &shuffle);
    let classes = truth.iter().chain(&input_class).max().map_or(1, |m| m + 1);
    let true_of: Vec<usize> = order.iter().map(|&(_, s)| truth[s]).collect();
    let assigned: Vec<usize> = order.iter().map(|&(r, _)| input_class[r]).collect();
    let cm = confusion(&true_of, &assigned, classes)?;
    let metrics = Metrics::new(&fit.s_history).with_confusion(&cm)?;
    write(&a.out, "order.csv", order_csv(&order))?;
    write(&a.out, "confusion.csv", cm.to_csv())?;
    write(&a.out, "metrics.json", metrics.to_json() + "\n")?;
    println!(
        "best-permutation accuracy {}",
        elmvis_core::format::sig17(metrics.accuracy.map_or(0.0, |s| s.0))
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct RefineMetrics {
    #[serde(rename = "S_before")]
    s_before: Sig17,
    #[serde(rename = "S_after")]
    s_after: Sig17,
    accepted: usize,
    proposals: usize,
}

fn refine(a: RefineArgs) -> Result<ExitCode> {
    let settings = Settings::load(
        a.common.config.as_deref(),
        &["seed", "activation", "no_normalize", "neurons", "stagnation"],
    )?;
    let c = common(&settings, &a.common)?;
    let x = load_data(&a.data, c.normalize)?;
    let v = load_data(&a.layout_file, false)?;
    if !a.order.exists() {
        return Err(usage(format!("no such file: {}", a.order.display())));
    }
    let order = load_order(&a.order)?;
    if order.is_empty() {
        return Err(usage(format!("{}: empty arrangement", a.order.display())));
    }
    let mut seen_p = vec![false; v.nrows()];
    let mut seen_s = vec![false; x.nrows()];
    for &(p, s) in &order {
        if p >= v.nrows()
            || s >= x.nrows()
            || std::mem::replace(&mut seen_p[p], true)
            || std::mem::replace(&mut seen_s[s], true)
        {
            return Err(usage(format!(
                "{}: invalid or repeated entry {p},{s}",
                a.order.display()
            )));
        }
    }
    let positions: Vec<usize> = order.iter().map(|o| o.0).collect();
    let mut samples: Vec<usize> = order.iter().map(|o| o.1).collect();
    let span = order.len();
    let neurons = nonzero(settings.pick(a.neurons, "neurons")?, "--neurons")?
        .unwrap_or_else(|| elmvis_core::incremental::default_neuron_schedule(span));
    let stagnation = nonzero(settings.pick(a.stagnation, "stagnation")?, "--stagnation")?
        .unwrap_or_else(|| default_refine_stagnation(span));

    let vs = select_rows(&v, &positions);
    let mut pool = select_rows(&x, &samples);
    let model = ElmModel::random(v.ncols(), neurons, c.activation, derive_seed(c.seed, REFINE_STREAM, 0))?;
    let a_mat = projection_matrix(&model.hidden(&vs)?, DEFAULT_RCOND)?;
    let mut state = SimilarityState::new(a_mat, &pool)?;
    let mut trace = AcceptanceTrace::new();
    let report = elmvis_plus_run_traced(
        &mut state,
        &mut pool,
        0..span,
        stagnation,
        derive_seed(c.seed, REFINE_STREAM, 1),
        Some(&mut trace),
    )?;
    for r in trace.records() {
        samples.swap(r.a, r.b);
    }
    let mut refined: Vec<(usize, usize)> = positions.into_iter().zip(samples).collect();
    refined.sort_unstable();

    create_out(&a.out)?;
    write(&a.out, "order.csv", order_csv(&refined))?;
    let metrics = RefineMetrics {
        s_before: Sig17(report.initial_similarity),
        s_after: Sig17(report.final_similarity),
        accepted: report.accepted,
        proposals: report.proposals,
    };
    write(&a.out, "metrics.json", serde_json::to_string_pretty(&metrics)? + "\n")?;
    println!(
        "S {} -> {} ({} accepted swaps)",
        elmvis_core::format::sig17(report.initial_similarity),
        elmvis_core::format::sig17(report.final_similarity),
        report.accepted
    );
    Ok(ExitCode::SUCCESS)
}

fn eval_oracle(a: OracleArgs) -> Result<ExitCode> {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if a.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let trial = |t: usize| oracle_trial(derive_seed(a.seed, ORACLE_STREAM, t as u64), a.updates);
    let results: Vec<elmvis_core::Result<OracleTrial>> = if a.jobs == 1 {
        (0..a.trials).map(trial).collect()
    } else {
        let jobs = a.jobs.min(a.trials);
        let mut slots: Vec<Option<elmvis_core::Result<OracleTrial>>> = (0..a.trials).map(|_| None).collect();
        std::thread::scope(|scope| {
            let trial = &trial;
            let handles: Vec<_> = (0..jobs)
                .map(|w| scope.spawn(move || (w..a.trials).step_by(jobs).map(|t| (t, trial(t))).collect::<Vec<_>>()))
                .collect();
            for h in handles {
                for (t, r) in h.join().expect("oracle worker panicked") {
                    slots[t] = Some(r);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every trial ran")).collect()
    };
    let mut max_error = 0.0f64;
    for (t, r) in results.into_iter().enumerate() {
        let r = r?;
        let e = r.max_error();
        // NaN must fail the check, so it is not folded away by max
        max_error = if e.is_nan() || max_error.is_nan() {
            f64::NAN
        } else {
            max_error.max(e)
        };
        println!(
            "trial {t} n={} L={} d={} rel_error {}",
            r.n,
            r.neurons,
            r.dim,
            elmvis_core::format::sig17(e)
        );
    }
    println!("max_rel_error {}", elmvis_core::format::sig17(max_error));
    if max_error <= ORACLE_TOLERANCE {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: oracle disagreement {max_error:e} exceeds {ORACLE_TOLERANCE:e}");
        Ok(ExitCode::from(1))
    }
}
