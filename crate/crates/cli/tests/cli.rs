use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use elmvis_core::dataio::{make_layout, to_csv, LayoutKind, VisLayout};
use elmvis_core::DMatrix;
use serde_json::Value;
use tempfile::TempDir;

fn elmvis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elmvis"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = elmvis(args);
    assert!(
        out.status.success(),
        "elmvis {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `classes × per` rows, class `c` centred at `3·e_c`, unit noise; row `i` has label `i % classes`.
fn clusters(classes: usize, per: usize, d: usize, seed: u64) -> (DMatrix<f64>, Vec<usize>) {
    let n = classes * per;
    let noise = make_layout(&VisLayout::new(LayoutKind::Normal, d, 1.0).unwrap(), n, seed);
    let labels: Vec<usize> = (0..n).map(|i| i % classes).collect();
    let x = DMatrix::from_fn(n, d, |i, j| noise[(i, j)] + if j == labels[i] { 3.0 } else { 0.0 });
    (x, labels)
}

fn write_labels(path: &Path, labels: &[usize]) {
    fs::write(path, labels.iter().map(|l| format!("{l}\n")).collect::<String>()).unwrap();
}

struct Fixture {
    dir: TempDir,
    labels: Vec<usize>,
}

impl Fixture {
    fn new(classes: usize, per: usize, d: usize, seed: u64) -> Self {
        let dir = TempDir::new().unwrap();
        let (x, labels) = clusters(classes, per, d, seed);
        fs::write(dir.path().join("x.csv"), to_csv(&x)).unwrap();
        write_labels(&dir.path().join("labels.csv"), &labels);
        Self { dir, labels }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn read_order(path: &Path) -> Vec<(usize, usize)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn files_equal(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn visualize_is_byte_reproducible() {
    let f = Fixture::new(2, 30, 4, 1);
    for (layout, dims) in [("grid", "1"), ("normal", "2")] {
        let runs: Vec<PathBuf> = (0..2).map(|i| f.path(&format!("{layout}{i}"))).collect();
        for out in &runs {
            ok(&[
                "visualize",
                "--data",
                s(&f.path("x.csv")),
                "--layout",
                layout,
                "--dims",
                dims,
                "--seed",
                "7",
                "--refine",
                "--out",
                s(out),
            ]);
        }
        files_equal(&runs[0], &runs[1]);
    }
}

#[test]
fn visualize_writes_a_permutation_and_progress() {
    let f = Fixture::new(2, 30, 4, 2);
    let out = f.path("out");
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--seed",
        "3",
        "--k",
        "6",
        "--out",
        s(&out),
    ]);
    let order = read_order(&out.join("order.csv"));
    let mut positions: Vec<usize> = order.iter().map(|o| o.0).collect();
    let mut samples: Vec<usize> = order.iter().map(|o| o.1).collect();
    positions.sort_unstable();
    samples.sort_unstable();
    assert_eq!(positions, (0..60).collect::<Vec<_>>());
    assert_eq!(samples, (0..60).collect::<Vec<_>>());

    let progress = fs::read_to_string(out.join("progress.jsonl")).unwrap();
    let records: Vec<Value> = progress.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(records.len(), 10);
    let mut last = f64::NEG_INFINITY;
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["iteration"], i);
        assert_eq!(r["i_B"], 6 * (i + 1));
        let s = r["S"].as_f64().unwrap();
        assert!(s >= last);
        last = s;
    }
    let metrics = json(&out.join("metrics.json"));
    assert_eq!(metrics["S_history"].as_array().unwrap().len(), 20);
}

#[test]
fn scatter_has_one_marker_per_placed_sample() {
    let f = Fixture::new(3, 20, 5, 3);
    let full = f.path("full");
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--dims",
        "2",
        "--labels",
        s(&f.path("labels.csv")),
        "--out",
        s(&full),
    ]);
    let svg = fs::read_to_string(full.join("scatter.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 60);
    assert_eq!(svg.matches("/>").count(), 61);

    let capped = f.path("capped");
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--max-samples",
        "40",
        "--out",
        s(&capped),
    ]);
    let svg = fs::read_to_string(capped.join("scatter.svg")).unwrap();
    assert_eq!(svg.matches("<circle").count(), 40);
    assert_eq!(read_order(&capped.join("order.csv")).len(), 40);

    let line = f.path("line");
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--layout",
        "grid",
        "--dims",
        "1",
        "--out",
        s(&line),
    ]);
    assert!(!line.join("scatter.svg").exists());
}

#[test]
fn labels_only_change_colors() {
    let f = Fixture::new(2, 20, 4, 4);
    let (a, b) = (f.path("a"), f.path("b"));
    ok(&["visualize", "--data", s(&f.path("x.csv")), "--out", s(&a)]);
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--labels",
        s(&f.path("labels.csv")),
        "--out",
        s(&b),
    ]);
    assert_eq!(
        fs::read(a.join("order.csv")).unwrap(),
        fs::read(b.join("order.csv")).unwrap()
    );
    assert_ne!(
        fs::read(a.join("scatter.svg")).unwrap(),
        fs::read(b.join("scatter.svg")).unwrap()
    );
}

#[test]
fn seeds_file_pins_samples() {
    let f = Fixture::new(2, 20, 4, 5);
    fs::write(f.path("seeds.csv"), "v_index,sample_index\n3,10\n17,0\n").unwrap();
    let out = f.path("out");
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--seeds-file",
        s(&f.path("seeds.csv")),
        "--out",
        s(&out),
    ]);
    let order = read_order(&out.join("order.csv"));
    assert!(order.contains(&(3, 10)) && order.contains(&(17, 0)));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let f = Fixture::new(2, 20, 4, 6);
    fs::write(
        f.path("run.cfg"),
        "# defaults for this run\nseed = 11\nk = 5\nlayout = uniform\n",
    )
    .unwrap();
    let (a, b, c) = (f.path("a"), f.path("b"), f.path("c"));
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--config",
        s(&f.path("run.cfg")),
        "--out",
        s(&a),
    ]);
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--seed",
        "11",
        "--k",
        "5",
        "--layout",
        "uniform",
        "--out",
        s(&b),
    ]);
    ok(&[
        "visualize",
        "--data",
        s(&f.path("x.csv")),
        "--config",
        s(&f.path("run.cfg")),
        "--k",
        "4",
        "--out",
        s(&c),
    ]);
    files_equal(&a, &b);
    let first = fs::read_to_string(c.join("progress.jsonl")).unwrap();
    assert!(first.starts_with("{\"iteration\":0,\"i_A\":0,\"i_B\":4,"));
}

#[test]
fn self_pairing_is_exact() {
    let dir = TempDir::new().unwrap();
    let labels: Vec<usize> = (0..40).map(|i| (i * 7 % 3) % 2).collect();
    let codes = elmvis_core::dataio::one_hot(&labels, 2).unwrap();
    fs::write(dir.path().join("codes.csv"), to_csv(&codes)).unwrap();
    write_labels(&dir.path().join("labels.csv"), &labels);
    let out = dir.path().join("out");
    let codes_path = dir.path().join("codes.csv");
    ok(&[
        "pair",
        "--inputs",
        s(&codes_path),
        "--outputs",
        s(&codes_path),
        "--true-labels",
        s(&dir.path().join("labels.csv")),
        "--seed",
        "2",
        "--out",
        s(&out),
    ]);
    let metrics = json(&out.join("metrics.json"));
    assert_eq!(metrics["accuracy"].as_f64(), Some(1.0));
    let confusion = fs::read_to_string(out.join("confusion.csv")).unwrap();
    let counts: Vec<Vec<u64>> = confusion
        .lines()
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    let total: u64 = counts.iter().flatten().sum();
    assert_eq!(total, 40);
    assert_eq!(counts[0][1] + counts[1][0], 0);
}

#[test]
fn separable_clusters_pair_with_their_codes() {
    let f = Fixture::new(2, 100, 20, 7);
    let codes = elmvis_core::dataio::one_hot(&f.labels, 2).unwrap();
    fs::write(f.path("codes.csv"), to_csv(&codes)).unwrap();
    let out = f.path("out");
    ok(&[
        "pair",
        "--inputs",
        s(&f.path("codes.csv")),
        "--outputs",
        s(&f.path("x.csv")),
        "--true-labels",
        s(&f.path("labels.csv")),
        "--seed",
        "1",
        "--out",
        s(&out),
    ]);
    let accuracy = json(&out.join("metrics.json"))["accuracy"].as_f64().unwrap();
    assert!(accuracy >= 0.95, "accuracy {accuracy}");
}

fn refine_metrics(f: &Fixture, order: &Path, layout: &Path, out: &Path, extra: &[&str]) -> (f64, f64, u64) {
    let x = f.path("x.csv");
    let mut args = vec![
        "refine",
        "--data",
        s(&x),
        "--layout-file",
        s(layout),
        "--order",
        s(order),
        "--out",
        s(out),
    ];
    args.extend_from_slice(extra);
    ok(&args);
    let m = json(&out.join("metrics.json"));
    (
        m["S_before"].as_f64().unwrap(),
        m["S_after"].as_f64().unwrap(),
        m["accepted"].as_u64().unwrap(),
    )
}

/// A line of 40 points; the first half gets class 0 and the second class 1.
fn sorted_line(f: &Fixture) -> (PathBuf, Vec<(usize, usize)>) {
    let layout = f.path("line.csv");
    let v = DMatrix::from_fn(40, 1, |i, _| i as f64 / 39.0 * 2.0 - 1.0);
    fs::write(&layout, to_csv(&v)).unwrap();
    let mut zeros = (0..40).filter(|&s| f.labels[s] == 0);
    let mut ones = (0..40).filter(|&s| f.labels[s] == 1);
    let order = (0..40)
        .map(|p| (p, if p < 20 { zeros.next() } else { ones.next() }.unwrap()))
        .collect();
    (layout, order)
}

fn half_purity(order: &[(usize, usize)], labels: &[usize]) -> f64 {
    let left = order.iter().filter(|&&(p, s)| p < 20 && labels[s] == 0).count();
    let right = order.iter().filter(|&&(p, s)| p >= 20 && labels[s] == 1).count();
    (left + right) as f64 / order.len() as f64
}

#[test]
fn refine_repairs_a_perturbed_line() {
    let f = Fixture::new(2, 20, 4, 8);
    let (layout, mut order) = sorted_line(&f);
    // move three samples of each class into the other half
    for (a, b) in [(2, 25), (9, 33), (15, 38)] {
        let tmp = order[a].1;
        order[a].1 = order[b].1;
        order[b].1 = tmp;
    }
    fs::write(f.path("perturbed.csv"), elmvis_core::dataio::order_csv(&order)).unwrap();
    let out = f.path("out");
    let (before, after, accepted) = refine_metrics(
        &f,
        &f.path("perturbed.csv"),
        &layout,
        &out,
        &["--neurons", "2", "--seed", "4"],
    );
    assert!(after >= before);
    assert!(accepted > 0);
    let repaired = read_order(&out.join("order.csv"));
    assert!(half_purity(&repaired, &f.labels) > half_purity(&order, &f.labels));
}

#[test]
fn refine_leaves_a_local_optimum_alone() {
    let f = Fixture::new(2, 20, 4, 9);
    let (layout, order) = sorted_line(&f);
    fs::write(f.path("start.csv"), elmvis_core::dataio::order_csv(&order)).unwrap();
    let first = f.path("first");
    // 780 pairs; a long stagnation window makes the first pass reach a local optimum
    let args = ["--neurons", "3", "--stagnation", "20000", "--seed", "5"];
    let (b0, a0, _) = refine_metrics(&f, &f.path("start.csv"), &layout, &first, &args);
    assert!(a0 >= b0);
    let second = f.path("second");
    let (b1, a1, accepted) = refine_metrics(&f, &first.join("order.csv"), &layout, &second, &args);
    assert_eq!(accepted, 0);
    assert_eq!(a1, b1);
    assert!((b1 - a0).abs() <= 1e-9 * a0.abs());
    assert_eq!(
        fs::read(first.join("order.csv")).unwrap(),
        fs::read(second.join("order.csv")).unwrap()
    );
}

#[test]
fn eval_oracle_reports_each_trial() {
    let out = ok(&["eval-oracle", "--trials", "1", "--seed", "0"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let errors: Vec<f64> = text
        .lines()
        .filter(|l| l.starts_with("trial "))
        .map(|l| l.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(errors.len(), 1);
    assert!(errors[0] <= 1e-7);

    let serial = ok(&["eval-oracle", "--trials", "12", "--seed", "5"]).stdout;
    assert_eq!(serial, ok(&["eval-oracle", "--trials", "12", "--seed", "5"]).stdout);
    assert_eq!(
        serial,
        ok(&["eval-oracle", "--trials", "12", "--seed", "5", "--jobs", "4"]).stdout
    );
}

#[test]
fn usage_errors_exit_with_two() {
    let f = Fixture::new(2, 10, 3, 10);
    fs::write(f.path("bad.csv"), "1,2,3\n4,x,6\n").unwrap();
    let x = f.path("x.csv");
    let bad = f.path("bad.csv");
    let out = f.path("out");
    let cases: Vec<Vec<&str>> = vec![
        vec!["eval-oracle", "--trials", "0"],
        vec!["visualize", "--data", "/nonexistent/x.csv", "--out", s(&out)],
        vec!["visualize", "--data", s(&bad), "--out", s(&out)],
        vec!["visualize", "--data", s(&x), "--layout", "hex", "--out", s(&out)],
        vec!["visualize", "--data", s(&x), "--neurons", "0", "--out", s(&out)],
        vec!["visualize", "--data", s(&x), "--k", "zero", "--out", s(&out)],
        vec!["visualize", "--data", s(&x), "--labels", s(&bad), "--out", s(&out)],
        vec![
            "pair",
            "--inputs",
            s(&x),
            "--outputs",
            s(&x),
            "--true-labels",
            "/nonexistent",
            "--out",
            s(&out),
        ],
        vec![
            "refine",
            "--data",
            s(&x),
            "--layout-file",
            s(&x),
            "--order",
            "/nonexistent",
            "--out",
            s(&out),
        ],
        vec!["frobnicate"],
    ];
    for args in cases {
        let code = elmvis(&args).status.code();
        assert_eq!(code, Some(2), "elmvis {args:?}");
    }
    let stderr =
        String::from_utf8(elmvis(&["visualize", "--data", s(&f.path("bad.csv")), "--out", s(&out)]).stderr).unwrap();
    assert!(stderr.contains("bad.csv") && stderr.contains('2'), "{stderr}");
}
