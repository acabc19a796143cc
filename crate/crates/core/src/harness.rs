//! The measurement protocol: split a table 70/30, learn a boosted tree on
//! the training part `L`, learn ten decision trees from 70% sub-samples of
//! `L`, correct each one over the test part `T` by rectification or by
//! retraining, and time sufficient-reason queries on the distilled tree
//! against the boosted tree.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{binarize_table, candidate_conditions, write_atomic, PoolConfig, RawTable};
use crate::error::{Error, Result};
use crate::explain::{bt_sufficient_reason_exact, dt_sufficient_reason_within, Budget, DeletionOrder};
use crate::learn::{cart_learn, gbt_learn, retrain_stream, tune_depth, Dataset, GbtConfig, RetrainConfig};
use crate::model::{BoostedTree, DecisionTree};
use crate::rectify::{distill_stream, DistillConfig, DistillTrace};
use crate::space::{DomainTheory, Instance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub split_seed: u64,
    pub train_fraction: f64,
    /// Rows set aside before the train/test split to measure agreement on
    /// instances that never trigger a correction. Off by default.
    pub holdout_fraction: Option<f64>,
    pub gbt: GbtConfig,
    pub pool: PoolConfig,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig {
            split_seed: 0,
            train_fraction: 0.7,
            holdout_fraction: None,
            gbt: GbtConfig::default(),
            pool: PoolConfig::default(),
        }
    }
}

/// A boosted tree with the binarized training and test sets.
#[derive(Clone, Debug)]
pub struct Workload {
    pub name: String,
    pub bt: BoostedTree,
    pub th: DomainTheory,
    pub train: Dataset,
    pub test: Dataset,
    pub holdout: Option<Dataset>,
}

struct Split {
    train: Vec<usize>,
    test: Vec<usize>,
    holdout: Option<Vec<usize>>,
}

fn split_rows(len: usize, cfg: &WorkloadConfig) -> Result<Split> {
    for f in std::iter::once(cfg.train_fraction).chain(cfg.holdout_fraction) {
        if !(f > 0.0 && f < 1.0) {
            return Err(Error::Precondition(format!("split fraction {f} must lie in (0, 1)")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.split_seed);
    let mut order = sample(&mut rng, len, len).into_vec();
    let holdout = cfg.holdout_fraction.map(|f| {
        let k = (f * len as f64).round() as usize;
        order.drain(..k.min(order.len())).collect::<Vec<_>>()
    });
    let cut = (cfg.train_fraction * order.len() as f64).round() as usize;
    let test = order.split_off(cut.min(order.len()));
    let split = Split {
        train: order,
        test,
        holdout,
    };
    if split.train.is_empty() || split.test.is_empty() || split.holdout.as_ref().is_some_and(Vec::is_empty) {
        return Err(Error::Dataset(format!(
            "splitting {len} rows leaves an empty side (train {}, test {})",
            split.train.len(),
            split.test.len()
        )));
    }
    Ok(split)
}

/// Splits `table`, learns the boosted tree on the training rows and
/// binarizes every side over the conditions the booster uses.
pub fn prepare_workload(name: &str, table: &RawTable, cfg: &WorkloadConfig) -> Result<Workload> {
    let split = split_rows(table.len(), cfg)?;
    let train_rows = table.select(&split.train);
    let pool = candidate_conditions(&train_rows, &cfg.pool);
    let pooled = Dataset::new(binarize_table(&train_rows, &pool)?, train_rows.labels.clone(), name)?;
    let bt = gbt_learn(&pooled, &pool, &cfg.gbt)?;
    assemble(name, table, bt, &split)
}

/// Like [`prepare_workload`] but with a supplied boosted tree.
pub fn workload_with_model(name: &str, table: &RawTable, bt: BoostedTree, cfg: &WorkloadConfig) -> Result<Workload> {
    let split = split_rows(table.len(), cfg)?;
    assemble(name, table, bt, &split)
}

fn assemble(name: &str, table: &RawTable, bt: BoostedTree, split: &Split) -> Result<Workload> {
    let th = bt.theory();
    let side = |idx: &[usize]| -> Result<Dataset> {
        let rows = table.select(idx);
        Dataset::new(binarize_table(&rows, &bt.conditions)?, rows.labels, name)
    };
    Ok(Workload {
        name: name.to_string(),
        train: side(&split.train)?,
        test: side(&split.test)?,
        holdout: split.holdout.as_deref().map(side).transpose()?,
        th,
        bt,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rectify,
    Retrain,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Rectify => "rectify",
            Method::Retrain => "retrain",
        })
    }
}

/// How the initial (and retrained) decision trees are learned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeConfig {
    /// Unbounded depth, split until pure.
    Default,
    /// Depth bounded by the given value, or tuned on `L` when absent.
    Optimized(Option<usize>),
}

impl TreeConfig {
    pub fn label(&self) -> &'static str {
        match self {
            TreeConfig::Default => "default",
            TreeConfig::Optimized(_) => "optimized",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub runs: usize,
    /// Share of `L` each initial tree is learned from.
    pub subsample: f64,
    pub seed: u64,
    pub order: DeletionOrder,
    pub simplify: bool,
    pub retrain: RetrainConfig,
    /// Largest depth tried when tuning the optimized configuration.
    pub tune_max_depth: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            runs: 10,
            subsample: 0.7,
            seed: 0,
            order: DeletionOrder::Descending,
            simplify: true,
            retrain: RetrainConfig::default(),
            tune_max_depth: 12,
        }
    }
}

/// Traces of every run of one (workload, method, configuration) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub workload: String,
    pub method: Method,
    pub config: TreeConfig,
    pub depth_bound: Option<usize>,
    pub n_conditions: usize,
    pub test_size: usize,
    pub runs: Vec<DistillTrace>,
    /// Per run, agreement with the booster on the held-out rows before and
    /// after correction.
    pub holdout: Vec<(f64, f64)>,
}

/// Medians across runs of the tree state after a given step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepStats {
    pub relative_accuracy: f64,
    pub size: f64,
    pub depth: f64,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / 2.0
    })
}

impl RunSummary {
    /// State after `step` corrections (`None` for the final state); a run
    /// with fewer steps contributes its final state.
    pub fn at_step(&self, step: Option<usize>) -> Option<StepStats> {
        let states: Vec<(f64, u64, usize)> = self
            .runs
            .iter()
            .map(|r| {
                let k = step.unwrap_or(r.steps.len()).min(r.steps.len());
                match k {
                    0 => (r.initial_accuracy, r.initial_size, r.initial_depth),
                    k => {
                        let s = &r.steps[k - 1];
                        (s.relative_accuracy, s.size, s.depth)
                    }
                }
            })
            .collect();
        let col = |f: fn(&(f64, u64, usize)) -> f64| median(&states.iter().map(f).collect::<Vec<_>>());
        Some(StepStats {
            relative_accuracy: col(|s| s.0)?,
            size: col(|s| s.1 as f64)?,
            depth: col(|s| s.2 as f64)?,
        })
    }

    /// Median number of corrections performed.
    pub fn f(&self) -> Option<f64> {
        median(&self.runs.iter().map(|r| r.corrections() as f64).collect::<Vec<_>>())
    }

    pub fn initial_misclassified(&self) -> Option<f64> {
        median(
            &self
                .runs
                .iter()
                .map(|r| r.initial_misclassified as f64)
                .collect::<Vec<_>>(),
        )
    }

    /// Mean over runs of the total correction time, in milliseconds.
    pub fn mean_cumulative_ms(&self) -> Option<f64> {
        if self.runs.is_empty() {
            return None;
        }
        Some(self.runs.iter().map(DistillTrace::total_elapsed_ms).sum::<f64>() / self.runs.len() as f64)
    }

    pub fn holdout_final(&self) -> Option<f64> {
        median(&self.holdout.iter().map(|h| h.1).collect::<Vec<_>>())
    }

    /// Zeroes every wall-clock field, leaving what is reproducible.
    pub fn strip_timings(&mut self) {
        for r in &mut self.runs {
            for s in &mut r.steps {
                s.elapsed_ms = 0.0;
            }
        }
    }
}

/// A seeded permutation of `0..len`.
pub fn seeded_permutation(len: usize, seed: u64) -> Vec<usize> {
    sample(&mut ChaCha8Rng::seed_from_u64(seed), len, len).into_vec()
}

fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

fn subsample_train(w: &Workload, pcfg: &ProtocolConfig, run: usize) -> Result<Dataset> {
    if !(pcfg.subsample > 0.0 && pcfg.subsample <= 1.0) {
        return Err(Error::Precondition("subsample must lie in (0, 1]".into()));
    }
    let k = ((pcfg.subsample * w.train.len() as f64).round() as usize).clamp(1, w.train.len().max(1));
    let mut idx = sample(&mut run_rng(pcfg.seed, run), w.train.len(), k).into_vec();
    idx.sort_unstable();
    Ok(w.train.select(&idx))
}

pub fn resolve_depth(w: &Workload, config: TreeConfig, pcfg: &ProtocolConfig) -> Result<Option<usize>> {
    Ok(match config {
        TreeConfig::Default => None,
        TreeConfig::Optimized(Some(d)) => Some(d),
        TreeConfig::Optimized(None) => Some(tune_depth(&w.train, pcfg.tune_max_depth, pcfg.seed)?),
    })
}

/// Runs one cell of the protocol: `pcfg.runs` initial trees, each
/// corrected over the whole test set.
pub fn run_protocol(w: &Workload, method: Method, config: TreeConfig, pcfg: &ProtocolConfig) -> Result<RunSummary> {
    if pcfg.runs == 0 {
        return Err(Error::Precondition("at least one run is required".into()));
    }
    let depth = resolve_depth(w, config, pcfg)?;
    let stream: Vec<Instance> = w.test.instances().cloned().collect();
    let dcfg = DistillConfig {
        order: pcfg.order,
        simplify: pcfg.simplify,
        ..DistillConfig::default()
    };
    let mut summary = RunSummary {
        workload: w.name.clone(),
        method,
        config,
        depth_bound: depth,
        n_conditions: w.bt.num_conditions(),
        test_size: stream.len(),
        runs: Vec::with_capacity(pcfg.runs),
        holdout: Vec::new(),
    };
    for run in 0..pcfg.runs {
        let sub = subsample_train(w, pcfg, run)?;
        let dt0 = cart_learn(&sub, depth)?;
        let (dt, trace) = match method {
            Method::Rectify => distill_stream(&dt0, &w.bt, &stream, &w.th, &dcfg)?,
            Method::Retrain => {
                let rcfg = RetrainConfig {
                    seed: pcfg.retrain.seed ^ run as u64,
                    ..pcfg.retrain.clone()
                };
                retrain_stream(&sub, &dt0, &w.bt, &stream, &w.th, &rcfg, pcfg.order, depth)?
            }
        };
        if let Some(h) = &w.holdout {
            let xs: Vec<Instance> = h.instances().cloned().collect();
            summary.holdout.push((
                crate::rectify::relative_accuracy(&dt0, &w.bt, &xs),
                crate::rectify::relative_accuracy(&dt, &w.bt, &xs),
            ));
        }
        summary.runs.push(trace);
    }
    Ok(summary)
}

/// Timings of one explanation engine, one entry per query (`None` when
/// the query timed out).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineStats {
    pub engine: String,
    pub times_ms: Vec<Option<f64>>,
    pub reason_sizes: Vec<Option<usize>>,
}

impl EngineStats {
    fn new(engine: &str) -> Self {
        EngineStats {
            engine: engine.to_string(),
            times_ms: Vec::new(),
            reason_sizes: Vec::new(),
        }
    }

    fn completed(&self) -> Vec<f64> {
        self.times_ms.iter().flatten().copied().collect()
    }

    /// Mean over the queries that finished in time.
    pub fn mean_ms(&self) -> Option<f64> {
        let done = self.completed();
        (!done.is_empty()).then(|| done.iter().sum::<f64>() / done.len() as f64)
    }

    pub fn median_ms(&self) -> Option<f64> {
        median(&self.completed())
    }

    pub fn timeouts(&self) -> usize {
        self.times_ms.iter().filter(|t| t.is_none()).count()
    }

    /// `(time, unresolved)` points: how many queries still lack an answer
    /// at each completion time.
    pub fn unresolved_curve(&self) -> Vec<(f64, usize)> {
        let mut done = self.completed();
        done.sort_by(f64::total_cmp);
        let total = self.times_ms.len();
        std::iter::once((0.0, total))
            .chain(done.into_iter().enumerate().map(|(i, t)| (t, total - i - 1)))
            .collect()
    }
}

/// Sufficient-reason latency on the distilled tree versus the booster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub workload: String,
    pub n_conditions: usize,
    pub timeout_ms: u64,
    /// Wall time of the distillation that produced the tree.
    pub t_c_ms: f64,
    pub dt: EngineStats,
    pub bt: EngineStats,
}

impl LatencyReport {
    /// `t_P / t_I`.
    pub fn alpha(&self) -> Option<f64> {
        let (ti, tp) = (self.dt.mean_ms()?, self.bt.mean_ms()?);
        (ti > 0.0).then(|| tp / ti)
    }

    /// `⌈t_C / (t_P − t_I)⌉`, defined only when `t_P > t_I`.
    pub fn beta(&self) -> Option<u64> {
        let (ti, tp) = (self.dt.mean_ms()?, self.bt.mean_ms()?);
        (tp > ti).then(|| (self.t_c_ms / (tp - ti)).ceil().max(1.0) as u64)
    }
}

/// Times a sufficient-reason query per instance on each engine. The calls
/// run one at a time on a dedicated thread, after one untimed warm-up call
/// per engine.
pub fn run_sr_latency(
    bt: &BoostedTree,
    dt: &DecisionTree,
    instances: &[Instance],
    th: &DomainTheory,
    timeout: Duration,
    t_c_ms: f64,
    order: DeletionOrder,
) -> LatencyReport {
    let (on_dt, on_bt) = std::thread::scope(|s| {
        s.spawn(|| {
            if let Some(x) = instances.first() {
                let _ = dt_sufficient_reason_within(dt, x, th, order, Budget::within(timeout));
                let _ = bt_sufficient_reason_exact(bt, x, th, order, Budget::within(timeout));
            }
            let mut on_dt = EngineStats::new("decision-tree");
            let mut on_bt = EngineStats::new("boosted-tree");
            for x in instances {
                let start = Instant::now();
                let r = dt_sufficient_reason_within(dt, x, th, order, Budget::within(timeout));
                record(&mut on_dt, r.ok().map(|t| t.len()), start);
                let start = Instant::now();
                let r = bt_sufficient_reason_exact(bt, x, th, order, Budget::within(timeout));
                record(&mut on_bt, r.ok().map(|t| t.len()), start);
            }
            (on_dt, on_bt)
        })
        .join()
        .expect("latency thread does not panic")
    });
    LatencyReport {
        workload: String::new(),
        n_conditions: bt.num_conditions(),
        timeout_ms: timeout.as_millis() as u64,
        t_c_ms,
        dt: on_dt,
        bt: on_bt,
    }
}

fn record(stats: &mut EngineStats, size: Option<usize>, start: Instant) {
    let ms = start.elapsed().as_secs_f64() * 1e3;
    stats.times_ms.push(size.map(|_| ms));
    stats.reason_sizes.push(size);
}

/// Distills the first protocol tree (default configuration) over the test
/// set, timing the whole run as `t_C`, then times sufficient reasons for
/// up to `queries` test instances drawn without replacement.
pub fn run_latency_protocol(
    w: &Workload,
    pcfg: &ProtocolConfig,
    queries: usize,
    timeout: Duration,
) -> Result<(LatencyReport, DecisionTree, DistillTrace)> {
    let sub = subsample_train(w, pcfg, 0)?;
    let dt0 = cart_learn(&sub, None)?;
    let stream: Vec<Instance> = w.test.instances().cloned().collect();
    let dcfg = DistillConfig {
        order: pcfg.order,
        simplify: pcfg.simplify,
        ..DistillConfig::default()
    };
    let start = Instant::now();
    let (dt, trace) = distill_stream(&dt0, &w.bt, &stream, &w.th, &dcfg)?;
    let t_c_ms = start.elapsed().as_secs_f64() * 1e3;
    let k = queries.min(stream.len());
    let mut rng = run_rng(pcfg.seed ^ 0x5eed, 0);
    let picked: Vec<Instance> = sample(&mut rng, stream.len(), k)
        .into_iter()
        .map(|i| stream[i].clone())
        .collect();
    let report = LatencyReport {
        workload: w.name.clone(),
        ..run_sr_latency(&w.bt, &dt, &picked, &w.th, timeout, t_c_ms, pcfg.order)
    };
    Ok((report, dt, trace))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub const SUMMARY_HEADER: [&str; 11] = [
    "workload",
    "method",
    "config",
    "step",
    "relative_accuracy",
    "nodes",
    "depth",
    "f",
    "initial_misclassified",
    "runs",
    "holdout_accuracy",
];

/// Rows of `summary.csv`: one per (workload, method, configuration, step)
/// for steps 0, 1, 2 and final. Contains no wall-clock values.
pub fn summary_csv(summaries: &[RunSummary]) -> String {
    let mut rows = Vec::new();
    for s in summaries {
        for (label, step) in [("0", Some(0)), ("1", Some(1)), ("2", Some(2)), ("final", None)] {
            let Some(st) = s.at_step(step) else { continue };
            rows.push(vec![
                s.workload.clone(),
                s.method.to_string(),
                s.config.label().to_string(),
                label.to_string(),
                format!("{:.4}", st.relative_accuracy),
                format!("{:.1}", st.size),
                format!("{:.1}", st.depth),
                opt(s.f()),
                opt(s.initial_misclassified()),
                s.runs.len().to_string(),
                if step.is_none() {
                    opt(s.holdout_final())
                } else {
                    String::new()
                },
            ]);
        }
    }
    csv_text(&SUMMARY_HEADER, &rows)
}

/// `times.csv`: mean cumulative correction time in seconds per workload,
/// for rectification and retraining under both configurations.
pub fn times_csv(summaries: &[RunSummary]) -> String {
    let mut names: Vec<&str> = summaries.iter().map(|s| s.workload.as_str()).collect();
    names.dedup();
    let rows: Vec<Vec<String>> = names
        .iter()
        .map(|name| {
            let cell = |config: &str, method: Method| {
                summaries
                    .iter()
                    .find(|s| s.workload == *name && s.config.label() == config && s.method == method)
                    .and_then(|s| s.mean_cumulative_ms())
                    .map_or_else(String::new, |ms| format!("{:.6}", ms / 1e3))
            };
            vec![
                name.to_string(),
                cell("default", Method::Rectify),
                cell("default", Method::Retrain),
                cell("optimized", Method::Rectify),
                cell("optimized", Method::Retrain),
            ]
        })
        .collect();
    csv_text(&["workload", "d_rec", "d_ret", "o_rec", "o_ret"], &rows)
}

pub fn latency_csv(reports: &[LatencyReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.workload.clone(),
                r.n_conditions.to_string(),
                r.dt.times_ms.len().to_string(),
                r.timeout_ms.to_string(),
                format!("{:.4}", r.t_c_ms),
                opt(r.dt.mean_ms()),
                r.dt.timeouts().to_string(),
                opt(r.bt.mean_ms()),
                r.bt.timeouts().to_string(),
                opt(r.alpha()),
                r.beta().map_or_else(String::new, |b| b.to_string()),
            ]
        })
        .collect();
    csv_text(
        &[
            "workload",
            "n",
            "queries",
            "timeout_ms",
            "t_c_ms",
            "t_i_ms",
            "to_i",
            "t_p_ms",
            "to_p",
            "alpha",
            "beta",
        ],
        &rows,
    )
}

pub fn curves_csv(reports: &[LatencyReport]) -> String {
    let mut rows = Vec::new();
    for r in reports {
        for e in [&r.dt, &r.bt] {
            for (t, left) in e.unresolved_curve() {
                rows.push(vec![
                    r.workload.clone(),
                    e.engine.clone(),
                    format!("{t:.4}"),
                    left.to_string(),
                ]);
            }
        }
    }
    csv_text(&["workload", "engine", "time_ms", "unresolved"], &rows)
}

#[derive(Serialize)]
struct TraceLine<'a> {
    workload: &'a str,
    method: Method,
    config: &'static str,
    run: usize,
    step: usize,
    relative_accuracy: f64,
    size: u64,
    depth: usize,
    elapsed_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    instance: Option<&'a Instance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    premises: Option<&'a crate::space::Term>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conclusion: Option<bool>,
}

/// One JSON line per run and step, step 0 being the initial tree.
pub fn trace_jsonl(summaries: &[RunSummary]) -> String {
    let mut out = String::new();
    for s in summaries {
        for (run, r) in s.runs.iter().enumerate() {
            let head = TraceLine {
                workload: &s.workload,
                method: s.method,
                config: s.config.label(),
                run,
                step: 0,
                relative_accuracy: r.initial_accuracy,
                size: r.initial_size,
                depth: r.initial_depth,
                elapsed_ms: 0.0,
                instance: None,
                premises: None,
                conclusion: None,
            };
            out.push_str(&serde_json::to_string(&head).expect("trace line serializes"));
            out.push('\n');
            for st in &r.steps {
                let line = TraceLine {
                    step: st.step,
                    relative_accuracy: st.relative_accuracy,
                    size: st.size,
                    depth: st.depth,
                    elapsed_ms: st.elapsed_ms,
                    instance: Some(&st.instance),
                    premises: Some(&st.premises),
                    conclusion: Some(st.conclusion),
                    ..head
                };
                out.push_str(&serde_json::to_string(&line).expect("trace line serializes"));
                out.push('\n');
            }
        }
    }
    out
}

pub const REPORT_FILES: [&str; 5] = ["summary.csv", "times.csv", "latency.csv", "curves.csv", "trace.jsonl"];

/// Writes every report file into `dir` (created if missing). Empty inputs
/// give header-only CSVs.
pub fn emit_report(dir: &Path, summaries: &[RunSummary], latency: &[LatencyReport]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        summary_csv(summaries),
        times_csv(summaries),
        latency_csv(latency),
        curves_csv(latency),
        trace_jsonl(summaries),
    ];
    for (name, text) in REPORT_FILES.iter().zip(files) {
        write_atomic(&dir.join(name), text.as_bytes())?;
    }
    Ok(())
}
