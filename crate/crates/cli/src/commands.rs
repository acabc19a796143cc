//! Subcommand bodies. Each takes its fully resolved settings, validates the
//! user-facing parameters (failures are usage errors), runs the pipeline and
//! writes outputs atomically, dumping the settings next to them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use boostdistill::data::write_atomic;
use boostdistill::harness::{
    emit_report, prepare_workload, run_latency_protocol, run_protocol, seeded_permutation, Method, ProtocolConfig,
    TreeConfig, WorkloadConfig,
};
use boostdistill::learn::{retrain_stream, tune_depth};
use boostdistill::oracle::{enumerate_instances, sampled_diff, DEFAULT_LIMIT};
use boostdistill::synthetic::synthetic_table;
use boostdistill::{
    binarize, binarize_table, bt_sufficient_reason_exact, bt_tree_specific_reason, candidate_conditions, cart_learn,
    derive_theory, distill_stream, dt_sufficient_reason, gbt_learn, misclassified, BoostedTree, Budget, ConditionSet,
    Dataset, DecisionTree, DeletionOrder, DistillConfig, DistillTrace, Error, GbtConfig, Instance, Model, PoolConfig,
    RawTable, RetrainConfig, SampleRule,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{CliError, ConfigSel, Engine, Kind, LiteralOrder, MethodSel, SampleRuleArg, StreamOrder};

type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn required<'a, T>(v: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| usage(format!("--{flag} is required")))
}

fn check(ok: bool, msg: &str) -> CliResult {
    if ok {
        Ok(())
    } else {
        Err(usage(msg))
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| {
        CliError::Data(Error::Io {
            path: path.into(),
            source: e,
        })
    })
}

/// Prefixes JSON parse errors with the file they came from.
fn in_file(path: &Path) -> impl Fn(Error) -> CliError + '_ {
    move |e| match e {
        Error::Parse { path: at, message } => CliError::Data(Error::Parse {
            path: format!("{}: {at}", path.display()),
            message,
        }),
        other => other.into(),
    }
}

fn load_model(path: &Path) -> CliResult<Model> {
    Model::from_json(&read_text(path)?).map_err(in_file(path))
}

fn load_boosted(path: &Path) -> CliResult<BoostedTree> {
    match load_model(path)? {
        Model::Boosted(bt) => Ok(bt),
        Model::Decision { .. } => Err(CliError::Data(Error::Structural(format!(
            "{}: expected a boosted tree",
            path.display()
        )))),
    }
}

fn load_decision(path: &Path, cs: &ConditionSet) -> CliResult<DecisionTree> {
    match load_model(path)? {
        Model::Decision { conditions, tree } if &conditions == cs => Ok(tree),
        Model::Decision { .. } => Err(CliError::Data(Error::Structural(format!(
            "{}: the decision tree uses different conditions from the boosted tree",
            path.display()
        )))),
        Model::Boosted(_) => Err(CliError::Data(Error::Structural(format!(
            "{}: expected a decision tree",
            path.display()
        )))),
    }
}

fn load_table(path: &Path) -> CliResult<RawTable> {
    Ok(RawTable::from_path(path)?)
}

fn write(path: &Path, text: &str) -> CliResult {
    Ok(write_atomic(path, text.as_bytes())?)
}

/// Writes the resolved settings to `<out>.config.json`.
fn dump_config<T: Serialize>(out: &Path, resolved: &T) -> CliResult {
    write(&out.with_extension("config.json"), &to_pretty(resolved))
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("settings serialize");
    s.push('\n');
    s
}

fn deletion_order(order: LiteralOrder, seed: u64) -> DeletionOrder {
    match order {
        LiteralOrder::Descending => DeletionOrder::Descending,
        LiteralOrder::Ascending => DeletionOrder::Ascending,
        LiteralOrder::Shuffled => DeletionOrder::Shuffled(seed),
    }
}

fn sample_rule(r: SampleRuleArg) -> SampleRule {
    match r {
        SampleRuleArg::Cap => SampleRule::Cap,
        SampleRuleArg::Max => SampleRule::Max,
    }
}

fn trace_lines(trace: &DistillTrace) -> String {
    trace
        .steps
        .iter()
        .map(|s| serde_json::to_string(s).expect("step records serialize") + "\n")
        .collect()
}

fn trace_summary(trace: &DistillTrace, dt: &DecisionTree, remaining: usize) -> serde_json::Value {
    json!({
        "initial_accuracy": trace.initial_accuracy,
        "initial_misclassified": trace.initial_misclassified,
        "initial_size": trace.initial_size,
        "initial_depth": trace.initial_depth,
        "corrections": trace.corrections(),
        "final_accuracy": trace.final_accuracy(),
        "final_size": dt.size(),
        "final_depth": dt.depth(),
        "remaining_misclassified": remaining,
    })
}

// ---------------------------------------------------------------- train

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Train {
    kind: Option<Kind>,
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    bt: Option<PathBuf>,
    conditions: Option<PathBuf>,
    max_depth: Option<usize>,
    n_estimators: usize,
    depth: usize,
    learning_rate: f64,
    l2: f64,
    subsample: f64,
    seed: u64,
    max_thresholds: usize,
}

impl Default for Train {
    fn default() -> Self {
        let g = GbtConfig::default();
        Train {
            kind: None,
            data: None,
            out: None,
            bt: None,
            conditions: None,
            max_depth: None,
            n_estimators: g.n_estimators,
            depth: g.max_depth,
            learning_rate: g.learning_rate,
            l2: g.l2,
            subsample: g.subsample,
            seed: g.seed,
            max_thresholds: PoolConfig::default().max_thresholds,
        }
    }
}

pub fn train(cfg: Train) -> CliResult {
    let kind = *required(&cfg.kind, "kind")?;
    let data = required(&cfg.data, "data")?;
    let out = required(&cfg.out, "out")?;
    check(cfg.n_estimators >= 1, "--n-estimators must be at least 1")?;
    check(cfg.learning_rate > 0.0, "--learning-rate must be positive")?;
    check(cfg.l2 >= 0.0, "--l2 must be non-negative")?;
    check(
        cfg.subsample > 0.0 && cfg.subsample <= 1.0,
        "--subsample must lie in (0, 1]",
    )?;
    check(cfg.max_thresholds >= 1, "--max-thresholds must be at least 1")?;
    check(
        cfg.bt.is_none() || cfg.conditions.is_none(),
        "--bt and --conditions are exclusive",
    )?;

    let table = load_table(data)?;
    let cs = if let Some(p) = &cfg.bt {
        load_boosted(p)?.conditions
    } else if let Some(p) = &cfg.conditions {
        ConditionSet::from_json(&read_text(p)?).map_err(in_file(p))?
    } else {
        candidate_conditions(
            &table,
            &PoolConfig {
                max_thresholds: cfg.max_thresholds,
            },
        )
    };
    let name = data.display().to_string();
    let train = Dataset::new(binarize_table(&table, &cs)?, table.labels.clone(), name)?;
    let text = match kind {
        Kind::Dt => {
            let tree = cart_learn(&train, cfg.max_depth)?;
            Model::Decision { conditions: cs, tree }.to_json()
        }
        Kind::Bt => {
            let gcfg = GbtConfig {
                n_estimators: cfg.n_estimators,
                max_depth: cfg.depth,
                learning_rate: cfg.learning_rate,
                l2: cfg.l2,
                subsample: cfg.subsample,
                seed: cfg.seed,
            };
            Model::Boosted(gbt_learn(&train, &cs, &gcfg)?).to_json()
        }
    };
    write(out, &text)?;
    dump_config(out, &cfg)
}

// ---------------------------------------------------------------- distill

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Distill {
    bt: Option<PathBuf>,
    dt: Option<PathBuf>,
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    trace_out: Option<PathBuf>,
    stream_order: StreamOrder,
    shuffle_seed: u64,
    max_steps: Option<usize>,
    no_simplify: bool,
    deletion_order: LiteralOrder,
    deletion_seed: u64,
}

/// The boosted tree, the decision tree over its conditions and the stream.
fn load_setup(
    bt: &Option<PathBuf>,
    dt: &Option<PathBuf>,
    data: &Option<PathBuf>,
) -> CliResult<(BoostedTree, DecisionTree, RawTable)> {
    let bt = load_boosted(required(bt, "bt")?)?;
    let dt = load_decision(required(dt, "dt")?, &bt.conditions)?;
    let table = load_table(required(data, "data")?)?;
    Ok((bt, dt, table))
}

pub fn distill(cfg: Distill) -> CliResult {
    check(cfg.max_steps != Some(0), "--max-steps must be at least 1")?;
    let (bt, dt0, table) = load_setup(&cfg.bt, &cfg.dt, &cfg.data)?;
    let th = bt.theory();
    let mut stream = binarize_table(&table, &bt.conditions)?;
    if cfg.stream_order == StreamOrder::Shuffle {
        let perm = seeded_permutation(stream.len(), cfg.shuffle_seed);
        stream = perm.into_iter().map(|i| stream[i].clone()).collect();
    }
    let dcfg = DistillConfig {
        order: deletion_order(cfg.deletion_order, cfg.deletion_seed),
        simplify: !cfg.no_simplify,
        max_steps: cfg.max_steps,
        ..DistillConfig::default()
    };
    let (dt, trace) = distill_stream(&dt0, &bt, &stream, &th, &dcfg)?;
    let remaining = misclassified(&dt, &bt, &stream).len();
    if cfg.max_steps.is_none() && remaining != 0 {
        return Err(CliError::Internal(format!(
            "{remaining} stream instances still disagree with the boosted tree after distillation"
        )));
    }
    if let Some(p) = &cfg.trace_out {
        write(p, &trace_lines(&trace))?;
    }
    if let Some(out) = &cfg.out {
        write(
            out,
            &Model::Decision {
                conditions: bt.conditions.clone(),
                tree: dt.clone(),
            }
            .to_json(),
        )?;
        dump_config(out, &cfg)?;
    }
    println!("{}", trace_summary(&trace, &dt, remaining));
    Ok(())
}

// ---------------------------------------------------------------- retrain-correct

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Retrain {
    bt: Option<PathBuf>,
    dt: Option<PathBuf>,
    train: Option<PathBuf>,
    data: Option<PathBuf>,
    out: Option<PathBuf>,
    trace_out: Option<PathBuf>,
    train_out: Option<PathBuf>,
    ratio: f64,
    bound: usize,
    sample_rule: SampleRuleArg,
    seed: u64,
    max_depth: Option<usize>,
    deletion_order: LiteralOrder,
    deletion_seed: u64,
}

impl Default for Retrain {
    fn default() -> Self {
        let r = RetrainConfig::default();
        Retrain {
            bt: None,
            dt: None,
            train: None,
            data: None,
            out: None,
            trace_out: None,
            train_out: None,
            ratio: r.ratio,
            bound: r.bound,
            sample_rule: SampleRuleArg::Cap,
            seed: r.seed,
            max_depth: None,
            deletion_order: LiteralOrder::Descending,
            deletion_seed: 0,
        }
    }
}

fn dataset_csv(d: &Dataset, cs: &ConditionSet) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = cs.iter().map(|c| c.name()).chain(["label".to_string()]).collect();
    w.write_record(&header).expect("in-memory write");
    for (x, y) in &d.items {
        let row = x.bits().iter().chain([y]).map(|&b| if b { "1" } else { "0" });
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn retrain_correct(cfg: Retrain) -> CliResult {
    check(cfg.ratio > 0.0 && cfg.ratio <= 1.0, "--ratio must lie in (0, 1]")?;
    check(cfg.bound >= 1, "--bound must be at least 1")?;
    let (bt, dt0, table) = load_setup(&cfg.bt, &cfg.dt, &cfg.data)?;
    let th = bt.theory();
    let train_path = required(&cfg.train, "train")?;
    let train_table = load_table(train_path)?;
    let train = Dataset::new(
        binarize_table(&train_table, &bt.conditions)?,
        train_table.labels.clone(),
        train_path.display().to_string(),
    )?;
    let stream = binarize_table(&table, &bt.conditions)?;
    let rcfg = RetrainConfig {
        ratio: cfg.ratio,
        bound: cfg.bound,
        sample_rule: sample_rule(cfg.sample_rule),
        seed: cfg.seed,
    };
    let order = deletion_order(cfg.deletion_order, cfg.deletion_seed);
    let (dt, trace) = retrain_stream(&train, &dt0, &bt, &stream, &th, &rcfg, order, cfg.max_depth)?;
    let remaining = misclassified(&dt, &bt, &stream).len();
    if let Some(p) = &cfg.trace_out {
        write(p, &trace_lines(&trace))?;
    }
    if let Some(p) = &cfg.train_out {
        let mut data = train.clone();
        // replay the corrections to recover the final training set
        let mut cur = dt0.clone();
        for s in &trace.steps {
            let rule = boostdistill::ClassificationRule::new(&s.premises, s.conclusion, &th)?;
            let (d, t) =
                boostdistill::retrain_correct(&data, &cur, &bt, &s.instance, &rule, &rcfg, &th, cfg.max_depth)?;
            data = d;
            cur = t;
        }
        write(p, &dataset_csv(&data, &bt.conditions))?;
    }
    if let Some(out) = &cfg.out {
        write(
            out,
            &Model::Decision {
                conditions: bt.conditions.clone(),
                tree: dt.clone(),
            }
            .to_json(),
        )?;
        dump_config(out, &cfg)?;
    }
    println!("{}", trace_summary(&trace, &dt, remaining));
    Ok(())
}

// ---------------------------------------------------------------- explain

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Explain {
    model: Option<PathBuf>,
    row: Option<String>,
    data: Option<PathBuf>,
    index: Option<usize>,
    engine: Engine,
    timeout_ms: u64,
    deletion_order: LiteralOrder,
    deletion_seed: u64,
    out: Option<PathBuf>,
}

impl Default for Explain {
    fn default() -> Self {
        Explain {
            model: None,
            row: None,
            data: None,
            index: None,
            engine: Engine::Auto,
            timeout_ms: 10_000,
            deletion_order: LiteralOrder::Descending,
            deletion_seed: 0,
            out: None,
        }
    }
}

fn parse_row(text: &str) -> CliResult<BTreeMap<String, String>> {
    text.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| usage(format!("--row entry `{p}` is not attribute=value")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}

fn pick_instance(cfg: &Explain, cs: &ConditionSet) -> CliResult<Instance> {
    match (&cfg.row, &cfg.data) {
        (Some(row), None) => Ok(binarize(&parse_row(row)?, cs)?),
        (None, Some(path)) => {
            let i = *required(&cfg.index, "index")?;
            let table = load_table(path)?;
            let row = table.rows.get(i).ok_or_else(|| {
                CliError::Data(Error::Dataset(format!(
                    "{}: row index {i} out of range ({} rows)",
                    path.display(),
                    table.len()
                )))
            })?;
            Ok(binarize(row, cs)?)
        }
        _ => Err(usage("give exactly one of --row and --data")),
    }
}

pub fn explain(cfg: Explain) -> CliResult {
    let model = load_model(required(&cfg.model, "model")?)?;
    let cs = model.conditions().clone();
    let th = derive_theory(&cs);
    let x = pick_instance(&cfg, &cs)?;
    if !th.satisfied_by(x.bits()) {
        return Err(CliError::Data(Error::Dataset(format!(
            "instance {x} violates the domain theory"
        ))));
    }
    let order = deletion_order(cfg.deletion_order, cfg.deletion_seed);
    let class = model.classify(&x);
    let start = Instant::now();
    let (engine, reason) = match (&model, cfg.engine) {
        (Model::Decision { tree, .. }, Engine::Auto | Engine::Exact) => {
            ("sufficient-reason", Some(dt_sufficient_reason(tree, &x, &th, order)))
        }
        (Model::Decision { .. }, Engine::TreeSpecific) => {
            return Err(usage("the tree-specific engine applies to boosted trees"));
        }
        (Model::Boosted(bt), Engine::Auto | Engine::TreeSpecific) => {
            ("tree-specific", Some(bt_tree_specific_reason(bt, &x, &th, order)))
        }
        (Model::Boosted(bt), Engine::Exact) => {
            let budget = Budget::within(Duration::from_millis(cfg.timeout_ms));
            ("exact", bt_sufficient_reason_exact(bt, &x, &th, order, budget).ok())
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let doc = json!({
        "instance": x,
        "class": u8::from(class),
        "reason": reason.as_ref().map(|t| t.to_signed()),
        "engine": engine,
        "timed_out": reason.is_none(),
        "elapsed_ms": elapsed_ms,
    });
    let text = to_pretty(&doc);
    match &cfg.out {
        Some(out) => {
            write(out, &text)?;
            dump_config(out, &cfg)
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- bench

pub const REPORT_DIR_ENV: &str = "BOOSTDISTILL_REPORT_DIR";

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Bench {
    dataset: String,
    rows: usize,
    data_seed: u64,
    method: MethodSel,
    tree_config: ConfigSel,
    seeds: Vec<u64>,
    runs: usize,
    timeout_ms: u64,
    queries: usize,
    report_dir: PathBuf,
    n_estimators: usize,
    depth: usize,
    learning_rate: f64,
    max_thresholds: usize,
    max_depth: Option<usize>,
    holdout: Option<f64>,
    ratio: f64,
    bound: usize,
    sample_rule: SampleRuleArg,
    deletion_order: LiteralOrder,
    deletion_seed: u64,
    no_simplify: bool,
}

impl Default for Bench {
    fn default() -> Self {
        let g = GbtConfig::default();
        let p = ProtocolConfig::default();
        let r = RetrainConfig::default();
        Bench {
            dataset: "synthetic".into(),
            rows: 1000,
            data_seed: 0,
            method: MethodSel::Both,
            tree_config: ConfigSel::Both,
            seeds: vec![0],
            runs: p.runs,
            timeout_ms: 10_000,
            queries: 100,
            report_dir: std::env::var_os(REPORT_DIR_ENV).map_or_else(|| PathBuf::from("reports"), PathBuf::from),
            n_estimators: g.n_estimators,
            depth: g.max_depth,
            learning_rate: g.learning_rate,
            max_thresholds: PoolConfig::default().max_thresholds,
            max_depth: None,
            holdout: None,
            ratio: r.ratio,
            bound: r.bound,
            sample_rule: SampleRuleArg::Cap,
            deletion_order: LiteralOrder::Descending,
            deletion_seed: 0,
            no_simplify: false,
        }
    }
}

pub fn bench(cfg: Bench) -> CliResult {
    check(cfg.runs >= 1, "--runs must be at least 1")?;
    check(!cfg.seeds.is_empty(), "--seeds must name at least one seed")?;
    check(cfg.n_estimators >= 1, "--n-estimators must be at least 1")?;
    check(cfg.learning_rate > 0.0, "--learning-rate must be positive")?;
    check(cfg.max_thresholds >= 1, "--max-thresholds must be at least 1")?;
    check(cfg.ratio > 0.0 && cfg.ratio <= 1.0, "--ratio must lie in (0, 1]")?;
    check(cfg.bound >= 1, "--bound must be at least 1")?;
    if let Some(h) = cfg.holdout {
        check(h > 0.0 && h < 0.5, "--holdout must lie in (0, 0.5)")?;
    }
    let (name, table) = if cfg.dataset == "synthetic" {
        check(cfg.rows >= 10, "--rows must be at least 10")?;
        ("synthetic".to_string(), synthetic_table(cfg.rows, cfg.data_seed))
    } else {
        let path = Path::new(&cfg.dataset);
        let stem = path
            .file_stem()
            .map_or_else(|| cfg.dataset.clone(), |s| s.to_string_lossy().into_owned());
        (stem, load_table(path)?)
    };
    let methods: &[Method] = match cfg.method {
        MethodSel::Rectify => &[Method::Rectify],
        MethodSel::Retrain => &[Method::Retrain],
        MethodSel::Both => &[Method::Rectify, Method::Retrain],
    };
    let configs: Vec<TreeConfig> = match cfg.tree_config {
        ConfigSel::Default => vec![TreeConfig::Default],
        ConfigSel::Optimized => vec![TreeConfig::Optimized(cfg.max_depth)],
        ConfigSel::Both => vec![TreeConfig::Default, TreeConfig::Optimized(cfg.max_depth)],
    };
    let order = deletion_order(cfg.deletion_order, cfg.deletion_seed);
    let mut summaries = Vec::new();
    let mut latency = Vec::new();
    for &seed in &cfg.seeds {
        let label = if cfg.seeds.len() > 1 {
            format!("{name}-s{seed}")
        } else {
            name.clone()
        };
        let wcfg = WorkloadConfig {
            split_seed: seed,
            holdout_fraction: cfg.holdout,
            gbt: GbtConfig {
                n_estimators: cfg.n_estimators,
                max_depth: cfg.depth,
                learning_rate: cfg.learning_rate,
                seed,
                ..GbtConfig::default()
            },
            pool: PoolConfig {
                max_thresholds: cfg.max_thresholds,
            },
            ..WorkloadConfig::default()
        };
        let w = prepare_workload(&label, &table, &wcfg)?;
        let pcfg = ProtocolConfig {
            runs: cfg.runs,
            seed,
            order,
            simplify: !cfg.no_simplify,
            retrain: RetrainConfig {
                ratio: cfg.ratio,
                bound: cfg.bound,
                sample_rule: sample_rule(cfg.sample_rule),
                seed,
            },
            ..ProtocolConfig::default()
        };
        // tune once per workload so both methods share the bound
        let configs: Vec<TreeConfig> = configs
            .iter()
            .map(|c| match c {
                TreeConfig::Optimized(None) => {
                    tune_depth(&w.train, pcfg.tune_max_depth, seed).map(|d| TreeConfig::Optimized(Some(d)))
                }
                other => Ok(*other),
            })
            .collect::<Result<_, _>>()?;
        for &method in methods {
            for &config in &configs {
                let s = run_protocol(&w, method, config, &pcfg)?;
                if method == Method::Rectify && s.runs.iter().any(|t| t.final_accuracy() != 1.0) {
                    return Err(CliError::Internal(format!(
                        "{label}: a rectification run ended with disagreements on the test set"
                    )));
                }
                summaries.push(s);
            }
        }
        if cfg.queries > 0 {
            let (report, _, _) = run_latency_protocol(&w, &pcfg, cfg.queries, Duration::from_millis(cfg.timeout_ms))?;
            latency.push(report);
        }
        eprintln!(
            "{label}: {} conditions, {} test instances",
            w.bt.num_conditions(),
            w.test.len()
        );
    }
    emit_report(&cfg.report_dir, &summaries, &latency)?;
    write(&cfg.report_dir.join("config.json"), &to_pretty(&cfg))?;
    println!("{}", cfg.report_dir.display());
    Ok(())
}

// ---------------------------------------------------------------- diff

#[derive(Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Diff {
    a: Option<PathBuf>,
    b: Option<PathBuf>,
    exhaustive: bool,
    samples: usize,
    seed: u64,
    out: Option<PathBuf>,
}

impl Default for Diff {
    fn default() -> Self {
        Diff {
            a: None,
            b: None,
            exhaustive: false,
            samples: 10_000,
            seed: 0,
            out: None,
        }
    }
}

pub fn diff(cfg: Diff) -> CliResult {
    let a = load_model(required(&cfg.a, "a")?)?;
    let b = load_model(required(&cfg.b, "b")?)?;
    if a.conditions() != b.conditions() {
        return Err(CliError::Data(Error::Structural(
            "the two models are over different condition sets".into(),
        )));
    }
    let th = derive_theory(a.conditions());
    let n = th.num_conditions();
    let (mode, checked, diff) = if cfg.exhaustive && n <= DEFAULT_LIMIT {
        let space = enumerate_instances(&th, DEFAULT_LIMIT)?;
        ("exact", space.len(), space.diff(&a, &b))
    } else {
        check(cfg.samples >= 1, "--samples must be at least 1")?;
        let (checked, diff) = sampled_diff(&a, &b, &th, cfg.samples, cfg.seed);
        ("sampled", checked, diff)
    };
    let doc = json!({
        "mode": mode,
        "conditions": n,
        "checked": checked,
        "disagreements": diff.len(),
        "diff": diff,
    });
    let text = to_pretty(&doc);
    print!("{text}");
    if let Some(out) = &cfg.out {
        write(out, &text)?;
        dump_config(out, &cfg)?;
    }
    Ok(())
}
