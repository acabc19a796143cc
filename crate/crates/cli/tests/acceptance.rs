//! Acceptance suite: one PASS/FAIL line per criterion. Every check is exact;
//! the brute-force oracles enumerate the whole feasible space.

// `!(a > b)` is meant: a NaN measurement must fail its check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use boostdistill::fixtures::{loan, loan_rectified, loan_simplified, LOAN_STREAM_CSV};
use boostdistill::harness::{
    prepare_workload, run_latency_protocol, run_protocol, Method, ProtocolConfig, TreeConfig, Workload, WorkloadConfig,
};
use boostdistill::learn::retrain_stream;
use boostdistill::oracle::{
    enumerate_instances, exact_diff, is_abductive_exact, min_explanations_exact, semantically_equal, DEFAULT_LIMIT,
};
use boostdistill::random::{
    random_boosted_tree, random_consistent_term, random_decision_tree, random_instance, random_space,
};
use boostdistill::synthetic::synthetic_table;
use boostdistill::{
    binarize_table, bt_tree_specific_reason, cart_learn, distill_step, distill_stream, dt_sufficient_reason,
    explanation_to_rule, misclassified, rectify_by_rule, retrain_correct, simplify, th_consistent, ClassificationRule,
    DecisionTree, DeletionOrder, DistillConfig, Instance, RawTable, RetrainConfig, Term,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
/// Stdout of every command and the masked contents of every output file.
type Snapshot = (Vec<Vec<u8>>, Vec<Vec<u8>>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn same_semantics(a: &DecisionTree, b: &DecisionTree, th: &boostdistill::DomainTheory) -> bool {
    semantically_equal(a, b, th).expect("space within the oracle limit")
}

fn bits(v: &[u8]) -> Instance {
    Instance::from_01(v)
}

// ---------------------------------------------------------------- 1

fn loan_golden() -> Outcome {
    let ex = loan();
    let th = &ex.th;
    let want: Vec<Instance> = vec![bits(&[0, 1, 0, 1]), bits(&[0, 1, 1, 1]), bits(&[1, 1, 1, 0])];
    let diff = exact_diff(&ex.dt, &ex.bt, th).map_err(|e| e.to_string())?;
    ensure!(diff == want, "(a) diff(I, P) = {diff:?}");

    let x = bits(&[0, 1, 1, 1]);
    let t = bt_tree_specific_reason(&ex.bt, &x, th, DeletionOrder::Descending);
    ensure!(t == Term::from_signed(&[-1]).unwrap(), "(b) reason {t}");

    let (step, _) = distill_step(&ex.dt, &ex.bt, &x, th).map_err(|e| e.to_string())?;
    ensure!(
        same_semantics(&step, &loan_simplified(), th),
        "(c) step tree differs from the simplified tree"
    );
    let left = exact_diff(&step, &ex.bt, th).map_err(|e| e.to_string())?;
    ensure!(left == [bits(&[1, 1, 1, 0])], "(c) remaining diff {left:?}");

    let rule = ClassificationRule::new(&Term::from_signed(&[-4]).unwrap(), false, th).map_err(|e| e.to_string())?;
    let r = rectify_by_rule(&ex.dt, &rule, th).map_err(|e| e.to_string())?;
    let space = enumerate_instances(th, DEFAULT_LIMIT).unwrap();
    for y in space.instances() {
        let b = y.bits();
        let want = ((b[0] && b[2]) || b[1]) && b[3];
        ensure!(r.classify(y) == want, "(d) rectified tree wrong on {y}");
    }

    let table = RawTable::from_reader(LOAN_STREAM_CSV.as_bytes(), "stream.csv").map_err(|e| e.to_string())?;
    let stream = binarize_table(&table, &ex.cs).map_err(|e| e.to_string())?;
    let (fin, trace) =
        distill_stream(&ex.dt, &ex.bt, &stream, th, &DistillConfig::default()).map_err(|e| e.to_string())?;
    ensure!(space.equal(&fin, &ex.bt), "(e) distilled tree differs from P");
    Ok(format!("(a)-(e) hold; {} corrections", trace.corrections()))
}

// ---------------------------------------------------------------- 2

fn rectify_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    for case in 0..500 {
        let n = rng.random_range(1..=14);
        let categorical = rng.random_bool(0.5);
        let (_, th) = random_space(&mut rng, n, categorical);
        let depth = rng.random_range(0..=7);
        let dt = random_decision_tree(&mut rng, n, depth);
        let keep = rng.random_range(0.1..0.6);
        let t = random_consistent_term(&mut rng, &th, keep);
        let rule = ClassificationRule::new(&t, rng.random_bool(0.5), &th).map_err(|e| e.to_string())?;
        let r = rectify_by_rule(&dt, &rule, &th).map_err(|e| e.to_string())?;
        let space = enumerate_instances(&th, DEFAULT_LIMIT).unwrap();
        for x in space.instances() {
            // (Σ ∨ φ) for a positive rule, (Σ ∧ ¬φ) for a negative one
            let want = if rule.covers(x) {
                rule.conclusion()
            } else {
                dt.classify(x)
            };
            ensure!(r.classify(x) == want, "case {case}: n = {n}, rule {rule}, wrong on {x}");
            checked += 1;
        }
    }
    Ok(format!("500 cases, {checked} instance checks"))
}

// ---------------------------------------------------------------- 3

fn order_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let n = rng.random_range(3..=12);
        let (cs, th) = random_space(&mut rng, n, true);
        let m = rng.random_range(1..=5);
        let bt = random_boosted_tree(&mut rng, &cs, m, 3);
        let dt = random_decision_tree(&mut rng, n, 4);
        let k = rng.random_range(1..=5);
        let mut memo: HashMap<Instance, Term> = HashMap::new();
        let mut rules = Vec::new();
        for _ in 0..k {
            let x = random_instance(&mut rng, &th);
            let t = memo
                .entry(x.clone())
                .or_insert_with(|| bt_tree_specific_reason(&bt, &x, &th, DeletionOrder::Descending))
                .clone();
            rules.push(explanation_to_rule(&t, bt.classify(&x), &th).map_err(|e| e.to_string())?);
        }
        let apply = |order: &[usize]| -> Result<DecisionTree, String> {
            let mut cur = dt.clone();
            for &i in order {
                cur = simplify(&rectify_by_rule(&cur, &rules[i], &th).map_err(|e| e.to_string())?, &th);
            }
            Ok(cur)
        };
        let mut a: Vec<usize> = (0..k).collect();
        let mut b = a.clone();
        shuffle(&mut a, &mut rng);
        shuffle(&mut b, &mut rng);
        let (ta, tb) = (apply(&a)?, apply(&b)?);
        ensure!(
            same_semantics(&ta, &tb, &th),
            "case {case}: orders {a:?} and {b:?} disagree"
        );
    }
    Ok("100 cases".into())
}

fn shuffle<T>(v: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..v.len()).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
}

// ---------------------------------------------------------------- 4

fn strict_shrinkage() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut done = 0;
    let mut attempts = 0;
    while done < 300 {
        attempts += 1;
        ensure!(attempts < 10_000, "could not find 300 cases with a non-empty diff");
        let n = rng.random_range(2..=12);
        let (cs, th) = random_space(&mut rng, n, true);
        let m = rng.random_range(1..=6);
        let bt = random_boosted_tree(&mut rng, &cs, m, 3);
        let dt = random_decision_tree(&mut rng, n, 5);
        let before = exact_diff(&dt, &bt, &th).map_err(|e| e.to_string())?;
        if before.is_empty() {
            continue;
        }
        let x = before[rng.random_range(0..before.len())].clone();
        let (next, _) = distill_step(&dt, &bt, &x, &th).map_err(|e| e.to_string())?;
        let after = exact_diff(&next, &bt, &th).map_err(|e| e.to_string())?;
        ensure!(
            after.len() < before.len(),
            "case {done}: diff {} -> {}",
            before.len(),
            after.len()
        );
        ensure!(
            next.classify(&x) == bt.classify(&x),
            "case {done}: trigger {x} not corrected"
        );
        let b: BTreeSet<&Instance> = before.iter().collect();
        ensure!(
            after.iter().all(|y| b.contains(y)),
            "case {done}: a new disagreement appeared"
        );
        done += 1;
    }
    Ok(format!("300 steps ({attempts} draws)"))
}

// ---------------------------------------------------------------- 5

fn non_conflict() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut pairs = 0usize;
    for case in 0..100 {
        let n = rng.random_range(2..=10);
        let (cs, th) = random_space(&mut rng, n, true);
        let m = rng.random_range(1..=6);
        let bt = random_boosted_tree(&mut rng, &cs, m, 3);
        let space = enumerate_instances(&th, DEFAULT_LIMIT).unwrap();
        let rules: Vec<ClassificationRule> = space
            .instances()
            .iter()
            .map(|x| {
                let t = bt_tree_specific_reason(&bt, x, &th, DeletionOrder::Descending);
                explanation_to_rule(&t, bt.classify(x), &th).expect("explanations are consistent")
            })
            .collect();
        for (i, a) in rules.iter().enumerate() {
            for b in &rules[i + 1..] {
                if a.conclusion() == b.conclusion() {
                    continue;
                }
                pairs += 1;
                let merged = a.premises().union(b.premises());
                ensure!(
                    merged.as_ref().is_none_or(|t| !th_consistent(t, &th)),
                    "case {case}: rules {a} and {b} can fire together"
                );
            }
        }
    }
    Ok(format!("100 boosted trees, {pairs} opposite pairs"))
}

// ---------------------------------------------------------------- 6

fn soundness_minimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut members = 0;
    for case in 0..200 {
        let n = rng.random_range(2..=14);
        let (cs, th) = random_space(&mut rng, n, true);
        let m = rng.random_range(1..=6);
        let bt = random_boosted_tree(&mut rng, &cs, m, 3);
        let dt = random_decision_tree(&mut rng, n, 6);
        let x = random_instance(&mut rng, &th);

        let t = bt_tree_specific_reason(&bt, &x, &th, DeletionOrder::Descending);
        let ok = is_abductive_exact(&bt, &t, bt.classify(&x), &th).map_err(|e| e.to_string())?;
        ensure!(ok, "case {case}: tree-specific reason {t} is not abductive");

        let cls = dt.classify(&x);
        let s = dt_sufficient_reason(&dt, &x, &th, DeletionOrder::Descending);
        ensure!(
            is_abductive_exact(&dt, &s, cls, &th).unwrap(),
            "case {case}: reason {s} is not abductive"
        );
        for l in s.iter() {
            let smaller = s.without(l.cond);
            ensure!(
                !is_abductive_exact(&dt, &smaller, cls, &th).unwrap(),
                "case {case}: reason {s} is not minimal (drop {l})"
            );
        }
        if n <= 12 {
            let all = min_explanations_exact(&dt, &x, &th).map_err(|e| e.to_string())?;
            ensure!(
                all.contains(&s),
                "case {case}: {s} missing from the minimal explanations"
            );
            members += 1;
        }
    }
    Ok(format!("200 cases, {members} membership checks"))
}

// ---------------------------------------------------------------- 7

fn simplification() -> Outcome {
    let ex = loan();
    let s = simplify(&loan_rectified(), &ex.th);
    ensure!(s.same_shape(&loan_simplified()), "loan tree simplifies to {s:?}");
    ensure!(s.size() == 7 && s.depth() == 3, "size {} depth {}", s.size(), s.depth());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..300 {
        let n = rng.random_range(1..=12);
        let (_, th) = random_space(&mut rng, n, true);
        let dt = random_decision_tree(&mut rng, n, 7);
        let once = simplify(&dt, &th);
        ensure!(same_semantics(&dt, &once, &th), "case {case}: semantics changed");
        ensure!(simplify(&once, &th).same_shape(&once), "case {case}: not idempotent");
        ensure!(
            once.size() <= dt.size(),
            "case {case}: size {} -> {}",
            dt.size(),
            once.size()
        );
    }
    Ok("loan tree: 7 nodes, depth 3; 300 random trees".into())
}

// ---------------------------------------------------------------- 8, 9, 10

fn synthetic_workload() -> Result<Workload, String> {
    let table = synthetic_table(1000, 0);
    prepare_workload("synthetic", &table, &WorkloadConfig::default()).map_err(|e| e.to_string())
}

fn end_to_end(w: &Workload) -> Outcome {
    let n = w.bt.num_conditions();
    ensure!(w.bt.trees.len() == 20 && n <= 18, "m = {}, n = {n}", w.bt.trees.len());
    let test: Vec<Instance> = w.test.instances().cloned().collect();
    let dt0 = cart_learn(&w.train, None).map_err(|e| e.to_string())?;
    let wrong: Vec<Instance> = misclassified(&dt0, &w.bt, &test)
        .into_iter()
        .map(|i| test[i].clone())
        .collect();
    let (dt, trace) =
        distill_stream(&dt0, &w.bt, &wrong, &w.th, &DistillConfig::default()).map_err(|e| e.to_string())?;
    ensure!(misclassified(&dt, &w.bt, &test).is_empty(), "disagreements remain on T");
    ensure!(
        trace.corrections() <= wrong.len(),
        "f = {} > {}",
        trace.corrections(),
        wrong.len()
    );

    let pcfg = ProtocolConfig::default();
    let s = run_protocol(w, Method::Rectify, TreeConfig::Default, &pcfg).map_err(|e| e.to_string())?;
    for (run, t) in s.runs.iter().enumerate() {
        ensure!(
            t.final_accuracy() == 1.0,
            "run {run}: final agreement {}",
            t.final_accuracy()
        );
        ensure!(
            t.corrections() <= t.initial_misclassified,
            "run {run}: f > initial diff"
        );
        let mut prev = t.initial_accuracy;
        for st in &t.steps {
            ensure!(
                st.relative_accuracy > prev,
                "run {run}: agreement not increasing at step {}",
                st.step
            );
            prev = st.relative_accuracy;
        }
    }
    Ok(format!(
        "n = {n}, |T| = {}, initial diff {} fixed in {} steps; 10 protocol runs monotone",
        test.len(),
        wrong.len(),
        trace.corrections()
    ))
}

fn retraining(w: &Workload) -> Outcome {
    let test: Vec<Instance> = w.test.instances().cloned().collect();
    let cfg = RetrainConfig::default();
    let mut data = w.train.clone();
    let mut dt = cart_learn(&data, None).map_err(|e| e.to_string())?;
    let mut fixes = 0;
    for x in &test {
        let target = w.bt.classify(x);
        if dt.classify(x) == target {
            continue;
        }
        let t = bt_tree_specific_reason(&w.bt, x, &w.th, DeletionOrder::Descending);
        let rule = explanation_to_rule(&t, target, &w.th).map_err(|e| e.to_string())?;
        let (d, next) = retrain_correct(&data, &dt, &w.bt, x, &rule, &cfg, &w.th, None).map_err(|e| e.to_string())?;
        ensure!(next.classify(x) == target, "trigger {x} not fixed by retraining");
        data = d;
        dt = next;
        fixes += 1;
    }
    let dt0 = cart_learn(&w.train, None).map_err(|e| e.to_string())?;
    let (_, trace) = retrain_stream(
        &w.train,
        &dt0,
        &w.bt,
        &test,
        &w.th,
        &cfg,
        DeletionOrder::Descending,
        None,
    )
    .map_err(|e| e.to_string())?;
    Ok(format!(
        "{fixes} triggers fixed immediately; stream run ended at agreement {:.4} after {} steps",
        trace.final_accuracy(),
        trace.corrections()
    ))
}

fn latency(w: &Workload) -> Outcome {
    let n = w.bt.num_conditions();
    ensure!(n == 18, "the reference workload has n = {n}");
    let (r, _, _) =
        run_latency_protocol(w, &ProtocolConfig::default(), 100, Duration::from_secs(10)).map_err(|e| e.to_string())?;
    ensure!(r.dt.times_ms.len() == 100, "{} queries", r.dt.times_ms.len());
    let (ti, tp) = (r.dt.mean_ms().unwrap_or(f64::NAN), r.bt.mean_ms().unwrap_or(f64::NAN));
    let med = r.dt.median_ms().unwrap_or(f64::NAN);
    let alpha = r.alpha().unwrap_or(f64::NAN);
    let detail = format!(
        "to_I = {}, median t_I = {med:.3} ms, t_I = {ti:.3} ms, t_P = {tp:.3} ms, to_P = {}, t_C = {:.1} ms, alpha = {alpha:.2}, beta = {:?}",
        r.dt.timeouts(),
        r.bt.timeouts(),
        r.t_c_ms,
        r.beta()
    );
    ensure!(r.dt.timeouts() == 0, "{detail}");
    ensure!(med < 10.0, "{detail}");
    ensure!(alpha > 1.0, "{detail}");
    if tp - ti > r.t_c_ms {
        ensure!(r.beta() == Some(1), "{detail}");
        Ok(detail)
    } else {
        Ok(format!(
            "{detail} (t_P - t_I <= t_C, so the beta = 1 check does not apply)"
        ))
    }
}

// ---------------------------------------------------------------- 11

fn run_bin(args: &[&str], dir: &Path) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_boostdistill"))
        .args(args)
        .current_dir(dir)
        .env_remove("BOOSTDISTILL_REPORT_DIR")
        .env_remove("BOOSTDISTILL_CONFIG")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "`{}` failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    Ok(out.stdout)
}

/// Timing fields vary between runs by nature; everything else must match.
fn masked(name: &str, bytes: &[u8]) -> Vec<u8> {
    let text = String::from_utf8_lossy(bytes);
    let drop_cols: &[&str] = match name {
        "times.csv" => &["d_rec", "d_ret", "o_rec", "o_ret"],
        "latency.csv" => &["t_c_ms", "t_i_ms", "to_i", "t_p_ms", "to_p", "alpha", "beta"],
        "curves.csv" => &["time_ms"],
        _ => &[],
    };
    if name.ends_with(".jsonl") || name == "explain.json" {
        let strip = |line: &str| {
            let mut v: serde_json::Value = serde_json::from_str(line).expect("json");
            if let Some(o) = v.as_object_mut() {
                o.remove("elapsed_ms");
            }
            v.to_string()
        };
        if name == "explain.json" {
            return strip(&text).into_bytes();
        }
        return text.lines().map(|l| strip(l) + "\n").collect::<String>().into_bytes();
    }
    if drop_cols.is_empty() {
        return bytes.to_vec();
    }
    let mut rdr = csv::Reader::from_reader(bytes);
    let header = rdr.headers().unwrap().clone();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&i| !drop_cols.contains(&&header[i]))
        .collect();
    let mut out = String::new();
    for rec in std::iter::once(Ok(header)).chain(rdr.records()) {
        let rec = rec.unwrap();
        out += &keep.iter().map(|&i| &rec[i]).collect::<Vec<_>>().join(",");
        out.push('\n');
    }
    out.into_bytes()
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let d = dir.path();
    std::fs::write(d.join("all.csv"), synthetic_table(400, 11).to_csv()).map_err(|e| e.to_string())?;
    let table = synthetic_table(400, 11);
    std::fs::write(
        d.join("train.csv"),
        table.select(&(0..280).collect::<Vec<_>>()).to_csv(),
    )
    .unwrap();
    std::fs::write(
        d.join("test.csv"),
        table.select(&(280..400).collect::<Vec<_>>()).to_csv(),
    )
    .unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec![
            "train",
            "--kind",
            "bt",
            "--data",
            "train.csv",
            "--out",
            "bt.json",
            "--seed",
            "3",
            "--subsample",
            "0.8",
        ],
        vec![
            "train",
            "--kind",
            "dt",
            "--data",
            "train.csv",
            "--bt",
            "bt.json",
            "--out",
            "dt.json",
        ],
        vec![
            "distill",
            "--bt",
            "bt.json",
            "--dt",
            "dt.json",
            "--data",
            "test.csv",
            "--out",
            "final.json",
            "--trace-out",
            "distill.jsonl",
            "--stream-order",
            "shuffle",
            "--shuffle-seed",
            "5",
        ],
        vec![
            "retrain-correct",
            "--bt",
            "bt.json",
            "--dt",
            "dt.json",
            "--train",
            "train.csv",
            "--data",
            "test.csv",
            "--out",
            "retrained.json",
            "--trace-out",
            "retrain.jsonl",
            "--train-out",
            "augmented.csv",
            "--seed",
            "9",
        ],
        vec![
            "explain",
            "--model",
            "bt.json",
            "--data",
            "test.csv",
            "--index",
            "4",
            "--out",
            "explain.json",
        ],
        vec![
            "diff",
            "--a",
            "final.json",
            "--b",
            "bt.json",
            "--samples",
            "2000",
            "--seed",
            "1",
            "--out",
            "diff.json",
        ],
        vec![
            "bench",
            "--dataset",
            "all.csv",
            "--runs",
            "2",
            "--queries",
            "5",
            "--seeds",
            "1,2",
            "--report-dir",
            "report",
        ],
    ];
    let files = [
        "bt.json",
        "bt.config.json",
        "dt.json",
        "dt.config.json",
        "final.json",
        "final.config.json",
        "distill.jsonl",
        "retrained.json",
        "retrained.config.json",
        "retrain.jsonl",
        "augmented.csv",
        "explain.json",
        "explain.config.json",
        "diff.json",
        "diff.config.json",
        "report/summary.csv",
        "report/times.csv",
        "report/latency.csv",
        "report/curves.csv",
        "report/trace.jsonl",
        "report/config.json",
    ];
    let mut runs: Vec<Snapshot> = Vec::new();
    for _ in 0..2 {
        let stdout = commands.iter().map(|c| run_bin(c, d)).collect::<Result<Vec<_>, _>>()?;
        let contents = files
            .iter()
            .map(|f| {
                let bytes = std::fs::read(d.join(f)).map_err(|e| format!("{f}: {e}"))?;
                Ok(masked(Path::new(f).file_name().unwrap().to_str().unwrap(), &bytes))
            })
            .collect::<Result<Vec<_>, String>>()?;
        runs.push((stdout, contents));
    }
    for (i, f) in files.iter().enumerate() {
        ensure!(runs[0].1[i] == runs[1].1[i], "{f} differs between runs");
    }
    // explain prints nothing with --out; bench prints the report path
    for (i, c) in commands.iter().enumerate() {
        ensure!(runs[0].0[i] == runs[1].0[i], "stdout of `{}` differs", c[0]);
    }
    Ok(format!(
        "{} commands, {} files identical (timing fields masked)",
        commands.len(),
        files.len()
    ))
}

// ---------------------------------------------------------------- driver

fn run(id: usize, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let elapsed = start.elapsed();
    let result = match result {
        Ok(d) if elapsed > budget => Err(format!("{d}; took {elapsed:.1?}, budget {budget:?}")),
        other => other,
    };
    match &result {
        Ok(detail) => println!("PASS {id:>2} {title}: {detail} [{elapsed:.2?}]"),
        Err(why) => println!("FAIL {id:>2} {title}: {why} [{elapsed:.2?}]"),
    }
    result.is_ok()
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = true;
    ok &= run(1, "running example golden suite", secs(1), loan_golden);
    ok &= run(
        2,
        "rule rectification equals brute-force semantics",
        secs(30),
        rectify_equivalence,
    );
    ok &= run(3, "rule application order invariance", secs(60), order_invariance);
    ok &= run(
        4,
        "each correction strictly shrinks the diff",
        secs(60),
        strict_shrinkage,
    );
    ok &= run(5, "explanation rules never conflict", secs(30), non_conflict);
    ok &= run(
        6,
        "explanation soundness and minimality",
        secs(120),
        soundness_minimality,
    );
    ok &= run(7, "simplification", secs(10), simplification);
    let w = synthetic_workload();
    let with_w = |f: fn(&Workload) -> Outcome| {
        let w = &w;
        move || w.as_ref().map_err(Clone::clone).and_then(f)
    };
    ok &= run(8, "synthetic end-to-end distillation", secs(60), with_w(end_to_end));
    ok &= run(
        9,
        "retraining baseline fixes each trigger",
        secs(600),
        with_w(retraining),
    );
    ok &= run(
        10,
        "latency: distilled tree versus boosted tree",
        secs(600),
        with_w(latency),
    );
    ok &= run(
        11,
        "byte-identical reruns of every subcommand",
        secs(600),
        reproducibility,
    );
    if !ok {
        std::process::exit(1);
    }
}
