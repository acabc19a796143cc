//! Learners over binarized data: greedy Gini CART for decision trees, a
//! small logistic-loss gradient booster, and the retraining baseline that
//! corrects a tree by augmenting its training set and learning it again.

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{bt_tree_specific_reason, explanation_to_rule, fnv1a, DeletionOrder};
use crate::model::{BoostedTree, ClassificationRule, DecisionTree, NodeId, RegressionTree, TreeBuilder};
use crate::rectify::{DistillTrace, StepRecord};
use crate::space::{Assignment, ConditionSet, DomainTheory, Instance, Lit};

/// Labelled binarized instances.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub items: Vec<(Instance, bool)>,
    /// Where the data came from, for reports.
    pub note: String,
}

impl Dataset {
    pub fn new(instances: Vec<Instance>, labels: Vec<bool>, note: impl Into<String>) -> Result<Self> {
        if instances.len() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} instances but {} labels",
                instances.len(),
                labels.len()
            )));
        }
        Ok(Dataset {
            items: instances.into_iter().zip(labels).collect(),
            note: note.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.items.iter().map(|(x, _)| x)
    }

    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            items: indices.iter().map(|&i| self.items[i].clone()).collect(),
            note: self.note.clone(),
        }
    }

    /// Rejects instances of the wrong width or violating the theory.
    pub fn check(&self, th: &DomainTheory) -> Result<()> {
        for (i, (x, _)) in self.items.iter().enumerate() {
            if x.len() != th.num_conditions() || !th.satisfied_by(x.bits()) {
                return Err(Error::Dataset(format!("item {i} is not a feasible instance")));
            }
        }
        Ok(())
    }

    fn width(&self) -> Result<usize> {
        let n = self
            .items
            .first()
            .map(|(x, _)| x.len())
            .ok_or_else(|| Error::Dataset("empty training set".into()))?;
        if self.items.iter().any(|(x, _)| x.len() != n) {
            return Err(Error::Dataset("instances of different widths".into()));
        }
        Ok(n)
    }
}

/// Greedy Gini CART. With `max_depth = None` nodes are split until they are
/// pure or no condition separates them; ties in impurity go to the lowest
/// condition id and leaves take the majority label (ties give class 0).
pub fn cart_learn(train: &Dataset, max_depth: Option<usize>) -> Result<DecisionTree> {
    let n = train.width()?;
    let mut b = TreeBuilder::new();
    let idx: Vec<usize> = (0..train.len()).collect();
    let root = cart_node(train, n, &idx, max_depth, &mut b);
    Ok(b.finish(root))
}

fn cart_node(train: &Dataset, n: usize, idx: &[usize], depth_left: Option<usize>, b: &mut TreeBuilder<bool>) -> NodeId {
    let pos = idx.iter().filter(|&&i| train.items[i].1).count();
    let majority = 2 * pos > idx.len();
    if pos == 0 || pos == idx.len() || depth_left == Some(0) {
        return b.leaf(majority);
    }
    let gini = |p: usize, total: usize| {
        let f = p as f64 / total as f64;
        total as f64 * 2.0 * f * (1.0 - f)
    };
    let mut best: Option<(f64, usize)> = None;
    for c in 0..n {
        let (mut t, mut tp) = (0usize, 0usize);
        for &i in idx {
            let (x, y) = &train.items[i];
            if x.get(c) {
                t += 1;
                tp += usize::from(*y);
            }
        }
        if t == 0 || t == idx.len() {
            continue;
        }
        let score = gini(tp, t) + gini(pos - tp, idx.len() - t);
        if best.is_none_or(|(s, _)| score < s) {
            best = Some((score, c));
        }
    }
    let Some((_, c)) = best else {
        return b.leaf(majority);
    };
    let (right, left): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| train.items[i].0.get(c));
    let next = depth_left.map(|d| d - 1);
    let l = cart_node(train, n, &left, next, b);
    let r = cart_node(train, n, &right, next, b);
    b.split(c, l, r)
}

/// Hyperparameters of the booster.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    /// L2 penalty on leaf values, added to the hessian sum.
    pub l2: f64,
    /// Fraction of the rows drawn (without replacement) for each round.
    pub subsample: f64,
    pub seed: u64,
}

impl Default for GbtConfig {
    fn default() -> Self {
        GbtConfig {
            n_estimators: 20,
            max_depth: 3,
            learning_rate: 0.3,
            l2: 1.0,
            subsample: 1.0,
            seed: 0,
        }
    }
}

/// Logistic-loss gradient boosting over the conditions of `cs`. Each round
/// fits a regression tree to the residuals `y - p` by variance reduction
/// and sets leaves by a Newton step. Conditions no tree uses are dropped
/// from the returned model.
pub fn gbt_learn(train: &Dataset, cs: &ConditionSet, cfg: &GbtConfig) -> Result<BoostedTree> {
    let n = train.width()?;
    if n != cs.len() {
        return Err(Error::Dataset(format!(
            "instances have {n} bits but the condition set has {}",
            cs.len()
        )));
    }
    if !(cfg.subsample > 0.0 && cfg.subsample <= 1.0) {
        return Err(Error::Precondition("subsample must lie in (0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut margin = vec![0.0f64; train.len()];
    let mut trees = Vec::with_capacity(cfg.n_estimators);
    for _ in 0..cfg.n_estimators {
        let mut grad = Vec::with_capacity(train.len());
        for ((_, y), m) in train.items.iter().zip(&margin) {
            let p = 1.0 / (1.0 + (-m).exp());
            grad.push((f64::from(u8::from(*y)) - p, p * (1.0 - p)));
        }
        let idx: Vec<usize> = if cfg.subsample < 1.0 {
            let k = ((cfg.subsample * train.len() as f64).ceil() as usize).max(1);
            let mut v = sample(&mut rng, train.len(), k).into_vec();
            v.sort_unstable();
            v
        } else {
            (0..train.len()).collect()
        };
        let mut b = TreeBuilder::new();
        let root = fit_regression(train, n, &grad, &idx, cfg.max_depth, cfg, &mut b);
        let tree: RegressionTree = b.finish(root);
        for (m, (x, _)) in margin.iter_mut().zip(&train.items) {
            *m += tree.eval(x);
        }
        trees.push(tree);
    }
    BoostedTree::new(cs.clone(), trees)?.compact()
}

fn fit_regression(
    train: &Dataset,
    n: usize,
    grad: &[(f64, f64)],
    idx: &[usize],
    depth_left: usize,
    cfg: &GbtConfig,
    b: &mut TreeBuilder<f64>,
) -> NodeId {
    let (sr, sh) = idx.iter().fold((0.0, 0.0), |(r, h), &i| (r + grad[i].0, h + grad[i].1));
    let leaf = cfg.learning_rate * sr / (sh + cfg.l2).max(1e-12);
    let constant = idx.iter().all(|&i| grad[i].0 == grad[idx[0]].0);
    if depth_left == 0 || constant {
        return b.leaf(leaf);
    }
    // sum of squares is fixed, so maximizing Σ_side (Σr)²/count maximizes variance reduction
    let mut best: Option<(f64, usize)> = None;
    for c in 0..n {
        let (mut t, mut tr) = (0usize, 0.0);
        for &i in idx {
            if train.items[i].0.get(c) {
                t += 1;
                tr += grad[i].0;
            }
        }
        if t == 0 || t == idx.len() {
            continue;
        }
        let f = idx.len() - t;
        let score = tr * tr / t as f64 + (sr - tr) * (sr - tr) / f as f64;
        if best.is_none_or(|(s, _)| score > s) {
            best = Some((score, c));
        }
    }
    let Some((_, c)) = best else {
        return b.leaf(leaf);
    };
    let (right, left): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| train.items[i].0.get(c));
    let l = fit_regression(train, n, grad, &left, depth_left - 1, cfg, b);
    let r = fit_regression(train, n, grad, &right, depth_left - 1, cfg, b);
    b.split(c, l, r)
}

/// How many covered instances the retraining baseline generates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleRule {
    /// `clamp(ceil(r · 2^(n−|t|)), 1, b)`.
    #[default]
    Cap,
    /// `max(ceil(r · 2^(n−|t|)), b)`.
    Max,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetrainConfig {
    pub ratio: f64,
    pub bound: usize,
    pub sample_rule: SampleRule,
    pub seed: u64,
}

impl Default for RetrainConfig {
    fn default() -> Self {
        RetrainConfig {
            ratio: 0.01,
            bound: 100,
            sample_rule: SampleRule::Cap,
            seed: 0,
        }
    }
}

/// Draws never exceed this, whatever the sample rule says.
const MAX_DRAWS: usize = 1 << 20;

impl RetrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(Error::Precondition("sample ratio must lie in (0, 1]".into()));
        }
        if self.bound == 0 {
            return Err(Error::Precondition("sample bound must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of draws for a rule leaving `free` conditions unassigned.
    pub fn sample_size(&self, free: usize) -> usize {
        let raw = (self.ratio * 2f64.powi(free.min(1000) as i32)).ceil();
        let raw = if raw.is_finite() {
            raw.min(MAX_DRAWS as f64) as usize
        } else {
            MAX_DRAWS
        };
        match self.sample_rule {
            SampleRule::Cap => raw.clamp(1, self.bound),
            SampleRule::Max => raw.max(self.bound).min(MAX_DRAWS),
        }
    }
}

/// Feasible instances covered by the rule premises, always starting with
/// `x`, the other conditions drawn uniformly in ascending id order (values
/// forced by the theory are kept). Duplicates are removed.
pub fn covered_sample(
    x: &Instance,
    rule: &ClassificationRule,
    th: &DomainTheory,
    cfg: &RetrainConfig,
) -> Vec<Instance> {
    let n = th.num_conditions();
    let free = n - rule.premises().len();
    let draws = cfg.sample_size(free);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ fnv1a(x.bits()));
    let mut a = Assignment::from_term(rule.premises(), th).expect("rule premises are consistent");
    let mut out = vec![x.clone()];
    let mut seen: std::collections::HashSet<Instance> = out.iter().cloned().collect();
    for _ in 0..draws {
        let mark = a.mark();
        for c in 0..n {
            if a.value(c).is_none() {
                let v = rng.random_bool(0.5);
                if !a.assume(Lit::new(c, v), th) {
                    let ok = a.assume(Lit::new(c, !v), th);
                    debug_assert!(ok, "an unassigned condition admits one of its values");
                }
            }
        }
        let bits = (0..n).map(|c| a.value(c).expect("total")).collect();
        a.undo(mark);
        let y = Instance::from_bits(bits);
        if seen.insert(y.clone()) {
            out.push(y);
        }
    }
    out
}

/// The retraining baseline: add a sample of instances covered by `rule`
/// labelled with its conclusion, drop training items the rule contradicts,
/// and learn the tree again.
#[allow(clippy::too_many_arguments)]
pub fn retrain_correct(
    train: &Dataset,
    dt: &DecisionTree,
    bt: &BoostedTree,
    x: &Instance,
    rule: &ClassificationRule,
    cfg: &RetrainConfig,
    th: &DomainTheory,
    max_depth: Option<usize>,
) -> Result<(Dataset, DecisionTree)> {
    cfg.validate()?;
    if dt.classify(x) == bt.classify(x) {
        return Err(Error::Precondition(format!(
            "instance {x} is already classified as the boosted tree does"
        )));
    }
    let cls = rule.conclusion();
    let mut items: Vec<(Instance, bool)> = train
        .items
        .iter()
        .filter(|(y, c)| *c == cls || !rule.covers(y))
        .cloned()
        .collect();
    items.extend(covered_sample(x, rule, th, cfg).into_iter().map(|y| (y, cls)));
    let updated = Dataset {
        items,
        note: train.note.clone(),
    };
    let tree = cart_learn(&updated, max_depth)?;
    Ok((updated, tree))
}

/// Runs the retraining baseline over `stream`, which doubles as the
/// evaluation set. Unlike rectification the agreement may drop between
/// steps, so the loop always runs to the end of the stream.
#[allow(clippy::too_many_arguments)]
pub fn retrain_stream(
    train: &Dataset,
    dt0: &DecisionTree,
    bt: &BoostedTree,
    stream: &[Instance],
    th: &DomainTheory,
    cfg: &RetrainConfig,
    order: DeletionOrder,
    max_depth: Option<usize>,
) -> Result<(DecisionTree, DistillTrace)> {
    let targets: Vec<bool> = stream.iter().map(|x| bt.classify(x)).collect();
    let diff = |dt: &DecisionTree| {
        stream
            .iter()
            .zip(&targets)
            .filter(|(x, &c)| dt.classify(x) != c)
            .count()
    };
    let accuracy = |d: usize| {
        if stream.is_empty() {
            1.0
        } else {
            1.0 - d as f64 / stream.len() as f64
        }
    };
    let mut data = train.clone();
    let mut dt = dt0.clone();
    let d0 = diff(&dt);
    let mut trace = DistillTrace {
        initial_accuracy: accuracy(d0),
        initial_size: dt.size(),
        initial_depth: dt.depth(),
        initial_misclassified: d0,
        steps: Vec::new(),
    };
    for (x, &target) in stream.iter().zip(&targets) {
        let start = Instant::now();
        if dt.classify(x) == target {
            continue;
        }
        let t = bt_tree_specific_reason(bt, x, th, order);
        let rule = explanation_to_rule(&t, target, th)?;
        let (next_data, next) = retrain_correct(&data, &dt, bt, x, &rule, cfg, th, max_depth)?;
        data = next_data;
        dt = next;
        let d = diff(&dt);
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        trace.steps.push(StepRecord {
            step: trace.steps.len() + 1,
            instance: x.clone(),
            premises: rule.premises().clone(),
            conclusion: target,
            relative_accuracy: accuracy(d),
            size: dt.size(),
            depth: dt.depth(),
            elapsed_ms,
        });
    }
    Ok((dt, trace))
}

/// Picks the depth bound maximizing accuracy on a held-out fifth of
/// `train` (ties go to the shallower tree).
pub fn tune_depth(train: &Dataset, max_candidate: usize, seed: u64) -> Result<usize> {
    train.width()?;
    if train.len() < 5 {
        return Ok(max_candidate.max(1));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm = sample(&mut rng, train.len(), train.len()).into_vec();
    let cut = train.len() / 5;
    let held: Vec<usize> = perm.drain(..cut).collect();
    let (fit, held) = (train.select(&perm), train.select(&held));
    let mut best = (f64::NEG_INFINITY, 1);
    for d in 1..=max_candidate.max(1) {
        let tree = cart_learn(&fit, Some(d))?;
        let acc = held.items.iter().filter(|(x, y)| tree.classify(x) == *y).count() as f64 / held.len() as f64;
        if acc > best.0 {
            best = (acc, d);
        }
    }
    Ok(best.1)
}
