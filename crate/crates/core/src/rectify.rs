//! Rectifying a decision tree by classification rules, simplification under
//! the domain theory, and the incremental distillation loop.
//!
//! Rectifying `Σ` by `φ ⇒ y` must yield `Σ ∨ φ`, and by `φ ⇒ ¬y` must yield
//! `Σ ∧ ¬φ`. Each feasible path whose leaf disagrees with the rule and whose
//! term is compatible with `φ` gets its leaf replaced by a chain testing the
//! premise literals the path does not already decide: the chain's
//! all-satisfied end carries the rule's class, every exit keeps the old one.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::explain::{bt_tree_specific_reason, explanation_to_rule, DeletionOrder};
use crate::model::{BoostedTree, ClassificationRule, DecisionTree, Node, NodeId, TreeBuilder};
use crate::space::{th_consistent, Assignment, DomainTheory, Instance, Lit, Term};

/// Rewrites `dt` so that it obeys `rule` on every instance the rule covers
/// and is unchanged elsewhere.
pub fn rectify_by_rule(dt: &DecisionTree, rule: &ClassificationRule, th: &DomainTheory) -> Result<DecisionTree> {
    if !th_consistent(rule.premises(), th) {
        return Err(Error::Precondition(format!(
            "rule premises {} are inconsistent with the domain theory",
            rule.premises()
        )));
    }
    let mut r = Rectifier {
        dt,
        rule,
        th,
        builder: TreeBuilder::new(),
        untouched: HashMap::new(),
        path: Assignment::new(th.num_conditions()),
    };
    let root = r.visit(dt.root());
    Ok(r.builder.finish(root))
}

struct Rectifier<'a> {
    dt: &'a DecisionTree,
    rule: &'a ClassificationRule,
    th: &'a DomainTheory,
    builder: TreeBuilder<bool>,
    untouched: HashMap<NodeId, NodeId>,
    /// Closure of the literals on the current path.
    path: Assignment,
}

impl Rectifier<'_> {
    fn visit(&mut self, id: NodeId) -> NodeId {
        match *self.dt.node(id) {
            Node::Leaf(v) => {
                if v != self.rule.conclusion() && self.premises_compatible() {
                    self.graft(v)
                } else {
                    self.builder.leaf(v)
                }
            }
            Node::Split { cond, left, right } => {
                let l = self.branch(cond, false, left);
                let r = self.branch(cond, true, right);
                self.builder.split(cond, l, r)
            }
        }
    }

    fn branch(&mut self, cond: usize, positive: bool, child: NodeId) -> NodeId {
        let mark = self.path.mark();
        if self.path.assume(Lit::new(cond, positive), self.th) {
            let out = self.visit(child);
            self.path.undo(mark);
            out
        } else {
            // no feasible instance gets here; keep the subtree as it is
            self.builder.import(self.dt, child, &mut self.untouched)
        }
    }

    fn premises_compatible(&mut self) -> bool {
        let mark = self.path.mark();
        let ok = self.rule.premises().iter().all(|l| self.path.assume(l, self.th));
        self.path.undo(mark);
        ok
    }

    /// Chain over the premise literals left open by the path, ascending by
    /// condition id; literals entailed by earlier chain tests are skipped.
    fn graft(&mut self, original: bool) -> NodeId {
        let mark = self.path.mark();
        let mut tests = Vec::new();
        for l in self.rule.premises().iter() {
            if self.path.lit_value(l).is_none() {
                tests.push(l);
                let ok = self.path.assume(l, self.th);
                debug_assert!(ok, "premises were checked compatible with the path");
            }
        }
        self.path.undo(mark);
        let mut node = self.builder.leaf(self.rule.conclusion());
        for l in tests.into_iter().rev() {
            let exit = self.builder.leaf(original);
            node = if l.positive {
                self.builder.split(l.cond, exit, node)
            } else {
                self.builder.split(l.cond, node, exit)
            };
        }
        node
    }
}

/// Removes decision nodes whose outcome is entailed by the literals above
/// them (together with the theory), which also prunes branches no feasible
/// instance can reach, and collapses nodes with identical children.
/// Walks top-down with the path assignment and rebuilds bottom-up; the
/// result is a fixpoint.
pub fn simplify(dt: &DecisionTree, th: &DomainTheory) -> DecisionTree {
    let mut s = Simplifier {
        dt,
        th,
        builder: TreeBuilder::new(),
        path: Assignment::new(th.num_conditions()),
    };
    let root = s.visit(dt.root());
    s.builder.finish(root)
}

struct Simplifier<'a> {
    dt: &'a DecisionTree,
    th: &'a DomainTheory,
    builder: TreeBuilder<bool>,
    path: Assignment,
}

impl Simplifier<'_> {
    fn visit(&mut self, id: NodeId) -> NodeId {
        match *self.dt.node(id) {
            Node::Leaf(v) => self.builder.leaf(v),
            Node::Split { cond, left, right } => match self.path.value(cond) {
                Some(false) => self.visit(left),
                Some(true) => self.visit(right),
                None => {
                    let l = self.branch(cond, false, left);
                    let r = self.branch(cond, true, right);
                    match (l, r) {
                        (Some(l), Some(r)) if l == r => l,
                        (Some(l), Some(r)) => self.builder.split(cond, l, r),
                        (Some(c), None) | (None, Some(c)) => c,
                        (None, None) => unreachable!("an open condition has a feasible side"),
                    }
                }
            },
        }
    }

    fn branch(&mut self, cond: usize, positive: bool, child: NodeId) -> Option<NodeId> {
        let mark = self.path.mark();
        if !self.path.assume(Lit::new(cond, positive), self.th) {
            return None;
        }
        let out = self.visit(child);
        self.path.undo(mark);
        Some(out)
    }
}

/// Knobs of the distillation loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillConfig {
    pub order: DeletionOrder,
    pub simplify: bool,
    pub max_steps: Option<usize>,
    pub stop_on_empty_diff: bool,
    /// Reuse the explanation computed for an instance the next time it
    /// triggers a correction.
    pub memoize: bool,
}

impl Default for DistillConfig {
    fn default() -> Self {
        DistillConfig {
            order: DeletionOrder::Descending,
            simplify: true,
            max_steps: None,
            stop_on_empty_diff: true,
            memoize: true,
        }
    }
}

impl DistillConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == Some(0) {
            return Err(Error::Precondition("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Explanations already computed, keyed by instance.
#[derive(Clone, Debug, Default)]
pub struct ExplanationCache {
    entries: HashMap<Instance, Term>,
}

impl ExplanationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn explain(&mut self, bt: &BoostedTree, x: &Instance, th: &DomainTheory, cfg: &DistillConfig) -> Term {
        if !cfg.memoize {
            return bt_tree_specific_reason(bt, x, th, cfg.order);
        }
        self.entries
            .entry(x.clone())
            .or_insert_with(|| bt_tree_specific_reason(bt, x, th, cfg.order))
            .clone()
    }
}

/// One correction: explain `bt(x)`, turn the explanation into a rule,
/// rectify `dt` by it and simplify.
pub fn distill_step(
    dt: &DecisionTree,
    bt: &BoostedTree,
    x: &Instance,
    th: &DomainTheory,
) -> Result<(DecisionTree, ClassificationRule)> {
    distill_step_with(dt, bt, x, th, &DistillConfig::default(), &mut ExplanationCache::new())
}

pub fn distill_step_with(
    dt: &DecisionTree,
    bt: &BoostedTree,
    x: &Instance,
    th: &DomainTheory,
    cfg: &DistillConfig,
    cache: &mut ExplanationCache,
) -> Result<(DecisionTree, ClassificationRule)> {
    let target = bt.classify(x);
    if dt.classify(x) == target {
        return Err(Error::Precondition(format!(
            "instance {x} is already classified as the boosted tree does"
        )));
    }
    let t = cache.explain(bt, x, th, cfg);
    let rule = explanation_to_rule(&t, target, th)?;
    let mut out = rectify_by_rule(dt, &rule, th)?;
    if cfg.simplify {
        out = simplify(&out, th);
    }
    Ok((out, rule))
}

/// Measurements taken after one correction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub instance: Instance,
    pub premises: Term,
    pub conclusion: bool,
    /// Agreement with the boosted tree on the evaluation set.
    pub relative_accuracy: f64,
    pub size: u64,
    pub depth: usize,
    pub elapsed_ms: f64,
}

/// Full account of one distillation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistillTrace {
    pub initial_accuracy: f64,
    pub initial_size: u64,
    pub initial_depth: usize,
    pub initial_misclassified: usize,
    pub steps: Vec<StepRecord>,
}

impl DistillTrace {
    /// Number of correction steps performed.
    pub fn corrections(&self) -> usize {
        self.steps.len()
    }

    pub fn final_accuracy(&self) -> f64 {
        self.steps.last().map_or(self.initial_accuracy, |s| s.relative_accuracy)
    }

    pub fn total_elapsed_ms(&self) -> f64 {
        self.steps.iter().map(|s| s.elapsed_ms).sum()
    }
}

/// Runs the lazy distillation loop over `stream`, which doubles as the
/// evaluation set: instances the current tree already gets right are
/// skipped, every other one triggers a correction.
pub fn distill_stream(
    dt0: &DecisionTree,
    bt: &BoostedTree,
    stream: &[Instance],
    th: &DomainTheory,
    cfg: &DistillConfig,
) -> Result<(DecisionTree, DistillTrace)> {
    distill_stream_with_cache(dt0, bt, stream, th, cfg, &mut ExplanationCache::new())
}

pub fn distill_stream_with_cache(
    dt0: &DecisionTree,
    bt: &BoostedTree,
    stream: &[Instance],
    th: &DomainTheory,
    cfg: &DistillConfig,
    cache: &mut ExplanationCache,
) -> Result<(DecisionTree, DistillTrace)> {
    cfg.validate()?;
    let targets: Vec<bool> = stream.iter().map(|x| bt.classify(x)).collect();
    let count_diff = |dt: &DecisionTree| {
        stream
            .iter()
            .zip(&targets)
            .filter(|(x, &c)| dt.classify(x) != c)
            .count()
    };
    let accuracy = |diff: usize| {
        if stream.is_empty() {
            1.0
        } else {
            1.0 - diff as f64 / stream.len() as f64
        }
    };
    let mut dt = dt0.clone();
    let mut diff = count_diff(&dt);
    let mut trace = DistillTrace {
        initial_accuracy: accuracy(diff),
        initial_size: dt.size(),
        initial_depth: dt.depth(),
        initial_misclassified: diff,
        steps: Vec::new(),
    };
    for (x, &target) in stream.iter().zip(&targets) {
        if cfg.max_steps.is_some_and(|m| trace.steps.len() >= m) {
            break;
        }
        if cfg.stop_on_empty_diff && diff == 0 {
            break;
        }
        let start = Instant::now();
        if dt.classify(x) == target {
            continue;
        }
        let (next, rule) = distill_step_with(&dt, bt, x, th, cfg, cache)?;
        dt = next;
        diff = count_diff(&dt);
        let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
        trace.steps.push(StepRecord {
            step: trace.steps.len() + 1,
            instance: x.clone(),
            premises: rule.premises().clone(),
            conclusion: rule.conclusion(),
            relative_accuracy: accuracy(diff),
            size: dt.size(),
            depth: dt.depth(),
            elapsed_ms,
        });
    }
    Ok((dt, trace))
}

/// Indices of dataset instances on which the two models disagree.
pub fn misclassified(dt: &DecisionTree, bt: &BoostedTree, dataset: &[Instance]) -> Vec<usize> {
    dataset
        .iter()
        .enumerate()
        .filter(|(_, x)| dt.classify(x) != bt.classify(x))
        .map(|(i, _)| i)
        .collect()
}

/// `1 − |T±| / |T|`; an empty dataset counts as full agreement.
pub fn relative_accuracy(dt: &DecisionTree, bt: &BoostedTree, dataset: &[Instance]) -> f64 {
    if dataset.is_empty() {
        return 1.0;
    }
    1.0 - misclassified(dt, bt, dataset).len() as f64 / dataset.len() as f64
}
