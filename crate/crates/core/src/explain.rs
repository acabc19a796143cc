//! Abductive explanations.
//!
//! * Boosted trees get polynomial tree-specific explanations: greedy literal
//!   deletion certified by per-tree worst-case margin bounds. They are always
//!   abductive but may be redundant.
//! * Decision trees get subset-minimal explanations (sufficient reasons) by
//!   deletion with an exact path-compatibility test.
//! * [`bt_sufficient_reason_exact`] is the exponential reference engine for
//!   boosted trees used by the latency harness.

use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};
use crate::model::{BoostedTree, ClassificationRule, DecisionTree, Node, NodeId, RegressionTree};
use crate::oracle::for_each_completion;
use crate::space::{Assignment, DomainTheory, Instance, Lit, Term};

/// Range of the boosted-tree margin over the completions of a term, with
/// each member tree relaxed independently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarginBounds {
    pub lo: f64,
    pub hi: f64,
}

impl MarginBounds {
    /// Whether every completion is guaranteed to get class `cls`.
    pub fn certifies(&self, cls: bool) -> bool {
        if cls {
            self.lo > 0.0
        } else {
            self.hi <= 0.0
        }
    }
}

/// Order in which deletion-based engines try to drop literals.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "order", content = "seed")]
pub enum DeletionOrder {
    #[default]
    Descending,
    Ascending,
    /// A pseudo-random order derived from the seed and the instance, so a
    /// given instance always gets the same order.
    Shuffled(u64),
}

impl DeletionOrder {
    fn sequence(self, x: &Instance) -> Vec<Lit> {
        let mut lits: Vec<Lit> = x.term().iter().collect();
        match self {
            DeletionOrder::Descending => lits.reverse(),
            DeletionOrder::Ascending => {}
            DeletionOrder::Shuffled(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(x.bits()));
                lits.shuffle(&mut rng);
            }
        }
        lits
    }
}

pub(crate) fn fnv1a(bits: &[bool]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bits {
        h ^= u64::from(b) + 1;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Wall-clock allowance for an explanation query.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { deadline: None }
    }

    pub fn within(limit: Duration) -> Self {
        Budget {
            deadline: Some(Instant::now() + limit),
        }
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn check(&self) -> std::result::Result<(), TimedOut> {
        if self.expired() {
            Err(TimedOut)
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("explanation query exceeded its time budget")]
pub struct TimedOut;

pub fn bt_margin_bounds(bt: &BoostedTree, t: &Term, th: &DomainTheory) -> Result<MarginBounds> {
    let mut a = Assignment::from_term(t, th)
        .ok_or_else(|| Error::Precondition(format!("term {t} is inconsistent with the domain theory")))?;
    Ok(bounds_under(bt, &mut a, th))
}

fn bounds_under(bt: &BoostedTree, a: &mut Assignment, th: &DomainTheory) -> MarginBounds {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for tree in &bt.trees {
        let (l, h) = tree_range(tree, tree.root(), a, th);
        lo += l;
        hi += h;
    }
    MarginBounds { lo, hi }
}

/// Least and greatest leaf reachable under `a`. Undecided conditions are
/// explored on both sides, and the branch literal is propagated so that
/// branches contradicting the theory are skipped.
fn tree_range(tree: &RegressionTree, id: NodeId, a: &mut Assignment, th: &DomainTheory) -> (f64, f64) {
    match *tree.node(id) {
        Node::Leaf(v) => (v, v),
        Node::Split { cond, left, right } => match a.value(cond) {
            Some(false) => tree_range(tree, left, a, th),
            Some(true) => tree_range(tree, right, a, th),
            None => {
                let mut out = (f64::INFINITY, f64::NEG_INFINITY);
                for (child, positive) in [(left, false), (right, true)] {
                    let mark = a.mark();
                    if a.assume(Lit::new(cond, positive), th) {
                        let (l, h) = tree_range(tree, child, a, th);
                        a.undo(mark);
                        out = (out.0.min(l), out.1.max(h));
                    }
                }
                out
            }
        },
    }
}

fn certified(bt: &BoostedTree, t: &Term, th: &DomainTheory, cls: bool) -> bool {
    match Assignment::from_term(t, th) {
        Some(mut a) => bounds_under(bt, &mut a, th).certifies(cls),
        None => true,
    }
}

/// Tree-specific explanation of `bt(x)`: starting from `t_x`, drop each
/// literal (in `order`) whenever the margin bounds still certify the class.
pub fn bt_tree_specific_reason(bt: &BoostedTree, x: &Instance, th: &DomainTheory, order: DeletionOrder) -> Term {
    bt_tree_specific_reason_within(bt, x, th, order, Budget::unlimited()).expect("unlimited budget")
}

pub fn bt_tree_specific_reason_within(
    bt: &BoostedTree,
    x: &Instance,
    th: &DomainTheory,
    order: DeletionOrder,
    budget: Budget,
) -> std::result::Result<Term, TimedOut> {
    let cls = bt.classify(x);
    let mut t = x.term();
    for l in order.sequence(x) {
        budget.check()?;
        let candidate = t.without(l.cond);
        if certified(bt, &candidate, th, cls) {
            t = candidate;
        }
    }
    Ok(t)
}

/// Feasible paths of `dt` whose leaf differs from `cls`, as literal lists.
fn opposing_paths(dt: &DecisionTree, th: &DomainTheory, cls: bool) -> Vec<Term> {
    dt.paths(th)
        .into_iter()
        .filter(|p| p.feasible && p.leaf != cls)
        .map(|p| p.term)
        .collect()
}

/// True iff no opposing path is compatible with `t` under the theory.
fn dt_certifies(t: &Term, opposing: &[Term], th: &DomainTheory) -> bool {
    let Some(mut a) = Assignment::from_term(t, th) else {
        return true;
    };
    opposing.iter().all(|p| {
        let mark = a.mark();
        let compatible = p.iter().all(|l| a.assume(l, th));
        a.undo(mark);
        !compatible
    })
}

/// Subset-minimal abductive explanation of `dt(x)` by deletion.
pub fn dt_sufficient_reason(dt: &DecisionTree, x: &Instance, th: &DomainTheory, order: DeletionOrder) -> Term {
    dt_sufficient_reason_within(dt, x, th, order, Budget::unlimited()).expect("unlimited budget")
}

pub fn dt_sufficient_reason_within(
    dt: &DecisionTree,
    x: &Instance,
    th: &DomainTheory,
    order: DeletionOrder,
    budget: Budget,
) -> std::result::Result<Term, TimedOut> {
    let cls = dt.classify(x);
    let opposing = opposing_paths(dt, th, cls);
    let mut t = x.term();
    for l in order.sequence(x) {
        budget.check()?;
        let candidate = t.without(l.cond);
        if dt_certifies(&candidate, &opposing, th) {
            t = candidate;
        }
    }
    Ok(t)
}

/// Subset-minimal abductive explanation of `bt(x)` by deletion, each step
/// checked by enumerating every feasible completion. Exponential.
pub fn bt_sufficient_reason_exact(
    bt: &BoostedTree,
    x: &Instance,
    th: &DomainTheory,
    order: DeletionOrder,
    budget: Budget,
) -> std::result::Result<Term, TimedOut> {
    let cls = bt.classify(x);
    let mut t = x.term();
    for l in order.sequence(x) {
        budget.check()?;
        let candidate = t.without(l.cond);
        let mut visited = 0u32;
        let mut timed_out = false;
        let flow = for_each_completion(&candidate, th, |bits| {
            visited = visited.wrapping_add(1);
            if visited.is_multiple_of(1024) && budget.expired() {
                timed_out = true;
                return ControlFlow::Break(());
            }
            if (bt.margin_bits(bits) > 0.0) == cls {
                ControlFlow::Continue(())
            } else {
                ControlFlow::Break(())
            }
        });
        if timed_out {
            return Err(TimedOut);
        }
        if flow.is_continue() {
            t = candidate;
        }
    }
    Ok(t)
}

/// The rule `t ⇒ y` (or `t ⇒ ¬y`) carried by an explanation of class `cls`.
pub fn explanation_to_rule(t: &Term, cls: bool, th: &DomainTheory) -> Result<ClassificationRule> {
    ClassificationRule::new(t, cls, th)
}
