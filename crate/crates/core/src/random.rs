//! Seeded generators of small condition spaces, models, instances and
//! terms, shared by the property suites and the benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::model::{BoostedTree, DecisionTree, NodeId, RegressionTree, TreeBuilder};
use crate::space::{derive_theory, Assignment, ConditionKind, ConditionSet, DomainTheory, Instance, Lit, Term};

/// A space of exactly `n` conditions over several attributes: numeric
/// threshold chains of length 1 to 4, Boolean attributes and, when
/// `categorical` is set, groups of 2 or 3 mutually exclusive values.
pub fn random_space<R: Rng>(rng: &mut R, n: usize, categorical: bool) -> (ConditionSet, DomainTheory) {
    let mut items = Vec::with_capacity(n);
    let mut attr = 0;
    while items.len() < n {
        let left = n - items.len();
        let name = format!("a{attr:02}");
        attr += 1;
        match rng.random_range(0..if categorical { 3 } else { 2 }) {
            0 => {
                let len = rng.random_range(1..=left.min(4));
                let mut ts: Vec<u32> = (1..=9).collect::<Vec<_>>().choose_multiple(rng, len).copied().collect();
                ts.sort_unstable();
                items.extend(ts.into_iter().map(|t| {
                    (
                        name.clone(),
                        ConditionKind::NumericGreater {
                            threshold: f64::from(t) * 10.0,
                        },
                    )
                }));
            }
            1 => items.push((name, ConditionKind::Boolean)),
            _ => {
                let len = rng.random_range(2..=3).min(left);
                items.extend(
                    (0..len).map(|v| (name.clone(), ConditionKind::CategoricalEqual { value: format!("v{v}") })),
                );
            }
        }
    }
    let cs = ConditionSet::from_unordered(items);
    let th = derive_theory(&cs);
    (cs, th)
}

/// A decision tree of depth at most `max_depth`; conditions are drawn
/// independently at every node, so paths may repeat or contradict tests.
pub fn random_decision_tree<R: Rng>(rng: &mut R, n: usize, max_depth: usize) -> DecisionTree {
    let mut b = TreeBuilder::new();
    let root = grow(rng, n, max_depth, &mut b, &mut |r: &mut R| r.random_bool(0.5));
    b.finish(root)
}

/// A regression tree with leaf values in quarter steps from −2 to 2.
pub fn random_regression_tree<R: Rng>(rng: &mut R, n: usize, max_depth: usize) -> RegressionTree {
    let mut b = TreeBuilder::new();
    let root = grow(rng, n, max_depth, &mut b, &mut |r: &mut R| {
        f64::from(r.random_range(-8i32..=8)) * 0.25
    });
    b.finish(root)
}

fn grow<R: Rng, L: crate::model::LeafValue>(
    rng: &mut R,
    n: usize,
    depth_left: usize,
    b: &mut TreeBuilder<L>,
    leaf: &mut impl FnMut(&mut R) -> L,
) -> NodeId {
    if n == 0 || depth_left == 0 || rng.random_bool(0.2) {
        let v = leaf(rng);
        return b.leaf(v);
    }
    let c = rng.random_range(0..n);
    let l = grow(rng, n, depth_left - 1, b, leaf);
    let r = grow(rng, n, depth_left - 1, b, leaf);
    b.split(c, l, r)
}

pub fn random_boosted_tree<R: Rng>(rng: &mut R, cs: &ConditionSet, m: usize, max_depth: usize) -> BoostedTree {
    let trees = (0..m)
        .map(|_| random_regression_tree(rng, cs.len(), max_depth))
        .collect();
    BoostedTree::new(cs.clone(), trees).expect("conditions are in range")
}

/// A feasible instance: conditions are set in ascending id order, each to
/// a fair coin unless the theory already forces it.
pub fn random_instance<R: Rng>(rng: &mut R, th: &DomainTheory) -> Instance {
    let n = th.num_conditions();
    let mut a = Assignment::new(n);
    for c in 0..n {
        if a.value(c).is_none() {
            let v = rng.random_bool(0.5);
            if !a.assume(Lit::new(c, v), th) {
                a.assume(Lit::new(c, !v), th);
            }
        }
    }
    Instance::from_bits((0..n).map(|c| a.value(c).expect("total")).collect())
}

/// A sub-term of `t_x` keeping each literal with probability `keep`.
pub fn random_subterm<R: Rng>(rng: &mut R, x: &Instance, keep: f64) -> Term {
    Term::try_from_lits(x.term().iter().filter(|_| rng.random_bool(keep))).expect("sub-term of t_x")
}

/// A Th-consistent term (a random sub-term of a random feasible instance).
pub fn random_consistent_term<R: Rng>(rng: &mut R, th: &DomainTheory, keep: f64) -> Term {
    let x = random_instance(rng, th);
    random_subterm(rng, &x, keep)
}
