//! Brute-force ground truth over small condition spaces.
//!
//! Everything here enumerates Th-feasible assignments explicitly, so it is
//! exponential in the number of conditions and guarded by hard limits.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{BoostedTree, ClassificationRule, DecisionTree, Model};
use crate::random::random_instance;
use crate::space::{Assignment, DomainTheory, Instance, Term};

pub const DEFAULT_LIMIT: usize = 20;
/// Subset search over `t_x` is doubly exponential; keep it small.
pub const MIN_EXPLANATIONS_LIMIT: usize = 12;

/// Anything mapping instances to a class.
pub trait Classifier {
    fn classify(&self, x: &Instance) -> bool;
}

impl Classifier for DecisionTree {
    fn classify(&self, x: &Instance) -> bool {
        DecisionTree::classify(self, x)
    }
}

impl Classifier for BoostedTree {
    fn classify(&self, x: &Instance) -> bool {
        BoostedTree::classify(self, x)
    }
}

impl Classifier for Model {
    fn classify(&self, x: &Instance) -> bool {
        Model::classify(self, x)
    }
}

impl<F: Fn(&Instance) -> bool> Classifier for F {
    fn classify(&self, x: &Instance) -> bool {
        self(x)
    }
}

/// A classifier that applies a rule where it fires and defers elsewhere.
pub struct Overridden<'a, C: ?Sized> {
    pub base: &'a C,
    pub rule: &'a ClassificationRule,
}

impl<C: Classifier + ?Sized> Classifier for Overridden<'_, C> {
    fn classify(&self, x: &Instance) -> bool {
        self.rule.classify(x).unwrap_or_else(|| self.base.classify(x))
    }
}

/// Every Th-feasible instance of an `n`-condition space, in binary counting
/// order (condition 0 most significant, false before true).
#[derive(Clone, Debug)]
pub struct FeasibleSpace {
    n: usize,
    instances: Vec<Instance>,
}

impl FeasibleSpace {
    pub fn num_conditions(&self) -> usize {
        self.n
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn diff<A: Classifier + ?Sized, B: Classifier + ?Sized>(&self, a: &A, b: &B) -> Vec<Instance> {
        self.instances
            .iter()
            .filter(|x| a.classify(x) != b.classify(x))
            .cloned()
            .collect()
    }

    pub fn equal<A: Classifier + ?Sized, B: Classifier + ?Sized>(&self, a: &A, b: &B) -> bool {
        self.instances.iter().all(|x| a.classify(x) == b.classify(x))
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capacity { n, limit })
    } else {
        Ok(())
    }
}

/// Visits every Th-feasible completion of `t` in binary counting order.
/// Infeasible branches are cut as soon as propagation detects them. Returns
/// `Break` if the visitor stopped early.
pub fn for_each_completion(
    t: &Term,
    th: &DomainTheory,
    mut visit: impl FnMut(&[bool]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let Some(mut a) = Assignment::from_term(t, th) else {
        return ControlFlow::Continue(());
    };
    let mut bits = vec![false; th.num_conditions()];
    walk(0, &mut a, th, &mut bits, &mut visit)
}

fn walk(
    i: usize,
    a: &mut Assignment,
    th: &DomainTheory,
    bits: &mut [bool],
    visit: &mut impl FnMut(&[bool]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    if i == bits.len() {
        return visit(bits);
    }
    if let Some(v) = a.value(i) {
        bits[i] = v;
        return walk(i + 1, a, th, bits, visit);
    }
    for v in [false, true] {
        let mark = a.mark();
        if a.assume(crate::space::Lit::new(i, v), th) {
            bits[i] = v;
            let flow = walk(i + 1, a, th, bits, visit);
            a.undo(mark);
            flow?;
        }
    }
    ControlFlow::Continue(())
}

pub fn enumerate_instances(th: &DomainTheory, limit: usize) -> Result<FeasibleSpace> {
    let n = th.num_conditions();
    check_limit(n, limit)?;
    let mut instances = Vec::new();
    let _ = for_each_completion(&Term::empty(), th, |bits| {
        instances.push(Instance::from_bits(bits.to_vec()));
        ControlFlow::Continue(())
    });
    Ok(FeasibleSpace { n, instances })
}

pub fn semantically_equal<A: Classifier + ?Sized, B: Classifier + ?Sized>(
    a: &A,
    b: &B,
    th: &DomainTheory,
) -> Result<bool> {
    Ok(enumerate_instances(th, DEFAULT_LIMIT)?.equal(a, b))
}

pub fn exact_diff<A: Classifier + ?Sized, B: Classifier + ?Sized>(
    a: &A,
    b: &B,
    th: &DomainTheory,
) -> Result<Vec<Instance>> {
    Ok(enumerate_instances(th, DEFAULT_LIMIT)?.diff(a, b))
}

/// Disagreements among `samples` random feasible instances, for spaces too
/// large to enumerate. Returns the distinct instances checked and those on
/// which the classifiers differ, both sorted.
pub fn sampled_diff<A: Classifier + ?Sized, B: Classifier + ?Sized>(
    a: &A,
    b: &B,
    th: &DomainTheory,
    samples: usize,
    seed: u64,
) -> (usize, Vec<Instance>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checked: BTreeSet<Instance> = (0..samples).map(|_| random_instance(&mut rng, th)).collect();
    let diff = checked
        .iter()
        .filter(|x| a.classify(x) != b.classify(x))
        .cloned()
        .collect();
    (checked.len(), diff)
}

/// True iff every Th-feasible instance covered by `t` is classified `cls`.
pub fn is_abductive_exact<C: Classifier + ?Sized>(c: &C, t: &Term, cls: bool, th: &DomainTheory) -> Result<bool> {
    check_limit(th.num_conditions(), DEFAULT_LIMIT)?;
    Ok(abductive_unchecked(c, t, cls, th))
}

fn abductive_unchecked<C: Classifier + ?Sized>(c: &C, t: &Term, cls: bool, th: &DomainTheory) -> bool {
    for_each_completion(t, th, |bits| {
        if c.classify(&Instance::from_bits(bits.to_vec())) == cls {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(())
        }
    })
    .is_continue()
}

/// A covered instance classified differently from `cls`, if any.
pub fn abductive_witness<C: Classifier + ?Sized>(
    c: &C,
    t: &Term,
    cls: bool,
    th: &DomainTheory,
) -> Result<Option<Instance>> {
    check_limit(th.num_conditions(), DEFAULT_LIMIT)?;
    let mut witness = None;
    let _ = for_each_completion(t, th, |bits| {
        let x = Instance::from_bits(bits.to_vec());
        if c.classify(&x) == cls {
            ControlFlow::Continue(())
        } else {
            witness = Some(x);
            ControlFlow::Break(())
        }
    });
    Ok(witness)
}

/// All subset-minimal abductive explanations of `x` given `c`, sorted.
pub fn min_explanations_exact<C: Classifier + ?Sized>(c: &C, x: &Instance, th: &DomainTheory) -> Result<Vec<Term>> {
    let n = th.num_conditions();
    check_limit(n, MIN_EXPLANATIONS_LIMIT)?;
    let cls = c.classify(x);
    let tx = x.term();
    let lits = tx.lits();
    // bitmasks over positions of t_x, grouped by popcount
    let mut masks: Vec<u32> = (0..1u32 << n).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let mut minimal: Vec<u32> = Vec::new();
    for m in masks {
        if minimal.iter().any(|&k| k & !m == 0) {
            continue;
        }
        let t = Term::try_from_lits((0..n).filter(|i| m >> i & 1 == 1).map(|i| lits[i]))
            .expect("subset of t_x is clash-free");
        if abductive_unchecked(c, &t, cls, th) {
            minimal.push(m);
        }
    }
    let mut out: Vec<Term> = minimal
        .into_iter()
        .map(|m| Term::try_from_lits((0..n).filter(|i| m >> i & 1 == 1).map(|i| lits[i])).unwrap())
        .collect();
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{loan, loan_simplified};
    use crate::space::{derive_theory, ConditionKind, ConditionSet, Lit};

    #[test]
    fn loan_space_has_twelve_instances() {
        let ex = loan();
        let space = enumerate_instances(&ex.th, DEFAULT_LIMIT).unwrap();
        assert_eq!(space.len(), 12);
        assert_eq!(space.instances()[0], Instance::from_01(&[0, 0, 0, 0]));
        assert_eq!(space.instances()[11], Instance::from_01(&[1, 1, 1, 1]));
        assert!(space.instances().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_theory_and_chain_counts() {
        assert_eq!(enumerate_instances(&DomainTheory::empty(3), 20).unwrap().len(), 8);
        let cs = ConditionSet::from_unordered(
            [1.0, 2.0, 3.0].map(|t| ("A".to_string(), ConditionKind::NumericGreater { threshold: t })),
        );
        let space = enumerate_instances(&derive_theory(&cs), 20).unwrap();
        // monotone prefixes: A>3 ⇒ A>2 ⇒ A>1
        let pats: Vec<String> = space.instances().iter().map(|x| x.to_string()).collect();
        assert_eq!(pats, ["(0, 0, 0)", "(0, 0, 1)", "(0, 1, 1)", "(1, 1, 1)"]);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(matches!(
            enumerate_instances(&DomainTheory::empty(21), 20),
            Err(Error::Capacity { n: 21, limit: 20 })
        ));
        let th = DomainTheory::empty(13);
        let c = |_: &Instance| true;
        assert!(min_explanations_exact(&c, &Instance::from_bits(vec![false; 13]), &th).is_err());
    }

    #[test]
    fn loan_diffs() {
        let ex = loan();
        let diff = exact_diff(&ex.dt, &ex.bt, &ex.th).unwrap();
        let want: Vec<Instance> = [[0, 1, 0, 1], [0, 1, 1, 1], [1, 1, 1, 0]]
            .iter()
            .map(|b| Instance::from_01(b))
            .collect();
        assert_eq!(diff, want);
        assert!(exact_diff(&ex.dt, &ex.dt, &ex.th).unwrap().is_empty());
        assert!(semantically_equal(&ex.bt, &ex.bt, &ex.th).unwrap());
        assert_eq!(
            exact_diff(&loan_simplified(), &ex.bt, &ex.th).unwrap(),
            vec![Instance::from_01(&[1, 1, 1, 0])]
        );
    }

    #[test]
    fn sampled_diff_finds_loan_disagreements() {
        let ex = loan();
        let (checked, diff) = sampled_diff(&ex.dt, &ex.bt, &ex.th, 400, 1);
        assert_eq!(checked, 12);
        assert_eq!(diff, exact_diff(&ex.dt, &ex.bt, &ex.th).unwrap());
    }

    #[test]
    fn loan_abductiveness() {
        let ex = loan();
        let t = Term::from_lits([Lit::neg(0)]).unwrap();
        assert!(is_abductive_exact(&ex.bt, &t, false, &ex.th).unwrap());
        let t = Term::from_lits([Lit::pos(1), Lit::pos(2)]).unwrap();
        assert!(!is_abductive_exact(&ex.bt, &t, false, &ex.th).unwrap());
        assert_eq!(
            abductive_witness(&ex.bt, &t, false, &ex.th).unwrap(),
            Some(Instance::from_01(&[1, 1, 1, 1]))
        );
        for x in enumerate_instances(&ex.th, 20).unwrap().instances() {
            assert!(is_abductive_exact(&ex.dt, &x.term(), ex.dt.classify(x), &ex.th).unwrap());
        }
    }

    #[test]
    fn loan_minimal_explanations() {
        let ex = loan();
        let x = Instance::from_01(&[0, 1, 1, 1]);
        let mins = min_explanations_exact(&ex.bt, &x, &ex.th).unwrap();
        // x4 is true in x, so ¬x1 is the only way to block x1 ∧ x4
        assert_eq!(mins, vec![Term::from_lits([Lit::neg(0)]).unwrap()]);
        let constant = |_: &Instance| true;
        assert_eq!(
            min_explanations_exact(&constant, &x, &ex.th).unwrap(),
            vec![Term::empty()]
        );
    }
}
