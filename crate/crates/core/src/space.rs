//! The binarized feature space: Boolean conditions extracted from tree splits,
//! the domain theory tying conditions on a shared attribute together, and the
//! term / instance algebra built on top of them.
//!
//! Condition ids are 0-based and dense. When literals are printed or
//! serialized as signed integers they use the 1-based convention, so
//! condition `0` is `x1` (or `1` / `-1`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::BoostedTree;

/// Index of a condition in a [`ConditionSet`].
pub type CondId = usize;

/// A condition together with a polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit {
    pub cond: CondId,
    pub positive: bool,
}

impl Lit {
    pub const fn pos(cond: CondId) -> Self {
        Lit { cond, positive: true }
    }

    pub const fn neg(cond: CondId) -> Self {
        Lit { cond, positive: false }
    }

    pub const fn new(cond: CondId, positive: bool) -> Self {
        Lit { cond, positive }
    }

    #[must_use]
    pub const fn negate(self) -> Self {
        Lit {
            cond: self.cond,
            positive: !self.positive,
        }
    }

    /// Dense index `2 * cond + polarity`, used for literal-indexed tables.
    #[inline]
    pub(crate) fn index(self) -> usize {
        2 * self.cond + usize::from(self.positive)
    }

    #[inline]
    pub fn holds(self, x: &Instance) -> bool {
        x.get(self.cond) == self.positive
    }

    /// 1-based signed encoding: `x_i` is `i + 1`, its negation `-(i + 1)`.
    pub fn to_signed(self) -> i64 {
        let v = self.cond as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    pub fn from_signed(v: i64) -> Option<Self> {
        if v == 0 {
            return None;
        }
        Some(Lit::new(v.unsigned_abs() as usize - 1, v > 0))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "x{}", self.cond + 1)
        } else {
            write!(f, "¬x{}", self.cond + 1)
        }
    }
}

/// What a condition tests on its primitive attribute.
#[derive(Clone, Debug, PartialEq)]
pub enum ConditionKind {
    /// `attribute > threshold`.
    NumericGreater { threshold: f64 },
    /// `attribute == value`.
    CategoricalEqual { value: String },
    /// The attribute itself is Boolean.
    Boolean,
}

impl ConditionKind {
    fn rank(&self) -> u8 {
        match self {
            ConditionKind::Boolean => 0,
            ConditionKind::CategoricalEqual { .. } => 1,
            ConditionKind::NumericGreater { .. } => 2,
        }
    }

    /// Identity used for deduplication. Thresholds compare by bit pattern.
    fn same_as(&self, other: &ConditionKind) -> bool {
        match (self, other) {
            (ConditionKind::NumericGreater { threshold: a }, ConditionKind::NumericGreater { threshold: b }) => {
                a.to_bits() == b.to_bits()
            }
            (ConditionKind::CategoricalEqual { value: a }, ConditionKind::CategoricalEqual { value: b }) => a == b,
            (ConditionKind::Boolean, ConditionKind::Boolean) => true,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    pub id: CondId,
    pub attribute: String,
    pub kind: ConditionKind,
}

impl Condition {
    pub fn name(&self) -> String {
        match &self.kind {
            ConditionKind::NumericGreater { threshold } => {
                format!("{}>{}", self.attribute, threshold)
            }
            ConditionKind::CategoricalEqual { value } => format!("{}={}", self.attribute, value),
            ConditionKind::Boolean => self.attribute.clone(),
        }
    }

    /// Evaluates the condition on the textual value of its attribute.
    pub fn eval(&self, raw: &str) -> Result<bool> {
        let raw = raw.trim();
        match &self.kind {
            ConditionKind::NumericGreater { threshold } => {
                let v: f64 = raw.parse().map_err(|_| Error::Ingest {
                    attribute: self.attribute.clone(),
                    message: format!("expected a number, found `{raw}`"),
                })?;
                Ok(v > *threshold)
            }
            ConditionKind::CategoricalEqual { value } => Ok(raw == value),
            ConditionKind::Boolean => parse_bool(raw).ok_or_else(|| Error::Ingest {
                attribute: self.attribute.clone(),
                message: format!("expected a Boolean, found `{raw}`"),
            }),
        }
    }

    fn order_key(&self, other: &Condition) -> Ordering {
        self.attribute
            .cmp(&other.attribute)
            .then(self.kind.rank().cmp(&other.kind.rank()))
            .then_with(|| match (&self.kind, &other.kind) {
                (ConditionKind::NumericGreater { threshold: a }, ConditionKind::NumericGreater { threshold: b }) => {
                    b.total_cmp(a)
                }
                (ConditionKind::CategoricalEqual { value: a }, ConditionKind::CategoricalEqual { value: b }) => {
                    a.cmp(b)
                }
                _ => Ordering::Equal,
            })
    }
}

pub(crate) fn parse_bool(raw: &str) -> Option<bool> {
    match raw {
        "1" | "true" | "True" | "TRUE" => Some(true),
        "0" | "false" | "False" | "FALSE" => Some(false),
        _ => raw.parse::<f64>().ok().map(|v| v != 0.0),
    }
}

/// The ordered set `X` of Boolean conditions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConditionSet {
    conditions: Vec<Condition>,
}

impl ConditionSet {
    /// Wraps conditions whose ids are already assigned; validates density and
    /// uniqueness.
    pub fn new(conditions: Vec<Condition>) -> Result<Self> {
        for (i, c) in conditions.iter().enumerate() {
            if c.id != i {
                return Err(Error::Structural(format!("condition at position {i} has id {}", c.id)));
            }
            if c.attribute.is_empty() {
                return Err(Error::Structural(format!("condition {i} has no attribute")));
            }
            if let ConditionKind::NumericGreater { threshold } = c.kind {
                if !threshold.is_finite() {
                    return Err(Error::Structural(format!("condition {i} has a non-finite threshold")));
                }
            }
        }
        for (i, a) in conditions.iter().enumerate() {
            for b in &conditions[i + 1..] {
                if a.attribute == b.attribute && a.kind.same_as(&b.kind) {
                    return Err(Error::Structural(format!(
                        "conditions {} and {} are duplicates ({})",
                        a.id,
                        b.id,
                        a.name()
                    )));
                }
            }
        }
        Ok(ConditionSet { conditions })
    }

    /// Deduplicates and orders conditions deterministically: by attribute
    /// name, then kind, then threshold descending (numeric) or value
    /// ascending (categorical). Ids are reassigned densely in that order.
    pub fn from_unordered(items: impl IntoIterator<Item = (String, ConditionKind)>) -> Self {
        let mut conds: Vec<Condition> = Vec::new();
        for (attribute, kind) in items {
            if conds.iter().any(|c| c.attribute == attribute && c.kind.same_as(&kind)) {
                continue;
            }
            conds.push(Condition { id: 0, attribute, kind });
        }
        conds.sort_by(|a, b| a.order_key(b));
        for (i, c) in conds.iter_mut().enumerate() {
            c.id = i;
        }
        ConditionSet { conditions: conds }
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn get(&self, id: CondId) -> Option<&Condition> {
        self.conditions.get(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter()
    }

    pub fn find(&self, attribute: &str, kind: &ConditionKind) -> Option<CondId> {
        self.conditions
            .iter()
            .find(|c| c.attribute == attribute && c.kind.same_as(kind))
            .map(|c| c.id)
    }

    /// Distinct attribute names referenced by the set, sorted.
    pub fn attributes(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.conditions.iter().map(|c| c.attribute.as_str()).collect();
        set.into_iter().collect()
    }

    pub(crate) fn to_docs(&self) -> Vec<ConditionDoc> {
        self.conditions.iter().map(ConditionDoc::from).collect()
    }

    pub(crate) fn from_docs(docs: Vec<ConditionDoc>, path: &str) -> Result<Self> {
        let conds = docs
            .into_iter()
            .enumerate()
            .map(|(i, d)| d.into_condition().map_err(|m| Error::parse(format!("{path}[{i}]"), m)))
            .collect::<Result<Vec<_>>>()?;
        ConditionSet::new(conds).map_err(|e| Error::parse(path, e.to_string()))
    }

    /// Serializes to the `conditions.json` layout.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_docs()).expect("condition docs serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let docs: Vec<ConditionDoc> = serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))?;
        Self::from_docs(docs, "$")
    }
}

/// Wire form of a condition.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub(crate) struct ConditionDoc {
    pub id: usize,
    pub attribute: String,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl From<&Condition> for ConditionDoc {
    fn from(c: &Condition) -> Self {
        let (kind, threshold, value) = match &c.kind {
            ConditionKind::NumericGreater { threshold } => ("numeric-greater", Some(*threshold), None),
            ConditionKind::CategoricalEqual { value } => ("categorical-equal", None, Some(value.clone())),
            ConditionKind::Boolean => ("boolean", None, None),
        };
        ConditionDoc {
            id: c.id,
            attribute: c.attribute.clone(),
            kind: kind.to_string(),
            threshold,
            value,
        }
    }
}

impl ConditionDoc {
    fn into_condition(self) -> std::result::Result<Condition, String> {
        let kind = match self.kind.as_str() {
            "numeric-greater" => ConditionKind::NumericGreater {
                threshold: self.threshold.ok_or("numeric-greater condition without threshold")?,
            },
            "categorical-equal" => ConditionKind::CategoricalEqual {
                value: self.value.ok_or("categorical-equal condition without value")?,
            },
            "boolean" => ConditionKind::Boolean,
            other => return Err(format!("unknown condition kind `{other}`")),
        };
        Ok(Condition {
            id: self.id,
            attribute: self.attribute,
            kind,
        })
    }
}

/// Collects the distinct conditions tested by a boosted tree, with fresh ids
/// in the deterministic order of [`ConditionSet::from_unordered`].
pub fn build_condition_set(bt: &BoostedTree) -> Result<ConditionSet> {
    let mut used = BTreeSet::new();
    for (t, tree) in bt.trees.iter().enumerate() {
        for cond in tree.split_conditions() {
            let c = bt
                .conditions
                .get(cond)
                .ok_or_else(|| Error::Structural(format!("tree {t} splits on unknown condition {cond}")))?;
            if c.attribute.is_empty() {
                return Err(Error::Structural(format!(
                    "tree {t} splits on condition {cond} without attribute"
                )));
            }
            used.insert(cond);
        }
    }
    Ok(ConditionSet::from_unordered(used.into_iter().map(|id| {
        let c = &bt.conditions.conditions[id];
        (c.attribute.clone(), c.kind.clone())
    })))
}

/// Constraints among conditions sharing a primitive attribute: threshold
/// implications `(A > hi) ⇒ (A > lo)` and categorical exclusions.
///
/// Implications are stored transitively closed and only between positive
/// literals, which keeps unit propagation complete for consistency checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainTheory {
    n: usize,
    implications: Vec<(Lit, Lit)>,
    exclusions: Vec<(CondId, CondId)>,
    /// Indexed by `Lit::index`: literals directly forced by that literal.
    consequences: Vec<Vec<Lit>>,
}

impl DomainTheory {
    pub fn empty(n: usize) -> Self {
        DomainTheory {
            n,
            implications: Vec::new(),
            exclusions: Vec::new(),
            consequences: vec![Vec::new(); 2 * n],
        }
    }

    /// Builds a theory from explicit parts. Implications must relate positive
    /// literals; exclusions must reference distinct conditions.
    pub fn from_parts(n: usize, implications: Vec<(Lit, Lit)>, exclusions: Vec<(CondId, CondId)>) -> Result<Self> {
        let mut th = DomainTheory::empty(n);
        for &(a, b) in &implications {
            if !a.positive || !b.positive {
                return Err(Error::Structural(format!(
                    "implication {a} ⇒ {b} is not between positive literals"
                )));
            }
            if a.cond >= n || b.cond >= n || a.cond == b.cond {
                return Err(Error::Structural(format!("implication {a} ⇒ {b} out of range")));
            }
            th.consequences[a.index()].push(b);
            th.consequences[b.negate().index()].push(a.negate());
        }
        for &(a, b) in &exclusions {
            if a >= n || b >= n || a == b {
                return Err(Error::Structural(format!("exclusion ({a}, {b}) out of range")));
            }
            th.consequences[Lit::pos(a).index()].push(Lit::neg(b));
            th.consequences[Lit::pos(b).index()].push(Lit::neg(a));
        }
        th.implications = implications;
        th.exclusions = exclusions;
        Ok(th)
    }

    pub fn num_conditions(&self) -> usize {
        self.n
    }

    pub fn implications(&self) -> &[(Lit, Lit)] {
        &self.implications
    }

    pub fn exclusions(&self) -> &[(CondId, CondId)] {
        &self.exclusions
    }

    pub fn is_empty(&self) -> bool {
        self.implications.is_empty() && self.exclusions.is_empty()
    }

    #[inline]
    pub(crate) fn consequences(&self, l: Lit) -> &[Lit] {
        &self.consequences[l.index()]
    }

    /// Checks a total assignment against every implication and exclusion.
    pub fn satisfied_by(&self, bits: &[bool]) -> bool {
        self.implications
            .iter()
            .all(|&(a, b)| !(bits[a.cond] == a.positive && bits[b.cond] != b.positive))
            && self.exclusions.iter().all(|&(a, b)| !(bits[a] && bits[b]))
    }
}

/// Derives the domain theory of a condition set: for every attribute, each
/// pair of thresholds `t1 > t2` yields `(A > t1) ⇒ (A > t2)`, each pair of
/// categorical values yields an exclusion.
pub fn derive_theory(cs: &ConditionSet) -> DomainTheory {
    let mut by_attr: BTreeMap<&str, Vec<&Condition>> = BTreeMap::new();
    for c in cs.iter() {
        by_attr.entry(c.attribute.as_str()).or_default().push(c);
    }
    let mut implications = Vec::new();
    let mut exclusions = Vec::new();
    for conds in by_attr.values() {
        for (i, a) in conds.iter().enumerate() {
            for b in &conds[i + 1..] {
                match (&a.kind, &b.kind) {
                    (
                        ConditionKind::NumericGreater { threshold: ta },
                        ConditionKind::NumericGreater { threshold: tb },
                    ) => {
                        if ta > tb {
                            implications.push((Lit::pos(a.id), Lit::pos(b.id)));
                        } else if tb > ta {
                            implications.push((Lit::pos(b.id), Lit::pos(a.id)));
                        }
                    }
                    (ConditionKind::CategoricalEqual { .. }, ConditionKind::CategoricalEqual { .. }) => {
                        exclusions.push((a.id.min(b.id), a.id.max(b.id)));
                    }
                    _ => {}
                }
            }
        }
    }
    implications.sort();
    exclusions.sort();
    DomainTheory::from_parts(cs.len(), implications, exclusions).expect("derived theory is well formed")
}

/// A conjunction of literals over distinct conditions, kept sorted by
/// condition id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    lits: Vec<Lit>,
}

impl Term {
    pub fn empty() -> Self {
        Term { lits: Vec::new() }
    }

    /// Builds a term; `None` if some condition appears with both polarities.
    pub fn try_from_lits(lits: impl IntoIterator<Item = Lit>) -> Option<Self> {
        let mut t = Term::empty();
        for l in lits {
            if !t.insert(l) {
                return None;
            }
        }
        Some(t)
    }

    pub fn from_lits(lits: impl IntoIterator<Item = Lit>) -> Result<Self> {
        Term::try_from_lits(lits)
            .ok_or_else(|| Error::Precondition("term mentions a condition with both polarities".into()))
    }

    /// The canonical term `t_x` of an instance.
    pub fn from_instance(x: &Instance) -> Self {
        Term {
            lits: x.bits.iter().enumerate().map(|(i, &b)| Lit::new(i, b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Lit> + '_ {
        self.lits.iter().copied()
    }

    pub fn value(&self, cond: CondId) -> Option<bool> {
        self.lits
            .binary_search_by_key(&cond, |l| l.cond)
            .ok()
            .map(|i| self.lits[i].positive)
    }

    pub fn contains(&self, l: Lit) -> bool {
        self.value(l.cond) == Some(l.positive)
    }

    /// Adds a literal; returns `false` (leaving the term unchanged) if its
    /// negation is present.
    pub fn insert(&mut self, l: Lit) -> bool {
        match self.lits.binary_search_by_key(&l.cond, |x| x.cond) {
            Ok(i) => self.lits[i].positive == l.positive,
            Err(i) => {
                self.lits.insert(i, l);
                true
            }
        }
    }

    pub fn remove(&mut self, cond: CondId) -> Option<Lit> {
        self.lits
            .binary_search_by_key(&cond, |x| x.cond)
            .ok()
            .map(|i| self.lits.remove(i))
    }

    #[must_use]
    pub fn without(&self, cond: CondId) -> Term {
        let mut t = self.clone();
        t.remove(cond);
        t
    }

    /// Conjunction of two terms; `None` if they clash on a condition.
    pub fn union(&self, other: &Term) -> Option<Term> {
        let mut t = self.clone();
        for l in other.iter() {
            if !t.insert(l) {
                return None;
            }
        }
        Some(t)
    }

    pub fn is_subset(&self, other: &Term) -> bool {
        self.lits.iter().all(|&l| other.contains(l))
    }

    /// `t` covers `x` iff `t ⊆ t_x`.
    pub fn covers(&self, x: &Instance) -> bool {
        self.lits.iter().all(|l| l.holds(x))
    }

    pub fn to_signed(&self) -> Vec<i64> {
        self.lits.iter().map(|l| l.to_signed()).collect()
    }

    pub fn from_signed(values: &[i64]) -> Result<Term> {
        let lits = values
            .iter()
            .map(|&v| Lit::from_signed(v).ok_or_else(|| Error::parse("$", "literal 0 is not valid")))
            .collect::<Result<Vec<_>>>()?;
        Term::from_lits(lits)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return f.write_str("⊤");
        }
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl Serialize for Term {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_signed().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<i64>::deserialize(d)?;
        Term::from_signed(&values).map_err(serde::de::Error::custom)
    }
}

/// A total assignment of the conditions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instance {
    bits: Vec<bool>,
}

/// Serialized as a list of 0/1 integers.
impl Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.bits.iter().map(|&b| b as u8))
    }
}

impl<'de> Deserialize<'de> for Instance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let values = Vec::<u8>::deserialize(d)?;
        if values.iter().any(|&v| v > 1) {
            return Err(serde::de::Error::custom("instance bits must be 0 or 1"));
        }
        Ok(Instance::from_01(&values))
    }
}

impl Instance {
    /// Builds an instance, rejecting assignments that violate the theory.
    pub fn new(bits: Vec<bool>, th: &DomainTheory) -> Result<Self> {
        if bits.len() != th.num_conditions() {
            return Err(Error::Precondition(format!(
                "instance has {} bits, expected {}",
                bits.len(),
                th.num_conditions()
            )));
        }
        if !th.satisfied_by(&bits) {
            return Err(Error::Precondition("instance violates the domain theory".into()));
        }
        Ok(Instance { bits })
    }

    /// Builds an instance without checking the theory.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Instance { bits }
    }

    /// Convenience for tests and fixtures: `&[0, 1, 1, 1]`.
    pub fn from_01(bits: &[u8]) -> Self {
        Instance {
            bits: bits.iter().map(|&b| b != 0).collect(),
        }
    }

    /// Rebuilds an instance from a total term over `n` conditions.
    pub fn from_term(t: &Term, n: usize) -> Option<Self> {
        if t.len() != n || t.lits().iter().enumerate().any(|(i, l)| l.cond != i) {
            return None;
        }
        Some(Instance {
            bits: t.iter().map(|l| l.positive).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, cond: CondId) -> bool {
        self.bits[cond]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn term(&self) -> Term {
        Term::from_instance(self)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &b) in self.bits.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

/// A partial assignment kept closed under the theory by unit propagation,
/// with a trail for cheap backtracking.
#[derive(Clone, Debug)]
pub struct Assignment {
    vals: Vec<Option<bool>>,
    trail: Vec<CondId>,
}

impl Assignment {
    pub fn new(n: usize) -> Self {
        Assignment {
            vals: vec![None; n],
            trail: Vec::new(),
        }
    }

    /// Closure of `t`; `None` if `t` is inconsistent with the theory.
    pub fn from_term(t: &Term, th: &DomainTheory) -> Option<Self> {
        let mut a = Assignment::new(th.num_conditions());
        for l in t.iter() {
            if !a.assume(l, th) {
                return None;
            }
        }
        Some(a)
    }

    #[inline]
    pub fn value(&self, cond: CondId) -> Option<bool> {
        self.vals[cond]
    }

    /// `Some(true)` if `l` is entailed, `Some(false)` if its negation is.
    #[inline]
    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.vals[l.cond].map(|v| v == l.positive)
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let c = self.trail.pop().expect("trail above mark");
            self.vals[c] = None;
        }
    }

    /// Asserts `l` and propagates. On conflict the assignment is restored to
    /// its state before the call and `false` is returned.
    pub fn assume(&mut self, l: Lit, th: &DomainTheory) -> bool {
        let mark = self.mark();
        let mut queue = vec![l];
        while let Some(l) = queue.pop() {
            match self.vals[l.cond] {
                Some(v) if v == l.positive => continue,
                Some(_) => {
                    self.undo(mark);
                    return false;
                }
                None => {
                    self.vals[l.cond] = Some(l.positive);
                    self.trail.push(l.cond);
                    queue.extend_from_slice(th.consequences(l));
                }
            }
        }
        true
    }

    pub fn num_assigned(&self) -> usize {
        self.trail.len()
    }

    pub fn to_term(&self) -> Term {
        Term {
            lits: self
                .vals
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|b| Lit::new(i, b)))
                .collect(),
        }
    }
}

/// True iff some total assignment extending `t` satisfies the theory.
pub fn th_consistent(t: &Term, th: &DomainTheory) -> bool {
    Assignment::from_term(t, th).is_some()
}

/// Every literal entailed by `t` together with the theory.
pub fn closure(t: &Term, th: &DomainTheory) -> Result<Term> {
    Assignment::from_term(t, th)
        .map(|a| a.to_term())
        .ok_or_else(|| Error::Precondition(format!("term {t} is inconsistent with the domain theory")))
}

/// Maps a raw attribute-value row onto the condition space.
pub fn binarize(row: &BTreeMap<String, String>, cs: &ConditionSet) -> Result<Instance> {
    let bits = cs
        .iter()
        .map(|c| {
            let raw = row.get(&c.attribute).ok_or_else(|| Error::Ingest {
                attribute: c.attribute.clone(),
                message: "missing value".into(),
            })?;
            c.eval(raw)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance { bits })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn loan_conditions() -> ConditionSet {
        let c = |id, attribute: &str, kind| Condition {
            id,
            attribute: attribute.to_string(),
            kind,
        };
        ConditionSet::new(vec![
            c(0, "S", ConditionKind::NumericGreater { threshold: 30.0 }),
            c(1, "S", ConditionKind::NumericGreater { threshold: 20.0 }),
            c(2, "R", ConditionKind::Boolean),
            c(3, "PP", ConditionKind::Boolean),
        ])
        .unwrap()
    }

    fn chain() -> (ConditionSet, DomainTheory) {
        let cs = ConditionSet::from_unordered(
            [1.0, 2.0, 3.0].map(|t| ("A".to_string(), ConditionKind::NumericGreater { threshold: t })),
        );
        let th = derive_theory(&cs);
        (cs, th)
    }

    fn completions(t: &Term, th: &DomainTheory) -> Vec<Vec<bool>> {
        let n = th.num_conditions();
        (0..1u32 << n)
            .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|bits| th.satisfied_by(bits) && t.iter().all(|l| bits[l.cond] == l.positive))
            .collect()
    }

    #[test]
    fn loan_theory_is_single_implication() {
        let th = derive_theory(&loan_conditions());
        assert_eq!(th.implications(), &[(Lit::pos(0), Lit::pos(1))]);
        assert!(th.exclusions().is_empty());
    }

    #[test]
    fn independent_attributes_give_empty_theory() {
        let cs = ConditionSet::from_unordered(["a", "b", "c"].map(|a| (a.to_string(), ConditionKind::Boolean)));
        assert!(derive_theory(&cs).is_empty());
    }

    #[test]
    fn chain_theory_is_transitively_closed() {
        let (cs, th) = chain();
        // descending thresholds: id 0 is A>3
        assert_eq!(
            cs.get(0).unwrap().kind,
            ConditionKind::NumericGreater { threshold: 3.0 }
        );
        assert_eq!(th.implications().len(), 3);
        assert_eq!(completions(&Term::empty(), &th).len(), 4);
    }

    #[test]
    fn categorical_values_exclude_each_other() {
        let cs = ConditionSet::from_unordered(
            ["red", "green", "blue"]
                .map(|v| ("color".to_string(), ConditionKind::CategoricalEqual { value: v.into() })),
        );
        let th = derive_theory(&cs);
        assert_eq!(th.exclusions().len(), 3);
        let t = Term::from_lits([Lit::pos(0), Lit::pos(2)]).unwrap();
        assert!(!th_consistent(&t, &th));
        assert!(th_consistent(
            &Term::from_lits([Lit::neg(0), Lit::neg(1), Lit::neg(2)]).unwrap(),
            &th
        ));
    }

    #[test]
    fn consistency_and_closure_on_loan() {
        let th = derive_theory(&loan_conditions());
        let bad = Term::from_lits([Lit::pos(0), Lit::neg(1)]).unwrap();
        assert!(!th_consistent(&bad, &th));
        assert!(th_consistent(&Term::empty(), &th));
        let c = closure(&Term::from_lits([Lit::pos(0)]).unwrap(), &th).unwrap();
        assert_eq!(c, Term::from_lits([Lit::pos(0), Lit::pos(1)]).unwrap());
        assert!(closure(&bad, &th).is_err());
        let t = Term::from_lits([Lit::neg(2)]).unwrap();
        assert_eq!(closure(&t, &DomainTheory::empty(4)).unwrap(), t);
    }

    #[test]
    fn chain_consistency_matches_truth_table() {
        let (_, th) = chain();
        for mask in 0..27u32 {
            // each of 3 conditions: absent, positive, negative
            let mut lits = Vec::new();
            let mut m = mask;
            for c in 0..3 {
                match m % 3 {
                    1 => lits.push(Lit::pos(c)),
                    2 => lits.push(Lit::neg(c)),
                    _ => {}
                }
                m /= 3;
            }
            let t = Term::from_lits(lits).unwrap();
            let models = completions(&t, &th);
            assert_eq!(th_consistent(&t, &th), !models.is_empty(), "{t}");
            if let Ok(cl) = closure(&t, &th) {
                // closure equals the literals shared by every completion
                let common: Vec<Lit> = (0..3)
                    .filter_map(|i| {
                        let v = models[0][i];
                        models.iter().all(|m| m[i] == v).then_some(Lit::new(i, v))
                    })
                    .collect();
                assert_eq!(cl.lits(), common.as_slice(), "{t}");
            }
        }
    }

    #[test]
    fn binarize_loan_row() {
        let cs = loan_conditions();
        let row: BTreeMap<String, String> = [("S", "25"), ("R", "1"), ("PP", "1")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(binarize(&row, &cs).unwrap(), Instance::from_01(&[0, 1, 1, 1]));
        let low: BTreeMap<String, String> = [("S", "3"), ("R", "0"), ("PP", "false")]
            .into_iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(binarize(&low, &cs).unwrap(), Instance::from_01(&[0, 0, 0, 0]));
        let mut missing = row.clone();
        missing.remove("R");
        match binarize(&missing, &cs) {
            Err(Error::Ingest { attribute, .. }) => assert_eq!(attribute, "R"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn condition_order_is_deterministic() {
        let items = vec![
            ("S".to_string(), ConditionKind::NumericGreater { threshold: 20.0 }),
            ("R".to_string(), ConditionKind::Boolean),
            ("S".to_string(), ConditionKind::NumericGreater { threshold: 30.0 }),
            ("PP".to_string(), ConditionKind::Boolean),
            ("S".to_string(), ConditionKind::NumericGreater { threshold: 30.0 }),
        ];
        let a = ConditionSet::from_unordered(items.clone());
        let mut rev = items;
        rev.reverse();
        let b = ConditionSet::from_unordered(rev);
        assert_eq!(a, b);
        let names: Vec<String> = a.iter().map(Condition::name).collect();
        assert_eq!(names, ["PP", "R", "S>30", "S>20"]);
    }

    #[test]
    fn duplicate_conditions_are_rejected() {
        let c = |id| Condition {
            id,
            attribute: "S".into(),
            kind: ConditionKind::NumericGreater { threshold: 1.5 },
        };
        assert!(ConditionSet::new(vec![c(0), c(1)]).is_err());
        assert!(ConditionSet::new(vec![c(1)]).is_err());
    }

    #[test]
    fn conditions_json_round_trip() {
        let cs = loan_conditions();
        assert_eq!(ConditionSet::from_json(&cs.to_json()).unwrap(), cs);
        assert!(ConditionSet::from_json("[{\"id\":0,\"attribute\":\"S\",\"kind\":\"numeric-greater\"}]").is_err());
    }

    #[test]
    fn term_algebra() {
        let x = Instance::from_01(&[0, 1, 1, 1]);
        let tx = x.term();
        assert_eq!(tx.to_string(), "¬x1 ∧ x2 ∧ x3 ∧ x4");
        assert_eq!(Instance::from_term(&tx, 4), Some(x.clone()));
        let t = Term::from_lits([Lit::neg(0)]).unwrap();
        assert!(t.covers(&x));
        assert!(t.is_subset(&tx));
        assert!(Term::try_from_lits([Lit::pos(1), Lit::neg(1)]).is_none());
        assert_eq!(Term::from_signed(&t.to_signed()).unwrap(), t);
    }
}
