//! Decision trees, regression trees, boosted trees and classification rules.
//!
//! Trees live in index arenas. A [`TreeBuilder`] hash-conses nodes, so
//! structurally identical subtrees share one id while a tree is being
//! rewritten; serialization always expands the result back into a plain tree.

use std::collections::HashMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::space::{
    build_condition_set, closure, derive_theory, th_consistent, CondId, ConditionSet, DomainTheory, Instance, Lit, Term,
};

pub type NodeId = usize;

/// Values a tree may carry at its leaves.
pub trait LeafValue: Copy + PartialEq + fmt::Debug {
    /// Bit-exact identity used for hash-consing.
    fn key(self) -> u64;
}

impl LeafValue for bool {
    fn key(self) -> u64 {
        u64::from(self)
    }
}

impl LeafValue for f64 {
    fn key(self) -> u64 {
        self.to_bits()
    }
}

/// A tree node. `left` is followed when the condition is false, `right`
/// when it is true.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Node<L> {
    Leaf(L),
    Split { cond: CondId, left: NodeId, right: NodeId },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tree<L> {
    nodes: Vec<Node<L>>,
    root: NodeId,
}

/// Binary classifier with Boolean leaves.
pub type DecisionTree = Tree<bool>;
/// Member of a boosted tree, with real-valued leaves.
pub type RegressionTree = Tree<f64>;

impl<L: LeafValue> Tree<L> {
    pub fn leaf(value: L) -> Self {
        Tree {
            nodes: vec![Node::Leaf(value)],
            root: 0,
        }
    }

    /// Validates an arena: children in range, no cycles, every node reachable
    /// from the root.
    pub fn from_nodes(nodes: Vec<Node<L>>, root: NodeId) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::Structural(format!(
                "root {root} out of range ({} nodes)",
                nodes.len()
            )));
        }
        // 0 = unseen, 1 = on stack, 2 = done
        let mut state = vec![0u8; nodes.len()];
        let mut stack = vec![(root, false)];
        while let Some((id, exiting)) = stack.pop() {
            if exiting {
                state[id] = 2;
                continue;
            }
            match state[id] {
                1 => return Err(Error::Structural(format!("cycle through node {id}"))),
                2 => continue,
                _ => {}
            }
            state[id] = 1;
            stack.push((id, true));
            if let Node::Split { left, right, .. } = nodes[id] {
                for child in [right, left] {
                    if child >= nodes.len() {
                        return Err(Error::Structural(format!("node {id} has child {child} out of range")));
                    }
                    if state[child] == 1 {
                        return Err(Error::Structural(format!("cycle through node {child}")));
                    }
                    if state[child] == 0 {
                        stack.push((child, false));
                    }
                }
            }
        }
        if let Some(id) = state.iter().position(|&s| s == 0) {
            return Err(Error::Structural(format!("node {id} is unreachable from the root")));
        }
        Ok(Tree { nodes, root })
    }

    pub fn nodes(&self) -> &[Node<L>] {
        &self.nodes
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node<L> {
        &self.nodes[id]
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.nodes[self.root], Node::Leaf(_))
    }

    /// Value of the unique leaf compatible with `x`.
    #[inline]
    pub fn eval(&self, x: &Instance) -> L {
        self.eval_bits(x.bits())
    }

    pub fn eval_bits(&self, bits: &[bool]) -> L {
        let mut id = self.root;
        loop {
            match self.nodes[id] {
                Node::Leaf(v) => return v,
                Node::Split { cond, left, right } => {
                    id = if bits[cond] { right } else { left };
                }
            }
        }
    }

    /// Node count of the tree, counting shared subtrees once per occurrence.
    pub fn size(&self) -> u64 {
        let mut memo = vec![0u64; self.nodes.len()];
        for id in self.post_order() {
            memo[id] = match self.nodes[id] {
                Node::Leaf(_) => 1,
                Node::Split { left, right, .. } => 1u64.saturating_add(memo[left]).saturating_add(memo[right]),
            };
        }
        memo[self.root]
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        let mut memo = vec![0usize; self.nodes.len()];
        for id in self.post_order() {
            memo[id] = match self.nodes[id] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + memo[left].max(memo[right]),
            };
        }
        memo[self.root]
    }

    /// Number of leaves, counting shared subtrees once per occurrence.
    pub fn leaf_count(&self) -> u64 {
        self.size().div_ceil(2)
    }

    /// Arena ids in an order where children precede their parents.
    fn post_order(&self) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, exiting)) = stack.pop() {
            if exiting {
                out.push(id);
                continue;
            }
            if seen[id] {
                continue;
            }
            seen[id] = true;
            stack.push((id, true));
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push((right, false));
                stack.push((left, false));
            }
        }
        out
    }

    /// Conditions tested anywhere in the tree (with repetition).
    pub fn split_conditions(&self) -> impl Iterator<Item = CondId> + '_ {
        self.nodes.iter().filter_map(|n| match n {
            Node::Split { cond, .. } => Some(*cond),
            Node::Leaf(_) => None,
        })
    }

    /// One entry per leaf occurrence, depth-first with the false branch first.
    pub fn paths(&self, th: &DomainTheory) -> Vec<PathTerm<L>> {
        let mut out = Vec::new();
        let mut nodes = Vec::new();
        self.collect_paths(self.root, Term::empty(), true, th, &mut nodes, &mut out);
        out
    }

    fn collect_paths(
        &self,
        id: NodeId,
        term: Term,
        clash_free: bool,
        th: &DomainTheory,
        nodes: &mut Vec<NodeId>,
        out: &mut Vec<PathTerm<L>>,
    ) {
        nodes.push(id);
        match self.nodes[id] {
            Node::Leaf(v) => {
                let feasible = clash_free && th_consistent(&term, th);
                out.push(PathTerm {
                    term,
                    leaf: v,
                    nodes: nodes.clone(),
                    feasible,
                });
            }
            Node::Split { cond, left, right } => {
                for (child, positive) in [(left, false), (right, true)] {
                    let mut t = term.clone();
                    let ok = t.insert(Lit::new(cond, positive));
                    self.collect_paths(child, t, clash_free && ok, th, nodes, out);
                }
            }
        }
        nodes.pop();
    }

    /// Renames conditions; fails if a tested condition has no image.
    pub fn remap_conditions(&self, map: &[Option<CondId>]) -> Result<Self> {
        let nodes =
            self.nodes
                .iter()
                .map(|n| match *n {
                    Node::Leaf(v) => Ok(Node::Leaf(v)),
                    Node::Split { cond, left, right } => {
                        let cond = map.get(cond).copied().flatten().ok_or_else(|| {
                            Error::Structural(format!("condition {cond} has no image in the remapping"))
                        })?;
                        Ok(Node::Split { cond, left, right })
                    }
                })
                .collect::<Result<Vec<_>>>()?;
        Ok(Tree { nodes, root: self.root })
    }

    /// A copy without shared subtrees, laid out in preorder (root = 0).
    pub fn expanded(&self) -> Self {
        let mut nodes = Vec::new();
        // (source id, parent slot to patch)
        let mut stack: Vec<(NodeId, Option<(usize, bool)>)> = vec![(self.root, None)];
        while let Some((src, parent)) = stack.pop() {
            let id = nodes.len();
            if let Some((p, is_right)) = parent {
                if let Node::Split { left, right, .. } = &mut nodes[p] {
                    if is_right {
                        *right = id;
                    } else {
                        *left = id;
                    }
                }
            }
            match self.nodes[src] {
                Node::Leaf(v) => nodes.push(Node::Leaf(v)),
                Node::Split { cond, left, right } => {
                    nodes.push(Node::Split {
                        cond,
                        left: usize::MAX,
                        right: usize::MAX,
                    });
                    stack.push((right, Some((id, true))));
                    stack.push((left, Some((id, false))));
                }
            }
        }
        Tree { nodes, root: 0 }
    }

    /// Structural equality of the trees rooted at `self.root` and `other.root`.
    pub fn same_shape(&self, other: &Tree<L>) -> bool {
        let mut stack = vec![(self.root, other.root)];
        while let Some((a, b)) = stack.pop() {
            match (self.nodes[a], other.nodes[b]) {
                (Node::Leaf(x), Node::Leaf(y)) => {
                    if x.key() != y.key() {
                        return false;
                    }
                }
                (
                    Node::Split {
                        cond: ca,
                        left: la,
                        right: ra,
                    },
                    Node::Split {
                        cond: cb,
                        left: lb,
                        right: rb,
                    },
                ) => {
                    if ca != cb {
                        return false;
                    }
                    stack.push((la, lb));
                    stack.push((ra, rb));
                }
                _ => return false,
            }
        }
        true
    }
}

impl DecisionTree {
    #[inline]
    pub fn classify(&self, x: &Instance) -> bool {
        self.eval(x)
    }
}

/// A root-to-leaf path: its literals, its leaf and the arena ids along it.
/// `feasible` is false when the literals clash or contradict the theory.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTerm<L> {
    pub term: Term,
    pub leaf: L,
    pub nodes: Vec<NodeId>,
    pub feasible: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum NodeKey {
    Leaf(u64),
    Split(CondId, NodeId, NodeId),
}

/// Hash-consing arena used to build and rewrite trees.
#[derive(Debug)]
pub struct TreeBuilder<L> {
    nodes: Vec<Node<L>>,
    index: HashMap<NodeKey, NodeId>,
}

impl<L: LeafValue> Default for TreeBuilder<L> {
    fn default() -> Self {
        TreeBuilder {
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }
}

impl<L: LeafValue> TreeBuilder<L> {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, key: NodeKey, node: Node<L>) -> NodeId {
        let next = self.nodes.len();
        let id = *self.index.entry(key).or_insert(next);
        if id == next {
            self.nodes.push(node);
        }
        id
    }

    pub fn leaf(&mut self, value: L) -> NodeId {
        self.intern(NodeKey::Leaf(value.key()), Node::Leaf(value))
    }

    /// Adds a decision node. Identical children are kept as they are.
    pub fn split(&mut self, cond: CondId, left: NodeId, right: NodeId) -> NodeId {
        self.intern(NodeKey::Split(cond, left, right), Node::Split { cond, left, right })
    }

    pub fn get(&self, id: NodeId) -> &Node<L> {
        &self.nodes[id]
    }

    /// Copies the subtree of `tree` rooted at `node`. `memo` maps source ids
    /// to builder ids and may be reused across calls on the same tree.
    pub fn import(&mut self, tree: &Tree<L>, node: NodeId, memo: &mut HashMap<NodeId, NodeId>) -> NodeId {
        if let Some(&id) = memo.get(&node) {
            return id;
        }
        let id = match tree.nodes[node] {
            Node::Leaf(v) => self.leaf(v),
            Node::Split { cond, left, right } => {
                let l = self.import(tree, left, memo);
                let r = self.import(tree, right, memo);
                self.split(cond, l, r)
            }
        };
        memo.insert(node, id);
        id
    }

    /// Extracts the nodes reachable from `root` as a compact tree, in
    /// preorder with shared subtrees kept shared.
    pub fn finish(&self, root: NodeId) -> Tree<L> {
        let mut remap: HashMap<NodeId, NodeId> = HashMap::new();
        let mut order = Vec::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if remap.contains_key(&id) {
                continue;
            }
            remap.insert(id, order.len());
            order.push(id);
            if let Node::Split { left, right, .. } = self.nodes[id] {
                stack.push(right);
                stack.push(left);
            }
        }
        let nodes = order
            .iter()
            .map(|&id| match self.nodes[id] {
                Node::Leaf(v) => Node::Leaf(v),
                Node::Split { cond, left, right } => Node::Split {
                    cond,
                    left: remap[&left],
                    right: remap[&right],
                },
            })
            .collect();
        Tree { nodes, root: 0 }
    }
}

/// An ordered list of regression trees over one condition set. An instance
/// is positive iff the sum of the leaf values it reaches is strictly positive.
#[derive(Clone, Debug, PartialEq)]
pub struct BoostedTree {
    pub conditions: ConditionSet,
    pub trees: Vec<RegressionTree>,
}

impl BoostedTree {
    pub fn new(conditions: ConditionSet, trees: Vec<RegressionTree>) -> Result<Self> {
        for (t, tree) in trees.iter().enumerate() {
            if let Some(c) = tree.split_conditions().find(|&c| c >= conditions.len()) {
                return Err(Error::Structural(format!(
                    "tree {t} splits on condition {c}, only {} conditions exist",
                    conditions.len()
                )));
            }
        }
        Ok(BoostedTree { conditions, trees })
    }

    pub fn num_conditions(&self) -> usize {
        self.conditions.len()
    }

    pub fn theory(&self) -> DomainTheory {
        derive_theory(&self.conditions)
    }

    /// Sum of the leaf values reached by `x`, accumulated in tree order.
    pub fn margin(&self, x: &Instance) -> f64 {
        self.margin_bits(x.bits())
    }

    pub fn margin_bits(&self, bits: &[bool]) -> f64 {
        let mut sum = 0.0;
        for t in &self.trees {
            sum += t.eval_bits(bits);
        }
        sum
    }

    #[inline]
    pub fn classify(&self, x: &Instance) -> bool {
        self.margin(x) > 0.0
    }

    pub fn node_count(&self) -> u64 {
        self.trees.iter().map(Tree::size).sum()
    }

    /// Drops conditions no tree tests and renumbers the rest in the
    /// deterministic order of [`build_condition_set`].
    pub fn compact(&self) -> Result<BoostedTree> {
        let cs = build_condition_set(self)?;
        let map: Vec<Option<CondId>> = self.conditions.iter().map(|c| cs.find(&c.attribute, &c.kind)).collect();
        let trees = self
            .trees
            .iter()
            .map(|t| t.remap_conditions(&map))
            .collect::<Result<Vec<_>>>()?;
        BoostedTree::new(cs, trees)
    }
}

/// A partial classifier `premises ⇒ y` (or `⇒ ¬y`). Premises are stored
/// closed under the domain theory, so coverage is a subset test.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassificationRule {
    premises: Term,
    conclusion: bool,
}

impl ClassificationRule {
    pub fn new(premises: &Term, conclusion: bool, th: &DomainTheory) -> Result<Self> {
        Ok(ClassificationRule {
            premises: closure(premises, th)?,
            conclusion,
        })
    }

    pub fn premises(&self) -> &Term {
        &self.premises
    }

    pub fn conclusion(&self) -> bool {
        self.conclusion
    }

    pub fn covers(&self, x: &Instance) -> bool {
        self.premises.covers(x)
    }

    /// The rule's class for `x`, or `None` if `x` is not covered.
    pub fn classify(&self, x: &Instance) -> Option<bool> {
        self.covers(x).then_some(self.conclusion)
    }

    /// Two rules conflict when their conclusions differ and their premises
    /// are jointly consistent with the theory.
    pub fn conflicts_with(&self, other: &ClassificationRule, th: &DomainTheory) -> bool {
        self.conclusion != other.conclusion
            && self
                .premises
                .union(&other.premises)
                .is_some_and(|t| th_consistent(&t, th))
    }
}

impl fmt::Display for ClassificationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ⇒ {}", self.premises, if self.conclusion { "y" } else { "¬y" })
    }
}

/// A model document as read from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Decision {
        conditions: ConditionSet,
        tree: DecisionTree,
    },
    Boosted(BoostedTree),
}

impl Model {
    pub fn conditions(&self) -> &ConditionSet {
        match self {
            Model::Decision { conditions, .. } => conditions,
            Model::Boosted(bt) => &bt.conditions,
        }
    }

    pub fn classify(&self, x: &Instance) -> bool {
        match self {
            Model::Decision { tree, .. } => tree.classify(x),
            Model::Boosted(bt) => bt.classify(x),
        }
    }

    pub fn to_json(&self) -> String {
        match self {
            Model::Decision { conditions, tree } => dt_to_json(tree, conditions),
            Model::Boosted(bt) => bt_to_json(bt),
        }
    }

    pub fn from_json(text: &str) -> Result<Model> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::parse("$", e.to_string()))?;
        let kind = doc
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse("$.kind", "missing model kind"))?;
        let conditions = parse_conditions(&doc)?;
        let trees = doc
            .get("trees")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse("$.trees", "expected an array"))?;
        match kind {
            "decision-tree" => {
                if trees.len() != 1 {
                    return Err(Error::parse(
                        "$.trees",
                        format!("a decision tree has exactly one tree, found {}", trees.len()),
                    ));
                }
                let tree = parse_tree(&trees[0], "$.trees[0]", conditions.len(), |v| {
                    v.as_bool().or_else(|| match v.as_f64() {
                        Some(0.0) => Some(false),
                        Some(1.0) => Some(true),
                        _ => None,
                    })
                })?;
                Ok(Model::Decision { conditions, tree })
            }
            "boosted-tree" => {
                let trees = trees
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        parse_tree(t, &format!("$.trees[{i}]"), conditions.len(), |v| {
                            v.as_f64().filter(|x| x.is_finite())
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Model::Boosted(BoostedTree { conditions, trees }))
            }
            other => Err(Error::parse("$.kind", format!("unknown model kind `{other}`"))),
        }
    }
}

fn parse_conditions(doc: &Value) -> Result<ConditionSet> {
    let raw = doc
        .get("conditions")
        .ok_or_else(|| Error::parse("$.conditions", "missing"))?;
    let docs = serde_json::from_value(raw.clone()).map_err(|e| Error::parse("$.conditions", e.to_string()))?;
    ConditionSet::from_docs(docs, "$.conditions")
}

fn parse_tree<L: LeafValue>(doc: &Value, path: &str, n: usize, leaf: impl Fn(&Value) -> Option<L>) -> Result<Tree<L>> {
    let nodes = doc
        .get("nodes")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::parse(format!("{path}.nodes"), "expected an array"))?;
    let root = doc
        .get("root")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::parse(format!("{path}.root"), "expected a node index"))? as usize;
    let index = |node: &Value, key: &str, p: &str| {
        node.get(key)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| Error::parse(format!("{p}.{key}"), "expected a non-negative integer"))
    };
    let mut out = Vec::with_capacity(nodes.len());
    for (i, node) in nodes.iter().enumerate() {
        let p = format!("{path}.nodes[{i}]");
        let obj = node.as_object().ok_or_else(|| Error::parse(&p, "expected an object"))?;
        if let Some(v) = obj.get("leaf") {
            if obj.len() != 1 {
                return Err(Error::parse(&p, "leaf node with extra fields"));
            }
            let v = leaf(v).ok_or_else(|| Error::parse(format!("{p}.leaf"), "invalid leaf value"))?;
            out.push(Node::Leaf(v));
        } else {
            if obj.len() != 3 {
                return Err(Error::parse(&p, "split node needs exactly cond, left and right"));
            }
            let cond = index(node, "cond", &p)?;
            if cond >= n {
                return Err(Error::parse(
                    format!("{p}.cond"),
                    format!("condition {cond} out of range ({n} conditions)"),
                ));
            }
            out.push(Node::Split {
                cond,
                left: index(node, "left", &p)?,
                right: index(node, "right", &p)?,
            });
        }
    }
    Tree::from_nodes(out, root).map_err(|e| Error::parse(path, e.to_string()))
}

fn tree_doc<L: LeafValue>(tree: &Tree<L>, leaf: impl Fn(L) -> Value) -> Value {
    let t = tree.expanded();
    let nodes: Vec<Value> = t
        .nodes
        .iter()
        .map(|n| match *n {
            Node::Leaf(v) => json!({ "leaf": leaf(v) }),
            Node::Split { cond, left, right } => json!({ "cond": cond, "left": left, "right": right }),
        })
        .collect();
    json!({ "nodes": nodes, "root": t.root })
}

fn model_doc(kind: &str, conditions: &ConditionSet, trees: Vec<Value>) -> String {
    let doc = json!({
        "kind": kind,
        "conditions": serde_json::to_value(conditions.to_docs()).expect("conditions serialize"),
        "trees": trees,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("model serializes");
    s.push('\n');
    s
}

pub fn dt_to_json(tree: &DecisionTree, conditions: &ConditionSet) -> String {
    model_doc("decision-tree", conditions, vec![tree_doc(tree, Value::Bool)])
}

pub fn dt_from_json(text: &str) -> Result<(ConditionSet, DecisionTree)> {
    match Model::from_json(text)? {
        Model::Decision { conditions, tree } => Ok((conditions, tree)),
        Model::Boosted(_) => Err(Error::parse("$.kind", "expected a decision tree")),
    }
}

pub fn bt_to_json(bt: &BoostedTree) -> String {
    model_doc(
        "boosted-tree",
        &bt.conditions,
        bt.trees.iter().map(|t| tree_doc(t, |v| json!(v))).collect(),
    )
}

pub fn bt_from_json(text: &str) -> Result<BoostedTree> {
    match Model::from_json(text)? {
        Model::Boosted(bt) => Ok(bt),
        Model::Decision { .. } => Err(Error::parse("$.kind", "expected a boosted tree")),
    }
}
