//! Distilling boosted trees into decision trees by rectification.
//!
//! A decision tree is corrected one misclassified instance at a time: the
//! boosted tree's prediction is explained by a term over the binarized
//! conditions, the explanation becomes a classification rule, and the tree
//! is rewritten to obey it.

pub mod data;
pub mod error;
pub mod explain;
pub mod fixtures;
pub mod harness;
pub mod learn;
pub mod model;
pub mod oracle;
pub mod random;
pub mod rectify;
pub mod space;
pub mod synthetic;

pub use data::{binarize_table, candidate_conditions, PoolConfig, RawTable};
pub use error::{Error, Result};
pub use explain::{
    bt_margin_bounds, bt_sufficient_reason_exact, bt_tree_specific_reason, dt_sufficient_reason, explanation_to_rule,
    Budget, DeletionOrder, MarginBounds, TimedOut,
};
pub use learn::{cart_learn, gbt_learn, retrain_correct, Dataset, GbtConfig, RetrainConfig, SampleRule};
pub use model::{
    BoostedTree, ClassificationRule, DecisionTree, Model, Node, NodeId, PathTerm, RegressionTree, Tree, TreeBuilder,
};
pub use rectify::{
    distill_step, distill_stream, misclassified, rectify_by_rule, relative_accuracy, simplify, DistillConfig,
    DistillTrace, ExplanationCache, StepRecord,
};
pub use space::{
    binarize, build_condition_set, closure, derive_theory, th_consistent, CondId, Condition, ConditionKind,
    ConditionSet, DomainTheory, Instance, Lit, Term,
};
