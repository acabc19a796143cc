//! The loan running example: a four-condition space over salary `S`,
//! previous reimbursement `R` and permanent position `PP`, a decision tree
//! and a two-member boosted tree. The models are loaded from the checked-in
//! files under `fixtures/loan/` so tests and the CLI demo share them.

use crate::model::{bt_from_json, dt_from_json, BoostedTree, DecisionTree, Node, Tree};
use crate::space::{derive_theory, ConditionSet, DomainTheory};

pub const LOAN_DT_JSON: &str = include_str!("../../../fixtures/loan/i.json");
pub const LOAN_BT_JSON: &str = include_str!("../../../fixtures/loan/p.json");
pub const LOAN_STREAM_CSV: &str = include_str!("../../../fixtures/loan/stream.csv");

#[derive(Clone, Debug)]
pub struct Loan {
    pub cs: ConditionSet,
    pub th: DomainTheory,
    pub dt: DecisionTree,
    pub bt: BoostedTree,
}

pub fn loan() -> Loan {
    let (cs, dt) = dt_from_json(LOAN_DT_JSON).expect("loan decision tree fixture parses");
    let bt = bt_from_json(LOAN_BT_JSON).expect("loan boosted tree fixture parses");
    assert_eq!(cs, bt.conditions, "loan fixtures share one condition set");
    let th = derive_theory(&cs);
    Loan { cs, th, dt, bt }
}

/// The loan decision tree after its `(S > 20) ∧ PP` leaf under `¬(S > 30)`
/// was turned negative, before simplification.
pub fn loan_rectified() -> DecisionTree {
    Tree::from_nodes(
        vec![
            Node::Split {
                cond: 0,
                left: 1,
                right: 6,
            },
            Node::Split {
                cond: 1,
                left: 2,
                right: 3,
            },
            Node::Leaf(false),
            Node::Split {
                cond: 3,
                left: 4,
                right: 5,
            },
            Node::Leaf(false),
            Node::Leaf(false),
            Node::Split {
                cond: 2,
                left: 7,
                right: 10,
            },
            Node::Split {
                cond: 3,
                left: 8,
                right: 9,
            },
            Node::Leaf(false),
            Node::Leaf(true),
            Node::Leaf(true),
        ],
        0,
    )
    .expect("well-formed")
}

/// The simplified form of [`loan_rectified`]: 7 nodes, depth 3.
pub fn loan_simplified() -> DecisionTree {
    Tree::from_nodes(
        vec![
            Node::Split {
                cond: 0,
                left: 1,
                right: 2,
            },
            Node::Leaf(false),
            Node::Split {
                cond: 2,
                left: 3,
                right: 6,
            },
            Node::Split {
                cond: 3,
                left: 4,
                right: 5,
            },
            Node::Leaf(false),
            Node::Leaf(true),
            Node::Leaf(true),
        ],
        0,
    )
    .expect("well-formed")
}
