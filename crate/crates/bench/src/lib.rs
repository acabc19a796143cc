//! Shared setup for the benchmarks under `benches/`.

use boostdistill::harness::{prepare_workload, Workload, WorkloadConfig};
use boostdistill::synthetic::synthetic_table;
use boostdistill::{cart_learn, misclassified, DecisionTree, Instance};

/// The synthetic reference workload (18 conditions, 20 boosted trees of
/// depth 3) with an unbounded CART tree learned on its training part.
pub struct Reference {
    pub workload: Workload,
    pub dt: DecisionTree,
    pub test: Vec<Instance>,
    /// Test instances the initial tree gets wrong.
    pub wrong: Vec<Instance>,
}

pub fn reference(rows: usize) -> Reference {
    let table = synthetic_table(rows, 0);
    let workload = prepare_workload("synthetic", &table, &WorkloadConfig::default()).expect("synthetic workload");
    let dt = cart_learn(&workload.train, None).expect("non-empty training set");
    let test: Vec<Instance> = workload.test.instances().cloned().collect();
    let wrong = misclassified(&dt, &workload.bt, &test)
        .into_iter()
        .map(|i| test[i].clone())
        .collect();
    Reference {
        workload,
        dt,
        test,
        wrong,
    }
}
