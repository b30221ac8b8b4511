//! Worked examples and counterexample instances, with the allocation states
//! they are usually discussed with.
//!
//! Agents are named `"1"`, `"2"`, ... Items of multi-category examples are
//! named `o<category>_<k>`.

use crate::instance::{Allocation, Instance};

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub label: &'static str,
    pub allocation: Allocation,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub description: &'static str,
    pub instance: Instance,
    pub snapshots: Vec<Snapshot>,
}

impl Fixture {
    pub fn snapshot(&self, label: &str) -> Option<&Allocation> {
        self.snapshots.iter().find(|s| s.label == label).map(|s| &s.allocation)
    }
}

pub const NAMES: [&str; 6] = ["intro", "table2", "table3", "table4", "table5", "table6"];

pub fn by_name(name: &str) -> Option<Fixture> {
    match name {
        "intro" => Some(intro()),
        "table2" => Some(table2()),
        "table3" => Some(table3()),
        "table4" => Some(table4()),
        "table5" => Some(table5()),
        "table6" => Some(table6()),
        _ => None,
    }
}

pub fn all() -> Vec<Fixture> {
    NAMES.iter().filter_map(|n| by_name(n)).collect()
}

fn snap(instance: &Instance, label: &'static str, bundles: &[&[&str]]) -> Snapshot {
    Snapshot { label, allocation: Allocation::from_names(instance, bundles).expect("fixture items exist") }
}

/// One category {o1, o2}, capacity 1; o1 is a good and o2 a chore for both
/// agents. No feasible allocation is EF1.
pub fn intro() -> Fixture {
    let instance = Instance::builder(["1", "2"])
        .category("C1", 1, &["o1", "o2"])
        .utilities("1", &[1, -1])
        .utilities("2", &[1, -1])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![snap(&instance, "split", &[&["o1"], &["o2"]])];
    Fixture {
        name: "intro",
        description: "one good and one chore in a single capacity-1 category",
        instance,
        snapshots,
    }
}

/// Two categories (4 items with capacity 2, 2 items with capacity 1),
/// same-sign utilities. Used for the line-sweep walkthrough.
pub fn table2() -> Fixture {
    let instance = Instance::builder(["1", "2"])
        .category("C1", 2, &["o1", "o2", "o3", "o4"])
        .category("C2", 1, &["o5", "o6"])
        .utilities("1", &[0, -1, -4, -5, 0, 2])
        .utilities("2", &[0, -1, -2, -1, -1, 0])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![
        snap(&instance, "initial", &[&["o1", "o2", "o6"], &["o3", "o4", "o5"]]),
        snap(&instance, "after_o5_o6", &[&["o1", "o2", "o5"], &["o3", "o4", "o6"]]),
    ];
    Fixture {
        name: "table2",
        description: "two-category same-sign walkthrough instance",
        instance,
        snapshots,
    }
}

/// Iterated-matching counterexample: two capacity-1 categories of chores.
pub fn table3() -> Fixture {
    let instance = Instance::builder(["1", "2"])
        .category("C1", 1, &["o1_1", "o1_2"])
        .category("C2", 1, &["o2_1", "o2_2"])
        .utilities("1", &[0, -2, -2, -1])
        .utilities("2", &[0, -4, -4, 0])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![
        snap(&instance, "round1", &[&["o1_2"], &["o1_1"]]),
        snap(&instance, "round2", &[&["o1_2", "o2_1"], &["o1_1", "o2_2"]]),
    ];
    Fixture {
        name: "table3",
        description: "category-by-category iterated matching loses EF1",
        instance,
        snapshots,
    }
}

/// Top-trading counterexample: giving the next chore to the sink agent
/// would break its capacity.
pub fn table4() -> Fixture {
    let instance = Instance::builder(["1", "2"])
        .category("C1", 2, &["o1_1", "o1_2", "o1_3", "o1_4"])
        .category("C2", 1, &["o2_1", "o2_2"])
        .utilities("1", &[-1, 0, 0, 0, -2, -4])
        .utilities("2", &[-1, 0, 0, 0, -1, -3])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![
        snap(&instance, "state", &[&["o1_1"], &["o1_2", "o1_3"]]),
        snap(&instance, "sink_gets_o1_4", &[&["o1_1"], &["o1_2", "o1_3", "o1_4"]]),
    ];
    Fixture {
        name: "table4",
        description: "sink agent already at capacity",
        instance,
        snapshots,
    }
}

/// Cycle-elimination counterexample: four agents, four chores, capacity 1.
/// The envy graph has a cycle while the top-trading graph does not.
pub fn table5() -> Fixture {
    let instance = Instance::builder(["1", "2", "3", "4"])
        .category("C1", 1, &["o1", "o2", "o3", "o4"])
        .utilities("1", &[-5, -3, -7, -7])
        .utilities("2", &[-5, -2, -1, -4])
        .utilities("3", &[-4, -7, -6, -1])
        .utilities("4", &[-3, -3, -2, -1])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![snap(&instance, "diagonal", &[&["o1"], &["o2"], &["o3"], &["o4"]])];
    Fixture {
        name: "table5",
        description: "envy cycle without a top-trading cycle",
        instance,
        snapshots,
    }
}

/// Pareto-improvement counterexample: eight chores, one category of
/// capacity 8. An EF1 allocation whose Pareto improvement is not EF1.
pub fn table6() -> Fixture {
    let instance = Instance::builder(["1", "2"])
        .category("C1", 8, &["o1", "o2", "o3", "o4", "o5", "o6", "o7", "o8"])
        .utilities("1", &[-5, -2, -1, -2, -2, -2, -1, -2])
        .utilities("2", &[-1, -1, -2, -1, -1, 0, 0, 0])
        .build()
        .expect("fixture is well formed");
    let snapshots = vec![
        snap(&instance, "A", &[&["o1", "o5", "o6", "o7"], &["o2", "o3", "o4", "o8"]]),
        snap(&instance, "after_swap", &[&["o2", "o3", "o4", "o5", "o6", "o7"], &["o1", "o8"]]),
    ];
    Fixture {
        name: "table6",
        description: "Pareto improvement of an EF1 allocation that is not EF1",
        instance,
        snapshots,
    }
}
