//! Envy-based fairness predicates and agent graphs. All checks work for any
//! number of agents and on partial allocations.

use crate::instance::{Agent, Allocation, Instance, Item};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Directed agent graph; an edge `i -> j` means `i` points at `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnvyGraph {
    pub num_agents: usize,
    pub edges: BTreeSet<(Agent, Agent)>,
}

impl EnvyGraph {
    pub fn has_edge(&self, from: Agent, to: Agent) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Agents without outgoing edges.
    pub fn sinks(&self) -> Vec<Agent> {
        (0..self.num_agents)
            .map(Agent)
            .filter(|a| !self.edges.iter().any(|(f, _)| f == a))
            .collect()
    }

    pub fn has_cycle(&self) -> bool {
        // Kahn's algorithm.
        let n = self.num_agents;
        let mut indeg = vec![0usize; n];
        for (_, t) in &self.edges {
            indeg[t.0] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for (f, t) in &self.edges {
                if f.0 == v {
                    indeg[t.0] -= 1;
                    if indeg[t.0] == 0 {
                        stack.push(t.0);
                    }
                }
            }
        }
        seen < n
    }

    /// Agents with at least one outgoing edge.
    pub fn envious(&self) -> Vec<Agent> {
        let mut out: Vec<Agent> = self.edges.iter().map(|(f, _)| *f).collect();
        out.dedup();
        out
    }

    /// Edges as `(from name, to name)` pairs.
    pub fn named_edges<'a>(&self, instance: &'a Instance) -> Vec<(&'a str, &'a str)> {
        self.edges
            .iter()
            .map(|(f, t)| (instance.agent_name(*f), instance.agent_name(*t)))
            .collect()
    }
}

fn utilities_matrix(instance: &Instance, allocation: &Allocation) -> Vec<Vec<Rational>> {
    instance
        .agents()
        .map(|i| {
            instance
                .agents()
                .map(|j| instance.bundle_utility(i, allocation.bundle(j)))
                .collect()
        })
        .collect()
}

/// Edge `i -> j` iff `u_i(A_j) > u_i(A_i)`.
pub fn envy_graph(instance: &Instance, allocation: &Allocation) -> EnvyGraph {
    let u = utilities_matrix(instance, allocation);
    let n = instance.num_agents();
    let mut edges = BTreeSet::new();
    for (i, row) in u.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            if i != j && *value > row[i] {
                edges.insert((Agent(i), Agent(j)));
            }
        }
    }
    EnvyGraph { num_agents: n, edges }
}

/// Edge `i -> k` iff `A_k` is a bundle `i` values most and strictly more
/// than its own.
pub fn top_trading_graph(instance: &Instance, allocation: &Allocation) -> EnvyGraph {
    let u = utilities_matrix(instance, allocation);
    let n = instance.num_agents();
    let mut edges = BTreeSet::new();
    for (i, row) in u.iter().enumerate() {
        let Some(best) = row.iter().max() else { continue };
        for (k, value) in row.iter().enumerate() {
            if k != i && value == best && *value > row[i] {
                edges.insert((Agent(i), Agent(k)));
            }
        }
    }
    EnvyGraph { num_agents: n, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Property {
    /// Envy-free.
    #[serde(rename = "ef")]
    Ef,
    /// Envy-free up to removing one item from either bundle.
    #[serde(rename = "ef1")]
    Ef1,
    /// Envy-free up to removing one item from each bundle, both from the
    /// same category.
    #[serde(rename = "ef11")]
    Ef11,
    /// As `Ef11` without the category restriction.
    #[serde(rename = "ef11u")]
    Ef11U,
}

impl Property {
    pub const ALL: [Property; 4] = [Property::Ef, Property::Ef1, Property::Ef11, Property::Ef11U];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::Ef => "ef",
            Property::Ef1 => "ef1",
            Property::Ef11 => "ef11",
            Property::Ef11U => "ef11u",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['[', ']', ',', '-', '_'], "").as_str() {
            "ef" => Ok(Property::Ef),
            "ef1" => Ok(Property::Ef1),
            "ef11" => Ok(Property::Ef11),
            "ef11u" => Ok(Property::Ef11U),
            _ => Err(format!("unknown fairness property `{s}`")),
        }
    }
}

/// How agent `envier` was satisfied (or not) with respect to `envied`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairWitness {
    pub envier: Agent,
    pub envied: Agent,
    /// `T`: item removed from the envier's own bundle.
    pub removed_own: Option<Item>,
    /// `G`: item removed from the envied agent's bundle.
    pub removed_other: Option<Item>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessVerdict {
    pub property: Property,
    pub holds: bool,
    /// One entry per ordered pair of distinct agents.
    pub witnesses: Vec<PairWitness>,
}

impl FairnessVerdict {
    pub fn violations(&self) -> impl Iterator<Item = &PairWitness> {
        self.witnesses.iter().filter(|w| !w.satisfied)
    }

    pub fn witness(&self, envier: Agent, envied: Agent) -> Option<&PairWitness> {
        self.witnesses.iter().find(|w| w.envier == envier && w.envied == envied)
    }

    /// Whether the property holds from `agent`'s point of view.
    pub fn holds_for(&self, agent: Agent) -> bool {
        self.witnesses.iter().filter(|w| w.envier == agent).all(|w| w.satisfied)
    }
}

/// Item of `bundle` with the smallest (or largest) utility for `agent`,
/// optionally restricted to one category. First in item order on ties.
fn extreme_item(
    instance: &Instance,
    agent: Agent,
    bundle: &BTreeSet<Item>,
    category: Option<usize>,
    largest: bool,
) -> Option<Item> {
    let mut best: Option<Item> = None;
    for &it in bundle {
        if category.is_some_and(|c| instance.category_of(it) != c) {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (u, ub) = (instance.utility(agent, it), instance.utility(agent, b));
                if largest {
                    u > ub
                } else {
                    u < ub
                }
            }
        };
        if better {
            best = Some(it);
        }
    }
    best
}

fn pair_witness(
    instance: &Instance,
    allocation: &Allocation,
    property: Property,
    i: Agent,
    j: Agent,
) -> PairWitness {
    let own = allocation.bundle(i);
    let other = allocation.bundle(j);
    let u_own = instance.bundle_utility(i, own);
    let u_other = instance.bundle_utility(i, other);
    let done = |t: Option<Item>, g: Option<Item>, satisfied| PairWitness {
        envier: i,
        envied: j,
        removed_own: t,
        removed_other: g,
        satisfied,
    };
    if u_own >= u_other {
        return done(None, None, true);
    }
    if property == Property::Ef {
        return done(None, None, false);
    }
    let value = |t: Option<Item>, g: Option<Item>| {
        let mut lhs = u_own.clone();
        let mut rhs = u_other.clone();
        if let Some(t) = t {
            lhs -= instance.utility(i, t);
        }
        if let Some(g) = g {
            rhs -= instance.utility(i, g);
        }
        lhs >= rhs
    };
    let worst_own = extreme_item(instance, i, own, None, false);
    let best_other = extreme_item(instance, i, other, None, true);
    // Single removals are allowed by every relaxation.
    if worst_own.is_some() && value(worst_own, None) {
        return done(worst_own, None, true);
    }
    if best_other.is_some() && value(None, best_other) {
        return done(None, best_other, true);
    }
    match property {
        Property::Ef | Property::Ef1 => done(None, None, false),
        Property::Ef11U => {
            if worst_own.is_some() && best_other.is_some() && value(worst_own, best_other) {
                done(worst_own, best_other, true)
            } else {
                done(None, None, false)
            }
        }
        Property::Ef11 => {
            for c in 0..instance.categories().len() {
                let t = extreme_item(instance, i, own, Some(c), false);
                let g = extreme_item(instance, i, other, Some(c), true);
                if t.is_some() && g.is_some() && value(t, g) {
                    return done(t, g, true);
                }
            }
            done(None, None, false)
        }
    }
}

pub fn check(instance: &Instance, allocation: &Allocation, property: Property) -> FairnessVerdict {
    let mut witnesses = Vec::new();
    for i in instance.agents() {
        for j in instance.agents() {
            if i != j {
                witnesses.push(pair_witness(instance, allocation, property, i, j));
            }
        }
    }
    let holds = witnesses.iter().all(|w| w.satisfied);
    FairnessVerdict { property, holds, witnesses }
}

pub fn holds(instance: &Instance, allocation: &Allocation, property: Property) -> bool {
    check(instance, allocation, property).holds
}

/// Re-evaluates a witness with plain bundle utilities.
pub fn witness_is_sound(instance: &Instance, allocation: &Allocation, w: &PairWitness) -> bool {
    let own: Vec<Item> = allocation
        .bundle(w.envier)
        .iter()
        .copied()
        .filter(|&x| Some(x) != w.removed_own)
        .collect();
    let other: Vec<Item> = allocation
        .bundle(w.envied)
        .iter()
        .copied()
        .filter(|&x| Some(x) != w.removed_other)
        .collect();
    let in_bundles = w.removed_own.is_none_or(|t| allocation.bundle(w.envier).contains(&t))
        && w.removed_other.is_none_or(|g| allocation.bundle(w.envied).contains(&g));
    in_bundles && instance.bundle_utility(w.envier, &own) >= instance.bundle_utility(w.envier, &other)
}

/// `to` weakly improves every agent and strictly improves at least one.
pub fn is_pareto_improvement(instance: &Instance, from: &Allocation, to: &Allocation) -> bool {
    let before = from.utility_profile(instance);
    let after = to.utility_profile(instance);
    dominates(&after, &before)
}

/// Componentwise `a >= b` with at least one strict coordinate.
pub fn dominates(a: &[Rational], b: &[Rational]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y) && a.iter().zip(b).any(|(x, y)| x > y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn names(g: &EnvyGraph, inst: &Instance) -> Vec<(String, String)> {
        g.named_edges(inst).into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn edges(list: &[(&str, &str)]) -> Vec<(String, String)> {
        list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn table5_graphs() {
        let f = fixtures::table5();
        let a = f.snapshot("diagonal").unwrap();
        let eg = envy_graph(&f.instance, a);
        assert_eq!(names(&eg, &f.instance), edges(&[("1", "2"), ("2", "3"), ("3", "1"), ("3", "4")]));
        assert!(eg.has_cycle());
        let tt = top_trading_graph(&f.instance, a);
        assert_eq!(names(&tt, &f.instance), edges(&[("1", "2"), ("2", "3"), ("3", "4")]));
        assert!(!tt.has_cycle());
    }

    #[test]
    fn no_edges_for_identical_valuations_of_bundles() {
        let inst = Instance::builder(["1", "2"])
            .category("C", 1, &["a", "b"])
            .utilities("1", &[3, 3])
            .utilities("2", &[-1, -1])
            .build()
            .unwrap();
        let a = Allocation::from_names(&inst, &[&["a"], &["b"]]).unwrap();
        assert!(envy_graph(&inst, &a).edges.is_empty());
        assert!(top_trading_graph(&inst, &a).edges.is_empty());
    }

    #[test]
    fn mutual_preference_is_a_two_cycle() {
        let inst = Instance::builder(["1", "2"])
            .category("C", 1, &["a", "b"])
            .utilities("1", &[0, 1])
            .utilities("2", &[1, 0])
            .build()
            .unwrap();
        let a = Allocation::from_names(&inst, &[&["a"], &["b"]]).unwrap();
        let tt = top_trading_graph(&inst, &a);
        assert_eq!(tt.edges.len(), 2);
        assert!(tt.has_cycle());
    }

    #[test]
    fn table2_initial_envy() {
        let f = fixtures::table2();
        let g = envy_graph(&f.instance, f.snapshot("initial").unwrap());
        assert_eq!(names(&g, &f.instance), edges(&[("2", "1")]));
        assert_eq!(g.sinks(), vec![Agent(0)]);
    }

    #[test]
    fn intro_split() {
        let f = fixtures::intro();
        let a = f.snapshot("split").unwrap();
        assert!(!holds(&f.instance, a, Property::Ef1));
        let v = check(&f.instance, a, Property::Ef11);
        assert!(v.holds);
        let w = v.witness(Agent(1), Agent(0)).unwrap();
        assert_eq!(w.removed_own, f.instance.item_by_name("o2"));
        assert_eq!(w.removed_other, f.instance.item_by_name("o1"));
        assert!(holds(&f.instance, a, Property::Ef11U));
    }

    #[test]
    fn table6_ef1_and_improvement() {
        let f = fixtures::table6();
        let inst = &f.instance;
        let a = f.snapshot("A").unwrap();
        let after = f.snapshot("after_swap").unwrap();
        let v = check(inst, a, Property::Ef1);
        assert!(v.holds);
        assert_eq!(v.witness(Agent(0), Agent(1)).unwrap().removed_own, inst.item_by_name("o1"));
        assert_eq!(v.witness(Agent(1), Agent(0)).unwrap().removed_own, inst.item_by_name("o3"));
        assert!(is_pareto_improvement(inst, a, after));
        let v = check(inst, after, Property::Ef1);
        assert!(!v.holds);
        assert!(!v.holds_for(Agent(0)));
        assert!(v.holds_for(Agent(1)));
        assert!(!is_pareto_improvement(inst, a, a));
    }

    #[test]
    fn table2_final_is_not_an_improvement_of_initial() {
        let f = fixtures::table2();
        assert!(!is_pareto_improvement(
            &f.instance,
            f.snapshot("initial").unwrap(),
            f.snapshot("after_o5_o6").unwrap()
        ));
    }

    #[test]
    fn category_restriction_matters() {
        // Good in one category, chore in another: EF[1,1,U] but not EF[1,1].
        let inst = Instance::builder(["1", "2"])
            .category("G", 1, &["g", "g0"])
            .category("H", 1, &["h", "h0"])
            .utilities("1", &[1, 0, -1, 0])
            .utilities("2", &[1, 0, -1, 0])
            .build()
            .unwrap();
        let a = Allocation::from_names(&inst, &[&["g", "h0"], &["g0", "h"]]).unwrap();
        let b = Allocation::from_names(&inst, &[&["g0", "h"], &["g", "h0"]]).unwrap();
        let ok = holds(&inst, &b, Property::Ef11U) && !holds(&inst, &b, Property::Ef11);
        // Agent 1 holds the chore, agent 2 the good.
        assert!(ok);
        assert!(!holds(&inst, &b, Property::Ef1));
        assert!(holds(&inst, &a, Property::Ef11U));
    }

    #[test]
    fn property_names() {
        assert_eq!("EF[1,1]".parse::<Property>().unwrap(), Property::Ef11);
        assert_eq!("ef11u".parse::<Property>().unwrap(), Property::Ef11U);
        assert!("efx".parse::<Property>().is_err());
    }
}
