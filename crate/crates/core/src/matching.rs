//! Weighted assignment graph and exact maximum-weight perfect matching.
//!
//! An allocation is `w`-maximal when it maximizes `sum_i w_i * u_i(A_i)` over
//! all feasible allocations. On a padded instance those are exactly the
//! perfect matchings of the assignment graph, where every agent owns `s_c`
//! slots for category `c` and a slot of agent `i` is joined to every item of
//! its category with weight `w_i * u_i(o)`.

use crate::instance::{Agent, Allocation, Instance, InstanceError, Item};
use crate::rational::{self, Rational};
use crate::solver::DifferenceRatio;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("weights must lie strictly between 0 and 1 and sum to 1")]
    InvalidWeights,
    #[error("expected {expected} weights, got {got}")]
    WeightCount { got: usize, expected: usize },
    #[error("instance is not padded: every category needs exactly n * capacity items")]
    NotPadded,
    #[error("assignment graph has no perfect matching")]
    NoPerfectMatching,
    #[error("allocation is not feasible on the padded instance")]
    InfeasibleAllocation,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Positive agent weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self, MatchingError> {
        let sum: Rational = weights.iter().cloned().sum();
        let in_range = weights.iter().all(|w| w.is_positive() && *w < Rational::one());
        if weights.is_empty() || !in_range || !sum.is_one() {
            return Err(MatchingError::InvalidWeights);
        }
        Ok(WeightVector(weights))
    }

    /// `(1/n, ..., 1/n)`.
    pub fn uniform(n: usize) -> Self {
        WeightVector(vec![rational::ratio(1, n as i64); n])
    }

    /// Two-agent weights `(w1, 1 - w1)`.
    pub fn pair(w1: Rational) -> Result<Self, MatchingError> {
        let w2 = Rational::one() - &w1;
        WeightVector::new(vec![w1, w2])
    }

    /// Two-agent weights with `w1 / w2 = ratio`, i.e. `(r/(1+r), 1/(1+r))`.
    pub fn from_ratio(ratio: &Rational) -> Result<Self, MatchingError> {
        if !ratio.is_positive() {
            return Err(MatchingError::InvalidWeights);
        }
        let denom = Rational::one() + ratio;
        WeightVector::new(vec![ratio / &denom, Rational::one() / denom])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, agent: Agent) -> &Rational {
        &self.0[agent.0]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn permuted(&self, order: &[Agent]) -> WeightVector {
        WeightVector(order.iter().map(|a| self.0[a.0].clone()).collect())
    }

    fn check_len(&self, n: usize) -> Result<(), MatchingError> {
        if self.0.len() == n {
            Ok(())
        } else {
            Err(MatchingError::WeightCount { got: self.0.len(), expected: n })
        }
    }
}

/// An agent copy reserved for one category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub agent: Agent,
    pub category: usize,
}

/// Bipartite graph with `m` agent slots on the left and `m` items on the
/// right. `weights[slot][item]` is `None` when there is no edge.
#[derive(Debug, Clone)]
pub struct AssignmentGraph {
    pub slots: Vec<Slot>,
    pub items: Vec<Item>,
    pub weights: Vec<Vec<Option<Rational>>>,
}

impl AssignmentGraph {
    pub fn edge_count(&self) -> usize {
        self.weights.iter().map(|row| row.iter().filter(|w| w.is_some()).count()).sum()
    }
}

/// A perfect matching as `item_of_slot[slot] = right-vertex index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub item_of_slot: Vec<usize>,
    pub weight: Rational,
}

pub fn build_assignment_graph(instance: &Instance, w: &WeightVector) -> Result<AssignmentGraph, MatchingError> {
    w.check_len(instance.num_agents())?;
    if !instance.is_padded() {
        return Err(MatchingError::NotPadded);
    }
    let mut slots = Vec::new();
    let mut items = Vec::new();
    for (ci, c) in instance.categories().iter().enumerate() {
        items.extend(c.items.iter().copied());
        for a in instance.agents() {
            slots.extend(std::iter::repeat_n(Slot { agent: a, category: ci }, c.capacity));
        }
    }
    let weights = slots
        .iter()
        .map(|slot| {
            items
                .iter()
                .map(|&item| {
                    (instance.category_of(item) == slot.category)
                        .then(|| w.get(slot.agent) * instance.utility(slot.agent, item))
                })
                .collect()
        })
        .collect();
    Ok(AssignmentGraph { slots, items, weights })
}

/// Maximum-weight perfect matching by the Hungarian method with exact
/// potentials, `O(V^3)`. Missing edges are never used; ties are resolved by
/// the fixed slot and item order.
pub fn max_weight_perfect_matching(graph: &AssignmentGraph) -> Result<Matching, MatchingError> {
    let n = graph.slots.len();
    if graph.items.len() != n {
        return Err(MatchingError::NoPerfectMatching);
    }
    // Minimize cost = -weight. 1-based rows/columns; column 0 is a sentinel.
    let cost = |i: usize, j: usize| graph.weights[i - 1][j - 1].as_ref().map(|w| -w);
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta: Option<Rational> = None;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                if let Some(c) = cost(i0, j) {
                    let cur = c - &u[i0] - &v[j];
                    if minv[j].as_ref().is_none_or(|m| cur < *m) {
                        minv[j] = Some(cur);
                        way[j] = j0;
                    }
                }
                if let Some(m) = &minv[j] {
                    if delta.as_ref().is_none_or(|d| m < d) {
                        delta = Some(m.clone());
                        j1 = j;
                    }
                }
            }
            let Some(delta) = delta else {
                return Err(MatchingError::NoPerfectMatching);
            };
            for j in 0..=n {
                if used[j] {
                    u[row_of_col[j]] += &delta;
                    v[j] -= &delta;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= &delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut item_of_slot = vec![0usize; n];
    let mut weight = Rational::zero();
    for (j, &i) in row_of_col.iter().enumerate().skip(1) {
        item_of_slot[i - 1] = j - 1;
        weight += graph.weights[i - 1][j - 1].as_ref().ok_or(MatchingError::NoPerfectMatching)?;
    }
    Ok(Matching { item_of_slot, weight })
}

pub fn matching_to_allocation(graph: &AssignmentGraph, matching: &Matching, num_agents: usize) -> Allocation {
    let mut alloc = Allocation::empty(num_agents);
    for (slot, &j) in graph.slots.iter().zip(&matching.item_of_slot) {
        alloc.insert(slot.agent, graph.items[j]);
    }
    alloc
}

/// A feasible allocation of `instance` (padded internally) maximizing
/// `sum_i w_i u_i(A_i)`. The result refers to the padded instance's items,
/// i.e. it includes dummies; use [`Allocation::strip_dummies`] for output.
pub fn w_maximal_allocation(instance: &Instance, w: &WeightVector) -> Result<(Instance, Allocation), MatchingError> {
    let padded = instance.padded()?;
    let graph = build_assignment_graph(&padded, w)?;
    let matching = max_weight_perfect_matching(&graph)?;
    let alloc = matching_to_allocation(&graph, &matching, padded.num_agents());
    Ok((padded, alloc))
}

pub fn weighted_sum(instance: &Instance, allocation: &Allocation, w: &WeightVector) -> Rational {
    instance
        .agents()
        .map(|a| w.get(a) * instance.bundle_utility(a, allocation.bundle(a)))
        .sum()
}

/// Lifts an allocation onto the padded instance, filling dummy slots.
fn lift(instance: &Instance, allocation: &Allocation) -> Result<(Instance, Allocation), MatchingError> {
    let padded = instance.padded()?;
    let lifted = allocation.fill_dummies(&padded);
    if !lifted.is_feasible(&padded) {
        return Err(MatchingError::InfeasibleAllocation);
    }
    Ok((padded, lifted))
}

/// Decides `w`-maximality through local exchange conditions: for two agents
/// the three-case condition on every exchangeable pair, for more agents the
/// absence of any improving exchange cycle.
pub fn is_w_maximal(instance: &Instance, allocation: &Allocation, w: &WeightVector) -> Result<bool, MatchingError> {
    w.check_len(instance.num_agents())?;
    let (padded, lifted) = lift(instance, allocation)?;
    if padded.num_agents() == 2 {
        Ok(two_agent_pairs_ok(&padded, &lifted, w))
    } else {
        Ok(improving_cycle(&padded, &lifted, w).is_none())
    }
}

/// The two-agent exchange condition for a single pair `o1 in A_1`,
/// `o2 in A_2` at weight ratio `w1/w2`: exactly one of
/// `u1(o1) > u1(o2) and w1/w2 >= r`, `u1(o1) = u1(o2) and u2(o2) >= u2(o1)`,
/// `u1(o1) < u1(o2) and w1/w2 <= r` holds.
pub fn pair_condition(instance: &Instance, o1: Item, o2: Item, weight_ratio: &Rational) -> bool {
    let (a1, a2) = (Agent(0), Agent(1));
    let r = DifferenceRatio::compute(instance, a2, a1, o1, o2);
    let ratio = DifferenceRatio::Finite(weight_ratio.clone());
    match instance.utility(a1, o1).cmp(instance.utility(a1, o2)) {
        Ordering::Greater => ratio >= r,
        Ordering::Equal => instance.utility(a2, o2) >= instance.utility(a2, o1),
        Ordering::Less => ratio <= r,
    }
}

fn two_agent_pairs_ok(padded: &Instance, alloc: &Allocation, w: &WeightVector) -> bool {
    let weight_ratio = w.get(Agent(0)) / w.get(Agent(1));
    (0..padded.categories().len()).all(|ci| {
        alloc.items_in_category(padded, Agent(0), ci).all(|o1| {
            alloc
                .items_in_category(padded, Agent(1), ci)
                .all(|o2| pair_condition(padded, o1, o2, &weight_ratio))
        })
    })
}

/// Searches for an exchange cycle over distinct agents (length `2..=n`)
/// within one category that strictly increases the weighted sum.
/// Returns `(agents, items)` with item `k` held by `agents[k]`.
pub fn improving_cycle(
    instance: &Instance,
    allocation: &Allocation,
    w: &WeightVector,
) -> Option<(Vec<Agent>, Vec<Item>)> {
    let n = instance.num_agents();
    for ci in 0..instance.categories().len() {
        let held: Vec<Vec<Item>> = instance
            .agents()
            .map(|a| allocation.items_in_category(instance, a, ci).collect())
            .collect();
        // Cycles are enumerated with their smallest agent first.
        for start in 0..n {
            let mut agents = vec![Agent(start)];
            let mut items = Vec::new();
            if let Some(found) = extend_cycle(instance, w, &held, &mut agents, &mut items) {
                return Some(found);
            }
        }
    }
    None
}

fn extend_cycle(
    instance: &Instance,
    w: &WeightVector,
    held: &[Vec<Item>],
    agents: &mut Vec<Agent>,
    items: &mut Vec<Item>,
) -> Option<(Vec<Agent>, Vec<Item>)> {
    let last = *agents.last().expect("non-empty path");
    for &item in &held[last.0] {
        items.push(item);
        if agents.len() >= 2 && cycle_gain(instance, w, agents, items).is_positive() {
            return Some((agents.clone(), items.clone()));
        }
        for next in (agents[0].0 + 1)..instance.num_agents() {
            if agents.contains(&Agent(next)) {
                continue;
            }
            agents.push(Agent(next));
            if let Some(found) = extend_cycle(instance, w, held, agents, items) {
                return Some(found);
            }
            agents.pop();
        }
        items.pop();
    }
    None
}

/// Weighted-sum change when item `k` moves from `agents[k]` to
/// `agents[k+1]` (cyclically).
pub fn cycle_gain(instance: &Instance, w: &WeightVector, agents: &[Agent], items: &[Item]) -> Rational {
    let x = agents.len();
    let mut gain = Rational::zero();
    for k in 0..x {
        let giver = agents[k];
        let receiver = agents[(k + 1) % x];
        gain += w.get(receiver) * instance.utility(receiver, items[k]);
        gain -= w.get(giver) * instance.utility(giver, items[k]);
    }
    gain
}
