//! Exhaustive ground truth for small instances: enumeration of every
//! feasible allocation, Pareto-optimality, fairness witness search, brute
//! force weighted-sum maxima, and decomposition of the difference between two
//! allocations into exchange cycles.

use crate::fairness::{self, Property};
use crate::instance::{Agent, Allocation, Instance, InstanceError, Item};
use crate::matching::{self, WeightVector};
use crate::rational::Rational;
use serde::Serialize;
use thiserror::Error;

pub const DEFAULT_BUDGET: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {count} feasible allocations, above the enumeration budget of {budget}")]
    BudgetExceeded { count: String, budget: u128 },
    #[error("allocations are over different item sets")]
    ItemSetMismatch,
    #[error("allocation is not feasible on the padded instance")]
    Infeasible,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Requested property in a witness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Requirement {
    Fair(Property),
    ParetoOptimal,
}

impl std::str::FromStr for Requirement {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("po") {
            Ok(Requirement::ParetoOptimal)
        } else {
            s.parse::<Property>().map(Requirement::Fair)
        }
    }
}

/// Number of feasible allocations of a padded instance:
/// `prod_c (n s_c)! / (s_c!)^n`. `None` on overflow.
pub fn feasible_count(padded: &Instance) -> Option<u128> {
    let n = padded.num_agents() as u128;
    let mut total: u128 = 1;
    for c in padded.categories() {
        let s = c.capacity as u128;
        // Multinomial as a product of binomials C(k s, s), k = n..1.
        for k in (1..=n).rev() {
            total = total.checked_mul(binomial(k * s, s)?)?;
        }
    }
    Some(total)
}

fn binomial(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Per-category assignments: each entry gives the owning agent of every item
/// of the category, in category item order.
fn category_assignments(n: usize, size: usize, capacity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; size];
    assign_agent(0, n, capacity, &mut owner, &mut out);
    out
}

fn assign_agent(agent: usize, n: usize, capacity: usize, owner: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if agent + 1 == n {
        let mut full = owner.clone();
        for o in full.iter_mut().filter(|o| **o == usize::MAX) {
            *o = agent;
        }
        out.push(full);
        return;
    }
    let free: Vec<usize> = (0..owner.len()).filter(|&i| owner[i] == usize::MAX).collect();
    for subset in colex_subsets(free.len(), capacity) {
        for &k in &subset {
            owner[free[k]] = agent;
        }
        assign_agent(agent + 1, n, capacity, owner, out);
        for &k in &subset {
            owner[free[k]] = usize::MAX;
        }
    }
}

/// All `k`-subsets of `0..n` in colexicographic order.
fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let movable = (0..k).find(|&j| c[j] + 1 < if j + 1 < k { c[j + 1] } else { n });
        let Some(j) = movable else { return out };
        c[j] += 1;
        for (t, v) in c.iter_mut().enumerate().take(j) {
            *v = t;
        }
    }
}

/// Streams every feasible allocation of a padded instance exactly once, in
/// category-major order with the first category varying slowest.
pub struct FeasibleAllocations<'a> {
    instance: &'a Instance,
    per_category: Vec<Vec<Vec<usize>>>,
    odometer: Vec<usize>,
    done: bool,
}

impl Iterator for FeasibleAllocations<'_> {
    type Item = Allocation;

    fn next(&mut self) -> Option<Allocation> {
        if self.done {
            return None;
        }
        let mut alloc = Allocation::empty(self.instance.num_agents());
        for (ci, c) in self.instance.categories().iter().enumerate() {
            let owners = &self.per_category[ci][self.odometer[ci]];
            for (k, &item) in c.items.iter().enumerate() {
                alloc.insert(Agent(owners[k]), item);
            }
        }
        // Increment, last category fastest.
        let mut pos = self.odometer.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.odometer[pos] += 1;
            if self.odometer[pos] < self.per_category[pos].len() {
                break;
            }
            self.odometer[pos] = 0;
        }
        Some(alloc)
    }
}

pub fn enumerate_feasible(padded: &Instance, budget: u128) -> Result<FeasibleAllocations<'_>, OracleError> {
    let count = feasible_count(padded);
    match count {
        Some(c) if c <= budget => {}
        other => {
            return Err(OracleError::BudgetExceeded {
                count: other.map_or_else(|| "more than 2^128".to_string(), |c| c.to_string()),
                budget,
            })
        }
    }
    let n = padded.num_agents();
    let per_category: Vec<Vec<Vec<usize>>> = padded
        .categories()
        .iter()
        .map(|c| category_assignments(n, c.items.len(), c.capacity))
        .collect();
    let done = per_category.iter().any(|v| v.is_empty());
    Ok(FeasibleAllocations { instance: padded, odometer: vec![0; per_category.len()], per_category, done })
}

/// Utility profiles of every feasible allocation, for repeated Pareto
/// queries on one instance.
pub struct ParetoIndex {
    profiles: Vec<Vec<Rational>>,
}

impl ParetoIndex {
    pub fn build(instance: &Instance, budget: u128) -> Result<Self, OracleError> {
        let padded = instance.padded()?;
        let mut profiles: Vec<Vec<Rational>> = enumerate_feasible(&padded, budget)?
            .map(|a| a.utility_profile(&padded))
            .collect();
        profiles.sort();
        profiles.dedup();
        Ok(ParetoIndex { profiles })
    }

    pub fn len(&self) -> usize {
        self.profiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profiles.is_empty()
    }

    pub fn is_dominated(&self, profile: &[Rational]) -> bool {
        self.profiles.iter().any(|p| fairness::dominates(p, profile))
    }
}

/// A feasible allocation that Pareto-improves on `allocation`, if any.
pub fn pareto_improvement(
    instance: &Instance,
    allocation: &Allocation,
    budget: u128,
) -> Result<Option<Allocation>, OracleError> {
    let padded = instance.padded()?;
    let profile = allocation.utility_profile(instance);
    Ok(enumerate_feasible(&padded, budget)?
        .find(|a| fairness::dominates(&a.utility_profile(&padded), &profile))
        .map(|a| a.strip_dummies(&padded)))
}

pub fn is_pareto_optimal(instance: &Instance, allocation: &Allocation, budget: u128) -> Result<bool, OracleError> {
    Ok(pareto_improvement(instance, allocation, budget)?.is_none())
}

/// Outcome of a witness search.
#[derive(Debug, Clone)]
pub struct Search {
    /// First allocation (dummies stripped) meeting every requirement.
    pub found: Option<Allocation>,
    pub enumerated: u128,
}

pub fn find_allocation(instance: &Instance, requirements: &[Requirement], budget: u128) -> Result<Search, OracleError> {
    let padded = instance.padded()?;
    let pareto = if requirements.contains(&Requirement::ParetoOptimal) {
        Some(ParetoIndex::build(instance, budget)?)
    } else {
        None
    };
    let mut enumerated = 0u128;
    for a in enumerate_feasible(&padded, budget)? {
        enumerated += 1;
        let stripped = a.strip_dummies(&padded);
        let ok = requirements.iter().all(|r| match r {
            Requirement::Fair(p) => fairness::holds(instance, &stripped, *p),
            Requirement::ParetoOptimal => !pareto
                .as_ref()
                .expect("index built")
                .is_dominated(&stripped.utility_profile(instance)),
        });
        if ok {
            return Ok(Search { found: Some(stripped), enumerated });
        }
    }
    Ok(Search { found: None, enumerated })
}

/// Exact maximum of `sum_i w_i u_i(A_i)` and all allocations (on the padded
/// instance) attaining it.
pub fn brute_force_w_maximal(
    instance: &Instance,
    w: &WeightVector,
    budget: u128,
) -> Result<(Rational, Vec<Allocation>), OracleError> {
    let padded = instance.padded()?;
    let mut best: Option<Rational> = None;
    let mut argmax = Vec::new();
    for a in enumerate_feasible(&padded, budget)? {
        let value = matching::weighted_sum(&padded, &a, w);
        match &best {
            Some(b) if value < *b => {}
            Some(b) if value == *b => argmax.push(a),
            _ => {
                best = Some(value);
                argmax = vec![a];
            }
        }
    }
    Ok((best.unwrap_or_default(), argmax))
}

/// Items `items[k]` held by `agents[k]`, all in one category. Applying the
/// cycle moves item `k` to agent `k + 1` (cyclically).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeCycle {
    pub agents: Vec<Agent>,
    pub items: Vec<Item>,
}

impl ExchangeCycle {
    pub fn apply(&self, allocation: &mut Allocation) {
        let x = self.agents.len();
        for k in 0..x {
            allocation.remove(self.agents[k], self.items[k]);
        }
        for k in 0..x {
            allocation.insert(self.agents[(k + 1) % x], self.items[k]);
        }
    }
}

/// Splits the move from `from` to `to` into item-disjoint exchange cycles,
/// each within one category. Both allocations must be feasible on the
/// padded instance and assign the same items.
pub fn exchange_cycle_decomposition(
    instance: &Instance,
    from: &Allocation,
    to: &Allocation,
) -> Result<Vec<ExchangeCycle>, OracleError> {
    let m = instance.num_items();
    let cur_owner = from.owners(m);
    let target = to.owners(m);
    if cur_owner.iter().zip(&target).any(|(a, b)| a.is_some() != b.is_some()) {
        return Err(OracleError::ItemSetMismatch);
    }
    if !from.is_feasible(instance) || !to.is_feasible(instance) || !instance.is_padded() {
        return Err(OracleError::Infeasible);
    }
    let mut owner = cur_owner;
    let misplaced = |owner: &[Option<Agent>], i: usize| owner[i].is_some() && owner[i] != target[i];
    let mut cycles = Vec::new();
    while let Some(start) = (0..m).find(|&i| misplaced(&owner, i)) {
        let category = instance.category_of(Item(start));
        let mut agents = vec![owner[start].expect("owned")];
        let mut items = vec![Item(start)];
        loop {
            let receiver = target[items.last().expect("non-empty").0].expect("owned");
            if let Some(pos) = agents.iter().position(|&a| a == receiver) {
                // Close the cycle at the first repeated agent.
                let cycle = ExchangeCycle { agents: agents[pos..].to_vec(), items: items[pos..].to_vec() };
                for (k, it) in cycle.items.iter().enumerate() {
                    owner[it.0] = Some(cycle.agents[(k + 1) % cycle.agents.len()]);
                }
                cycles.push(cycle);
                break;
            }
            // The receiver gains an item of this category, so it holds one
            // that belongs elsewhere.
            let next = instance.categories()[category]
                .items
                .iter()
                .copied()
                .find(|it| owner[it.0] == Some(receiver) && target[it.0] != Some(receiver))
                .ok_or(OracleError::Infeasible)?;
            agents.push(receiver);
            items.push(next);
        }
    }
    Ok(cycles)
}
