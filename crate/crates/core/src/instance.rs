//! Problem instances, allocations, and the padding step that makes every
//! feasible allocation give each agent exactly `s_c` items of category `c`.

use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

/// Index of an agent in [`Instance::agents`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Agent(pub usize);

/// Global index of an item. Padding appends items, so indices of the
/// original items are stable across [`Instance::padded`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Item(pub usize);

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "agent#{}", self.0)
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "item#{}", self.0)
    }
}

/// Reserved item-name prefix for padding items.
pub const DUMMY_PREFIX: &str = "__dummy_";

pub fn dummy_name(category: &str, k: usize) -> String {
    format!("{DUMMY_PREFIX}{category}_{k}")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub id: String,
    pub capacity: usize,
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct ItemInfo {
    name: String,
    category: usize,
    dummy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("instance has no agents")]
    NoAgents,
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("duplicate category id `{0}`")]
    DuplicateCategory(String),
    #[error("item `{0}` appears more than once")]
    DuplicateItem(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("unknown item `{0}`")]
    UnknownItem(String),
    #[error("agent `{agent}` has {got} utilities, expected {expected}")]
    UtilityCount { agent: String, got: usize, expected: usize },
    #[error("utility for agent `{agent}` and item `{item}` is missing")]
    MissingUtility { agent: String, item: String },
    #[error("allocation lists {got} bundles for {expected} agents")]
    BundleCount { got: usize, expected: usize },
    #[error("instance is invalid: {0}")]
    Invalid(String),
}

/// A single broken instance invariant. Validation collects these instead of
/// failing on the first one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoAgents,
    EmptyCategory { category: String },
    CapacityBelowShare { category: String, capacity: usize, minimum: usize },
    CapacityAboveSize { category: String, capacity: usize, size: usize },
    DummyWithValue { item: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoAgents => write!(f, "no agents"),
            Violation::EmptyCategory { category } => write!(f, "category `{category}` has no items"),
            Violation::CapacityBelowShare { category, capacity, minimum } => write!(
                f,
                "capacity below ceil(|C|/n): category `{category}` has capacity {capacity}, needs at least {minimum}"
            ),
            Violation::CapacityAboveSize { category, capacity, size } => write!(
                f,
                "capacity above |C|: category `{category}` has capacity {capacity} but only {size} items"
            ),
            Violation::DummyWithValue { item } => {
                write!(f, "padding item `{item}` has a non-zero utility")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Agents, categorized items with capacities, and an exact utility matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    agents: Vec<String>,
    categories: Vec<Category>,
    items: Vec<ItemInfo>,
    /// `utilities[agent][item]`
    utilities: Vec<Vec<Rational>>,
}

impl Instance {
    /// Builds an instance from category specs `(id, capacity, item names)`
    /// and one utility row per agent, given in category-concatenation item
    /// order.
    pub fn new(
        agents: Vec<String>,
        categories: Vec<(String, usize, Vec<String>)>,
        utilities: Vec<Vec<Rational>>,
    ) -> Result<Self, InstanceError> {
        let mut seen_agents = BTreeSet::new();
        for a in &agents {
            if !seen_agents.insert(a.as_str()) {
                return Err(InstanceError::DuplicateAgent(a.clone()));
            }
        }
        let mut seen_categories = BTreeSet::new();
        let mut seen_items = BTreeSet::new();
        let mut items = Vec::new();
        let mut cats = Vec::with_capacity(categories.len());
        for (ci, (id, capacity, names)) in categories.into_iter().enumerate() {
            if !seen_categories.insert(id.clone()) {
                return Err(InstanceError::DuplicateCategory(id));
            }
            let mut members = Vec::with_capacity(names.len());
            for name in names {
                if !seen_items.insert(name.clone()) {
                    return Err(InstanceError::DuplicateItem(name));
                }
                members.push(Item(items.len()));
                let dummy = name.starts_with(DUMMY_PREFIX);
                items.push(ItemInfo { name, category: ci, dummy });
            }
            cats.push(Category { id, capacity, items: members });
        }
        if utilities.len() != agents.len() {
            return Err(InstanceError::Invalid(format!(
                "{} utility rows for {} agents",
                utilities.len(),
                agents.len()
            )));
        }
        for (a, row) in agents.iter().zip(&utilities) {
            if row.len() != items.len() {
                return Err(InstanceError::UtilityCount {
                    agent: a.clone(),
                    got: row.len(),
                    expected: items.len(),
                });
            }
        }
        Ok(Instance { agents, categories: cats, items, utilities })
    }

    pub fn builder<I, S>(agents: I) -> InstanceBuilder
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        InstanceBuilder {
            agents: agents.into_iter().map(Into::into).collect(),
            categories: Vec::new(),
            rows: HashMap::new(),
        }
    }

    pub fn num_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn agents(&self) -> impl Iterator<Item = Agent> {
        (0..self.agents.len()).map(Agent)
    }

    pub fn items(&self) -> impl Iterator<Item = Item> {
        (0..self.items.len()).map(Item)
    }

    pub fn agent_name(&self, agent: Agent) -> &str {
        &self.agents[agent.0]
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_by_name(&self, name: &str) -> Option<Agent> {
        self.agents.iter().position(|a| a == name).map(Agent)
    }

    pub fn item_name(&self, item: Item) -> &str {
        &self.items[item.0].name
    }

    pub fn item_by_name(&self, name: &str) -> Option<Item> {
        self.items.iter().position(|i| i.name == name).map(Item)
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    /// Index into [`Instance::categories`] of the item's category.
    pub fn category_of(&self, item: Item) -> usize {
        self.items[item.0].category
    }

    pub fn is_dummy(&self, item: Item) -> bool {
        self.items[item.0].dummy
    }

    pub fn utility(&self, agent: Agent, item: Item) -> &Rational {
        &self.utilities[agent.0][item.0]
    }

    /// Additive utility `u_i(X)`.
    pub fn bundle_utility<'a, I>(&self, agent: Agent, bundle: I) -> Rational
    where
        I: IntoIterator<Item = &'a Item>,
    {
        let row = &self.utilities[agent.0];
        bundle.into_iter().fold(Rational::zero(), |acc, it| acc + &row[it.0])
    }

    /// Like [`Instance::bundle_utility`] but for item names.
    pub fn bundle_utility_by_name(&self, agent: Agent, names: &[&str]) -> Result<Rational, InstanceError> {
        let mut total = Rational::zero();
        for n in names {
            let item = self.item_by_name(n).ok_or_else(|| InstanceError::UnknownItem(n.to_string()))?;
            total += self.utility(agent, item);
        }
        Ok(total)
    }

    /// Smallest capacity compatible with dividing all of `size` items among
    /// the agents.
    pub fn min_capacity(&self, size: usize) -> usize {
        let n = self.num_agents().max(1);
        size.div_ceil(n)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.agents.is_empty() {
            violations.push(Violation::NoAgents);
        }
        for c in &self.categories {
            let size = c.items.len();
            if size == 0 {
                violations.push(Violation::EmptyCategory { category: c.id.clone() });
            }
            let minimum = self.min_capacity(size).max(1);
            if c.capacity < minimum {
                violations.push(Violation::CapacityBelowShare {
                    category: c.id.clone(),
                    capacity: c.capacity,
                    minimum,
                });
            }
            if c.capacity > size {
                violations.push(Violation::CapacityAboveSize {
                    category: c.id.clone(),
                    capacity: c.capacity,
                    size,
                });
            }
        }
        for item in self.items() {
            if self.is_dummy(item) && self.agents().any(|a| !self.utility(a, item).is_zero()) {
                violations.push(Violation::DummyWithValue { item: self.item_name(item).to_string() });
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<(), InstanceError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(InstanceError::Invalid(report.to_string()))
        }
    }

    /// True iff every category has exactly `n * s_c` items.
    pub fn is_padded(&self) -> bool {
        let n = self.num_agents();
        self.categories.iter().all(|c| c.items.len() == n * c.capacity)
    }

    /// Adds `n * s_c - |C_c|` zero-utility dummy items to every category.
    /// Dummies are appended after all existing items. Idempotent.
    pub fn padded(&self) -> Result<Instance, InstanceError> {
        self.ensure_valid()?;
        let n = self.num_agents();
        let mut out = self.clone();
        for ci in 0..out.categories.len() {
            let target = n * out.categories[ci].capacity;
            let mut k = out.categories[ci]
                .items
                .iter()
                .filter(|i| out.items[i.0].dummy)
                .count();
            while out.categories[ci].items.len() < target {
                let mut name = dummy_name(&out.categories[ci].id, k);
                while out.items.iter().any(|i| i.name == name) {
                    k += 1;
                    name = dummy_name(&out.categories[ci].id, k);
                }
                let item = Item(out.items.len());
                out.items.push(ItemInfo { name, category: ci, dummy: true });
                out.categories[ci].items.push(item);
                for row in &mut out.utilities {
                    row.push(Rational::zero());
                }
                k += 1;
            }
        }
        Ok(out)
    }

    /// For every agent and category, `u_i` is either all `>= 0` or all `<= 0`.
    pub fn is_same_sign(&self) -> bool {
        self.agents().all(|a| {
            self.categories.iter().all(|c| {
                let nonneg = c.items.iter().all(|&i| !self.utility(a, i).is_negative());
                let nonpos = c.items.iter().all(|&i| !self.utility(a, i).is_positive());
                nonneg || nonpos
            })
        })
    }

    /// Same instance with the agent order permuted: agent `k` of the result
    /// is agent `order[k]` of `self`.
    pub fn with_agent_order(&self, order: &[Agent]) -> Instance {
        let mut out = self.clone();
        out.agents = order.iter().map(|a| self.agents[a.0].clone()).collect();
        out.utilities = order.iter().map(|a| self.utilities[a.0].clone()).collect();
        out
    }
}

/// Convenience builder used by fixtures, tests and generators.
#[derive(Debug, Clone)]
pub struct InstanceBuilder {
    agents: Vec<String>,
    categories: Vec<(String, usize, Vec<String>)>,
    rows: HashMap<String, Vec<Rational>>,
}

impl InstanceBuilder {
    pub fn category<S: AsRef<str>>(mut self, id: &str, capacity: usize, items: &[S]) -> Self {
        self.categories.push((
            id.to_string(),
            capacity,
            items.iter().map(|s| s.as_ref().to_string()).collect(),
        ));
        self
    }

    /// Integer utilities for `agent`, in item declaration order.
    pub fn utilities(self, agent: &str, values: &[i64]) -> Self {
        self.rational_utilities(agent, values.iter().map(|&v| rational::int(v)).collect())
    }

    pub fn rational_utilities(mut self, agent: &str, values: Vec<Rational>) -> Self {
        self.rows.insert(agent.to_string(), values);
        self
    }

    pub fn build(mut self) -> Result<Instance, InstanceError> {
        let total: usize = self.categories.iter().map(|c| c.2.len()).sum();
        let mut utilities = Vec::with_capacity(self.agents.len());
        for a in &self.agents {
            let row = self
                .rows
                .remove(a)
                .unwrap_or_else(|| vec![Rational::zero(); total]);
            utilities.push(row);
        }
        if let Some(extra) = self.rows.keys().next() {
            return Err(InstanceError::UnknownAgent(extra.clone()));
        }
        if self.agents.is_empty() {
            return Err(InstanceError::NoAgents);
        }
        Instance::new(self.agents, self.categories, utilities)
    }
}

/// A (possibly partial) assignment of items to agents.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<BTreeSet<Item>>,
}

/// A broken allocation invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AllocationViolation {
    WrongAgentCount { got: usize, expected: usize },
    UnknownItem(Item),
    Duplicated(Item),
    Unallocated(Item),
    CapacityExceeded { agent: Agent, category: usize, count: usize, capacity: usize },
}

impl AllocationViolation {
    /// Human-readable form using the instance's names.
    pub fn describe(&self, instance: &Instance) -> String {
        let item = |i: &Item| {
            if i.0 < instance.num_items() {
                instance.item_name(*i).to_string()
            } else {
                format!("#{}", i.0)
            }
        };
        match self {
            AllocationViolation::WrongAgentCount { got, expected } => {
                format!("{got} bundles for {expected} agents")
            }
            AllocationViolation::UnknownItem(i) => format!("unknown item {}", item(i)),
            AllocationViolation::Duplicated(i) => format!("item {} is in several bundles", item(i)),
            AllocationViolation::Unallocated(i) => format!("item {} is unallocated", item(i)),
            AllocationViolation::CapacityExceeded { agent, category, count, capacity } => format!(
                "agent {} holds {count} items of category {} (capacity {capacity})",
                instance.agent_name(*agent),
                instance.categories()[*category].id
            ),
        }
    }
}

impl Allocation {
    pub fn new(bundles: Vec<BTreeSet<Item>>) -> Self {
        Allocation { bundles }
    }

    pub fn empty(num_agents: usize) -> Self {
        Allocation { bundles: vec![BTreeSet::new(); num_agents] }
    }

    /// Builds an allocation from per-agent item names.
    pub fn from_names<S: AsRef<str>>(instance: &Instance, bundles: &[&[S]]) -> Result<Self, InstanceError> {
        if bundles.len() != instance.num_agents() {
            return Err(InstanceError::BundleCount { got: bundles.len(), expected: instance.num_agents() });
        }
        let mut out = Vec::with_capacity(bundles.len());
        for names in bundles {
            let mut set = BTreeSet::new();
            for n in names.iter() {
                let n = n.as_ref();
                let item = instance.item_by_name(n).ok_or_else(|| InstanceError::UnknownItem(n.to_string()))?;
                set.insert(item);
            }
            out.push(set);
        }
        Ok(Allocation { bundles: out })
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&self, agent: Agent) -> &BTreeSet<Item> {
        &self.bundles[agent.0]
    }

    pub fn bundles(&self) -> &[BTreeSet<Item>] {
        &self.bundles
    }

    pub fn owner(&self, item: Item) -> Option<Agent> {
        self.bundles.iter().position(|b| b.contains(&item)).map(Agent)
    }

    /// `owner[item]` lookup table for all items of `instance`.
    pub fn owners(&self, num_items: usize) -> Vec<Option<Agent>> {
        let mut owners = vec![None; num_items];
        for (a, b) in self.bundles.iter().enumerate() {
            for it in b {
                if it.0 < num_items {
                    owners[it.0] = Some(Agent(a));
                }
            }
        }
        owners
    }

    pub fn insert(&mut self, agent: Agent, item: Item) {
        self.bundles[agent.0].insert(item);
    }

    pub fn remove(&mut self, agent: Agent, item: Item) -> bool {
        self.bundles[agent.0].remove(&item)
    }

    /// Moves `item` from whoever holds it to `agent`.
    pub fn transfer(&mut self, item: Item, agent: Agent) {
        for b in &mut self.bundles {
            b.remove(&item);
        }
        self.bundles[agent.0].insert(item);
    }

    /// Items of category `category` held by `agent`.
    pub fn items_in_category<'a>(
        &'a self,
        instance: &'a Instance,
        agent: Agent,
        category: usize,
    ) -> impl Iterator<Item = Item> + 'a {
        self.bundles[agent.0]
            .iter()
            .copied()
            .filter(move |&i| instance.category_of(i) == category)
    }

    /// Drops padding items.
    pub fn strip_dummies(&self, instance: &Instance) -> Allocation {
        Allocation {
            bundles: self
                .bundles
                .iter()
                .map(|b| b.iter().copied().filter(|&i| i.0 < instance.num_items() && !instance.is_dummy(i)).collect())
                .collect(),
        }
    }

    /// Hands out the unallocated dummy items of a padded instance so that
    /// every agent holds exactly `s_c` items of each category.
    pub fn fill_dummies(&self, padded: &Instance) -> Allocation {
        let mut out = self.clone();
        let owners = self.owners(padded.num_items());
        for (ci, c) in padded.categories().iter().enumerate() {
            let mut free = c
                .items
                .iter()
                .copied()
                .filter(|&i| padded.is_dummy(i) && owners[i.0].is_none());
            for a in padded.agents() {
                let mut have = out.items_in_category(padded, a, ci).count();
                while have < c.capacity {
                    match free.next() {
                        Some(d) => {
                            out.bundles[a.0].insert(d);
                            have += 1;
                        }
                        None => break,
                    }
                }
            }
        }
        out
    }

    /// Every way in which this allocation fails to be a feasible partition of
    /// the instance's items.
    pub fn violations(&self, instance: &Instance) -> Vec<AllocationViolation> {
        let mut out = Vec::new();
        if self.bundles.len() != instance.num_agents() {
            out.push(AllocationViolation::WrongAgentCount {
                got: self.bundles.len(),
                expected: instance.num_agents(),
            });
            return out;
        }
        out.extend(self.capacity_violations(instance));
        let mut count = vec![0usize; instance.num_items()];
        for b in &self.bundles {
            for it in b {
                if it.0 >= instance.num_items() {
                    out.push(AllocationViolation::UnknownItem(*it));
                } else {
                    count[it.0] += 1;
                }
            }
        }
        for (i, c) in count.iter().enumerate() {
            match c {
                0 => out.push(AllocationViolation::Unallocated(Item(i))),
                1 => {}
                _ => out.push(AllocationViolation::Duplicated(Item(i))),
            }
        }
        out
    }

    /// Capacity overruns only; meaningful for partial allocations too.
    pub fn capacity_violations(&self, instance: &Instance) -> Vec<AllocationViolation> {
        let mut out = Vec::new();
        for (a, b) in self.bundles.iter().enumerate() {
            let mut per_cat = vec![0usize; instance.categories().len()];
            for it in b.iter().filter(|it| it.0 < instance.num_items()) {
                per_cat[instance.category_of(*it)] += 1;
            }
            for (ci, &count) in per_cat.iter().enumerate() {
                let capacity = instance.categories()[ci].capacity;
                if count > capacity {
                    out.push(AllocationViolation::CapacityExceeded { agent: Agent(a), category: ci, count, capacity });
                }
            }
        }
        out
    }

    /// Disjoint bundles covering all items, within capacity.
    pub fn is_feasible(&self, instance: &Instance) -> bool {
        self.violations(instance).is_empty()
    }

    /// Per-agent utility of own bundle.
    pub fn utility_profile(&self, instance: &Instance) -> Vec<Rational> {
        instance
            .agents()
            .map(|a| instance.bundle_utility(a, self.bundle(a)))
            .collect()
    }

    /// Same allocation with bundles re-indexed: bundle `k` of the result is
    /// bundle `order[k]` of `self`.
    pub fn with_agent_order(&self, order: &[Agent]) -> Allocation {
        Allocation { bundles: order.iter().map(|a| self.bundles[a.0].clone()).collect() }
    }

    /// Item names per bundle, for messages and tests.
    pub fn names<'a>(&self, instance: &'a Instance) -> Vec<Vec<&'a str>> {
        self.bundles
            .iter()
            .map(|b| b.iter().map(|&i| instance.item_name(i)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::int;

    fn intro_with_capacity(s: usize) -> Instance {
        Instance::builder(["1", "2"])
            .category("C", s, &["o1", "o2"])
            .utilities("1", &[1, -1])
            .utilities("2", &[1, -1])
            .build()
            .unwrap()
    }

    #[test]
    fn intro_instance_is_valid() {
        assert!(intro_with_capacity(1).validate().is_valid());
    }

    #[test]
    fn capacity_bounds_are_reported() {
        let low = intro_with_capacity(0).validate();
        assert!(matches!(low.violations[..], [Violation::CapacityBelowShare { minimum: 1, .. }]));
        assert!(low.to_string().contains("capacity below"));
        let high = intro_with_capacity(3).validate();
        assert!(matches!(high.violations[..], [Violation::CapacityAboveSize { size: 2, .. }]));
        assert!(high.to_string().contains("capacity above"));
    }

    #[test]
    fn lower_bound_is_ceiled() {
        let inst = Instance::builder(["1", "2"])
            .category("C", 1, &["a", "b", "c"])
            .build()
            .unwrap();
        assert!(matches!(inst.validate().violations[..], [Violation::CapacityBelowShare { minimum: 2, .. }]));
    }

    #[test]
    fn padding_counts() {
        let t2 = fixtures::table2().instance;
        assert_eq!(t2.padded().unwrap().num_items(), 6);
        assert_eq!(intro_with_capacity(1).padded().unwrap().num_items(), 2);
        let three = Instance::builder(["1", "2"])
            .category("C", 2, &["a", "b", "c"])
            .utilities("1", &[1, 2, 3])
            .build()
            .unwrap();
        let padded = three.padded().unwrap();
        assert_eq!(padded.num_items(), 4);
        assert!(padded.is_dummy(Item(3)));
        assert_eq!(padded.item_name(Item(3)), "__dummy_C_0");
        assert!(padded.agents().all(|a| padded.utility(a, Item(3)).is_zero()));
        assert_eq!(padded.padded().unwrap(), padded);
    }

    #[test]
    fn padding_rejects_invalid() {
        assert!(intro_with_capacity(0).padded().is_err());
    }

    #[test]
    fn same_sign_detection() {
        assert!(fixtures::table2().instance.is_same_sign());
        assert!(!fixtures::intro().instance.is_same_sign());
        let zeros = Instance::builder(["1", "2"]).category("C", 1, &["a", "b"]).build().unwrap();
        assert!(zeros.is_same_sign());
    }

    #[test]
    fn bundle_utilities() {
        let t2 = fixtures::table2().instance;
        assert_eq!(t2.bundle_utility_by_name(Agent(0), &["o1", "o2", "o6"]).unwrap(), int(1));
        assert_eq!(t2.bundle_utility(Agent(1), &BTreeSet::new()), int(0));
        assert!(t2.bundle_utility_by_name(Agent(0), &["nope"]).is_err());
        let t6 = fixtures::table6().instance;
        assert_eq!(t6.bundle_utility_by_name(Agent(0), &["o1", "o5", "o6", "o7"]).unwrap(), int(-10));
    }

    #[test]
    fn feasibility() {
        let t2 = fixtures::table2().instance;
        let ok = Allocation::from_names(&t2, &[&["o1", "o2", "o6"], &["o3", "o4", "o5"]]).unwrap();
        assert!(ok.is_feasible(&t2));
        let over = Allocation::from_names(&t2, &[&["o1", "o2", "o3"], &["o4", "o5", "o6"]]).unwrap();
        assert!(!over.is_feasible(&t2));
        assert!(over
            .violations(&t2)
            .iter()
            .any(|v| matches!(v, AllocationViolation::CapacityExceeded { count: 3, capacity: 2, .. })));
        let missing = Allocation::from_names(&t2, &[&["o1", "o2"], &["o3", "o4", "o5"]]).unwrap();
        assert_eq!(missing.violations(&t2), vec![AllocationViolation::Unallocated(Item(5))]);
    }

    #[test]
    fn strip_and_fill_dummies() {
        let inst = Instance::builder(["1", "2"])
            .category("C", 2, &["a", "b", "c"])
            .category("D", 1, &["d"])
            .build()
            .unwrap();
        let padded = inst.padded().unwrap();
        let partial = Allocation::from_names(&inst, &[&["a"], &["b", "c", "d"]]).unwrap();
        let full = partial.fill_dummies(&padded);
        assert!(full.is_feasible(&padded));
        assert_eq!(full.strip_dummies(&padded), partial);
    }
}
