//! Seeded random instances and allocations.

use crate::instance::{Agent, Allocation, Instance, InstanceError};
use crate::matching::WeightVector;
use crate::rational::{self, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityPolicy {
    /// `ceil(|C| / n)`.
    Tight,
    /// `|C|`.
    Loose,
    /// Uniform in `[ceil(|C| / n), |C|]`.
    Random,
    Explicit(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    pub agents: usize,
    pub category_sizes: Vec<usize>,
    pub capacity: CapacityPolicy,
    pub utility_min: i64,
    pub utility_max: i64,
    pub same_sign: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            agents: 2,
            category_sizes: vec![4, 2],
            capacity: CapacityPolicy::Tight,
            utility_min: -9,
            utility_max: 9,
            same_sign: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("at least one agent is required")]
    NoAgents,
    #[error("at least one category is required")]
    NoCategories,
    #[error("category {0} is empty")]
    EmptyCategory(usize),
    #[error("expected {expected} explicit capacities, got {got}")]
    CapacityCount { expected: usize, got: usize },
    #[error("capacity {capacity} for category {category} is outside [{min}, {max}]")]
    CapacityOutOfRange { category: usize, capacity: usize, min: usize, max: usize },
    #[error("utility range [{0}, {1}] is empty")]
    EmptyRange(i64, i64),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn generate(params: &GenParams) -> Result<Instance, GenError> {
    generate_with(params, &mut rng(params.seed))
}

/// Like [`generate`], drawing from `rng` instead of seeding from `params`.
pub fn generate_with<R: Rng>(params: &GenParams, rng: &mut R) -> Result<Instance, GenError> {
    let n = params.agents;
    if n == 0 {
        return Err(GenError::NoAgents);
    }
    if params.category_sizes.is_empty() {
        return Err(GenError::NoCategories);
    }
    if params.utility_min > params.utility_max {
        return Err(GenError::EmptyRange(params.utility_min, params.utility_max));
    }
    if let CapacityPolicy::Explicit(caps) = &params.capacity {
        if caps.len() != params.category_sizes.len() {
            return Err(GenError::CapacityCount { expected: params.category_sizes.len(), got: caps.len() });
        }
    }
    let mut categories = Vec::new();
    for (c, &size) in params.category_sizes.iter().enumerate() {
        if size == 0 {
            return Err(GenError::EmptyCategory(c + 1));
        }
        let min = size.div_ceil(n);
        let capacity = match &params.capacity {
            CapacityPolicy::Tight => min,
            CapacityPolicy::Loose => size,
            CapacityPolicy::Random => rng.gen_range(min..=size),
            CapacityPolicy::Explicit(caps) => caps[c],
        };
        if capacity < min || capacity > size {
            return Err(GenError::CapacityOutOfRange { category: c + 1, capacity, min, max: size });
        }
        let items = (1..=size).map(|k| format!("o{}_{}", c + 1, k)).collect();
        categories.push((format!("C{}", c + 1), capacity, items));
    }
    let (lo, hi) = (params.utility_min, params.utility_max);
    let mut utilities = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::new();
        for &size in &params.category_sizes {
            let (a, b) = if params.same_sign {
                let positive = hi >= 0 && (lo > 0 || rng.gen_bool(0.5));
                if positive {
                    (lo.max(0), hi)
                } else {
                    (lo, hi.min(0))
                }
            } else {
                (lo, hi)
            };
            row.extend((0..size).map(|_| rational::int(rng.gen_range(a..=b))));
        }
        utilities.push(row);
    }
    let agents: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    Ok(Instance::new(agents, categories, utilities)?)
}

/// Uniformly random feasible allocation of a padded instance: each category
/// is shuffled and dealt out `s_c` items per agent.
pub fn random_allocation<R: Rng>(padded: &Instance, rng: &mut R) -> Allocation {
    let mut alloc = Allocation::empty(padded.num_agents());
    for c in padded.categories() {
        let mut items = c.items.clone();
        items.shuffle(rng);
        for (k, item) in items.into_iter().enumerate() {
            alloc.insert(Agent(k / c.capacity), item);
        }
    }
    alloc
}

/// Between 1 and `max_categories` non-empty category sizes with total at
/// most `max_items`.
pub fn random_shape<R: Rng>(rng: &mut R, max_categories: usize, max_items: usize) -> Vec<usize> {
    let k = rng.gen_range(1..=max_categories.min(max_items));
    let total = rng.gen_range(k..=max_items);
    let mut sizes = vec![1; k];
    for _ in k..total {
        sizes[rng.gen_range(0..k)] += 1;
    }
    sizes
}

/// Two-agent weights `(k/d, 1 - k/d)` with `k` uniform in `1..d`.
pub fn random_pair_weights<R: Rng>(rng: &mut R, denominator: i64) -> WeightVector {
    let k = rng.gen_range(1..denominator);
    WeightVector::pair(rational::ratio(k, denominator)).expect("weight strictly inside (0, 1)")
}

/// A rational `p/q` with `|p| <= bound` and `1 <= q <= bound`.
pub fn random_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    rational::ratio(rng.gen_range(-bound..=bound), rng.gen_range(1..=bound))
}
