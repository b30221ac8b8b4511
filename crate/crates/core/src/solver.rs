//! Two-agent solver: start from the allocation that maximizes the equally
//! weighted utility sum, then exchange same-category item pairs in
//! decreasing order of difference ratio until the allocation is EF[1,1].
//!
//! Each exchange moves the allocation to one that is maximal for a weight
//! vector tilted towards the jealous agent, so every allocation visited is
//! Pareto-optimal.

use crate::fairness::{self, Property};
use crate::instance::{Agent, Allocation, Instance, InstanceError, Item};
use crate::matching::{self, MatchingError, WeightVector};
use crate::rational::{self, Rational};
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// `r_{j/i}(o_i, o_j) = (u_j(o_i) - u_j(o_j)) / (u_i(o_i) - u_i(o_j))`,
/// with `0` for a zero numerator and `±inf` for a zero denominator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DifferenceRatio {
    NegInfinity,
    Finite(Rational),
    PosInfinity,
}

impl DifferenceRatio {
    pub fn compute(instance: &Instance, j: Agent, i: Agent, o_i: Item, o_j: Item) -> Self {
        let num = instance.utility(j, o_i) - instance.utility(j, o_j);
        let den = instance.utility(i, o_i) - instance.utility(i, o_j);
        Self::from_parts(num, den)
    }

    pub fn from_parts(num: Rational, den: Rational) -> Self {
        if num.is_zero() {
            DifferenceRatio::Finite(Rational::zero())
        } else if den.is_zero() {
            if num.is_positive() {
                DifferenceRatio::PosInfinity
            } else {
                DifferenceRatio::NegInfinity
            }
        } else {
            DifferenceRatio::Finite(num / den)
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            DifferenceRatio::Finite(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for DifferenceRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DifferenceRatio::NegInfinity => f.write_str("-inf"),
            DifferenceRatio::PosInfinity => f.write_str("inf"),
            DifferenceRatio::Finite(r) => f.write_str(&rational::format(r)),
        }
    }
}

impl Serialize for DifferenceRatio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Which agent plays the jealous role. The solver always exchanges in favor
/// of `second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Orientation {
    pub first: Agent,
    pub second: Agent,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation { first: Agent(0), second: Agent(1) };
    pub const SWAPPED: Orientation = Orientation { first: Agent(1), second: Agent(0) };

    pub fn is_swapped(&self) -> bool {
        *self == Orientation::SWAPPED
    }

    /// Weights in original agent order for the oriented ratio
    /// `w_first / w_second = ratio`.
    pub fn weights_for_ratio(&self, ratio: &Rational) -> Result<WeightVector, MatchingError> {
        let oriented = WeightVector::from_ratio(ratio)?;
        Ok(if self.is_swapped() { oriented.permuted(&[Agent(1), Agent(0)]) } else { oriented })
    }
}

/// A same-category pair `(o1, o2)` with `o1` held by `first` and `o2` by
/// `second`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeablePair {
    pub item_of_first: Item,
    pub item_of_second: Item,
    pub category: usize,
    /// `r_{second/first}(o1, o2)`.
    pub ratio: DifferenceRatio,
    /// The item both agents strictly prefer, if any.
    pub preferred: Option<Item>,
}

impl ExchangeablePair {
    pub fn new(instance: &Instance, orientation: Orientation, o1: Item, o2: Item) -> Self {
        let Orientation { first, second } = orientation;
        let ratio = DifferenceRatio::compute(instance, second, first, o1, o2);
        let c1 = instance.utility(first, o1).cmp(instance.utility(first, o2));
        let c2 = instance.utility(second, o1).cmp(instance.utility(second, o2));
        let preferred = match (c1, c2) {
            (Ordering::Greater, Ordering::Greater) => Some(o1),
            (Ordering::Less, Ordering::Less) => Some(o2),
            _ => None,
        };
        ExchangeablePair { item_of_first: o1, item_of_second: o2, category: instance.category_of(o1), ratio, preferred }
    }

    fn key(&self) -> (usize, Item, Item) {
        (self.category, self.item_of_first, self.item_of_second)
    }
}

pub fn difference_ratio(instance: &Instance, j: Agent, i: Agent, o_i: Item, o_j: Item) -> DifferenceRatio {
    DifferenceRatio::compute(instance, j, i, o_i, o_j)
}

/// All same-category pairs `o1 in A_first`, `o2 in A_second` with
/// `u_second(o1) > u_second(o2)`, ordered by (category, o1, o2).
pub fn candidate_pairs(
    instance: &Instance,
    allocation: &Allocation,
    orientation: Orientation,
) -> Result<Vec<ExchangeablePair>, SolveError> {
    if instance.num_agents() != 2 {
        return Err(SolveError::NotTwoAgents(instance.num_agents()));
    }
    let Orientation { first, second } = orientation;
    let mut out = Vec::new();
    for ci in 0..instance.categories().len() {
        for o1 in allocation.items_in_category(instance, first, ci) {
            for o2 in allocation.items_in_category(instance, second, ci) {
                if instance.utility(second, o1) > instance.utility(second, o2) {
                    out.push(ExchangeablePair::new(instance, orientation, o1, o2));
                }
            }
        }
    }
    Ok(out)
}

/// Largest ratio; ties go to the smallest (category, o1, o2).
pub fn select_current_pair(pairs: &[ExchangeablePair]) -> Option<&ExchangeablePair> {
    let mut best: Option<&ExchangeablePair> = None;
    for p in pairs {
        let better = match best {
            None => true,
            Some(b) => p.ratio > b.ratio || (p.ratio == b.ratio && p.key() < b.key()),
        };
        if better {
            best = Some(p);
        }
    }
    best
}

/// Swaps the pair's items between the two bundles.
pub fn apply_exchange(
    allocation: &Allocation,
    pair: &ExchangeablePair,
    orientation: Orientation,
) -> Result<Allocation, SolveError> {
    let Orientation { first, second } = orientation;
    if !allocation.bundle(first).contains(&pair.item_of_first)
        || !allocation.bundle(second).contains(&pair.item_of_second)
    {
        return Err(SolveError::StalePair);
    }
    let mut out = allocation.clone();
    out.remove(first, pair.item_of_first);
    out.remove(second, pair.item_of_second);
    out.insert(first, pair.item_of_second);
    out.insert(second, pair.item_of_first);
    Ok(out)
}

/// Candidate pairs kept up to date across exchanges; only pairs touching
/// the two swapped items change.
#[derive(Debug, Clone)]
struct CandidateSet {
    pairs: BTreeMap<(usize, Item, Item), ExchangeablePair>,
}

impl CandidateSet {
    fn build(instance: &Instance, allocation: &Allocation, orientation: Orientation) -> Result<Self, SolveError> {
        let pairs = candidate_pairs(instance, allocation, orientation)?
            .into_iter()
            .map(|p| (p.key(), p))
            .collect();
        Ok(CandidateSet { pairs })
    }

    fn best(&self) -> Option<&ExchangeablePair> {
        let mut best: Option<&ExchangeablePair> = None;
        // Key order makes the first maximum the tie-break winner.
        for p in self.pairs.values() {
            if best.is_none_or(|b| p.ratio > b.ratio) {
                best = Some(p);
            }
        }
        best
    }

    /// Refreshes after `o1` (now with `second`) and `o2` (now with `first`)
    /// were exchanged.
    fn update(&mut self, instance: &Instance, allocation: &Allocation, orientation: Orientation, o1: Item, o2: Item) {
        self.pairs.retain(|&(_, a, b), _| a != o1 && a != o2 && b != o1 && b != o2);
        let Orientation { first, second } = orientation;
        let ci = instance.category_of(o1);
        for x in allocation.items_in_category(instance, second, ci) {
            if instance.utility(second, o2) > instance.utility(second, x) {
                let p = ExchangeablePair::new(instance, orientation, o2, x);
                self.pairs.insert(p.key(), p);
            }
        }
        for y in allocation.items_in_category(instance, first, ci) {
            if instance.utility(second, y) > instance.utility(second, o1) {
                let p = ExchangeablePair::new(instance, orientation, y, o1);
                self.pairs.insert(p.key(), p);
            }
        }
    }

    fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// Fairness summary of one allocation in a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepVerdict {
    pub ef: bool,
    pub ef1: bool,
    pub ef11: bool,
    pub envious: Vec<Agent>,
}

impl StepVerdict {
    pub fn of(instance: &Instance, allocation: &Allocation) -> Self {
        StepVerdict {
            ef: fairness::holds(instance, allocation, Property::Ef),
            ef1: fairness::holds(instance, allocation, Property::Ef1),
            ef11: fairness::holds(instance, allocation, Property::Ef11),
            envious: fairness::envy_graph(instance, allocation).envious(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub pair: ExchangeablePair,
    /// Allocation after the exchange (on the padded instance).
    pub allocation: Allocation,
    pub verdict: StepVerdict,
    /// Candidate pairs left after the exchange.
    pub remaining_candidates: usize,
}

/// Replayable record of a solver run. Allocations refer to the padded
/// instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveTrace {
    pub orientation: Orientation,
    pub initial: Allocation,
    pub initial_verdict: StepVerdict,
    pub initial_candidates: usize,
    pub steps: Vec<TraceStep>,
    pub final_allocation: Allocation,
}

impl SolveTrace {
    pub fn ratios(&self) -> Vec<&DifferenceRatio> {
        self.steps.iter().map(|s| &s.pair.ratio).collect()
    }

    /// Weights (original agent order) for which the allocation after step
    /// `k` is maximal: `w_first / w_second` equals that step's ratio.
    pub fn certifying_weights(&self, k: usize) -> Result<WeightVector, MatchingError> {
        let r = self.steps[k].pair.ratio.finite().ok_or(MatchingError::InvalidWeights)?;
        self.orientation.weights_for_ratio(r)
    }

    /// Re-applies every exchange to `initial`.
    pub fn replay(&self) -> Result<Allocation, SolveError> {
        let mut current = self.initial.clone();
        for s in &self.steps {
            current = apply_exchange(&current, &s.pair, self.orientation)?;
        }
        Ok(current)
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    /// The padded instance all trace allocations refer to.
    pub padded: Instance,
    /// Final allocation with dummies removed.
    pub allocation: Allocation,
    pub trace: SolveTrace,
}

#[derive(Debug, Clone, Error)]
pub enum SolveError {
    #[error("the solver handles exactly two agents, got {0}")]
    NotTwoAgents(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("pair does not match the current allocation")]
    StalePair,
    #[error("internal invariant violated: {message}")]
    Internal { message: String, trace: Box<Option<SolveTrace>> },
}

fn internal(message: String, trace: SolveTrace) -> SolveError {
    SolveError::Internal { message, trace: Box::new(Some(trace)) }
}

/// Runs the exchange algorithm on a two-agent instance.
pub fn solve(instance: &Instance) -> Result<SolveOutcome, SolveError> {
    if instance.num_agents() != 2 {
        return Err(SolveError::NotTwoAgents(instance.num_agents()));
    }
    instance.ensure_valid()?;
    let (padded, initial) = matching::w_maximal_allocation(instance, &WeightVector::uniform(2))?;
    let initial_verdict = StepVerdict::of(&padded, &initial);

    let orientation = if fairness::check(&padded, &initial, Property::Ef).holds_for(Agent(1)) {
        Orientation::SWAPPED
    } else {
        Orientation::IDENTITY
    };
    let mut trace = SolveTrace {
        orientation,
        initial: initial.clone(),
        initial_verdict,
        initial_candidates: 0,
        steps: Vec::new(),
        final_allocation: initial.clone(),
    };
    if trace.initial_verdict.ef11 {
        return Ok(finish(padded, trace));
    }

    let mut candidates = CandidateSet::build(&padded, &initial, orientation)?;
    trace.initial_candidates = candidates.len();
    let bound: usize = padded.categories().iter().map(|c| c.capacity * c.capacity).sum();
    let mut current = initial;
    while !fairness::holds(&padded, &current, Property::Ef11) {
        if trace.steps.len() >= bound {
            return Err(internal(format!("exceeded the exchange bound {bound}"), trace));
        }
        let Some(pair) = candidates.best().cloned() else {
            return Err(internal(
                "ran out of exchangeable pairs before reaching an EF[1,1] allocation".into(),
                trace,
            ));
        };
        let Orientation { first, .. } = orientation;
        if instance_prefers(&padded, first, pair.item_of_first, pair.item_of_second) != Ordering::Greater {
            return Err(internal(
                format!(
                    "selected pair ({}, {}) is not preferred by both agents",
                    padded.item_name(pair.item_of_first),
                    padded.item_name(pair.item_of_second)
                ),
                trace,
            ));
        }
        current = apply_exchange(&current, &pair, orientation)?;
        candidates.update(&padded, &current, orientation, pair.item_of_first, pair.item_of_second);
        trace.steps.push(TraceStep {
            verdict: StepVerdict::of(&padded, &current),
            allocation: current.clone(),
            remaining_candidates: candidates.len(),
            pair,
        });
        trace.final_allocation = current.clone();
    }
    Ok(finish(padded, trace))
}

fn instance_prefers(instance: &Instance, agent: Agent, a: Item, b: Item) -> Ordering {
    instance.utility(agent, a).cmp(instance.utility(agent, b))
}

fn finish(padded: Instance, trace: SolveTrace) -> SolveOutcome {
    let allocation = trace.final_allocation.strip_dummies(&padded);
    SolveOutcome { padded, allocation, trace }
}

/// `f_o(w1) = (u1(o) + u2(o)) * w1 - u2(o)`, i.e. `w1 u1(o) - w2 u2(o)` on
/// the line `w1 + w2 = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemLine {
    pub slope: Rational,
    pub intercept: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineIntersection {
    /// Lines cross at `w1`; `ratio` is `w1 / (1 - w1)` (infinite at `w1 = 1`).
    Point { w1: Rational, ratio: DifferenceRatio },
    Parallel,
    Coincident,
}

impl ItemLine {
    pub fn eval(&self, w1: &Rational) -> Rational {
        &self.slope * w1 + &self.intercept
    }

    pub fn intersect(&self, other: &ItemLine) -> LineIntersection {
        let ds = &self.slope - &other.slope;
        let di = &other.intercept - &self.intercept;
        if ds.is_zero() {
            return if di.is_zero() { LineIntersection::Coincident } else { LineIntersection::Parallel };
        }
        let w1 = di / ds;
        let w2 = rational::one() - &w1;
        let ratio = DifferenceRatio::from_parts(w1.clone(), w2);
        LineIntersection::Point { w1, ratio }
    }
}

pub fn item_line(instance: &Instance, item: Item) -> Result<ItemLine, SolveError> {
    if instance.num_agents() != 2 {
        return Err(SolveError::NotTwoAgents(instance.num_agents()));
    }
    let u1 = instance.utility(Agent(0), item);
    let u2 = instance.utility(Agent(1), item);
    Ok(ItemLine { slope: u1 + u2, intercept: -u2.clone() })
}
