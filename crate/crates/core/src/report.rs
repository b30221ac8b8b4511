//! JSON views of verdicts, graphs, and solver traces. Item and agent
//! references are by name; rationals are `"p/q"` strings.

use crate::fairness::{self, EnvyGraph, FairnessVerdict, Property};
use crate::instance::{Allocation, Instance, Item};
use crate::matching::WeightVector;
use crate::rational;
use crate::schema::AllocationDoc;
use crate::solver::{SolveOutcome, SolveTrace, StepVerdict};
use serde_json::{json, Value};

fn name(instance: &Instance, item: Option<Item>) -> Value {
    item.map_or(Value::Null, |i| json!(instance.item_name(i)))
}

pub fn allocation(instance: &Instance, allocation: &Allocation) -> Value {
    serde_json::to_value(AllocationDoc::from_allocation(instance, allocation)).expect("allocation serializes")
}

pub fn verdict(instance: &Instance, verdict: &FairnessVerdict) -> Value {
    let witnesses: Vec<Value> = verdict
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "envier": instance.agent_name(w.envier),
                "envied": instance.agent_name(w.envied),
                "removed_own": name(instance, w.removed_own),
                "removed_other": name(instance, w.removed_other),
                "satisfied": w.satisfied,
            })
        })
        .collect();
    json!({ "property": verdict.property, "holds": verdict.holds, "witnesses": witnesses })
}

pub fn graph(instance: &Instance, graph: &EnvyGraph) -> Value {
    let sinks: Vec<&str> = graph.sinks().into_iter().map(|a| instance.agent_name(a)).collect();
    json!({
        "edges": graph.named_edges(instance),
        "sinks": sinks,
        "has_cycle": graph.has_cycle(),
    })
}

/// Which fairness notions hold, plus the envy edges.
pub fn summary(instance: &Instance, allocation: &Allocation) -> Value {
    let mut out = serde_json::Map::new();
    for p in Property::ALL {
        out.insert(p.as_str().to_string(), json!(fairness::holds(instance, allocation, p)));
    }
    out.insert(
        "envy_edges".into(),
        json!(fairness::envy_graph(instance, allocation).named_edges(instance)),
    );
    Value::Object(out)
}

fn step_verdict(instance: &Instance, v: &StepVerdict) -> Value {
    let envious: Vec<&str> = v.envious.iter().map(|&a| instance.agent_name(a)).collect();
    json!({ "ef": v.ef, "ef1": v.ef1, "ef11": v.ef11, "envious": envious })
}

fn weights(w: &WeightVector) -> Value {
    json!(w.as_slice().iter().map(rational::format).collect::<Vec<_>>())
}

/// Trace over the padded instance; allocations are shown without dummies.
pub fn trace(padded: &Instance, trace: &SolveTrace) -> Value {
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| {
            json!({
                "first_item": padded.item_name(s.pair.item_of_first),
                "second_item": padded.item_name(s.pair.item_of_second),
                "category": padded.categories()[s.pair.category].id,
                "ratio": s.pair.ratio,
                "preferred": name(padded, s.pair.preferred),
                "weights": trace.certifying_weights(k).map(|w| weights(&w)).unwrap_or(Value::Null),
                "allocation": allocation(padded, &s.allocation.strip_dummies(padded)),
                "verdict": step_verdict(padded, &s.verdict),
                "remaining_candidates": s.remaining_candidates,
            })
        })
        .collect();
    json!({
        "orientation": {
            "first": padded.agent_name(trace.orientation.first),
            "second": padded.agent_name(trace.orientation.second),
        },
        "initial": allocation(padded, &trace.initial.strip_dummies(padded)),
        "initial_weights": weights(&WeightVector::uniform(2)),
        "initial_verdict": step_verdict(padded, &trace.initial_verdict),
        "initial_candidates": trace.initial_candidates,
        "steps": steps,
        "final": allocation(padded, &trace.final_allocation.strip_dummies(padded)),
    })
}

pub fn solve_result(instance: &Instance, outcome: &SolveOutcome) -> Value {
    json!({
        "allocation": allocation(instance, &outcome.allocation),
        "fairness": summary(instance, &outcome.allocation),
        "exchanges": outcome.trace.steps.len(),
        "ratios": outcome.trace.ratios(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solver::solve;

    #[test]
    fn solve_views() {
        let t2 = fixtures::table2().instance;
        let out = solve(&t2).unwrap();
        let v = solve_result(&t2, &out);
        assert_eq!(v["allocation"]["bundles"]["1"], json!(["o2", "o3", "o6"]));
        assert_eq!(v["fairness"]["ef"], json!(true));
        assert_eq!(v["ratios"], json!(["1/2"]));
        let t = trace(&out.padded, &out.trace);
        assert_eq!(t["steps"][0]["first_item"], json!("o1"));
        assert_eq!(t["steps"][0]["weights"], json!(["1/3", "2/3"]));
        assert_eq!(t["initial_verdict"]["envious"], json!(["2"]));
        assert_eq!(t["orientation"]["second"], json!("2"));
    }

    #[test]
    fn verdict_view() {
        let t6 = fixtures::table6();
        let v = fairness::check(&t6.instance, t6.snapshot("A").unwrap(), Property::Ef1);
        let j = verdict(&t6.instance, &v);
        assert_eq!(j["property"], json!("ef1"));
        assert_eq!(j["witnesses"][0]["removed_own"], json!("o1"));
        assert_eq!(j["witnesses"][1]["removed_own"], json!("o3"));
        let t5 = fixtures::table5();
        let g = graph(&t5.instance, &fairness::envy_graph(&t5.instance, t5.snapshot("diagonal").unwrap()));
        assert_eq!(g["edges"], json!([["1", "2"], ["2", "3"], ["3", "1"], ["3", "4"]]));
        assert_eq!(g["has_cycle"], json!(true));
    }
}
