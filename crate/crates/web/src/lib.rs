//! Browser bindings. Every export takes and returns JSON text; errors come
//! back as a thrown string.

use fairsplit_core::matching::{self, WeightVector};
use fairsplit_core::{fixtures, lines, rational, report, schema, solver, Instance};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn instance(text: &str) -> Result<Instance, String> {
    let inst = schema::parse_instance(text).map_err(|e| e.to_string())?;
    let report = inst.validate();
    if !report.is_valid() {
        let list: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(list.join("; "));
    }
    Ok(inst)
}

fn text(value: Value) -> String {
    serde_json::to_string(&value).expect("value serializes")
}

pub fn fixture_json(name: &str) -> Result<String, String> {
    let f = fixtures::by_name(name).ok_or_else(|| format!("unknown fixture `{name}`"))?;
    Ok(schema::instance_to_json(&f.instance))
}

/// Solver result together with its trace.
pub fn solve_json(instance_json: &str) -> Result<String, String> {
    let inst = instance(instance_json)?;
    let out = solver::solve(&inst).map_err(|e| e.to_string())?;
    let mut v = report::solve_result(&inst, &out);
    v["trace"] = report::trace(&out.padded, &out.trace);
    Ok(text(v))
}

/// The matching-based maximizer of `w1 u1 + (1 - w1) u2`.
pub fn weighted_json(instance_json: &str, w1: &str) -> Result<String, String> {
    let inst = instance(instance_json)?;
    let w = WeightVector::pair(rational::parse(w1).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let (padded, a) = matching::w_maximal_allocation(&inst, &w).map_err(|e| e.to_string())?;
    let stripped = a.strip_dummies(&padded);
    Ok(text(json!({
        "value": rational::format(&matching::weighted_sum(&padded, &a, &w)),
        "allocation": report::allocation(&inst, &stripped),
        "fairness": report::summary(&inst, &stripped),
    })))
}

pub fn lines_json(instance_json: &str) -> Result<String, String> {
    let inst = instance(instance_json)?;
    let export = lines::export_lines(&inst, None).map_err(|e| e.to_string())?;
    Ok(text(serde_json::to_value(export).expect("serializes")))
}

#[wasm_bindgen]
pub fn fixture(name: &str) -> Result<String, JsValue> {
    fixture_json(name).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn solve(instance_json: &str) -> Result<String, JsValue> {
    solve_json(instance_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn weighted(instance_json: &str, w1: &str) -> Result<String, JsValue> {
    weighted_json(instance_json, w1).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn item_lines(instance_json: &str) -> Result<String, JsValue> {
    lines_json(instance_json).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn round_trip_through_json() {
        let t2 = fixture_json("table2").unwrap();
        let solved = parse(&solve_json(&t2).unwrap());
        assert_eq!(solved["exchanges"], json!(1));
        assert_eq!(solved["trace"]["steps"][0]["ratio"], json!("1/2"));

        let w = parse(&weighted_json(&t2, "1/2").unwrap());
        assert_eq!(w["value"], json!("-3/2"));
        assert_eq!(w["allocation"]["bundles"]["1"], json!(["o1", "o2", "o6"]));
        let w = parse(&weighted_json(&t2, "1/3").unwrap());
        assert_eq!(w["value"], json!("-7/3"));

        let l = parse(&lines_json(&t2).unwrap());
        assert_eq!(l["lines"].as_array().unwrap().len(), 6);
    }

    #[test]
    fn errors_are_strings() {
        assert!(fixture_json("nope").is_err());
        assert!(solve_json("{").is_err());
        assert!(weighted_json(&fixture_json("table2").unwrap(), "3/2").is_err());
        assert!(solve_json(&fixture_json("table5").unwrap()).unwrap_err().contains("two agents"));
    }
}
