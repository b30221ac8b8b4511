//! Plottable item-line data for two-agent instances.

use crate::instance::{Agent, Allocation, Instance, Item};
use crate::rational::{self, Rational};
use crate::solver::{item_line, DifferenceRatio, LineIntersection, SolveError};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineRecord {
    pub item: String,
    pub category: String,
    #[serde(serialize_with = "rational::serialize_as_string")]
    pub slope: Rational,
    #[serde(serialize_with = "rational::serialize_as_string")]
    pub intercept: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Crossing {
    Point {
        #[serde(serialize_with = "rational::serialize_as_string")]
        w1: Rational,
        ratio: DifferenceRatio,
    },
    Coincident,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionRecord {
    pub category: String,
    pub first: String,
    pub second: String,
    #[serde(flatten)]
    pub crossing: Crossing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineExport {
    pub lines: Vec<LineRecord>,
    pub intersections: Vec<IntersectionRecord>,
}

/// Lines of every item and the crossings of same-category pairs. With an
/// allocation, only pairs split between the two agents are listed, first
/// item from agent 1. Parallel pairs are omitted.
pub fn export_lines(instance: &Instance, allocation: Option<&Allocation>) -> Result<LineExport, SolveError> {
    let mut lines = Vec::new();
    for item in instance.items() {
        let l = item_line(instance, item)?;
        lines.push(LineRecord {
            item: instance.item_name(item).to_string(),
            category: instance.categories()[instance.category_of(item)].id.clone(),
            slope: l.slope,
            intercept: l.intercept,
        });
    }
    let mut intersections = Vec::new();
    for c in instance.categories() {
        for (a, &x) in c.items.iter().enumerate() {
            for (b, &y) in c.items.iter().enumerate() {
                if !pair_wanted(allocation, a, b, x, y) {
                    continue;
                }
                let crossing = match item_line(instance, x)?.intersect(&item_line(instance, y)?) {
                    LineIntersection::Point { w1, ratio } => Crossing::Point { w1, ratio },
                    LineIntersection::Coincident => Crossing::Coincident,
                    LineIntersection::Parallel => continue,
                };
                intersections.push(IntersectionRecord {
                    category: c.id.clone(),
                    first: instance.item_name(x).to_string(),
                    second: instance.item_name(y).to_string(),
                    crossing,
                });
            }
        }
    }
    Ok(LineExport { lines, intersections })
}

fn pair_wanted(allocation: Option<&Allocation>, a: usize, b: usize, x: Item, y: Item) -> bool {
    match allocation {
        None => a < b,
        Some(alloc) => alloc.bundle(Agent(0)).contains(&x) && alloc.bundle(Agent(1)).contains(&y),
    }
}

impl LineExport {
    /// Two CSV tables separated by a blank line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("item,category,slope,intercept\n");
        for l in &self.lines {
            out.push_str(&format!(
                "{},{},{},{}\n",
                l.item,
                l.category,
                rational::format(&l.slope),
                rational::format(&l.intercept)
            ));
        }
        out.push_str("\ncategory,first,second,kind,w1,ratio\n");
        for i in &self.intersections {
            let (kind, w1, ratio) = match &i.crossing {
                Crossing::Point { w1, ratio } => ("point", rational::format(w1), ratio.to_string()),
                Crossing::Coincident => ("coincident", String::new(), String::new()),
            };
            out.push_str(&format!("{},{},{},{},{},{}\n", i.category, i.first, i.second, kind, w1, ratio));
        }
        out
    }
}
