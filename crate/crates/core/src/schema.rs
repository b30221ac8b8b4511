//! JSON documents for instances and allocations.
//!
//! Instance:
//! ```json
//! {"agents": ["1", "2"],
//!  "categories": [{"id": "C1", "capacity": 1, "items": ["o1", "o2"]}],
//!  "utilities": {"1": {"o1": 1, "o2": "-1/2"}, "2": {"o1": 1, "o2": -1}}}
//! ```
//! Allocation: `{"bundles": {"1": ["o1"], "2": ["o2"]}}`.
//!
//! Utilities are integers or `"p/q"` strings. Unknown fields are rejected.

use crate::instance::{Agent, Allocation, Instance, InstanceError};
use crate::rational::WireRational;
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub id: String,
    pub capacity: usize,
    pub items: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub agents: Vec<String>,
    pub categories: Vec<CategoryDoc>,
    pub utilities: IndexMap<String, IndexMap<String, WireRational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationDoc {
    pub bundles: IndexMap<String, Vec<String>>,
}

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{}", .0.join("; "))]
    Problems(Vec<String>),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        let categories = instance
            .categories()
            .iter()
            .map(|c| CategoryDoc {
                id: c.id.clone(),
                capacity: c.capacity,
                items: c.items.iter().map(|&i| instance.item_name(i).to_string()).collect(),
            })
            .collect();
        let utilities = instance
            .agents()
            .map(|a| {
                let row = instance
                    .categories()
                    .iter()
                    .flat_map(|c| c.items.iter())
                    .map(|&i| (instance.item_name(i).to_string(), WireRational(instance.utility(a, i).clone())))
                    .collect();
                (instance.agent_name(a).to_string(), row)
            })
            .collect();
        InstanceDoc { agents: instance.agent_names().to_vec(), categories, utilities }
    }

    /// Converts to an [`Instance`], collecting every structural problem
    /// (missing or stray utility entries, unknown agents) before failing.
    pub fn to_instance(&self) -> Result<Instance, SchemaError> {
        let mut problems = Vec::new();
        let item_names: Vec<&str> = self
            .categories
            .iter()
            .flat_map(|c| c.items.iter().map(String::as_str))
            .collect();
        for agent in self.utilities.keys() {
            if !self.agents.contains(agent) {
                problems.push(format!("utilities.{agent}: unknown agent"));
            }
        }
        let mut rows = Vec::with_capacity(self.agents.len());
        for agent in &self.agents {
            let Some(row) = self.utilities.get(agent) else {
                problems.push(format!("utilities.{agent}: missing"));
                continue;
            };
            for item in row.keys() {
                if !item_names.contains(&item.as_str()) {
                    problems.push(format!("utilities.{agent}.{item}: unknown item"));
                }
            }
            let mut values = Vec::with_capacity(item_names.len());
            for item in &item_names {
                match row.get(*item) {
                    Some(v) => values.push(v.0.clone()),
                    None => problems.push(format!("utilities.{agent}.{item}: missing")),
                }
            }
            rows.push(values);
        }
        if !problems.is_empty() {
            return Err(SchemaError::Problems(problems));
        }
        let categories = self
            .categories
            .iter()
            .map(|c| (c.id.clone(), c.capacity, c.items.clone()))
            .collect();
        Ok(Instance::new(self.agents.clone(), categories, rows)?)
    }
}

impl AllocationDoc {
    pub fn from_allocation(instance: &Instance, allocation: &Allocation) -> Self {
        let bundles = instance
            .agents()
            .map(|a| {
                let items = allocation.bundle(a).iter().map(|&i| instance.item_name(i).to_string()).collect();
                (instance.agent_name(a).to_string(), items)
            })
            .collect();
        AllocationDoc { bundles }
    }

    /// Agents absent from the document get empty bundles.
    pub fn to_allocation(&self, instance: &Instance) -> Result<Allocation, SchemaError> {
        let mut problems = Vec::new();
        let mut bundles = vec![BTreeSet::new(); instance.num_agents()];
        for (agent, items) in &self.bundles {
            let Some(Agent(a)) = instance.agent_by_name(agent) else {
                problems.push(format!("bundles.{agent}: unknown agent"));
                continue;
            };
            for name in items {
                match instance.item_by_name(name) {
                    Some(item) => {
                        bundles[a].insert(item);
                    }
                    None => problems.push(format!("bundles.{agent}: unknown item `{name}`")),
                }
            }
        }
        if problems.is_empty() {
            Ok(Allocation::new(bundles))
        } else {
            Err(SchemaError::Problems(problems))
        }
    }
}

pub fn parse_instance(json: &str) -> Result<Instance, SchemaError> {
    let doc: InstanceDoc = serde_json::from_str(json)?;
    doc.to_instance()
}

pub fn instance_to_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceDoc::from_instance(instance)).expect("instance serializes")
}

pub fn parse_allocation(instance: &Instance, json: &str) -> Result<Allocation, SchemaError> {
    let doc: AllocationDoc = serde_json::from_str(json)?;
    doc.to_allocation(instance)
}

pub fn allocation_to_json(instance: &Instance, allocation: &Allocation) -> String {
    serde_json::to_string_pretty(&AllocationDoc::from_allocation(instance, allocation)).expect("allocation serializes")
}
