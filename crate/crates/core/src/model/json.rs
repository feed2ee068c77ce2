use serde::{Deserialize, Serialize};

use super::{EventSpec, Instance, ModelError, VariableSpec};
use crate::exact::parse_rational;

/// On-disk JSON form of an [`Instance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub variables: Vec<VariableEntry>,
    pub events: Vec<EventEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableEntry {
    pub id: usize,
    pub domain: u32,
    /// Exact rationals as `"a/b"` strings; omitted means uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EventEntry {
    pub id: usize,
    pub vars: Vec<usize>,
    pub violating: Vec<Vec<u32>>,
}

pub fn instance_from_json(text: &str) -> Result<Instance, ModelError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
    let mut variables = Vec::with_capacity(file.variables.len());
    for entry in file.variables {
        let var = match entry.weights {
            None => VariableSpec::uniform(entry.id, entry.domain),
            Some(raw) => {
                let weights = raw
                    .iter()
                    .map(|w| parse_rational(w))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| ModelError::Format(format!("variable {}: {e}", entry.id)))?;
                VariableSpec {
                    id: entry.id,
                    domain_size: entry.domain,
                    weights,
                }
            }
        };
        variables.push(var);
    }
    let events = file
        .events
        .into_iter()
        .map(|e| EventSpec::new(e.id, e.vars, e.violating))
        .collect::<Result<Vec<_>, _>>()?;
    Instance::new(variables, events)
}

pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        variables: instance
            .variables()
            .iter()
            .map(|v| VariableEntry {
                id: v.id,
                domain: v.domain_size,
                weights: Some(v.weights.iter().map(ToString::to_string).collect()),
            })
            .collect(),
        events: instance
            .events()
            .iter()
            .map(|e| EventEntry {
                id: e.id,
                vars: e.vbl().to_vec(),
                violating: e.violating().to_vec(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("instance serializes")
}
