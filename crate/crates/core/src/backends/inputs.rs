use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::frontend::PartyId;

/// Private inputs keyed by (party, port name). Arrays are stored per element
/// under `name[i]`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InputValues(BTreeMap<(PartyId, String), i64>);

#[derive(Debug, Error)]
pub enum InputFormatError {
    #[error("inputs JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("inputs JSON: party key `{0}` is not a number")]
    Party(String),
    #[error("inputs JSON: value of `{0}` must be an integer or an array of integers")]
    Value(String),
}

#[derive(Deserialize, Serialize)]
struct InputsFile {
    parties: BTreeMap<String, BTreeMap<String, Value>>,
}

impl InputValues {
    pub fn new() -> InputValues {
        InputValues::default()
    }

    pub fn insert(&mut self, party: PartyId, name: impl Into<String>, value: i64) {
        self.0.insert((party, name.into()), value);
    }

    pub fn insert_array(&mut self, party: PartyId, name: &str, values: &[i64]) {
        for (i, v) in values.iter().enumerate() {
            self.insert(party, format!("{name}[{i}]"), *v);
        }
    }

    pub fn get(&self, party: PartyId, name: &str) -> Option<i64> {
        self.0.get(&(party, name.to_string())).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(PartyId, String), &i64)> {
        self.0.iter()
    }

    /// Parse `{"parties": {"<id>": {"<name>": int | [int, ...]}}}`.
    pub fn from_json(text: &str) -> Result<InputValues, InputFormatError> {
        let file: InputsFile = serde_json::from_str(text)?;
        let mut out = InputValues::new();
        for (party, vars) in file.parties {
            let p: PartyId = party
                .parse()
                .map_err(|_| InputFormatError::Party(party.clone()))?;
            for (name, value) in vars {
                match &value {
                    Value::Number(n) => out.insert(
                        p,
                        name.clone(),
                        n.as_i64().ok_or(InputFormatError::Value(name))?,
                    ),
                    Value::Array(items) => {
                        let vals: Option<Vec<i64>> = items.iter().map(Value::as_i64).collect();
                        out.insert_array(
                            p,
                            &name,
                            &vals.ok_or(InputFormatError::Value(name.clone()))?,
                        );
                    }
                    _ => return Err(InputFormatError::Value(name)),
                }
            }
        }
        Ok(out)
    }
}

/// Group `name[i]` outputs back into JSON arrays; scalars stay numbers.
pub fn outputs_to_json(outputs: &BTreeMap<String, i64>) -> Value {
    let mut obj = serde_json::Map::new();
    let mut arrays: BTreeMap<String, BTreeMap<usize, i64>> = BTreeMap::new();
    for (name, v) in outputs {
        let indexed = name
            .strip_suffix(']')
            .and_then(|s| s.rsplit_once('['))
            .and_then(|(base, idx)| idx.parse::<usize>().ok().map(|i| (base, i)));
        match indexed {
            Some((base, i)) => {
                arrays.entry(base.to_string()).or_default().insert(i, *v);
            }
            None => {
                obj.insert(name.clone(), Value::from(*v));
            }
        }
    }
    for (base, elems) in arrays {
        obj.insert(base, Value::from(elems.into_values().collect::<Vec<_>>()));
    }
    Value::Object(obj)
}
