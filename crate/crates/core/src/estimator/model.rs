use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Cost, EstimateError};
use crate::hir::{GateKind, Level};

/// Resource name to cost, e.g. `{"rounds": 1, "communication": 1}`.
pub type CostVector = BTreeMap<String, Cost>;

/// Offline-phase material consumed per gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preprocessing {
    #[serde(default = "one")]
    pub triples_per_mul: Cost,
    /// Defaults to `20 × bitwidth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples_per_comparison: Option<Cost>,
    /// Defaults to `bitwidth`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits_per_comparison: Option<Cost>,
}

fn one() -> Cost {
    Cost::int(1)
}

impl Default for Preprocessing {
    fn default() -> Self {
        Preprocessing {
            triples_per_mul: one(),
            triples_per_comparison: None,
            bits_per_comparison: None,
        }
    }
}

impl Preprocessing {
    pub fn triples_per_comparison(&self, bitwidth: u32) -> Cost {
        self.triples_per_comparison
            .unwrap_or(Cost::int(20 * i64::from(bitwidth)))
    }

    pub fn bits_per_comparison(&self, bitwidth: u32) -> Cost {
        self.bits_per_comparison
            .unwrap_or(Cost::int(i64::from(bitwidth)))
    }
}

/// Prices of gates and edges for one backend.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostModel {
    pub name: String,
    /// Circuit level the model prices; Arith circuits are bit-blasted
    /// before being priced by a Bool model.
    #[serde(default = "arith_level")]
    pub level: Level,
    pub gate_costs: BTreeMap<GateKind, CostVector>,
    #[serde(default)]
    pub depth_weights: BTreeMap<GateKind, u64>,
    /// Keyed `"Src->Dst"`: charged once per operand edge from a `Src` node
    /// into a `Dst` node.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_costs: BTreeMap<String, CostVector>,
    #[serde(default)]
    pub preprocessing: Preprocessing,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prime_modulus: Option<u64>,
}

fn arith_level() -> Level {
    Level::Arith
}

const ARITH_JSON: &str = include_str!("../../models/arith.json");
const SECRET_SHARING_JSON: &str = include_str!("../../models/secret-sharing.json");
const BOOLEAN_JSON: &str = include_str!("../../models/boolean.json");

/// Names accepted by [`CostModel::builtin`].
pub const BUILTIN_MODELS: [&str; 3] = ["arith", "secret-sharing", "boolean"];

impl CostModel {
    /// Parse a model and check it prices every gate of its level.
    pub fn from_json(text: &str) -> Result<CostModel, EstimateError> {
        let m: CostModel =
            serde_json::from_str(text).map_err(|e| EstimateError::ModelFormat(e.to_string()))?;
        for key in m.edge_costs.keys() {
            let ok = key.split_once("->").is_some_and(|(a, b)| {
                GateKind::from_name(a.trim()).is_some() && GateKind::from_name(b.trim()).is_some()
            });
            if !ok {
                return Err(EstimateError::ModelFormat(format!("bad edge key `{key}`")));
            }
        }
        if let Some(kind) = GateKind::ALL
            .into_iter()
            .find(|k| m.level_contains(*k) && !m.gate_costs.contains_key(k))
        {
            return Err(EstimateError::Coverage {
                model: m.name,
                kind,
            });
        }
        Ok(m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization is infallible")
    }

    pub fn builtin(name: &str) -> Option<CostModel> {
        let text = match name {
            "arith" => ARITH_JSON,
            "secret-sharing" => SECRET_SHARING_JSON,
            "boolean" => BOOLEAN_JSON,
            _ => return None,
        };
        Some(CostModel::from_json(text).expect("shipped models are valid"))
    }

    /// The model `cmp_rewrite` and the CLI use when none is given.
    pub fn default_secret_sharing() -> CostModel {
        CostModel::builtin("secret-sharing").expect("builtin exists")
    }

    fn level_contains(&self, k: GateKind) -> bool {
        match self.level {
            Level::Arith => k.is_arith(),
            Level::Bool => k.is_bool(),
            Level::Mixed => true,
        }
    }

    pub fn gate_cost(&self, k: GateKind) -> Option<&CostVector> {
        self.gate_costs.get(&k)
    }

    pub fn edge_cost(&self, from: GateKind, to: GateKind) -> Option<&CostVector> {
        if self.edge_costs.is_empty() {
            return None;
        }
        self.edge_costs.get(&format!("{from}->{to}"))
    }

    pub fn depth_weight(&self, k: GateKind) -> u64 {
        if k.is_const() || k.is_input() {
            return 0;
        }
        self.depth_weights.get(&k).copied().unwrap_or(0)
    }

    /// Resource names priced by any gate or edge.
    pub fn resources(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .gate_costs
            .values()
            .chain(self.edge_costs.values())
            .flat_map(|v| v.keys().cloned())
            .collect();
        names.sort();
        names.dedup();
        names
    }
}
