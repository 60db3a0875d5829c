//! Resource estimation by walking a circuit once in id order.
//!
//! A [`CostModel`] prices each gate kind with a vector of named resources
//! and a depth weight. [`estimate`] sums the vectors, measures the weighted
//! critical path, and derives the offline-phase material a secret-sharing
//! backend must prepare.

mod model;
mod rational;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hir::{validate, Circuit, GateKind, Level, Node, Violation};
use crate::lowering::{bitblast, BitblastError};

pub use model::{CostModel, CostVector, Preprocessing, BUILTIN_MODELS};
pub use rational::{Cost, ParseCostError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EstimateError {
    #[error("cost model `{model}` has no entry for {kind}")]
    Coverage { model: String, kind: GateKind },
    #[error("objective `{0}` is not priced by every model")]
    ObjectiveMissing(String),
    #[error("invalid cost model: {0}")]
    ModelFormat(String),
    #[error("invalid circuit: {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
    #[error("{model} prices {model_level:?} circuits; cannot price a {circuit_level:?} circuit")]
    Level {
        model: String,
        model_level: Level,
        circuit_level: Level,
    },
    #[error(transparent)]
    Bitblast(#[from] BitblastError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessingReport {
    pub triples: Cost,
    pub random_bits: Cost,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub model_name: String,
    pub totals: BTreeMap<String, Cost>,
    pub gate_counts: BTreeMap<GateKind, usize>,
    pub depth: u64,
    pub preprocessing: PreprocessingReport,
}

impl ResourceReport {
    pub fn count(&self, kind: GateKind) -> usize {
        self.gate_counts.get(&kind).copied().unwrap_or(0)
    }

    /// Sum of every resource total.
    pub fn grand_total(&self) -> Cost {
        self.totals.values().copied().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Per-node transfer function for a single forward walk. Operands are
/// visited before their users, so `operands` holds finished states.
pub trait Accumulator {
    type State;
    fn visit(&mut self, node: &Node, operands: &[&Self::State]) -> Self::State;
}

/// Visit every node in id order and return the state of each node.
pub fn walk<A: Accumulator>(c: &Circuit, acc: &mut A) -> Vec<A::State> {
    let mut states: Vec<A::State> = Vec::with_capacity(c.len());
    for n in &c.nodes {
        let ops: Vec<&A::State> = n.operands.iter().map(|o| &states[o.0]).collect();
        let s = acc.visit(n, &ops);
        states.push(s);
    }
    states
}

/// Longest path ending at each node, each node adding its own weight.
struct DepthAccumulator<'m> {
    weight: &'m dyn Fn(GateKind) -> u64,
}

impl Accumulator for DepthAccumulator<'_> {
    type State = u64;

    fn visit(&mut self, node: &Node, operands: &[&u64]) -> u64 {
        let below = operands.iter().map(|d| **d).max().unwrap_or(0);
        below + (self.weight)(node.kind)
    }
}

/// Gate counts and resource totals, including edge charges.
struct CostAccumulator<'m> {
    model: &'m CostModel,
    totals: BTreeMap<String, Cost>,
    counts: BTreeMap<GateKind, usize>,
    missing: Option<GateKind>,
}

impl CostAccumulator<'_> {
    fn charge(&mut self, v: &CostVector) {
        for (r, c) in v {
            let t = self.totals.entry(r.clone()).or_insert(Cost::ZERO);
            *t = *t + *c;
        }
    }
}

impl Accumulator for CostAccumulator<'_> {
    type State = GateKind;

    fn visit(&mut self, node: &Node, operands: &[&GateKind]) -> GateKind {
        *self.counts.entry(node.kind).or_insert(0) += 1;
        match self.model.gate_cost(node.kind) {
            Some(v) => self.charge(v),
            None => {
                self.missing.get_or_insert(node.kind);
            }
        }
        for from in operands {
            if let Some(v) = self.model.edge_cost(**from, node.kind) {
                self.charge(v);
            }
        }
        node.kind
    }
}

/// Weighted critical path: the largest sum of weights along any path.
/// Constants and inputs weigh nothing.
pub fn critical_path(c: &Circuit, depth_weights: &BTreeMap<GateKind, u64>) -> u64 {
    let weight = |k: GateKind| {
        if k.is_const() || k.is_input() {
            0
        } else {
            depth_weights.get(&k).copied().unwrap_or(0)
        }
    };
    let mut acc = DepthAccumulator { weight: &weight };
    walk(c, &mut acc).into_iter().max().unwrap_or(0)
}

/// Offline material for the circuit: one multiplication triple per `Mul`
/// and `Mux`, plus the per-comparison triples and random bits.
pub fn preprocessing_requirements(c: &Circuit, p: &Preprocessing) -> PreprocessingReport {
    let muls = (c.count(GateKind::Mul) + c.count(GateKind::Mux)) as i64;
    let cmps = c.nodes.iter().filter(|n| n.kind.is_comparison()).count() as i64;
    PreprocessingReport {
        triples: p.triples_per_mul * Cost::int(muls)
            + p.triples_per_comparison(c.bitwidth) * Cost::int(cmps),
        random_bits: p.bits_per_comparison(c.bitwidth) * Cost::int(cmps),
    }
}

/// Price a circuit at the model's level.
pub fn estimate(c: &Circuit, m: &CostModel) -> Result<ResourceReport, EstimateError> {
    validate(c).map_err(EstimateError::Invalid)?;
    let mut acc = CostAccumulator {
        model: m,
        totals: BTreeMap::new(),
        counts: BTreeMap::new(),
        missing: None,
    };
    walk(c, &mut acc);
    if let Some(kind) = acc.missing {
        return Err(EstimateError::Coverage {
            model: m.name.clone(),
            kind,
        });
    }
    let mut totals = acc.totals;
    for r in m.resources() {
        totals.entry(r).or_insert(Cost::ZERO);
    }
    Ok(ResourceReport {
        model_name: m.name.clone(),
        totals,
        gate_counts: acc.counts,
        depth: critical_path(c, &m.depth_weights),
        preprocessing: preprocessing_requirements(c, &m.preprocessing),
    })
}

/// Estimate under the model, bit-blasting first when a Bool-level model is
/// asked to price an Arith-level circuit.
pub fn estimate_at_model_level(
    c: &Circuit,
    m: &CostModel,
) -> Result<ResourceReport, EstimateError> {
    match (m.level, c.level) {
        (Level::Bool, Level::Arith) => estimate(&bitblast(c)?, m),
        (Level::Arith, Level::Bool) => Err(EstimateError::Level {
            model: m.name.clone(),
            model_level: m.level,
            circuit_level: c.level,
        }),
        _ => estimate(c, m),
    }
}

/// Models ordered by their total of `objective`, cheapest first; equal
/// totals are ordered by model name.
pub fn rank_backends(
    c: &Circuit,
    models: &[CostModel],
    objective: &str,
) -> Result<Vec<(String, Cost)>, EstimateError> {
    if models
        .iter()
        .any(|m| !m.resources().iter().any(|r| r == objective))
    {
        return Err(EstimateError::ObjectiveMissing(objective.to_string()));
    }
    let mut ranked = Vec::with_capacity(models.len());
    for m in models {
        let report = estimate_at_model_level(c, m)?;
        ranked.push((m.name.clone(), report.totals[objective]));
    }
    ranked.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(ranked)
}
