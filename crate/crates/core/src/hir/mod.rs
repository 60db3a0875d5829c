//! Acyclic multi-level circuit IR.
//!
//! Nodes live in an append-only vector and may only reference earlier nodes,
//! so node ids are a topological order and acyclicity is a local check.

mod meta;
mod validate;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::PartyId;
use crate::typecheck::{OwnerSet, Scheme};

pub use meta::{combine_meta, combine_share_meta, Meta, ShareMismatch};
pub use validate::{validate, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "%{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Arith,
    Bool,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    Const,
    Input,
    Add,
    Sub,
    Mul,
    /// Multiply by the plaintext scalar in the node payload.
    MulPlain,
    Lt,
    Leq,
    Eq,
    /// `Mux(s, x, y)` is `x` when `s` is nonzero, else `y`.
    Mux,
    Reveal,
    ConstBit,
    InputBit,
    And,
    Or,
    Xor,
    Not,
    MuxBit,
    RevealBit,
}

impl GateKind {
    pub const ALL: [GateKind; 19] = [
        GateKind::Const,
        GateKind::Input,
        GateKind::Add,
        GateKind::Sub,
        GateKind::Mul,
        GateKind::MulPlain,
        GateKind::Lt,
        GateKind::Leq,
        GateKind::Eq,
        GateKind::Mux,
        GateKind::Reveal,
        GateKind::ConstBit,
        GateKind::InputBit,
        GateKind::And,
        GateKind::Or,
        GateKind::Xor,
        GateKind::Not,
        GateKind::MuxBit,
        GateKind::RevealBit,
    ];

    pub fn arity(self) -> usize {
        use GateKind::*;
        match self {
            Const | Input | ConstBit | InputBit => 0,
            MulPlain | Reveal | Not | RevealBit => 1,
            Add | Sub | Mul | Lt | Leq | Eq | And | Or | Xor => 2,
            Mux | MuxBit => 3,
        }
    }

    pub fn is_bool(self) -> bool {
        use GateKind::*;
        matches!(
            self,
            ConstBit | InputBit | And | Or | Xor | Not | MuxBit | RevealBit
        )
    }

    pub fn is_arith(self) -> bool {
        !self.is_bool()
    }

    pub fn is_const(self) -> bool {
        matches!(self, GateKind::Const | GateKind::ConstBit)
    }

    pub fn is_input(self) -> bool {
        matches!(self, GateKind::Input | GateKind::InputBit)
    }

    pub fn is_reveal(self) -> bool {
        matches!(self, GateKind::Reveal | GateKind::RevealBit)
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, GateKind::Lt | GateKind::Leq | GateKind::Eq)
    }

    pub fn is_commutative(self) -> bool {
        use GateKind::*;
        matches!(self, Add | Mul | And | Or | Xor | Eq)
    }

    pub fn needs_payload(self) -> bool {
        matches!(
            self,
            GateKind::Const | GateKind::ConstBit | GateKind::MulPlain
        )
    }

    pub fn name(self) -> &'static str {
        use GateKind::*;
        match self {
            Const => "Const",
            Input => "Input",
            Add => "Add",
            Sub => "Sub",
            Mul => "Mul",
            MulPlain => "MulPlain",
            Lt => "Lt",
            Leq => "Leq",
            Eq => "Eq",
            Mux => "Mux",
            Reveal => "Reveal",
            ConstBit => "ConstBit",
            InputBit => "InputBit",
            And => "And",
            Or => "Or",
            Xor => "Xor",
            Not => "Not",
            MuxBit => "MuxBit",
            RevealBit => "RevealBit",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub kind: GateKind,
    pub operands: Vec<NodeId>,
    pub meta: Meta,
    /// Constant value for `Const`/`ConstBit`, scalar for `MulPlain`.
    #[serde(default)]
    pub payload: Option<i64>,
    /// Reveal audience.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audience: Option<OwnerSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InputPort {
    pub node: NodeId,
    pub party: PartyId,
    pub name: String,
    /// Bit position for bit-level inputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OutputPort {
    pub node: NodeId,
    pub audience: OwnerSet,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    pub level: Level,
    pub bitwidth: u32,
    pub scheme: Scheme,
    pub nodes: Vec<Node>,
    pub inputs: Vec<InputPort>,
    pub outputs: Vec<OutputPort>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HirError {
    #[error("{kind} takes {expected} operands, got {got}")]
    Arity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("operand {operand} of new node {id} does not precede it")]
    ForwardReference { id: NodeId, operand: NodeId },
    #[error("{kind} requires a payload")]
    MissingPayload { kind: GateKind },
    #[error("invalid circuit JSON: {0}")]
    Json(String),
    #[error("node at position {position} has id {id}")]
    IdMismatch { position: usize, id: NodeId },
}

impl Circuit {
    pub fn new(level: Level, bitwidth: u32, scheme: Scheme) -> Circuit {
        Circuit {
            level,
            bitwidth,
            scheme,
            nodes: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Empty circuit with the same header fields.
    pub fn empty_like(&self) -> Circuit {
        Circuit::new(self.level, self.bitwidth, self.scheme)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn add_node(
        &mut self,
        kind: GateKind,
        operands: Vec<NodeId>,
        meta: Meta,
        payload: Option<i64>,
    ) -> Result<NodeId, HirError> {
        if operands.len() != kind.arity() {
            return Err(HirError::Arity {
                kind,
                expected: kind.arity(),
                got: operands.len(),
            });
        }
        let id = NodeId(self.nodes.len());
        if let Some(&operand) = operands.iter().find(|o| o.0 >= id.0) {
            return Err(HirError::ForwardReference { id, operand });
        }
        if kind.needs_payload() && payload.is_none() {
            return Err(HirError::MissingPayload { kind });
        }
        self.nodes.push(Node {
            id,
            kind,
            operands,
            meta,
            payload,
            audience: None,
        });
        Ok(id)
    }

    pub fn gate_counts(&self) -> BTreeMap<GateKind, usize> {
        let mut counts = BTreeMap::new();
        for n in &self.nodes {
            *counts.entry(n.kind).or_insert(0) += 1;
        }
        counts
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }

    /// Nodes that use each node as an operand.
    pub fn users(&self) -> Vec<Vec<NodeId>> {
        let mut users = vec![Vec::new(); self.nodes.len()];
        for n in &self.nodes {
            for &o in &n.operands {
                users[o.0].push(n.id);
            }
        }
        users
    }

    /// Ports as (party, name, bit) keys of the input map.
    pub fn input_names(&self) -> Vec<(PartyId, String)> {
        let mut names: Vec<_> = self
            .inputs
            .iter()
            .map(|p| (p.party, p.name.clone()))
            .collect();
        names.dedup();
        names
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Circuit, HirError> {
        let c: Circuit = serde_json::from_str(text).map_err(|e| HirError::Json(e.to_string()))?;
        for (position, n) in c.nodes.iter().enumerate() {
            if n.id.0 != position {
                return Err(HirError::IdMismatch { position, id: n.id });
            }
        }
        Ok(c)
    }
}

/// Identity order; ids are topological by construction.
pub fn topological_eval_order(c: &Circuit) -> Vec<NodeId> {
    (0..c.nodes.len()).map(NodeId).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arith() -> Circuit {
        Circuit::new(Level::Arith, 16, Scheme::Generic)
    }

    #[test]
    fn sequential_ids() {
        let mut c = arith();
        assert_eq!(
            c.add_node(GateKind::Const, vec![], Meta::Plain, Some(5))
                .unwrap(),
            NodeId(0)
        );
        c.add_node(GateKind::Const, vec![], Meta::Plain, Some(6))
            .unwrap();
        let add = c
            .add_node(GateKind::Add, vec![NodeId(0), NodeId(1)], Meta::Plain, None)
            .unwrap();
        assert_eq!(add, NodeId(2));
        assert_eq!(
            topological_eval_order(&c),
            vec![NodeId(0), NodeId(1), NodeId(2)]
        );
    }

    #[test]
    fn forward_reference_rejected() {
        let mut c = arith();
        c.add_node(GateKind::Const, vec![], Meta::Plain, Some(1))
            .unwrap();
        c.add_node(GateKind::Const, vec![], Meta::Plain, Some(2))
            .unwrap();
        let e = c
            .add_node(GateKind::Add, vec![NodeId(5), NodeId(0)], Meta::Plain, None)
            .unwrap_err();
        assert_eq!(
            e,
            HirError::ForwardReference {
                id: NodeId(2),
                operand: NodeId(5)
            }
        );
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn arity_checked() {
        let mut c = arith();
        c.add_node(GateKind::Const, vec![], Meta::Plain, Some(1))
            .unwrap();
        let e = c
            .add_node(GateKind::Mux, vec![NodeId(0)], Meta::Plain, None)
            .unwrap_err();
        assert!(matches!(
            e,
            HirError::Arity {
                expected: 3,
                got: 1,
                ..
            }
        ));
    }

    #[test]
    fn json_round_trip_checks_ids() {
        let mut c = arith();
        c.add_node(GateKind::Const, vec![], Meta::Plain, Some(1))
            .unwrap();
        let text = c.to_json();
        assert_eq!(Circuit::from_json(&text).unwrap(), c);
        let tampered = text.replace("\"id\": 0", "\"id\": 3");
        assert!(matches!(
            Circuit::from_json(&tampered),
            Err(HirError::IdMismatch { .. })
        ));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(GateKind::from_name(k.name()), Some(k));
            assert_eq!(
                serde_json::to_string(&k).unwrap(),
                format!("\"{}\"", k.name())
            );
        }
    }
}
