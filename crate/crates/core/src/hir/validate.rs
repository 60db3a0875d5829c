use std::fmt;

use super::{combine_meta, Circuit, GateKind, Level, Meta, NodeId, ShareMismatch};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    OperandNotEarlier {
        node: NodeId,
        operand: NodeId,
    },
    Arity {
        node: NodeId,
        kind: GateKind,
        got: usize,
    },
    LevelPurity {
        node: NodeId,
        kind: GateKind,
        level: Level,
    },
    Metadata {
        node: NodeId,
        cause: ShareMismatch,
    },
    BadThreshold {
        node: NodeId,
    },
    MissingPayload {
        node: NodeId,
    },
    IdMismatch {
        position: usize,
        id: NodeId,
    },
    InputPort {
        index: usize,
    },
    OutputPort {
        index: usize,
    },
    Bitwidth(u32),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OperandNotEarlier { node, operand } => {
                write!(
                    f,
                    "acyclicity: {node} uses {operand}, which does not precede it"
                )
            }
            Violation::Arity { node, kind, got } => {
                write!(
                    f,
                    "arity: {node} is {kind} with {got} operands, expected {}",
                    kind.arity()
                )
            }
            Violation::LevelPurity { node, kind, level } => {
                write!(
                    f,
                    "level purity: {node} is {kind} in a {level:?}-level circuit"
                )
            }
            Violation::Metadata { node, cause } => write!(f, "metadata: {node}: {cause}"),
            Violation::BadThreshold { node } => {
                write!(f, "metadata: {node} has threshold above its player count")
            }
            Violation::MissingPayload { node } => write!(f, "payload: {node} has no payload"),
            Violation::IdMismatch { position, id } => {
                write!(f, "ids: node at position {position} has id {id}")
            }
            Violation::InputPort { index } => {
                write!(f, "inputs: port {index} does not name an input node")
            }
            Violation::OutputPort { index } => {
                write!(f, "outputs: port {index} does not name a reveal node")
            }
            Violation::Bitwidth(w) => write!(f, "bitwidth {w} outside 1..=64"),
        }
    }
}

/// Check every structural invariant, collecting all violations.
pub fn validate(c: &Circuit) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if !(1..=64).contains(&c.bitwidth) {
        out.push(Violation::Bitwidth(c.bitwidth));
    }
    for (position, n) in c.nodes.iter().enumerate() {
        let id = NodeId(position);
        if n.id != id {
            out.push(Violation::IdMismatch { position, id: n.id });
        }
        if n.operands.len() != n.kind.arity() {
            out.push(Violation::Arity {
                node: id,
                kind: n.kind,
                got: n.operands.len(),
            });
        }
        let bad_operand = n.operands.iter().find(|o| o.0 >= position);
        if let Some(&operand) = bad_operand {
            out.push(Violation::OperandNotEarlier { node: id, operand });
        }
        let pure = match c.level {
            Level::Arith => n.kind.is_arith(),
            Level::Bool => n.kind.is_bool(),
            Level::Mixed => true,
        };
        if !pure {
            out.push(Violation::LevelPurity {
                node: id,
                kind: n.kind,
                level: c.level,
            });
        }
        if n.kind.needs_payload() && n.payload.is_none() {
            out.push(Violation::MissingPayload { node: id });
        }
        if let Meta::Shared {
            players, threshold, ..
        } = &n.meta
        {
            if *threshold as usize > players.len() || *threshold == 0 {
                out.push(Violation::BadThreshold { node: id });
            }
        }
        // Selector metadata is not combined: it only has to be well-formed itself.
        let data_operands: &[NodeId] = match n.kind {
            GateKind::Mux | GateKind::MuxBit if n.operands.len() == 3 => &n.operands[1..],
            _ => &n.operands,
        };
        if bad_operand.is_none() && data_operands.len() == 2 {
            let (a, b) = (
                &c.nodes[data_operands[0].0].meta,
                &c.nodes[data_operands[1].0].meta,
            );
            if let Err(cause) = combine_meta(a, b, c.scheme) {
                out.push(Violation::Metadata { node: id, cause });
            }
        }
    }
    for (index, p) in c.inputs.iter().enumerate() {
        if !c.nodes.get(p.node.0).is_some_and(|n| n.kind.is_input()) {
            out.push(Violation::InputPort { index });
        }
    }
    for (index, p) in c.outputs.iter().enumerate() {
        if !c.nodes.get(p.node.0).is_some_and(|n| n.kind.is_reveal()) {
            out.push(Violation::OutputPort { index });
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
