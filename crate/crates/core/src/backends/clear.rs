//! Reference interpreter over machine words of the circuit's bitwidth.

use std::collections::BTreeMap;

use super::{ExecError, InputValues};
use crate::hir::{validate, Circuit, GateKind, NodeId};

/// Reduce `v` to a `w`-bit two's-complement value.
pub fn wrap(v: i64, w: u32) -> i64 {
    if w >= 64 {
        v
    } else {
        let m = 1i128 << w;
        let r = (v as i128).rem_euclid(m);
        (if r >= m / 2 { r - m } else { r }) as i64
    }
}

/// Largest magnitude (exclusive) allowed for inputs at bitwidth `w`.
pub fn input_limit(w: u32) -> i64 {
    1i64 << (w.saturating_sub(2)).min(62)
}

/// Value of one input port, checking the range contract.
pub(crate) fn read_input(c: &Circuit, inputs: &InputValues, port: usize) -> Result<i64, ExecError> {
    let p = &c.inputs[port];
    let v = inputs
        .get(p.party, &p.name)
        .ok_or_else(|| ExecError::MissingInput {
            party: p.party,
            name: p.name.clone(),
        })?;
    if v.unsigned_abs() >= input_limit(c.bitwidth) as u64 {
        return Err(ExecError::OverflowContract {
            name: p.name.clone(),
            value: v,
            bitwidth: c.bitwidth,
        });
    }
    Ok(match p.bit {
        Some(b) => (v >> b.min(63)) & 1,
        None => v,
    })
}

/// Value of a non-input gate from its operand values.
pub fn eval_gate(kind: GateKind, payload: Option<i64>, args: &[i64], w: u32) -> i64 {
    let arg = |i: usize| args[i];
    match kind {
        GateKind::Const => wrap(payload.unwrap_or(0), w),
        GateKind::ConstBit => payload.unwrap_or(0) & 1,
        GateKind::Input | GateKind::InputBit => 0,
        GateKind::Add => wrap(arg(0).wrapping_add(arg(1)), w),
        GateKind::Sub => wrap(arg(0).wrapping_sub(arg(1)), w),
        GateKind::Mul => wrap(arg(0).wrapping_mul(arg(1)), w),
        GateKind::MulPlain => wrap(arg(0).wrapping_mul(payload.unwrap_or(0)), w),
        GateKind::Lt => (arg(0) < arg(1)) as i64,
        GateKind::Leq => (arg(0) <= arg(1)) as i64,
        GateKind::Eq => (arg(0) == arg(1)) as i64,
        GateKind::Mux | GateKind::MuxBit => {
            if arg(0) != 0 {
                arg(1)
            } else {
                arg(2)
            }
        }
        GateKind::Reveal | GateKind::RevealBit => arg(0),
        GateKind::And => arg(0) & arg(1) & 1,
        GateKind::Or => (arg(0) | arg(1)) & 1,
        GateKind::Xor => (arg(0) ^ arg(1)) & 1,
        GateKind::Not => 1 - (arg(0) & 1),
    }
}

/// Evaluate every node in id order and return all node values.
pub fn evaluate_nodes(c: &Circuit, inputs: &InputValues) -> Result<Vec<i64>, ExecError> {
    validate(c).map_err(ExecError::Invalid)?;
    let mut input_of: BTreeMap<NodeId, usize> = BTreeMap::new();
    for (i, p) in c.inputs.iter().enumerate() {
        input_of.insert(p.node, i);
    }
    let w = c.bitwidth;
    let mut vals: Vec<i64> = Vec::with_capacity(c.nodes.len());
    for n in &c.nodes {
        let v = match n.kind {
            GateKind::Input | GateKind::InputBit => match input_of.get(&n.id) {
                Some(&port) => read_input(c, inputs, port)?,
                None => return Err(ExecError::UnboundInputNode(n.id)),
            },
            kind => {
                let args: Vec<i64> = n.operands.iter().map(|o| vals[o.0]).collect();
                eval_gate(kind, n.payload, &args, w)
            }
        };
        vals.push(v);
    }
    Ok(vals)
}

/// Collect named outputs from node values; bit-level ports are reassembled
/// into sign-extended words.
pub(crate) fn collect_outputs(
    c: &Circuit,
    value_of: impl Fn(NodeId) -> i64,
) -> BTreeMap<String, i64> {
    let mut out = BTreeMap::new();
    let mut words: BTreeMap<String, u64> = BTreeMap::new();
    for p in &c.outputs {
        let v = value_of(p.node);
        match p.bit {
            None => {
                out.insert(p.name.clone(), v);
            }
            Some(b) => {
                let word = words.entry(p.name.clone()).or_insert(0);
                if v & 1 == 1 && b < 64 {
                    *word |= 1 << b;
                }
            }
        }
    }
    for (name, bits) in words {
        out.insert(name, wrap(bits as i64, c.bitwidth));
    }
    out
}

/// Run the circuit on cleartext inputs and return its named outputs.
pub fn interpret_clear(
    c: &Circuit,
    inputs: &InputValues,
) -> Result<BTreeMap<String, i64>, ExecError> {
    let vals = evaluate_nodes(c, inputs)?;
    Ok(collect_outputs(c, |id| vals[id.0]))
}
