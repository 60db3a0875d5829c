//! Bit-level gates as arithmetic over {0, 1}.

use crate::hir::{Circuit, GateKind, Level, Meta, NodeId};

/// Rewrite a Bool-level circuit to the Arith level: `And` is `Mul`, `Xor` is
/// `a + b - 2ab`, `Or` is `a + b - ab` and `Not` is `1 - a`. Ports keep their
/// bit positions.
pub fn bool_to_arith(c: &Circuit) -> Circuit {
    let mut out = Circuit::new(Level::Arith, c.bitwidth, c.scheme);
    let mut map: Vec<NodeId> = Vec::with_capacity(c.len());
    let mut one: Option<NodeId> = None;
    for n in &c.nodes {
        let ops: Vec<NodeId> = n.operands.iter().map(|o| map[o.0]).collect();
        let meta = n.meta.clone();
        let emit =
            |out: &mut Circuit, kind: GateKind, operands: Vec<NodeId>, payload: Option<i64>| {
                let m = if kind == GateKind::Const {
                    Meta::Plain
                } else {
                    meta.clone()
                };
                out.add_node(kind, operands, m, payload)
                    .expect("operands precede and arity matches")
            };
        let id = match n.kind {
            GateKind::ConstBit => emit(
                &mut out,
                GateKind::Const,
                vec![],
                Some(n.payload.unwrap_or(0) & 1),
            ),
            GateKind::InputBit => emit(&mut out, GateKind::Input, vec![], None),
            GateKind::And => emit(&mut out, GateKind::Mul, ops, None),
            GateKind::Xor | GateKind::Or => {
                let s = emit(&mut out, GateKind::Add, ops.clone(), None);
                let p = emit(&mut out, GateKind::Mul, ops, None);
                let p = if n.kind == GateKind::Xor {
                    emit(&mut out, GateKind::MulPlain, vec![p], Some(2))
                } else {
                    p
                };
                emit(&mut out, GateKind::Sub, vec![s, p], None)
            }
            GateKind::Not => {
                let k =
                    *one.get_or_insert_with(|| emit(&mut out, GateKind::Const, vec![], Some(1)));
                emit(&mut out, GateKind::Sub, vec![k, ops[0]], None)
            }
            GateKind::MuxBit => emit(&mut out, GateKind::Mux, ops, None),
            GateKind::RevealBit => {
                let r = emit(&mut out, GateKind::Reveal, ops, None);
                out.nodes[r.0].audience = n.audience.clone();
                r
            }
            // Word-level gates are copied unchanged.
            kind => {
                let r = emit(&mut out, kind, ops, n.payload);
                out.nodes[r.0].audience = n.audience.clone();
                r
            }
        };
        map.push(id);
    }
    for p in &c.inputs {
        let mut p = p.clone();
        p.node = map[p.node.0];
        out.inputs.push(p);
    }
    for p in &c.outputs {
        let mut p = p.clone();
        p.node = map[p.node.0];
        out.outputs.push(p);
    }
    out
}
