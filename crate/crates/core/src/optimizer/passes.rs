//! Local cleanup passes. Each builds a new circuit in one forward sweep.

use std::collections::HashMap;

use crate::backends::eval_gate;
use crate::hir::{Circuit, GateKind, Meta, Node, NodeId};
use crate::typecheck::OwnerSet;

/// Output circuit under construction plus the old-to-new id map.
pub(super) struct Rewriter {
    pub out: Circuit,
    map: Vec<NodeId>,
}

impl Rewriter {
    pub fn new(c: &Circuit) -> Rewriter {
        Rewriter {
            out: c.empty_like(),
            map: Vec::with_capacity(c.len()),
        }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        self.out.node(id)
    }

    /// Append a node and return its id.
    pub fn emit(
        &mut self,
        kind: GateKind,
        operands: Vec<NodeId>,
        meta: Meta,
        payload: Option<i64>,
    ) -> NodeId {
        self.out
            .add_node(kind, operands, meta, payload)
            .expect("rewrites keep operands earlier and arity intact")
    }

    pub fn emit_like(&mut self, n: &Node, operands: Vec<NodeId>) -> NodeId {
        let id = self.emit(n.kind, operands, n.meta.clone(), n.payload);
        self.out.nodes[id.0].audience = n.audience.clone();
        id
    }

    pub fn konst(&mut self, kind: GateKind, v: i64) -> NodeId {
        self.emit(kind, vec![], Meta::Plain, Some(v))
    }

    /// Operands of `n` translated to output ids.
    pub fn operands(&self, n: &Node) -> Vec<NodeId> {
        n.operands.iter().map(|o| self.map[o.0]).collect()
    }

    pub fn mapped(&self, old: NodeId) -> NodeId {
        self.map[old.0]
    }

    pub fn bind(&mut self, id: NodeId) {
        self.map.push(id);
    }

    /// Rebind ports and return the finished circuit.
    pub fn finish(mut self, c: &Circuit) -> Circuit {
        for p in &c.inputs {
            let mut p = p.clone();
            p.node = self.map[p.node.0];
            self.out.inputs.push(p);
        }
        for p in &c.outputs {
            let mut p = p.clone();
            p.node = self.map[p.node.0];
            self.out.outputs.push(p);
        }
        self.out
    }
}

/// Rebuild `c`, letting `f` choose the output id of each node given its
/// translated operands.
pub(super) fn rebuild(
    c: &Circuit,
    mut f: impl FnMut(&mut Rewriter, &Node, Vec<NodeId>) -> NodeId,
) -> Circuit {
    let mut rw = Rewriter::new(c);
    for n in &c.nodes {
        let ops = rw.operands(n);
        let id = f(&mut rw, n, ops);
        rw.bind(id);
    }
    rw.finish(c)
}

fn const_value(rw: &Rewriter, id: NodeId) -> Option<i64> {
    let n = rw.node(id);
    if n.kind.is_const() {
        n.payload
    } else {
        None
    }
}

/// Gates whose operands are all constants become constants.
pub fn const_fold(c: &Circuit) -> Circuit {
    let w = c.bitwidth;
    rebuild(c, |rw, n, ops| {
        let foldable = !ops.is_empty() && !n.kind.is_reveal() && !n.kind.is_input();
        if foldable {
            let vals: Option<Vec<i64>> = ops.iter().map(|&o| const_value(rw, o)).collect();
            if let Some(vals) = vals {
                let v = eval_gate(n.kind, n.payload, &vals, w);
                let kind = if n.kind.is_bool() {
                    GateKind::ConstBit
                } else {
                    GateKind::Const
                };
                return rw.konst(kind, v);
            }
        }
        rw.emit_like(n, ops)
    })
}

/// Local algebraic identities.
pub fn peephole(c: &Circuit) -> Circuit {
    use GateKind::*;
    rebuild(c, |rw, n, ops| {
        let k = |i: usize| const_value(rw, ops[i]);
        let replacement = match n.kind {
            Add | Or | Xor => match (k(0), k(1)) {
                (Some(0), _) => Some(ops[1]),
                (_, Some(0)) => Some(ops[0]),
                _ => None,
            },
            Sub if k(1) == Some(0) => Some(ops[0]),
            Mul | And => match (k(0), k(1)) {
                (Some(1), _) => Some(ops[1]),
                (_, Some(1)) => Some(ops[0]),
                (Some(0), _) if n.kind == And => Some(ops[0]),
                (_, Some(0)) if n.kind == And => Some(ops[1]),
                _ => None,
            },
            Mux | MuxBit => match k(0) {
                Some(s) => Some(if s != 0 { ops[1] } else { ops[2] }),
                None if ops[1] == ops[2] => Some(ops[1]),
                None => None,
            },
            Not => {
                let inner = rw.node(ops[0]);
                (inner.kind == Not).then(|| inner.operands[0])
            }
            _ => None,
        };
        match replacement {
            Some(id) => id,
            None => rw.emit_like(n, ops),
        }
    })
}

/// Multiplications by a plaintext constant become `MulPlain`, and
/// `MulPlain` by 0 or 1 disappears.
pub fn strength_reduce(c: &Circuit) -> Circuit {
    rebuild(c, |rw, n, ops| match n.kind {
        GateKind::Mul => match (const_value(rw, ops[0]), const_value(rw, ops[1])) {
            (Some(_), Some(_)) | (None, None) => rw.emit_like(n, ops),
            (Some(s), None) => rw.emit(GateKind::MulPlain, vec![ops[1]], n.meta.clone(), Some(s)),
            (None, Some(s)) => rw.emit(GateKind::MulPlain, vec![ops[0]], n.meta.clone(), Some(s)),
        },
        GateKind::MulPlain => match n.payload {
            Some(0) => rw.konst(GateKind::Const, 0),
            Some(1) => ops[0],
            _ => rw.emit_like(n, ops),
        },
        _ => rw.emit_like(n, ops),
    })
}

#[derive(PartialEq, Eq, Hash)]
struct NodeKey {
    kind: GateKind,
    operands: Vec<NodeId>,
    payload: Option<i64>,
    meta: Meta,
    audience: Option<OwnerSet>,
}

/// Merge structurally identical nodes. Commutative gates are keyed on
/// sorted operands. Inputs are never merged.
pub fn cse(c: &Circuit) -> Circuit {
    let mut seen: HashMap<NodeKey, NodeId> = HashMap::new();
    rebuild(c, |rw, n, mut ops| {
        if n.kind.is_input() {
            return rw.emit_like(n, ops);
        }
        if n.kind.is_commutative() {
            ops.sort();
        }
        let key = NodeKey {
            kind: n.kind,
            operands: ops.clone(),
            payload: n.payload,
            meta: n.meta.clone(),
            audience: n.audience.clone(),
        };
        if let Some(&id) = seen.get(&key) {
            return id;
        }
        let id = rw.emit_like(n, ops);
        seen.insert(key, id);
        id
    })
}

/// Drop nodes that no output depends on. Inputs stay so that the circuit's
/// input interface is unchanged.
pub fn dce(c: &Circuit) -> Circuit {
    let mut live = vec![false; c.len()];
    for p in &c.outputs {
        live[p.node.0] = true;
    }
    for n in &c.nodes {
        if n.kind.is_input() {
            live[n.id.0] = true;
        }
    }
    for n in c.nodes.iter().rev() {
        if live[n.id.0] {
            for o in &n.operands {
                live[o.0] = true;
            }
        }
    }
    let mut rw = Rewriter::new(c);
    for n in &c.nodes {
        if live[n.id.0] {
            let ops = rw.operands(n);
            let id = rw.emit_like(n, ops);
            rw.bind(id);
        } else {
            // Never read: dead nodes have no live users.
            rw.bind(NodeId(usize::MAX));
        }
    }
    rw.finish(c)
}
