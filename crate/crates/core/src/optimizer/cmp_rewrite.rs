//! Swap between equivalent comparison encodings when the model says the
//! other one is cheaper.
//!
//! Recognized shapes, with `one` a constant 1 and every inner comparison
//! used only by the root:
//!
//! * `a >= b`: `(b < a) + (a == b)` and `1 - (a < b)`
//! * `a != b`: `1 - (a == b)` and `(a < b) + (b < a)`

use crate::estimator::{Cost, CostModel};
use crate::hir::{Circuit, GateKind, Meta, Node, NodeId};

use super::passes::{dce, Rewriter};

/// Encoding of a recognized comparison, over old-circuit operand ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    GeqDirect { hi: NodeId, lo: NodeId },
    GeqRewrite { hi: NodeId, lo: NodeId },
    NeEq { a: NodeId, b: NodeId },
    NeLt { a: NodeId, b: NodeId },
}

impl Shape {
    fn alternative(self) -> Shape {
        match self {
            Shape::GeqDirect { hi, lo } => Shape::GeqRewrite { hi, lo },
            Shape::GeqRewrite { hi, lo } => Shape::GeqDirect { hi, lo },
            Shape::NeEq { a, b } => Shape::NeLt { a, b },
            Shape::NeLt { a, b } => Shape::NeEq { a, b },
        }
    }

    /// Gates the shape spends besides its operands and the constant.
    fn gates(self) -> &'static [GateKind] {
        use GateKind::*;
        match self {
            Shape::GeqDirect { .. } => &[Lt, Eq, Add],
            Shape::GeqRewrite { .. } => &[Lt, Sub],
            Shape::NeEq { .. } => &[Eq, Sub],
            Shape::NeLt { .. } => &[Lt, Lt, Add],
        }
    }
}

/// Sum of all resources over the given gates, or `None` if the model does
/// not price one of them.
fn price(model: &CostModel, gates: &[GateKind]) -> Option<Cost> {
    gates
        .iter()
        .map(|k| {
            model
                .gate_cost(*k)
                .map(|v| v.values().copied().sum::<Cost>())
        })
        .sum()
}

fn is_one(c: &Circuit, id: NodeId) -> bool {
    let n = c.node(id);
    n.kind == GateKind::Const && n.payload == Some(1)
}

fn recognize(c: &Circuit, users: &[Vec<NodeId>], root: &Node) -> Option<Shape> {
    let private = |id: NodeId| users[id.0].len() == 1 && !c.node(id).meta.is_plain();
    let ops = &root.operands;
    match root.kind {
        GateKind::Sub if is_one(c, ops[0]) && private(ops[1]) => {
            let inner = c.node(ops[1]);
            let (x, y) = (
                inner.operands.first().copied()?,
                inner.operands.get(1).copied()?,
            );
            match inner.kind {
                GateKind::Lt => Some(Shape::GeqRewrite { hi: x, lo: y }),
                GateKind::Eq => Some(Shape::NeEq { a: x, b: y }),
                _ => None,
            }
        }
        GateKind::Add if private(ops[0]) && private(ops[1]) && ops[0] != ops[1] => {
            let (l, r) = (c.node(ops[0]), c.node(ops[1]));
            let same_pair = |p: &Node, q: &Node| {
                (p.operands[0] == q.operands[0] && p.operands[1] == q.operands[1])
                    || (p.operands[0] == q.operands[1] && p.operands[1] == q.operands[0])
            };
            match (l.kind, r.kind) {
                (GateKind::Lt, GateKind::Eq) if same_pair(l, r) => Some(Shape::GeqDirect {
                    hi: l.operands[1],
                    lo: l.operands[0],
                }),
                (GateKind::Eq, GateKind::Lt) if same_pair(l, r) => Some(Shape::GeqDirect {
                    hi: r.operands[1],
                    lo: r.operands[0],
                }),
                (GateKind::Lt, GateKind::Lt)
                    if l.operands[0] == r.operands[1] && l.operands[1] == r.operands[0] =>
                {
                    Some(Shape::NeLt {
                        a: l.operands[0],
                        b: l.operands[1],
                    })
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// Emit `shape` over already-translated operands.
fn emit(rw: &mut Rewriter, shape: Shape, cmp_meta: &Meta, root_meta: &Meta) -> NodeId {
    let gate =
        |rw: &mut Rewriter, kind, x, y, meta: &Meta| rw.emit(kind, vec![x, y], meta.clone(), None);
    match shape {
        Shape::GeqDirect { hi, lo } => {
            let above = gate(rw, GateKind::Lt, lo, hi, cmp_meta);
            let same = gate(rw, GateKind::Eq, hi, lo, cmp_meta);
            gate(rw, GateKind::Add, above, same, root_meta)
        }
        Shape::GeqRewrite { hi, lo } => {
            let below = gate(rw, GateKind::Lt, hi, lo, cmp_meta);
            let one = rw.konst(GateKind::Const, 1);
            gate(rw, GateKind::Sub, one, below, root_meta)
        }
        Shape::NeEq { a, b } => {
            let same = gate(rw, GateKind::Eq, a, b, cmp_meta);
            let one = rw.konst(GateKind::Const, 1);
            gate(rw, GateKind::Sub, one, same, root_meta)
        }
        Shape::NeLt { a, b } => {
            let below = gate(rw, GateKind::Lt, a, b, cmp_meta);
            let above = gate(rw, GateKind::Lt, b, a, cmp_meta);
            gate(rw, GateKind::Add, below, above, root_meta)
        }
    }
}

fn translate(shape: Shape, map: impl Fn(NodeId) -> NodeId) -> Shape {
    match shape {
        Shape::GeqDirect { hi, lo } => Shape::GeqDirect {
            hi: map(hi),
            lo: map(lo),
        },
        Shape::GeqRewrite { hi, lo } => Shape::GeqRewrite {
            hi: map(hi),
            lo: map(lo),
        },
        Shape::NeEq { a, b } => Shape::NeEq {
            a: map(a),
            b: map(b),
        },
        Shape::NeLt { a, b } => Shape::NeLt {
            a: map(a),
            b: map(b),
        },
    }
}

/// Re-encode every recognized comparison whose alternative is strictly
/// cheaper under `model`. Replaced inner gates are removed.
pub fn cmp_rewrite(c: &Circuit, model: &CostModel) -> Circuit {
    let users = c.users();
    let mut rw = Rewriter::new(c);
    let mut changed = false;
    for n in &c.nodes {
        let ops = rw.operands(n);
        let choice = recognize(c, &users, n).filter(|s| {
            let (now, alt) = (
                price(model, s.gates()),
                price(model, s.alternative().gates()),
            );
            matches!((now, alt), (Some(now), Some(alt)) if alt < now)
        });
        let id = match choice {
            Some(shape) => {
                changed = true;
                let cmp_meta = c.node(n.operands[1]).meta.clone();
                let alt = translate(shape.alternative(), |id| rw.mapped(id));
                emit(&mut rw, alt, &cmp_meta, &n.meta)
            }
            None => rw.emit_like(n, ops),
        };
        rw.bind(id);
    }
    let out = rw.finish(c);
    if changed {
        dce(&out)
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::backends::{interpret_clear, InputValues};
    use crate::frontend::parse_source;
    use crate::lowering::{lower_program, CmpEncoding, LowerConfig};
    use crate::typecheck::{check_program, Scheme};

    fn lower(src: &str, enc: CmpEncoding) -> Circuit {
        let tp = check_program(&parse_source(src).unwrap(), Scheme::Generic).unwrap();
        lower_program(
            &tp,
            &LowerConfig {
                bitwidth: 16,
                comparison_encoding: enc,
                ..LowerConfig::default()
            },
        )
        .unwrap()
    }

    fn op_counts(c: &Circuit) -> BTreeMap<GateKind, usize> {
        let mut m = c.gate_counts();
        for k in [GateKind::Input, GateKind::Const, GateKind::Reveal] {
            m.remove(&k);
        }
        m
    }

    const GEQ: &str =
        "parties 0, 1; input a : int from 0; input b : int from 1; output eval({0,1}, a >= b);";
    const NE: &str =
        "parties 0, 1; input a : int from 0; input b : int from 1; output eval({0,1}, a != b);";

    fn model_with(overrides: &[(GateKind, i64)]) -> CostModel {
        let mut m = CostModel::default_secret_sharing();
        for (k, v) in overrides {
            m.gate_costs
                .insert(*k, BTreeMap::from([("rounds".to_string(), Cost::int(*v))]));
        }
        m
    }

    fn agree(x: &Circuit, y: &Circuit) {
        for (a, b) in [(3, 5), (5, 3), (4, 4), (-2, 1)] {
            let mut inputs = InputValues::new();
            inputs.insert(0, "a", a);
            inputs.insert(1, "b", b);
            assert_eq!(
                interpret_clear(x, &inputs).unwrap(),
                interpret_clear(y, &inputs).unwrap()
            );
        }
    }

    #[test]
    fn geq_prefers_rewrite_under_secret_sharing() {
        use GateKind::*;
        let c = lower(GEQ, CmpEncoding::Direct);
        let r = cmp_rewrite(&c, &CostModel::default_secret_sharing());
        assert_eq!(op_counts(&r), BTreeMap::from([(Lt, 1), (Sub, 1)]));
        agree(&c, &r);
    }

    #[test]
    fn direct_kept_when_sub_is_prohibitive() {
        let c = lower(GEQ, CmpEncoding::Direct);
        let m = model_with(&[(GateKind::Eq, 0), (GateKind::Sub, i64::MAX / 4)]);
        assert_eq!(cmp_rewrite(&c, &m), c);
        let r = lower(GEQ, CmpEncoding::RewriteGeq);
        let back = cmp_rewrite(&r, &m);
        assert_eq!(op_counts(&back), op_counts(&c));
        agree(&r, &back);
    }

    #[test]
    fn ne_picks_the_cheaper_form() {
        use GateKind::*;
        let c = lower(NE, CmpEncoding::Auto);
        for m in [
            CostModel::default_secret_sharing(),
            model_with(&[(Eq, 100)]),
            model_with(&[(Lt, 100)]),
        ] {
            let r = cmp_rewrite(&c, &m);
            let eq_form = price(&m, &[Eq, Sub]).unwrap();
            let lt_form = price(&m, &[Lt, Lt, Add]).unwrap();
            let expected = if lt_form < eq_form {
                BTreeMap::from([(Lt, 2), (Add, 1)])
            } else {
                BTreeMap::from([(Eq, 1), (Sub, 1)])
            };
            assert_eq!(op_counts(&r), expected);
            agree(&c, &r);
        }
    }

    #[test]
    fn shared_comparison_left_alone() {
        let mut c = lower(GEQ, CmpEncoding::Direct);
        let eq = c.nodes.iter().find(|n| n.kind == GateKind::Eq).unwrap().id;
        let r = c
            .add_node(GateKind::Reveal, vec![eq], Meta::Plain, None)
            .unwrap();
        let mut port = c.outputs[0].clone();
        port.node = r;
        port.name = "e".into();
        c.outputs.push(port);
        assert_eq!(cmp_rewrite(&c, &CostModel::default_secret_sharing()), c);
    }
}
