//! Compile-time values and the gate-emitting operations over them.
//!
//! A plaintext value known at compile time is folded instead of emitted. It
//! keeps the arithmetic it came from so that using it as a circuit operand
//! reproduces that arithmetic as nodes.

use std::rc::Rc;

use crate::backends::wrap;
use crate::hir::{GateKind, NodeId};

use super::builder::Builder;
use super::LowerError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlainTree {
    Lit(i64),
    Op(GateKind, Rc<PlainTree>, Rc<PlainTree>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Val {
    Plain(i64, Rc<PlainTree>),
    Wire(NodeId),
    Array(Vec<Val>),
}

impl Val {
    pub fn lit(v: i64) -> Val {
        Val::Plain(v, Rc::new(PlainTree::Lit(v)))
    }

    pub fn as_plain(&self) -> Option<i64> {
        match self {
            Val::Plain(v, _) => Some(*v),
            _ => None,
        }
    }

    /// Forget how a plaintext value was computed.
    pub fn collapse(self) -> Val {
        match self {
            Val::Plain(v, _) => Val::lit(v),
            Val::Array(items) => Val::Array(items.into_iter().map(Val::collapse).collect()),
            w => w,
        }
    }
}

fn materialize_tree(b: &mut Builder, t: &PlainTree) -> Result<NodeId, LowerError> {
    match t {
        PlainTree::Lit(v) => Ok(b.konst(*v)),
        PlainTree::Op(kind, x, y) => {
            let x = materialize_tree(b, x)?;
            let y = materialize_tree(b, y)?;
            b.gate(*kind, vec![x, y])
        }
    }
}

/// Node carrying a scalar value, emitting constants for plaintext values.
pub fn scalar(b: &mut Builder, v: &Val) -> Result<NodeId, LowerError> {
    match v {
        Val::Plain(_, tree) => materialize_tree(b, tree),
        Val::Wire(id) => Ok(*id),
        Val::Array(_) => Err(LowerError::Internal(
            "array used where a scalar was expected".into(),
        )),
    }
}

/// Add, Sub or Mul. With `keep_tree`, a folded result remembers its operands.
pub fn arith(
    b: &mut Builder,
    kind: GateKind,
    x: &Val,
    y: &Val,
    keep_tree: bool,
) -> Result<Val, LowerError> {
    let w = b.bitwidth();
    if let (Val::Plain(a, ta), Val::Plain(c, tc)) = (x, y) {
        let v = match kind {
            GateKind::Add => a.wrapping_add(*c),
            GateKind::Sub => a.wrapping_sub(*c),
            GateKind::Mul => a.wrapping_mul(*c),
            _ => {
                return Err(LowerError::Internal(format!(
                    "{kind} is not foldable arithmetic"
                )))
            }
        };
        let v = wrap(v, w);
        let tree = if keep_tree {
            Rc::new(PlainTree::Op(kind, ta.clone(), tc.clone()))
        } else {
            Rc::new(PlainTree::Lit(v))
        };
        return Ok(Val::Plain(v, tree));
    }
    if kind == GateKind::Mul {
        match (x, y) {
            (Val::Plain(c, _), Val::Wire(id)) | (Val::Wire(id), Val::Plain(c, _)) => {
                return Ok(Val::Wire(b.mul_plain(*id, *c)));
            }
            _ => {}
        }
    }
    let (nx, ny) = (scalar(b, x)?, scalar(b, y)?);
    Ok(Val::Wire(b.gate(kind, vec![nx, ny])?))
}

pub fn add(b: &mut Builder, x: &Val, y: &Val) -> Result<Val, LowerError> {
    arith(b, GateKind::Add, x, y, false)
}

pub fn sub(b: &mut Builder, x: &Val, y: &Val) -> Result<Val, LowerError> {
    arith(b, GateKind::Sub, x, y, false)
}

pub fn mul(b: &mut Builder, x: &Val, y: &Val) -> Result<Val, LowerError> {
    arith(b, GateKind::Mul, x, y, false)
}

fn compare(b: &mut Builder, kind: GateKind, x: &Val, y: &Val) -> Result<Val, LowerError> {
    if let (Some(a), Some(c)) = (x.as_plain(), y.as_plain()) {
        let r = match kind {
            GateKind::Lt => a < c,
            GateKind::Eq => a == c,
            _ => a <= c,
        };
        return Ok(Val::lit(r as i64));
    }
    let (nx, ny) = (scalar(b, x)?, scalar(b, y)?);
    Ok(Val::Wire(b.gate(kind, vec![nx, ny])?))
}

pub fn lt(b: &mut Builder, x: &Val, y: &Val) -> Result<Val, LowerError> {
    compare(b, GateKind::Lt, x, y)
}

pub fn eq(b: &mut Builder, x: &Val, y: &Val) -> Result<Val, LowerError> {
    compare(b, GateKind::Eq, x, y)
}

/// Oblivious selection; a plaintext selector picks at compile time.
/// Arrays select element-wise.
pub fn mux(b: &mut Builder, s: &Val, x: &Val, y: &Val) -> Result<Val, LowerError> {
    if let Some(c) = s.as_plain() {
        return Ok(if c != 0 { x.clone() } else { y.clone() });
    }
    match (x, y) {
        (Val::Array(xs), Val::Array(ys)) => {
            if xs.len() != ys.len() {
                return Err(LowerError::ArrayLengthMismatch {
                    left: xs.len(),
                    right: ys.len(),
                });
            }
            let items: Result<Vec<Val>, _> =
                xs.iter().zip(ys).map(|(x, y)| mux(b, s, x, y)).collect();
            Ok(Val::Array(items?))
        }
        (Val::Array(_), _) | (_, Val::Array(_)) => Err(LowerError::Internal(
            "selecting between an array and a scalar".into(),
        )),
        _ => {
            let ns = scalar(b, s)?;
            let (nx, ny) = (scalar(b, x)?, scalar(b, y)?);
            Ok(Val::Wire(b.mux(ns, nx, ny)?))
        }
    }
}

/// `y % x` for `0 <= y < 2^(w-2)` and `x >= 0`, with `y % 0 = y`.
///
/// Restoring division against the clamped multiples `s_k = min(x * 2^k, 2^(w-2))`;
/// a clamped multiple exceeds every admissible remainder, so its step is a no-op.
pub fn rem(b: &mut Builder, y: &Val, x: &Val) -> Result<Val, LowerError> {
    let w = b.bitwidth();
    if let (Some(yv), Some(xv)) = (y.as_plain(), x.as_plain()) {
        return Ok(Val::lit(if xv == 0 {
            yv
        } else {
            wrap(yv.wrapping_rem(xv), w)
        }));
    }
    if w < 3 {
        return Ok(y.clone());
    }
    let big = 1i64 << (w - 2);
    let steps = (w - 2) as usize;
    let mut multiples = vec![x.clone()];
    for _ in 1..steps {
        let prev = multiples.last().unwrap().clone();
        let small = lt(b, &prev, &Val::lit(big / 2))?;
        let doubled = add(b, &prev, &prev)?;
        multiples.push(mux(b, &small, &doubled, &Val::lit(big))?);
    }
    let mut r = y.clone();
    for s in multiples.iter().rev() {
        let below = lt(b, &r, s)?;
        let reduced = sub(b, &r, s)?;
        r = mux(b, &below, &r, &reduced)?;
    }
    Ok(r)
}
