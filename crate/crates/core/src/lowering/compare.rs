//! Comparison operators in terms of the two primitive gates `Lt` and `Eq`.

use serde::{Deserialize, Serialize};

use crate::frontend::BinOp;

use super::builder::Builder;
use super::values::{add, eq, lt, sub, Val};
use super::LowerError;

/// How `<=` and `>=` are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CmpEncoding {
    /// `a >= b` as `(b < a) + (a == b)`.
    Direct,
    /// `a >= b` as `1 - (a < b)`.
    RewriteGeq,
    /// Emit `Direct` and let the optimizer pick per cost model.
    #[default]
    Auto,
}

/// `!=` is always `1 - (a == b)`; the optimizer may swap it for `(a < b) + (b < a)`.
pub fn lower_comparison(
    b: &mut Builder,
    op: BinOp,
    x: &Val,
    y: &Val,
    enc: CmpEncoding,
) -> Result<Val, LowerError> {
    let one = Val::lit(1);
    let rewrite = enc == CmpEncoding::RewriteGeq;
    match op {
        BinOp::Lt => lt(b, x, y),
        BinOp::Gt => lt(b, y, x),
        BinOp::Eq => eq(b, x, y),
        BinOp::Ne => {
            let e = eq(b, x, y)?;
            sub(b, &one, &e)
        }
        BinOp::Ge | BinOp::Le => {
            // Normalize to `hi >= lo`.
            let (hi, lo) = if op == BinOp::Ge { (x, y) } else { (y, x) };
            if rewrite {
                let below = lt(b, hi, lo)?;
                sub(b, &one, &below)
            } else {
                let above = lt(b, lo, hi)?;
                let same = eq(b, hi, lo)?;
                add(b, &above, &same)
            }
        }
        _ => Err(LowerError::Internal(format!(
            "`{}` is not a comparison",
            op.symbol()
        ))),
    }
}
