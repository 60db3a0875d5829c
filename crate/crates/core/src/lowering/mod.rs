//! Typed programs to circuits.
//!
//! Loops are unrolled on a compile-time counter, calls are inlined under a
//! fuel budget, branches on private conditions become selectors, and private
//! array accesses become selection trees. The result is an Arith-level
//! circuit, optionally bit-blasted to the Bool level.

mod arrays;
mod bitblast;
mod bool_arith;
mod builder;
mod compare;
mod program;
mod values;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frontend::Span;
use crate::hir::{validate, Circuit};
use crate::typecheck::{Scheme, TypedProgram};

pub use arrays::{lower_private_index, lower_private_update};
pub use bitblast::{bitblast, BitblastError};
pub use bool_arith::bool_to_arith;
pub use builder::Builder;
pub use compare::{lower_comparison, CmpEncoding};
pub use program::{lower_oblivious_if, Env};
pub use values::Val;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TargetLevel {
    #[default]
    Arith,
    Bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerConfig {
    /// Word size in bits, 2 to 64.
    pub bitwidth: u32,
    pub target_level: TargetLevel,
    pub comparison_encoding: CmpEncoding,
    pub scheme: Scheme,
    /// Emit selectors as `b*x + (1-b)*y` instead of `Mux` gates.
    pub expand_mux: bool,
    /// Lower `pow(x, n)` by repeated squaring rather than `n - 1` multiplications.
    pub pow_by_squaring: bool,
}

impl Default for LowerConfig {
    fn default() -> Self {
        LowerConfig {
            bitwidth: 64,
            target_level: TargetLevel::Arith,
            comparison_encoding: CmpEncoding::Auto,
            scheme: Scheme::Generic,
            expand_mux: false,
            pow_by_squaring: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerError {
    #[error("recursive function `{function}` has no bound")]
    BoundMissing { function: String },
    #[error("bound of `{function}` evaluates to {value}, expected a non-negative value")]
    BoundNegative { function: String, value: i64 },
    #[error("{span}: call to `{function}` after its fuel is spent")]
    FuelExhausted { function: String, span: Span },
    #[error("{span}: loop bound or counter is not a compile-time constant")]
    NonConstBound { span: Span },
    #[error("{span}: array length is not statically known")]
    NonConstLength { span: Span },
    #[error("{span}: {what} must be known at compile time")]
    NotCompileTime { span: Span, what: &'static str },
    #[error("{span}: output or eval inside a branch on a private condition")]
    SideEffectUndetectable { span: Span },
    #[error("array is empty")]
    EmptyArray,
    #[error("{span}: index {index} out of bounds for length {len}")]
    IndexOutOfBounds { span: Span, index: i64, len: usize },
    #[error("arrays of lengths {left} and {right} cannot be merged")]
    ArrayLengthMismatch { left: usize, right: usize },
    #[error("{span}: division by zero")]
    DivisionByZero { span: Span },
    #[error("{span}: loop exceeds the unroll limit")]
    UnrollLimit { span: Span },
    #[error("metadata: {0}")]
    Metadata(String),
    #[error(transparent)]
    Bitblast(#[from] BitblastError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("internal: {0}")]
    Internal(String),
}

impl LowerConfig {
    pub fn check(&self) -> Result<(), LowerError> {
        if !(2..=64).contains(&self.bitwidth) {
            return Err(LowerError::InvalidConfig(format!(
                "bitwidth {} outside 2..=64",
                self.bitwidth
            )));
        }
        Ok(())
    }
}

/// Lower a checked program. With a Bool target the Arith circuit is
/// bit-blasted as is; run the optimizer in between for smaller circuits.
pub fn lower_program(tp: &TypedProgram, cfg: &LowerConfig) -> Result<Circuit, LowerError> {
    cfg.check()?;
    let c = program::lower_arith(tp, cfg)?;
    validate(&c)
        .map_err(|v| LowerError::Internal(format!("lowered circuit is invalid: {}", v[0])))?;
    match cfg.target_level {
        TargetLevel::Arith => Ok(c),
        TargetLevel::Bool => Ok(bitblast(&c)?),
    }
}
