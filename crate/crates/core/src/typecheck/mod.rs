//! Owner-set information-flow typing.
//!
//! Every private value carries the set of parties whose data influenced it.
//! Operations union owner sets, branching on a private condition taints the
//! result with the condition's owners, and only `eval` can turn a private
//! value back into plaintext, for an audience permitted by [`valid`].

mod check;
mod types;

pub use check::{
    check_expr, check_program, check_stmt, Signature, TypeEnv, TypeError, TypedProgram,
};
pub use types::{valid, Atomic, OwnerSet, Scheme, SecType};
