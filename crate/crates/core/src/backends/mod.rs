//! Circuit execution: cleartext reference, simulated additive secret sharing,
//! and boolean gate-list emission.

mod clear;
mod field;
mod gatelist;
mod inputs;
mod shares;

use thiserror::Error;

use crate::frontend::PartyId;
use crate::hir::{NodeId, Violation};

pub use clear::{eval_gate, evaluate_nodes, input_limit, interpret_clear, wrap};
pub use field::{Fe, P};
pub use gatelist::{
    emit_gatelist, run_gatelist, Gate, GateList, GateListError, GateOp, InputWire, OutputWire,
};
pub use inputs::{outputs_to_json, InputFormatError, InputValues};
pub use shares::{
    beaver_mul, reconstruct, share, simulate_shared, simulate_shared_with, Access, AccessOp,
    BeaverTriple, ExecTrace, ShareError, ShareVector, SharedRun, SHARE_INPUT_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("missing input `{name}` for party {party}")]
    MissingInput { party: PartyId, name: String },
    #[error("input `{name}` = {value} violates |v| < 2^{} at bitwidth {bitwidth}", bitwidth.saturating_sub(2))]
    OverflowContract {
        name: String,
        value: i64,
        bitwidth: u32,
    },
    #[error("input node {0} has no input port")]
    UnboundInputNode(NodeId),
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}
