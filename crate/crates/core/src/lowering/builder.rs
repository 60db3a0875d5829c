use crate::backends::wrap;
use crate::frontend::PartyId;
use crate::hir::{combine_meta, Circuit, GateKind, InputPort, Level, Meta, NodeId, OutputPort};
use crate::typecheck::{OwnerSet, Scheme};

use super::LowerError;

/// Appends arithmetic-level nodes, deriving each node's metadata from its
/// operands.
pub struct Builder {
    pub circuit: Circuit,
    /// Every party of the program; observers of shared inputs.
    all_parties: OwnerSet,
    /// Emit selectors as `b*x + (1-b)*y` instead of `Mux` nodes.
    expand_mux: bool,
}

impl Builder {
    pub fn new(bitwidth: u32, scheme: Scheme, all_parties: OwnerSet, expand_mux: bool) -> Builder {
        Builder {
            circuit: Circuit::new(Level::Arith, bitwidth, scheme),
            all_parties,
            expand_mux,
        }
    }

    pub fn finish(self) -> Circuit {
        self.circuit
    }

    pub fn all_parties(&self) -> &OwnerSet {
        &self.all_parties
    }

    pub fn bitwidth(&self) -> u32 {
        self.circuit.bitwidth
    }

    fn push(
        &mut self,
        kind: GateKind,
        operands: Vec<NodeId>,
        meta: Meta,
        payload: Option<i64>,
    ) -> NodeId {
        self.circuit
            .add_node(kind, operands, meta, payload)
            .expect("builder only references existing nodes with correct arity")
    }

    pub fn konst(&mut self, v: i64) -> NodeId {
        let v = wrap(v, self.bitwidth());
        self.push(GateKind::Const, vec![], Meta::Plain, Some(v))
    }

    /// Metadata of a fresh input from `party` under the circuit's scheme.
    pub fn input_meta(&self, party: PartyId) -> Meta {
        let provider = OwnerSet::singleton(party);
        match self.circuit.scheme {
            Scheme::Generic | Scheme::Tfhe => Meta::Enc { provider },
            Scheme::AdditiveShare(n) => {
                let players = OwnerSet::range(n);
                Meta::Shared {
                    provider,
                    observers: self.all_parties.union(&players),
                    players,
                    threshold: n,
                }
            }
        }
    }

    pub fn input(&mut self, party: PartyId, name: String) -> NodeId {
        let meta = self.input_meta(party);
        let id = self.push(GateKind::Input, vec![], meta, None);
        self.circuit.inputs.push(InputPort {
            node: id,
            party,
            name,
            bit: None,
        });
        id
    }

    pub fn gate(&mut self, kind: GateKind, operands: Vec<NodeId>) -> Result<NodeId, LowerError> {
        let mut meta = Meta::Plain;
        for o in &operands {
            meta = combine_meta(&meta, &self.circuit.node(*o).meta, self.circuit.scheme)
                .map_err(|e| LowerError::Metadata(e.to_string()))?;
        }
        Ok(self.push(kind, operands, meta, None))
    }

    pub fn mul_plain(&mut self, x: NodeId, scalar: i64) -> NodeId {
        let meta = self.circuit.node(x).meta.clone();
        let scalar = wrap(scalar, self.bitwidth());
        self.push(GateKind::MulPlain, vec![x], meta, Some(scalar))
    }

    /// `x` when `s` is nonzero, else `y`.
    pub fn mux(&mut self, s: NodeId, x: NodeId, y: NodeId) -> Result<NodeId, LowerError> {
        if !self.expand_mux {
            return self.gate(GateKind::Mux, vec![s, x, y]);
        }
        let sx = self.gate(GateKind::Mul, vec![s, x])?;
        let one = self.konst(1);
        let not_s = self.gate(GateKind::Sub, vec![one, s])?;
        let ny = self.gate(GateKind::Mul, vec![not_s, y])?;
        self.gate(GateKind::Add, vec![sx, ny])
    }

    pub fn reveal(&mut self, x: NodeId, audience: OwnerSet) -> NodeId {
        let id = self.push(GateKind::Reveal, vec![x], Meta::Plain, None);
        self.circuit.nodes[id.0].audience = Some(audience);
        id
    }

    pub fn output(&mut self, node: NodeId, audience: OwnerSet, name: String) {
        self.circuit.outputs.push(OutputPort {
            node,
            audience,
            name,
            bit: None,
        });
    }

    pub fn is_reveal(&self, id: NodeId) -> bool {
        self.circuit.node(id).kind == GateKind::Reveal
    }
}
