//! Word-level to bit-level translation.
//!
//! Every word becomes `w` bit wires, least significant first, in two's
//! complement. Comparison results are words whose upper bits are the
//! constant 0.

use thiserror::Error;

use crate::hir::{
    validate, Circuit, GateKind, InputPort, Level, Meta, NodeId, OutputPort, Violation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitblastError {
    #[error("cannot bit-blast {0}")]
    UnsupportedGate(GateKind),
    #[error("bit-blasting needs an Arith-level circuit, got {0:?}")]
    NotArith(Level),
    #[error("invalid input circuit: {} violation(s)", .0.len())]
    Invalid(Vec<Violation>),
}

type Word = Vec<NodeId>;

struct Blaster {
    out: Circuit,
    w: usize,
    zero: Option<NodeId>,
    one: Option<NodeId>,
    /// Metadata given to gates emitted for the current word-level node.
    meta: Meta,
}

impl Blaster {
    fn push(&mut self, kind: GateKind, operands: Vec<NodeId>) -> NodeId {
        let meta = self.meta.clone();
        self.out
            .add_node(kind, operands, meta, None)
            .expect("operands precede and arity matches")
    }

    fn bit_const(&mut self, v: bool) -> NodeId {
        let slot = if v { self.one } else { self.zero };
        if let Some(id) = slot {
            return id;
        }
        let id = self
            .out
            .add_node(GateKind::ConstBit, vec![], Meta::Plain, Some(v as i64))
            .expect("nullary");
        if v {
            self.one = Some(id);
        } else {
            self.zero = Some(id);
        }
        id
    }

    fn is_zero(&self, id: NodeId) -> bool {
        let n = self.out.node(id);
        n.kind == GateKind::ConstBit && n.payload == Some(0)
    }

    fn const_word(&mut self, v: i64) -> Word {
        (0..self.w)
            .map(|i| self.bit_const((v >> i.min(63)) & 1 == 1))
            .collect()
    }

    /// A 0/1 value as a word.
    fn flag(&mut self, bit: NodeId) -> Word {
        let mut word = vec![bit];
        for _ in 1..self.w {
            word.push(self.bit_const(false));
        }
        word
    }

    /// Ripple-carry sum; the final carry is computed and dropped.
    fn adder(&mut self, a: &[NodeId], b: &[NodeId], carry_in: bool) -> Word {
        let mut carry = self.bit_const(carry_in);
        let mut sum = Vec::with_capacity(self.w);
        for i in 0..self.w {
            let t = self.push(GateKind::Xor, vec![a[i], b[i]]);
            sum.push(self.push(GateKind::Xor, vec![t, carry]));
            let g = self.push(GateKind::And, vec![a[i], b[i]]);
            let p = self.push(GateKind::And, vec![t, carry]);
            carry = self.push(GateKind::Or, vec![g, p]);
        }
        sum
    }

    fn subtract(&mut self, a: &[NodeId], b: &[NodeId]) -> Word {
        let nb: Word = b
            .iter()
            .map(|&x| self.push(GateKind::Not, vec![x]))
            .collect();
        self.adder(a, &nb, true)
    }

    /// `x` shifted left by `k`, zero-filled and truncated to `w` bits.
    fn shifted(&mut self, x: &[NodeId], k: usize) -> Word {
        (0..self.w)
            .map(|i| {
                if i < k {
                    self.bit_const(false)
                } else {
                    x[i - k]
                }
            })
            .collect()
    }

    fn sum_terms(&mut self, terms: Vec<Word>) -> Word {
        let mut it = terms.into_iter();
        match it.next() {
            None => self.const_word(0),
            Some(first) => it.fold(first, |acc, t| self.adder(&acc, &t, false)),
        }
    }

    fn mul(&mut self, a: &[NodeId], b: &[NodeId]) -> Word {
        let mut terms = Vec::with_capacity(self.w);
        for (k, &bk) in b.iter().enumerate() {
            let partial: Word = (0..self.w)
                .map(|i| {
                    if i < k {
                        self.bit_const(false)
                    } else {
                        self.push(GateKind::And, vec![a[i - k], bk])
                    }
                })
                .collect();
            terms.push(partial);
        }
        self.sum_terms(terms)
    }

    fn mul_plain(&mut self, x: &[NodeId], scalar: i64) -> Word {
        let terms: Vec<Word> = (0..self.w)
            .filter(|&k| (scalar >> k.min(63)) & 1 == 1)
            .map(|k| self.shifted(x, k))
            .collect();
        self.sum_terms(terms)
    }

    /// Signed `a < b` on full words: with differing signs the negative one is
    /// smaller, otherwise `a − b` cannot overflow and its sign decides.
    fn less(&mut self, a: &[NodeId], b: &[NodeId]) -> NodeId {
        let top = self.w - 1;
        let d = self.subtract(a, b);
        let differ = self.push(GateKind::Xor, vec![a[top], b[top]]);
        self.push(GateKind::MuxBit, vec![differ, a[top], d[top]])
    }

    fn eq(&mut self, a: &[NodeId], b: &[NodeId]) -> NodeId {
        let mut same: Vec<NodeId> = (0..self.w)
            .map(|i| {
                let x = self.push(GateKind::Xor, vec![a[i], b[i]]);
                self.push(GateKind::Not, vec![x])
            })
            .collect();
        while same.len() > 1 {
            let mut next = Vec::with_capacity(same.len().div_ceil(2));
            for pair in same.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.push(GateKind::And, vec![pair[0], pair[1]])
                } else {
                    pair[0]
                });
            }
            same = next;
        }
        same[0]
    }

    /// Single bit that is 1 iff the word is nonzero.
    fn selector(&mut self, s: &[NodeId]) -> NodeId {
        if s[1..].iter().all(|&b| self.is_zero(b)) {
            return s[0];
        }
        let mut bits = s.to_vec();
        while bits.len() > 1 {
            let mut next = Vec::with_capacity(bits.len().div_ceil(2));
            for pair in bits.chunks(2) {
                next.push(if pair.len() == 2 {
                    self.push(GateKind::Or, vec![pair[0], pair[1]])
                } else {
                    pair[0]
                });
            }
            bits = next;
        }
        bits[0]
    }
}

/// Translate an Arith-level circuit into an equivalent Bool-level circuit
/// over the same bitwidth.
pub fn bitblast(c: &Circuit) -> Result<Circuit, BitblastError> {
    if c.level != Level::Arith {
        return Err(BitblastError::NotArith(c.level));
    }
    validate(c).map_err(BitblastError::Invalid)?;
    let w = c.bitwidth as usize;
    let mut bl = Blaster {
        out: Circuit::new(Level::Bool, c.bitwidth, c.scheme),
        w,
        zero: None,
        one: None,
        meta: Meta::Plain,
    };
    let mut words: Vec<Word> = Vec::with_capacity(c.len());
    for n in &c.nodes {
        bl.meta = n.meta.clone();
        let arg = |i: usize| words[n.operands[i].0].clone();
        let word = match n.kind {
            GateKind::Const => bl.const_word(n.payload.unwrap_or(0)),
            GateKind::Input => {
                let ports: Vec<InputPort> = c
                    .inputs
                    .iter()
                    .filter(|p| p.node == n.id)
                    .cloned()
                    .collect();
                let port = ports.first().cloned();
                let bits = match port.as_ref().and_then(|p| p.bit) {
                    // Already a single bit of some word.
                    Some(_) => 1,
                    None => w,
                };
                let word: Word = (0..bits)
                    .map(|_| bl.push(GateKind::InputBit, vec![]))
                    .collect();
                if let Some(p) = port {
                    for (i, &bit) in word.iter().enumerate() {
                        let pos = p.bit.unwrap_or(i as u32);
                        bl.out.inputs.push(InputPort {
                            node: bit,
                            party: p.party,
                            name: p.name.clone(),
                            bit: Some(pos),
                        });
                    }
                }
                if bits == 1 {
                    bl.flag(word[0])
                } else {
                    word
                }
            }
            GateKind::Add => bl.adder(&arg(0), &arg(1), false),
            GateKind::Sub => bl.subtract(&arg(0), &arg(1)),
            GateKind::Mul => bl.mul(&arg(0), &arg(1)),
            GateKind::MulPlain => bl.mul_plain(&arg(0), n.payload.unwrap_or(0)),
            GateKind::Lt => {
                let lt = bl.less(&arg(0), &arg(1));
                bl.flag(lt)
            }
            GateKind::Leq => {
                let gt = bl.less(&arg(1), &arg(0));
                let le = bl.push(GateKind::Not, vec![gt]);
                bl.flag(le)
            }
            GateKind::Eq => {
                let e = bl.eq(&arg(0), &arg(1));
                bl.flag(e)
            }
            GateKind::Mux => {
                let s = bl.selector(&arg(0));
                let (x, y) = (arg(1), arg(2));
                (0..w)
                    .map(|i| bl.push(GateKind::MuxBit, vec![s, x[i], y[i]]))
                    .collect()
            }
            GateKind::Reveal => {
                let x = arg(0);
                let word: Word = x
                    .iter()
                    .map(|&b| bl.push(GateKind::RevealBit, vec![b]))
                    .collect();
                for &b in &word {
                    bl.out.nodes[b.0].audience = n.audience.clone();
                }
                word
            }
            kind => return Err(BitblastError::UnsupportedGate(kind)),
        };
        words.push(word);
    }
    for p in &c.outputs {
        let word = &words[p.node.0];
        match p.bit {
            Some(b) => bl.out.outputs.push(OutputPort {
                node: word[0],
                bit: Some(b),
                ..p.clone()
            }),
            None => {
                for (i, &node) in word.iter().enumerate() {
                    bl.out.outputs.push(OutputPort {
                        node,
                        bit: Some(i as u32),
                        ..p.clone()
                    });
                }
            }
        }
    }
    Ok(bl.out)
}
