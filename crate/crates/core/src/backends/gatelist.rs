//! Plain-text gate lists for Bool-level circuits.
//!
//! ```text
//! <#gates> <#wires>
//! <#input wires> <#output wires>
//! <arity> 1 <in...> <out> <AND|XOR|INV|OR|MUX>     one line per gate
//! IN <wire> <party> <name> <bit>                   one line per input wire
//! CONST <wire> <0|1>                               one line per constant wire
//! OUT <wire> <name> <bit>                          one line per output bit
//! ```
//!
//! Input wires come first, then constant wires, then one wire per gate in
//! circuit order. `MUX s x y` is `x` when `s` is 1. Reveals are not gates:
//! an output names the wire it reveals.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::clear::read_input;
use super::{wrap, ExecError, InputValues};
use crate::frontend::PartyId;
use crate::hir::{validate, Circuit, GateKind, Level};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateListError {
    #[error("gate lists need a Bool circuit, got {0:?}")]
    Level(Level),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOp {
    And,
    Xor,
    Inv,
    Or,
    Mux,
}

impl GateOp {
    fn arity(self) -> usize {
        match self {
            GateOp::Inv => 1,
            GateOp::Mux => 3,
            _ => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            GateOp::And => "AND",
            GateOp::Xor => "XOR",
            GateOp::Inv => "INV",
            GateOp::Or => "OR",
            GateOp::Mux => "MUX",
        }
    }

    fn from_kind(k: GateKind) -> Option<GateOp> {
        Some(match k {
            GateKind::And => GateOp::And,
            GateKind::Xor => GateOp::Xor,
            GateKind::Not => GateOp::Inv,
            GateKind::Or => GateOp::Or,
            GateKind::MuxBit => GateOp::Mux,
            _ => return None,
        })
    }

    fn apply(self, a: &[bool]) -> bool {
        match self {
            GateOp::And => a[0] & a[1],
            GateOp::Xor => a[0] ^ a[1],
            GateOp::Inv => !a[0],
            GateOp::Or => a[0] | a[1],
            GateOp::Mux => {
                if a[0] {
                    a[1]
                } else {
                    a[2]
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub op: GateOp,
    pub inputs: Vec<usize>,
    pub output: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputWire {
    pub wire: usize,
    pub party: PartyId,
    pub name: String,
    pub bit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputWire {
    pub wire: usize,
    pub name: String,
    pub bit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateList {
    pub wires: usize,
    pub gates: Vec<Gate>,
    pub inputs: Vec<InputWire>,
    pub consts: Vec<(usize, bool)>,
    pub outputs: Vec<OutputWire>,
}

impl GateList {
    pub fn from_circuit(c: &Circuit) -> Result<GateList, GateListError> {
        if c.level != Level::Bool {
            return Err(GateListError::Level(c.level));
        }
        validate(c).map_err(ExecError::Invalid)?;
        let mut wire_of: Vec<Option<usize>> = vec![None; c.len()];
        let mut inputs = Vec::new();
        for p in &c.inputs {
            let wire = inputs.len();
            wire_of[p.node.0] = Some(wire);
            inputs.push(InputWire {
                wire,
                party: p.party,
                name: p.name.clone(),
                bit: p.bit.unwrap_or(0),
            });
        }
        let mut next = inputs.len();
        let mut consts = Vec::new();
        for n in c.nodes.iter().filter(|n| n.kind == GateKind::ConstBit) {
            wire_of[n.id.0] = Some(next);
            consts.push((next, n.payload.unwrap_or(0) & 1 == 1));
            next += 1;
        }
        let mut gates = Vec::new();
        for n in &c.nodes {
            let ins = || -> Vec<usize> {
                n.operands
                    .iter()
                    .map(|o| wire_of[o.0].expect("operands come first"))
                    .collect()
            };
            match n.kind {
                GateKind::RevealBit => wire_of[n.id.0] = Some(ins()[0]),
                kind => {
                    if let Some(op) = GateOp::from_kind(kind) {
                        gates.push(Gate {
                            op,
                            inputs: ins(),
                            output: next,
                        });
                        wire_of[n.id.0] = Some(next);
                        next += 1;
                    }
                }
            }
        }
        let mut outputs = Vec::new();
        for p in &c.outputs {
            let wire = wire_of[p.node.0].expect("output nodes are wired");
            outputs.push(OutputWire {
                wire,
                name: p.name.clone(),
                bit: p.bit.unwrap_or(0),
            });
        }
        Ok(GateList {
            wires: next,
            gates,
            inputs,
            consts,
            outputs,
        })
    }

    /// Evaluate on named inputs; output bits are reassembled into
    /// sign-extended words.
    pub fn evaluate(&self, inputs: &InputValues) -> Result<BTreeMap<String, i64>, ExecError> {
        let mut vals = vec![false; self.wires];
        for i in &self.inputs {
            let v = inputs
                .get(i.party, &i.name)
                .ok_or_else(|| ExecError::MissingInput {
                    party: i.party,
                    name: i.name.clone(),
                })?;
            vals[i.wire] = (v >> i.bit.min(63)) & 1 == 1;
        }
        for (w, b) in &self.consts {
            vals[*w] = *b;
        }
        for g in &self.gates {
            let args: Vec<bool> = g.inputs.iter().map(|w| vals[*w]).collect();
            vals[g.output] = g.op.apply(&args);
        }
        let mut words: BTreeMap<&str, (u64, u32)> = BTreeMap::new();
        for o in &self.outputs {
            let e = words.entry(&o.name).or_insert((0, 0));
            if vals[o.wire] && o.bit < 64 {
                e.0 |= 1 << o.bit;
            }
            e.1 = e.1.max(o.bit + 1);
        }
        Ok(words
            .into_iter()
            .map(|(n, (bits, width))| (n.to_string(), wrap(bits as i64, width.max(2))))
            .collect())
    }
}

impl fmt::Display for GateList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.gates.len(), self.wires)?;
        writeln!(f, "{} {}", self.inputs.len(), self.outputs.len())?;
        for g in &self.gates {
            write!(f, "{} 1", g.inputs.len())?;
            for w in &g.inputs {
                write!(f, " {w}")?;
            }
            writeln!(f, " {} {}", g.output, g.op.name())?;
        }
        for i in &self.inputs {
            writeln!(f, "IN {} {} {} {}", i.wire, i.party, i.name, i.bit)?;
        }
        for (w, b) in &self.consts {
            writeln!(f, "CONST {w} {}", u8::from(*b))?;
        }
        for o in &self.outputs {
            writeln!(f, "OUT {} {} {}", o.wire, o.name, o.bit)?;
        }
        Ok(())
    }
}

impl FromStr for GateList {
    type Err = GateListError;

    fn from_str(text: &str) -> Result<GateList, GateListError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let mut header = |what: &str| -> Result<(usize, usize), GateListError> {
            let (i, l) = lines.next().ok_or(GateListError::Parse {
                line: 0,
                message: format!("missing {what}"),
            })?;
            let nums = parse_nums(l, i + 1)?;
            match nums[..] {
                [a, b] => Ok((a, b)),
                _ => Err(GateListError::Parse {
                    line: i + 1,
                    message: format!("expected two numbers for {what}"),
                }),
            }
        };
        let (n_gates, wires) = header("gate and wire counts")?;
        let (n_in, n_out) = header("input and output counts")?;
        let mut gl = GateList {
            wires,
            gates: Vec::new(),
            inputs: Vec::new(),
            consts: Vec::new(),
            outputs: Vec::new(),
        };
        for (i, l) in lines {
            let line = i + 1;
            let err = |message: &str| GateListError::Parse {
                line,
                message: message.to_string(),
            };
            let fields: Vec<&str> = l.split_whitespace().collect();
            let num = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| err(&format!("bad number `{s}`")))
            };
            let wire = |s: &str| {
                num(s).and_then(|w| {
                    if w < wires {
                        Ok(w)
                    } else {
                        Err(err("wire out of range"))
                    }
                })
            };
            match fields[0] {
                "IN" if fields.len() == 5 => gl.inputs.push(InputWire {
                    wire: wire(fields[1])?,
                    party: num(fields[2])? as PartyId,
                    name: fields[3].to_string(),
                    bit: num(fields[4])? as u32,
                }),
                "CONST" if fields.len() == 3 => {
                    gl.consts.push((wire(fields[1])?, fields[2] == "1"))
                }
                "OUT" if fields.len() == 4 => gl.outputs.push(OutputWire {
                    wire: wire(fields[1])?,
                    name: fields[2].to_string(),
                    bit: num(fields[3])? as u32,
                }),
                _ => {
                    let op = match *fields.last().unwrap_or(&"") {
                        "AND" => GateOp::And,
                        "XOR" => GateOp::Xor,
                        "INV" => GateOp::Inv,
                        "OR" => GateOp::Or,
                        "MUX" => GateOp::Mux,
                        other => return Err(err(&format!("unknown gate `{other}`"))),
                    };
                    let arity = num(fields[0])?;
                    if arity != op.arity() || fields.len() != arity + 4 || fields[1] != "1" {
                        return Err(err("malformed gate line"));
                    }
                    let inputs = fields[2..2 + arity]
                        .iter()
                        .map(|s| wire(s))
                        .collect::<Result<_, _>>()?;
                    gl.gates.push(Gate {
                        op,
                        inputs,
                        output: wire(fields[2 + arity])?,
                    });
                }
            }
        }
        if gl.gates.len() != n_gates || gl.inputs.len() != n_in || gl.outputs.len() != n_out {
            return Err(GateListError::Parse {
                line: 0,
                message: "counts disagree with header".into(),
            });
        }
        Ok(gl)
    }
}

fn parse_nums(l: &str, line: usize) -> Result<Vec<usize>, GateListError> {
    l.split_whitespace()
        .map(|s| {
            s.parse().map_err(|_| GateListError::Parse {
                line,
                message: format!("bad number `{s}`"),
            })
        })
        .collect()
}

/// Render a Bool circuit as a gate list.
pub fn emit_gatelist(c: &Circuit) -> Result<String, GateListError> {
    Ok(GateList::from_circuit(c)?.to_string())
}

/// Parse and evaluate, checking the input contract against the circuit it
/// was emitted from.
pub fn run_gatelist(
    c: &Circuit,
    text: &str,
    inputs: &InputValues,
) -> Result<BTreeMap<String, i64>, GateListError> {
    for port in 0..c.inputs.len() {
        read_input(c, inputs, port)?;
    }
    Ok(text.parse::<GateList>()?.evaluate(inputs)?)
}
