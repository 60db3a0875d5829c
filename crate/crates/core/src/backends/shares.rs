//! n-out-of-n additive secret sharing over Z_p with Beaver multiplication.
//!
//! Parties run in lock step inside one process. Every party keeps its own
//! share of every wire; only opening, reveal and the idealized comparison
//! ever combine shares of different parties, and each such read is logged.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::clear::{collect_outputs, read_input};
use super::field::{Fe, P};
use super::{eval_gate, wrap, ExecError, InputValues};
use crate::estimator::{preprocessing_requirements, Cost, CostModel};
use crate::hir::{validate, Circuit, GateKind, Level, NodeId};
use crate::typecheck::OwnerSet;

/// Inputs must satisfy `|v| < 2^31` so field and integer arithmetic agree.
pub const SHARE_INPUT_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShareError {
    #[error("need {expected} shares to reconstruct, got {got}")]
    IncompleteShares { expected: usize, got: usize },
    #[error("Beaver triple already consumed")]
    TripleExhausted,
    #[error("operands are shared among different players")]
    PlayerMismatch,
    #[error("online phase needs more {what} than the offline phase produced ({budget})")]
    BudgetExceeded { what: &'static str, budget: usize },
    #[error("additive sharing needs at least 2 parties, got {0}")]
    TooFewParties(usize),
    #[error("the share simulator runs Arith circuits, got {0:?}")]
    Level(Level),
    #[error(
        "constant {value} at node {node} does not fit the field; lower with a smaller bitwidth"
    )]
    ConstantRange { node: NodeId, value: i64 },
    #[error("input `{name}` = {value} outside |v| < 2^31")]
    InputRange { name: String, value: i64 },
    #[error(transparent)]
    Exec(#[from] ExecError),
}

/// Additive shares of one secret: party `i` of `players` holds `shares[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShareVector {
    pub shares: Vec<Fe>,
    pub players: OwnerSet,
    /// Always `players.len()`.
    pub threshold: usize,
    pub provider: OwnerSet,
    pub observers: OwnerSet,
}

impl ShareVector {
    fn from_shares(shares: Vec<Fe>, players: OwnerSet) -> ShareVector {
        let threshold = players.len();
        ShareVector {
            shares,
            observers: players.clone(),
            provider: players.clone(),
            players,
            threshold,
        }
    }

    /// Shares of a public constant: party 0 holds it, everyone else 0.
    pub fn public(v: Fe, players: &OwnerSet) -> ShareVector {
        let mut shares = vec![Fe::ZERO; players.len()];
        shares[0] = v;
        ShareVector::from_shares(shares, players.clone())
    }

    fn zip(
        &self,
        other: &ShareVector,
        f: impl Fn(Fe, Fe) -> Fe,
    ) -> Result<ShareVector, ShareError> {
        if self.players != other.players || self.shares.len() != other.shares.len() {
            return Err(ShareError::PlayerMismatch);
        }
        let shares = self
            .shares
            .iter()
            .zip(&other.shares)
            .map(|(a, b)| f(*a, *b))
            .collect();
        Ok(ShareVector::from_shares(shares, self.players.clone()))
    }

    fn map(&self, f: impl Fn(Fe) -> Fe) -> ShareVector {
        ShareVector::from_shares(
            self.shares.iter().map(|s| f(*s)).collect(),
            self.players.clone(),
        )
    }

    pub fn add(&self, other: &ShareVector) -> Result<ShareVector, ShareError> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &ShareVector) -> Result<ShareVector, ShareError> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, k: Fe) -> ShareVector {
        self.map(|s| s * k)
    }

    /// Add a public value; only the first party adjusts its share.
    pub fn add_public(&self, k: Fe) -> ShareVector {
        let mut out = self.clone();
        out.shares[0] = out.shares[0] + k;
        out
    }
}

/// Split `v` among parties `0..n`: `n − 1` uniform shares and a balancing one.
pub fn share(v: Fe, n: usize, rng: &mut impl Rng) -> ShareVector {
    share_among(v, &OwnerSet::range(n as u32), rng)
}

fn share_among(v: Fe, players: &OwnerSet, rng: &mut impl Rng) -> ShareVector {
    let mut shares: Vec<Fe> = (1..players.len()).map(|_| Fe::random(rng)).collect();
    let rest: Fe = shares.iter().copied().sum();
    shares.push(v - rest);
    ShareVector::from_shares(shares, players.clone())
}

pub fn reconstruct(sv: &ShareVector) -> Result<Fe, ShareError> {
    if sv.shares.len() != sv.threshold {
        return Err(ShareError::IncompleteShares {
            expected: sv.threshold,
            got: sv.shares.len(),
        });
    }
    Ok(sv.shares.iter().copied().sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeaverTriple {
    pub a: ShareVector,
    pub b: ShareVector,
    pub c: ShareVector,
    pub consumed: bool,
}

impl BeaverTriple {
    pub fn random(players: &OwnerSet, rng: &mut impl Rng) -> BeaverTriple {
        let (a, b) = (Fe::random(rng), Fe::random(rng));
        BeaverTriple {
            a: share_among(a, players, rng),
            b: share_among(b, players, rng),
            c: share_among(a * b, players, rng),
            consumed: false,
        }
    }
}

/// What one protocol step read. `parties` lists whose shares were read
/// together; more than one only for openings, reveals and comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Access {
    pub node: NodeId,
    pub op: AccessOp,
    pub parties: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AccessOp {
    Local,
    /// Opening of a value masked by a triple component.
    Open,
    Reveal,
    Compare,
}

/// Multiply via one Beaver triple: open `d = x − a` and `e = y − b`, then
/// `xy = c + d·b + e·a + d·e` with `d·e` added by the first party.
pub fn beaver_mul(
    x: &ShareVector,
    y: &ShareVector,
    t: &mut BeaverTriple,
) -> Result<ShareVector, ShareError> {
    beaver_mul_logged(x, y, t, &mut Vec::new(), NodeId(0))
}

fn beaver_mul_logged(
    x: &ShareVector,
    y: &ShareVector,
    t: &mut BeaverTriple,
    log: &mut Vec<Access>,
    node: NodeId,
) -> Result<ShareVector, ShareError> {
    if t.consumed {
        return Err(ShareError::TripleExhausted);
    }
    if x.players != y.players || x.players != t.a.players {
        return Err(ShareError::PlayerMismatch);
    }
    t.consumed = true;
    let n = x.shares.len();
    log.extend((0..n).map(|p| Access {
        node,
        op: AccessOp::Local,
        parties: vec![p],
    }));
    let d_shares = x.sub(&t.a)?;
    let e_shares = y.sub(&t.b)?;
    log.push(Access {
        node,
        op: AccessOp::Open,
        parties: (0..n).collect(),
    });
    let d = reconstruct(&d_shares)?;
    let e = reconstruct(&e_shares)?;
    let out = t.c.add(&t.b.scale(d))?.add(&t.a.scale(e))?;
    Ok(out.add_public(d * e))
}

/// Communication and offline-material counters of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExecTrace {
    pub rounds: u64,
    pub multicasts: u64,
    pub triples_consumed: u64,
    pub bits_consumed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharedRun {
    pub outputs: BTreeMap<String, i64>,
    pub trace: ExecTrace,
    pub access_log: Vec<Access>,
    /// Offline budget: (triples, random bits).
    pub budget: (usize, usize),
}

#[derive(Debug, Clone)]
enum Wire {
    Public(Fe),
    Shared(ShareVector),
}

/// Offline material plus consumption tracked against fractional per-gate rates.
struct Pool {
    triples: Vec<BeaverTriple>,
    budget: usize,
    bits: usize,
    triple_demand: Cost,
    bit_demand: Cost,
    trace: ExecTrace,
}

impl Pool {
    fn take_triples(&mut self, rate: Cost) -> Result<Option<BeaverTriple>, ShareError> {
        self.triple_demand = self.triple_demand + rate;
        let mut last = None;
        while (self.trace.triples_consumed as i64) < self.triple_demand.ceil() {
            let t = self.triples.pop().ok_or(ShareError::BudgetExceeded {
                what: "triples",
                budget: self.budget,
            })?;
            self.trace.triples_consumed += 1;
            last = Some(t);
        }
        Ok(last)
    }

    fn take_bits(&mut self, rate: Cost) -> Result<(), ShareError> {
        self.bit_demand = self.bit_demand + rate;
        let want = self.bit_demand.ceil() as u64;
        if want > self.bits as u64 {
            return Err(ShareError::BudgetExceeded {
                what: "random bits",
                budget: self.bits,
            });
        }
        self.trace.bits_consumed = want;
        Ok(())
    }
}

/// Run under the default secret-sharing model.
pub fn simulate_shared(
    c: &Circuit,
    inputs: &InputValues,
    n: usize,
    seed: u64,
) -> Result<SharedRun, ShareError> {
    simulate_shared_with(c, inputs, n, seed, &CostModel::default_secret_sharing())
}

/// Offline phase generates exactly the model's preprocessing budget; the
/// online phase walks gates in id order. Comparisons reconstruct, compare
/// and re-share inside one step, charged the model's rounds and
/// communication. Reveals are not counted as rounds or multicasts.
pub fn simulate_shared_with(
    c: &Circuit,
    inputs: &InputValues,
    n: usize,
    seed: u64,
    model: &CostModel,
) -> Result<SharedRun, ShareError> {
    if n < 2 {
        return Err(ShareError::TooFewParties(n));
    }
    if c.level != Level::Arith {
        return Err(ShareError::Level(c.level));
    }
    validate(c).map_err(ExecError::Invalid)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let players = OwnerSet::range(n as u32);

    let req = preprocessing_requirements(c, &model.preprocessing);
    let budget = (req.triples.ceil() as usize, req.random_bits.ceil() as usize);
    let mut pool = Pool {
        triples: (0..budget.0)
            .map(|_| BeaverTriple::random(&players, &mut rng))
            .collect(),
        budget: budget.0,
        bits: budget.1,
        triple_demand: Cost::ZERO,
        bit_demand: Cost::ZERO,
        trace: ExecTrace::default(),
    };
    pool.triples.reverse();

    let port_of: BTreeMap<NodeId, usize> = c
        .inputs
        .iter()
        .enumerate()
        .map(|(i, p)| (p.node, i))
        .collect();
    let charge = |kind: GateKind, resource: &str| -> u64 {
        model
            .gate_cost(kind)
            .and_then(|v| v.get(resource))
            .map_or(0, |c| c.ceil() as u64)
    };
    let w = c.bitwidth;
    let mut log = Vec::new();
    let mut wires: Vec<Wire> = Vec::with_capacity(c.len());
    let mut revealed: BTreeMap<NodeId, i64> = BTreeMap::new();
    let lift = |w_: &Wire| match w_ {
        Wire::Shared(s) => s.clone(),
        Wire::Public(v) => ShareVector::public(*v, &players),
    };

    for node in &c.nodes {
        let id = node.id;
        let ops: Vec<&Wire> = node.operands.iter().map(|o| &wires[o.0]).collect();
        let local = |log: &mut Vec<Access>| {
            log.extend((0..n).map(|p| Access {
                node: id,
                op: AccessOp::Local,
                parties: vec![p],
            }))
        };
        let wire = match node.kind {
            GateKind::Const | GateKind::ConstBit | GateKind::MulPlain
                if node.payload.is_some_and(|v| v.unsigned_abs() > P / 2) =>
            {
                return Err(ShareError::ConstantRange {
                    node: id,
                    value: node.payload.unwrap_or(0),
                });
            }
            GateKind::Const | GateKind::ConstBit => {
                Wire::Public(Fe::from_i64(node.payload.unwrap_or(0)))
            }
            GateKind::Input | GateKind::InputBit => {
                let port = port_of
                    .get(&id)
                    .copied()
                    .ok_or(ExecError::UnboundInputNode(id))?;
                let v = read_input(c, inputs, port)?;
                if v.abs() >= SHARE_INPUT_LIMIT {
                    return Err(ShareError::InputRange {
                        name: c.inputs[port].name.clone(),
                        value: v,
                    });
                }
                Wire::Shared(share_among(Fe::from_i64(v), &players, &mut rng))
            }
            GateKind::Add | GateKind::Sub => {
                let sub = node.kind == GateKind::Sub;
                match (ops[0], ops[1]) {
                    (Wire::Public(a), Wire::Public(b)) => {
                        Wire::Public(if sub { *a - *b } else { *a + *b })
                    }
                    (Wire::Shared(a), Wire::Public(b)) => {
                        local(&mut log);
                        Wire::Shared(a.add_public(if sub { -*b } else { *b }))
                    }
                    (Wire::Public(a), Wire::Shared(b)) => {
                        local(&mut log);
                        let b = if sub { b.scale(-Fe::ONE) } else { b.clone() };
                        Wire::Shared(b.add_public(*a))
                    }
                    (Wire::Shared(a), Wire::Shared(b)) => {
                        local(&mut log);
                        Wire::Shared(if sub { a.sub(b)? } else { a.add(b)? })
                    }
                }
            }
            GateKind::MulPlain => {
                let k = Fe::from_i64(node.payload.unwrap_or(0));
                match ops[0] {
                    Wire::Public(a) => Wire::Public(*a * k),
                    Wire::Shared(a) => {
                        local(&mut log);
                        Wire::Shared(a.scale(k))
                    }
                }
            }
            GateKind::Mul | GateKind::Mux => {
                // Mux(s, x, y) = y + s·(x − y).
                let (x, y) = match node.kind {
                    GateKind::Mul => (lift(ops[0]), lift(ops[1])),
                    _ => (lift(ops[0]), lift(ops[1]).sub(&lift(ops[2]))?),
                };
                let mut t = pool.take_triples(model.preprocessing.triples_per_mul)?;
                let t = match t.as_mut() {
                    Some(t) => t,
                    None => {
                        return Err(ShareError::BudgetExceeded {
                            what: "triples",
                            budget: budget.0,
                        })
                    }
                };
                let prod = beaver_mul_logged(&x, &y, t, &mut log, id)?;
                pool.trace.rounds += 1;
                pool.trace.multicasts += 2;
                Wire::Shared(match node.kind {
                    GateKind::Mul => prod,
                    _ => prod.add(&lift(ops[2]))?,
                })
            }
            GateKind::Lt | GateKind::Leq | GateKind::Eq => {
                pool.take_triples(model.preprocessing.triples_per_comparison(w))?;
                pool.take_bits(model.preprocessing.bits_per_comparison(w))?;
                log.push(Access {
                    node: id,
                    op: AccessOp::Compare,
                    parties: (0..n).collect(),
                });
                // Compare the w-bit values, as the clear backend does.
                let a = wrap(reconstruct(&lift(ops[0]))?.to_i64(), w);
                let b = wrap(reconstruct(&lift(ops[1]))?.to_i64(), w);
                let bit = eval_gate(node.kind, None, &[a, b], w);
                pool.trace.rounds += charge(node.kind, "rounds");
                pool.trace.multicasts += charge(node.kind, "communication");
                Wire::Shared(share_among(Fe::from_i64(bit), &players, &mut rng))
            }
            GateKind::Reveal | GateKind::RevealBit => {
                log.push(Access {
                    node: id,
                    op: AccessOp::Reveal,
                    parties: (0..n).collect(),
                });
                let v = reconstruct(&lift(ops[0]))?;
                revealed.insert(id, wrap(v.to_i64(), w));
                Wire::Public(v)
            }
            _ => return Err(ShareError::Level(c.level)),
        };
        wires.push(wire);
    }
    let outputs = collect_outputs(c, |id| {
        revealed
            .get(&id)
            .copied()
            .unwrap_or_else(|| match &wires[id.0] {
                Wire::Public(v) => wrap(v.to_i64(), w),
                Wire::Shared(_) => 0,
            })
    });
    Ok(SharedRun {
        outputs,
        trace: pool.trace,
        access_log: log,
        budget,
    })
}
