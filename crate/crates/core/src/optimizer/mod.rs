//! Circuit-to-circuit rewrites and the pass pipeline.

mod algebra;
mod cmp_rewrite;
mod passes;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::estimator::CostModel;
use crate::hir::Circuit;

pub use algebra::{pow_by_squaring, pow_linear, tree_reduce};
pub use cmp_rewrite::cmp_rewrite;
pub use passes::{const_fold, cse, dce, peephole, strength_reduce};

/// Pipeline rounds before giving up on a fixpoint.
pub const MAX_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pass {
    ConstFold,
    Peephole,
    StrengthReduce,
    /// Acts during lowering (`pow` by repeated squaring); a no-op on circuits.
    PowRewrite,
    Cse,
    Dce,
    CmpRewrite,
}

impl Pass {
    pub const ALL: [Pass; 7] = [
        Pass::ConstFold,
        Pass::Peephole,
        Pass::StrengthReduce,
        Pass::PowRewrite,
        Pass::Cse,
        Pass::Dce,
        Pass::CmpRewrite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pass::ConstFold => "const_fold",
            Pass::Peephole => "peephole",
            Pass::StrengthReduce => "strength_reduce",
            Pass::PowRewrite => "pow_rewrite",
            Pass::Cse => "cse",
            Pass::Dce => "dce",
            Pass::CmpRewrite => "cmp_rewrite",
        }
    }

    pub fn run(self, c: &Circuit, model: &CostModel) -> Circuit {
        match self {
            Pass::ConstFold => const_fold(c),
            Pass::Peephole => peephole(c),
            Pass::StrengthReduce => strength_reduce(c),
            Pass::PowRewrite => c.clone(),
            Pass::Cse => cse(c),
            Pass::Dce => dce(c),
            Pass::CmpRewrite => cmp_rewrite(c, model),
        }
    }
}

impl fmt::Display for Pass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown pass `{0}`")]
pub struct UnknownPass(pub String);

impl FromStr for Pass {
    type Err = UnknownPass;

    fn from_str(s: &str) -> Result<Pass, UnknownPass> {
        Pass::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| UnknownPass(s.to_string()))
    }
}

/// Ordered passes, run as a whole until nothing changes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassList(pub Vec<Pass>);

impl PassList {
    pub fn none() -> PassList {
        PassList(Vec::new())
    }

    pub fn contains(&self, p: Pass) -> bool {
        self.0.contains(&p)
    }
}

impl Default for PassList {
    fn default() -> Self {
        PassList(Pass::ALL.to_vec())
    }
}

impl FromStr for PassList {
    type Err = UnknownPass;

    /// Comma-separated pass names; the empty string is the empty list.
    fn from_str(s: &str) -> Result<PassList, UnknownPass> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map(PassList)
    }
}

impl fmt::Display for PassList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|p| p.name()).collect();
        f.write_str(&names.join(","))
    }
}

/// Run `passes` in order, repeating until a round leaves the circuit
/// unchanged or [`MAX_ROUNDS`] is reached.
pub fn optimize(c: &Circuit, passes: &PassList, model: &CostModel) -> Circuit {
    let mut cur = c.clone();
    for _ in 0..MAX_ROUNDS {
        let next = passes
            .0
            .iter()
            .fold(cur.clone(), |acc, p| p.run(&acc, model));
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{interpret_clear, InputValues};
    use crate::estimator::{critical_path, estimate};
    use crate::frontend::parse_source;
    use crate::hir::{validate, GateKind};
    use crate::lowering::{lower_program, LowerConfig};
    use crate::typecheck::{check_program, Scheme};

    fn lower_with(src: &str, cfg: LowerConfig) -> Circuit {
        let tp = check_program(&parse_source(src).unwrap(), Scheme::Generic).unwrap();
        lower_program(
            &tp,
            &LowerConfig {
                bitwidth: 16,
                ..cfg
            },
        )
        .unwrap()
    }

    fn lower(src: &str) -> Circuit {
        lower_with(src, LowerConfig::default())
    }

    fn ss() -> CostModel {
        CostModel::default_secret_sharing()
    }

    #[test]
    fn pass_names_round_trip() {
        let list: PassList = "const_fold,peephole,strength_reduce,pow_rewrite,cse,dce,cmp_rewrite"
            .parse()
            .unwrap();
        assert_eq!(list, PassList::default());
        assert_eq!(list.to_string().parse::<PassList>().unwrap(), list);
        assert_eq!("".parse::<PassList>().unwrap(), PassList::none());
        assert_eq!(
            "cse,frob".parse::<PassList>(),
            Err(UnknownPass("frob".into()))
        );
    }

    #[test]
    fn matvec_strength_reduction_halves_mulplain() {
        let c = lower(include_str!("../../corpus/matvec.hml"));
        let before = c.count(GateKind::MulPlain) + c.count(GateKind::Mul);
        assert_eq!(before, 30);
        let r = strength_reduce(&c);
        assert_eq!(r.count(GateKind::MulPlain), 15);
        assert_eq!(r.count(GateKind::Mul), 0);
    }

    #[test]
    fn pow8_squaring_versus_linear() {
        let src = include_str!("../../corpus/pow8.hml");
        let mut unit = ss();
        unit.depth_weights = [(GateKind::Mul, 1)].into();
        let fast = optimize(&lower(src), &PassList::default(), &ss());
        assert_eq!(fast.count(GateKind::Mul), 3);
        assert_eq!(critical_path(&fast, &unit.depth_weights), 3);
        let mul_ids: Vec<usize> = fast
            .nodes
            .iter()
            .filter(|n| n.kind == GateKind::Mul)
            .map(|n| n.id.0)
            .collect();
        assert!(mul_ids.windows(2).all(|w| w[0] < w[1]));
        let slow = lower_with(
            src,
            LowerConfig {
                pow_by_squaring: false,
                ..LowerConfig::default()
            },
        );
        assert_eq!(slow.count(GateKind::Mul), 7);
        assert_eq!(critical_path(&slow, &unit.depth_weights), 7);
    }

    #[test]
    fn cse_example_shares_the_sum() {
        let src = "parties 0; input a : int from 0; input b : int from 0; input c : int from 0;
                   val x : int@{0} := a + b; val y : int@{0} := (a + b) * c;
                   output eval({0}, x); output eval({0}, y);";
        let c = lower(src);
        assert_eq!(c.count(GateKind::Add), 2);
        assert_eq!(cse(&c).count(GateKind::Add), 1);
    }

    #[test]
    fn pipeline_is_sound_and_idempotent_on_corpus() {
        let corpus = [
            (
                include_str!("../../corpus/gcd.hml"),
                include_str!("../../corpus/gcd.inputs.json"),
            ),
            (
                include_str!("../../corpus/auction.hml"),
                include_str!("../../corpus/bids.json"),
            ),
            (
                include_str!("../../corpus/mergesort.hml"),
                include_str!("../../corpus/mergesort.inputs.json"),
            ),
            (
                include_str!("../../corpus/matvec.hml"),
                include_str!("../../corpus/matvec.inputs.json"),
            ),
            (
                include_str!("../../corpus/pow8.hml"),
                include_str!("../../corpus/pow8.inputs.json"),
            ),
            (
                include_str!("../../corpus/adder.hml"),
                include_str!("../../corpus/adder.inputs.json"),
            ),
        ];
        for (src, inputs) in corpus {
            let c = lower(src);
            let o = optimize(&c, &PassList::default(), &ss());
            assert!(validate(&o).is_ok());
            assert_eq!(optimize(&o, &PassList::default(), &ss()), o);
            assert!(o.len() <= c.len());
            let (before, after) = (estimate(&c, &ss()).unwrap(), estimate(&o, &ss()).unwrap());
            for (k, v) in &after.totals {
                assert!(*v <= before.totals[k], "{k} grew");
            }
            let inputs = InputValues::from_json(inputs).unwrap();
            assert_eq!(
                interpret_clear(&c, &inputs).unwrap(),
                interpret_clear(&o, &inputs).unwrap()
            );
        }
    }
}
