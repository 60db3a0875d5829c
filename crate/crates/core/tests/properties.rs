//! Property tests over random circuits, random programs and the corpus.

mod common;

use common::{compile, corpus_src, gen, lower_with, oracle, parse};
use mpcc_core::backends::{interpret_clear, simulate_shared, InputValues};
use mpcc_core::estimator::{critical_path, estimate, CostModel};
use mpcc_core::frontend::{parse_source, pretty_print};
use mpcc_core::hir::{validate, Circuit, GateKind, NodeId};
use mpcc_core::lowering::{bitblast, Builder, LowerConfig};
use mpcc_core::optimizer::{
    const_fold, cse, dce, optimize, peephole, strength_reduce, Pass, PassList,
};
use mpcc_core::typecheck::{OwnerSet, Scheme};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// One random gate: an opcode, three operand picks and a constant.
type GateSpec = (u8, usize, usize, usize, i64);

fn circuit_spec() -> impl Strategy<Value = (Vec<GateSpec>, Vec<usize>)> {
    (
        prop::collection::vec(
            (
                0u8..9,
                any::<usize>(),
                any::<usize>(),
                any::<usize>(),
                -5i64..6,
            ),
            1..40,
        ),
        prop::collection::vec(any::<usize>(), 1..4),
    )
}

/// Arith circuit over inputs `x`, `y` (parties 0, 1) and `z` (party 0).
fn build((gates, outs): &(Vec<GateSpec>, Vec<usize>), w: u32) -> Circuit {
    let all = OwnerSet::new([0, 1]);
    let mut b = Builder::new(w, Scheme::Generic, all.clone(), false);
    let mut nodes: Vec<NodeId> = vec![
        b.input(0, "x".into()),
        b.input(1, "y".into()),
        b.input(0, "z".into()),
    ];
    let mut bits: Vec<NodeId> = Vec::new();
    for &(op, i, j, k, v) in gates {
        let pick = |n: usize| nodes[n % nodes.len()];
        let id = match op {
            0 => b.gate(GateKind::Add, vec![pick(i), pick(j)]),
            1 => b.gate(GateKind::Sub, vec![pick(i), pick(j)]),
            2 => b.gate(GateKind::Mul, vec![pick(i), pick(j)]),
            3..=5 => {
                let kind = [GateKind::Lt, GateKind::Eq, GateKind::Leq][op as usize - 3];
                let r = b.gate(kind, vec![pick(i), pick(j)]);
                bits.extend(r.as_ref().ok().copied());
                r
            }
            6 if !bits.is_empty() => b.mux(bits[i % bits.len()], pick(j), pick(k)),
            7 => Ok(b.konst(v)),
            _ => Ok(b.mul_plain(pick(i), v)),
        };
        nodes.push(id.unwrap());
    }
    for (n, o) in outs.iter().enumerate() {
        let r = b.reveal(nodes[o % nodes.len()], all.clone());
        b.output(r, all.clone(), format!("o{n}"));
    }
    b.finish()
}

fn inputs(x: i64, y: i64, z: i64) -> InputValues {
    let mut iv = InputValues::new();
    iv.insert(0, "x", x);
    iv.insert(1, "y", y);
    iv.insert(0, "z", z);
    iv
}

fn ss() -> CostModel {
    CostModel::default_secret_sharing()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_pass_is_sound(spec in circuit_spec(), vals in prop::collection::vec((-20i64..20, -20i64..20, -20i64..20), 4)) {
        let c = build(&spec, 16);
        for pass in Pass::ALL {
            let r = pass.run(&c, &ss());
            prop_assert!(validate(&r).is_ok(), "{pass} produced an invalid circuit");
            for &(x, y, z) in &vals {
                let iv = inputs(x, y, z);
                prop_assert_eq!(interpret_clear(&c, &iv).unwrap(), interpret_clear(&r, &iv).unwrap(), "{}", pass);
            }
        }
    }

    #[test]
    fn shrinking_passes_never_grow(spec in circuit_spec()) {
        let c = build(&spec, 16);
        for (name, pass) in [("cse", cse as fn(&Circuit) -> Circuit), ("dce", dce), ("peephole", peephole), ("strength_reduce", strength_reduce), ("const_fold", const_fold)] {
            prop_assert!(pass(&c).len() <= c.len(), "{} grew the circuit", name);
        }
    }

    #[test]
    fn pipeline_is_idempotent_and_never_costlier(spec in circuit_spec(), (x, y, z) in (-20i64..20, -20i64..20, -20i64..20)) {
        let c = build(&spec, 16);
        let once = optimize(&c, &PassList::default(), &ss());
        let twice = optimize(&once, &PassList::default(), &ss());
        prop_assert_eq!(once.to_json(), twice.to_json());
        prop_assert!(once.len() <= c.len());
        let (before, after) = (estimate(&c, &ss()).unwrap(), estimate(&once, &ss()).unwrap());
        prop_assert!(after.grand_total() <= before.grand_total());
        let iv = inputs(x, y, z);
        prop_assert_eq!(interpret_clear(&c, &iv).unwrap(), interpret_clear(&once, &iv).unwrap());
    }

    #[test]
    fn bit_level_agrees_with_word_level(spec in circuit_spec(), (x, y, z) in (-30i64..30, -30i64..30, -30i64..30)) {
        let c = build(&spec, 8);
        let iv = inputs(x, y, z);
        prop_assert_eq!(interpret_clear(&bitblast(&c).unwrap(), &iv).unwrap(), interpret_clear(&c, &iv).unwrap());
    }

    #[test]
    fn squaring_matches_repeated_multiplication(n in 0u32..40, x in -6i64..6) {
        let src = format!("parties 1; input x : int from 1; output eval({{1}}, pow(x, {n}));");
        let p = parse(&src);
        let fast = lower_with(&p, &LowerConfig { bitwidth: 32, ..LowerConfig::default() });
        let slow = lower_with(&p, &LowerConfig { bitwidth: 32, pow_by_squaring: false, ..LowerConfig::default() });
        let mut iv = InputValues::new();
        iv.insert(1, "x", x);
        prop_assert_eq!(interpret_clear(&fast, &iv).unwrap(), interpret_clear(&slow, &iv).unwrap());
        prop_assert_eq!(interpret_clear(&fast, &iv).unwrap(), oracle::run(&p, &iv, 32).unwrap());
    }

    #[test]
    fn generated_programs_print_and_reparse(seed in any::<u64>()) {
        let (_, p) = gen::program(&mut ChaCha20Rng::seed_from_u64(seed));
        let text = pretty_print(&p);
        let again = parse_source(&text).unwrap();
        prop_assert_eq!(pretty_print(&again), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn corpus_backends_agree(seed in any::<u64>(), arr in prop::collection::vec(-500i64..500, 4), bids in prop::collection::vec(0i64..500, 3)) {
        let mut sorted = arr.clone();
        sorted.sort_unstable();
        let mut iv = InputValues::new();
        iv.insert_array(1, "arr", &arr);
        let c = compile(&corpus_src("mergesort"), 16);
        let clear = interpret_clear(&c, &iv).unwrap();
        prop_assert_eq!(clear.values().copied().collect::<Vec<_>>(), sorted);
        prop_assert_eq!(&simulate_shared(&c, &iv, 3, seed).unwrap().outputs, &clear);

        let mut iv = InputValues::new();
        for (p, b) in bids.iter().enumerate() {
            iv.insert(p as u32, format!("b{p}"), *b);
        }
        let c = compile(&corpus_src("auction"), 16);
        let clear = interpret_clear(&c, &iv).unwrap();
        let (winner, price) = oracle::second_price(&bids);
        prop_assert_eq!((clear["winner"], clear["price"]), (winner, price));
        prop_assert_eq!(&simulate_shared(&c, &iv, 3, seed).unwrap().outputs, &clear);
        prop_assert_eq!(&interpret_clear(&bitblast(&c).unwrap(), &iv).unwrap(), &clear);
    }
}

#[test]
fn power_of_two_exponents_need_log_many_multiplications() {
    let mut unit = ss();
    unit.depth_weights = [(GateKind::Mul, 1)].into();
    for k in 0..=6u32 {
        let src = format!(
            "parties 1; input x : int from 1; output eval({{1}}, pow(x, {}));",
            1u32 << k
        );
        let c = optimize(
            &lower_with(&parse(&src), &LowerConfig::default()),
            &PassList::default(),
            &unit,
        );
        assert_eq!(c.count(GateKind::Mul), k as usize, "2^{k}");
        assert_eq!(
            critical_path(&c, &unit.depth_weights),
            u64::from(k),
            "2^{k}"
        );
    }
}
