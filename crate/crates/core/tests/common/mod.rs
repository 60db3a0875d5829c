//! Shared helpers for integration tests: corpus access, the compile
//! pipeline, an independent reference interpreter, a random program
//! generator and a table of typing judgments.
#![allow(dead_code)]

pub mod gen;
pub mod judgments;
pub mod oracle;

use std::path::PathBuf;

use mpcc_core::backends::InputValues;
use mpcc_core::estimator::CostModel;
use mpcc_core::frontend::{parse_source, Program};
use mpcc_core::hir::Circuit;
use mpcc_core::lowering::{lower_program, LowerConfig};
use mpcc_core::optimizer::{optimize, PassList};
use mpcc_core::typecheck::check_program;

pub const CORPUS: [&str; 6] = ["gcd", "auction", "mergesort", "matvec", "pow8", "adder"];

pub fn corpus_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("corpus")
        .join(file)
}

pub fn corpus_src(name: &str) -> String {
    std::fs::read_to_string(corpus_path(&format!("{name}.hml"))).unwrap()
}

/// Sample inputs shipped with the corpus program.
pub fn corpus_inputs(name: &str) -> InputValues {
    let file = if name == "auction" {
        "bids.json".to_string()
    } else {
        format!("{name}.inputs.json")
    };
    InputValues::from_json(&std::fs::read_to_string(corpus_path(&file)).unwrap()).unwrap()
}

pub fn parse(src: &str) -> Program {
    parse_source(src).unwrap_or_else(|e| panic!("{e}\n{src}"))
}

pub fn config(w: u32) -> LowerConfig {
    LowerConfig {
        bitwidth: w,
        ..LowerConfig::default()
    }
}

/// Typecheck and lower without optimizing.
pub fn lower_with(p: &Program, cfg: &LowerConfig) -> Circuit {
    let tp = check_program(p, cfg.scheme).unwrap_or_else(|e| panic!("type errors: {e:?}"));
    lower_program(&tp, cfg).unwrap_or_else(|e| panic!("lowering: {e}"))
}

pub fn lower(src: &str, w: u32) -> Circuit {
    lower_with(&parse(src), &config(w))
}

/// Lower and run every pass under the secret-sharing model.
pub fn compile(src: &str, w: u32) -> Circuit {
    optimize(
        &lower(src, w),
        &PassList::default(),
        &CostModel::default_secret_sharing(),
    )
}
