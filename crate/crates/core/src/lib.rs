//! Compiler from an ownership-annotated imperative language to oblivious
//! circuits, with cost estimation and simulated secure execution.
//!
//! Pipeline: [`frontend`] parses source, [`typecheck`] enforces owner-set
//! information flow, [`lowering`] produces a [`hir::Circuit`], [`optimizer`]
//! rewrites it, [`estimator`] prices it and [`backends`] run it.

pub mod backends;
pub mod estimator;
pub mod frontend;
pub mod hir;
pub mod lowering;
pub mod optimizer;
pub mod typecheck;
