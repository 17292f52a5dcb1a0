//! Approximate LTL model checking by prediction.
//!
//! The crate pairs an exact explicit-state LTL model checker with a
//! gradient-boosted regression tree classifier trained on its verdicts.
//! The [`pipeline`] module generates labeled (Kripke structure, formula)
//! datasets with the checker, splits them by a seeded fraction, trains the
//! predictor, and benchmarks accuracy and per-record running time of both
//! paths. Everything is deterministic under fixed seeds.

pub mod checker;
pub mod features;
pub mod gbrt;
pub mod kripke;
pub mod ltl;
pub mod pipeline;
pub mod rng;
