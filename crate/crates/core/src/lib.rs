//! Error-correcting output codes for multiclass classification.
//!
//! The centerpiece is [`coding::build_matching_code`]: starting from
//! singleton class subsets, every round scores all subset pairs by
//! cross-validated binary accuracy, pairs them with an exact
//! minimum-weight perfect matching and merges each pair, emitting one code
//! column per pair until two subsets remain. An N-class problem gets N-1
//! binary classifiers. Classic one-vs-one, one-vs-all, dense random and
//! sparse random codes are provided as baselines, together with a kernel
//! SVM base learner, three decoders and a cross-validated benchmark
//! harness.

pub mod benchmark;
pub mod coding;
pub mod dataset;
pub mod decoding;
pub mod ensemble;
pub mod error;
pub mod learner;
pub mod matching;
pub mod seed;
pub mod svm;
pub mod util;

pub use error::{EcocError, Result};
