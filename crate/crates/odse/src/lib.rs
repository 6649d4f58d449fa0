//! Labeled-graph classification in an optimized dissimilarity space.
//!
//! Input graphs are embedded as vectors of TWEC dissimilarities to a set of
//! prototype graphs (the representation set). The representation set is
//! synthesized by a genetic algorithm around two information-theoretic
//! operations: clustering-based compression, whose cluster radius is derived
//! analytically from the compression threshold for both a kernel-based
//! quadratic Rényi entropy estimator and an entropic-MST estimator, and
//! entropy-gated expansion, which swaps uninformative prototypes for
//! maximally dissimilar training graphs. Classification in the embedded
//! space uses a k-NN rule with deterministic tie-breaking.

pub mod bench;
pub mod bsas;
pub mod classify;
pub mod dm;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod model;
pub mod optimizer;
pub mod prototypes;
pub mod run;
pub mod twec;

pub use error::{OdseError, Result};
