//! Embedding machinery for maximum-degree-2 spanning subgraphs of random
//! hosts.
//!
//! The pipeline: generate or load a host graph and a pattern from the
//! degree-at-most-2 family, split the pattern into seven classes with
//! independence guarantees ([`pattern`]), split the host vertex set and
//! reserve a small matching ([`goodness`]), then place the pattern class by
//! class through saturating matchings in auxiliary bipartite graphs
//! ([`embedder`]). Every Hall condition is checked at runtime: a stage either
//! saturates or returns a deficiency witness. [`harness`] wraps the pipeline
//! in reproducible Monte-Carlo trials; [`goodness`] also hosts the
//! statistical property checkers with their Chernoff-bound predictions.

#![forbid(unsafe_code)]

pub mod embedder;
pub mod goodness;
pub mod graph;
pub mod harness;
pub mod matching;
pub mod pattern;
pub mod rng;

/// The common size unit `ceil(eps * n)` used by both the pattern and the
/// site partitions; a small tolerance keeps exact products like 0.02*50
/// from rounding up through float noise.
pub fn eps_unit(n: usize, eps: f64) -> usize {
    (eps * n as f64 - 1e-9).ceil().max(0.0) as usize
}
