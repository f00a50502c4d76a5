//! Desk-scale virtual screening toolkit.
//!
//! The crate bundles the algorithmic core of a small-molecule screening
//! platform: molecular graph parsing and canonicalization ([`chem`]),
//! similarity functions ([`similarity`]), evolutionary pairing for property
//! prediction ([`mevon`]), numeric knowledge-graph embeddings ([`kg`]),
//! Wasserstein source-domain selection ([`domains`]), message-passing
//! prediction heads with a built-in gradient tape ([`autograd`], [`mpnn`]),
//! guided graph diffusion ([`diffusion`]), and the CLI / job-service shell
//! ([`pipeline`]).
//!
//! Every stochastic routine takes an explicit seed and is bit-reproducible
//! when single-threaded; see the `examples/` directory for one runnable
//! walkthrough per capability.

pub mod chem;
pub mod kg;
pub mod mevon;
pub mod similarity;
pub mod linalg;
