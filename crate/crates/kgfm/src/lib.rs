//! Multi-relational link prediction: tensor-factorization models, their
//! reformulation as message-passing layers over node states, and a filtered
//! entity-ranking evaluation harness.
//!
//! The crate is organised around six pieces:
//!
//! - [`kg`]: triple files, vocabularies, adjacency indices, reciprocal
//!   augmentation, node feature matrices.
//! - [`scoring`]: the DistMult / ComplEx / CP / RESCAL / TuckER scoring
//!   functions and their closed-form gradients.
//! - [`training`]: the 1vsAll + relation-prediction objective, N3
//!   regularization, SGD/AdaGrad, the mini-batch trainer, and periodic
//!   embedding forgetting.
//! - [`refactor`]: gradient descent on entity embeddings recast as a GNN
//!   layer (message / aggregate / global normalizer), the external node-state
//!   cache with push/pull/clear, layer-wise relation training, and inductive
//!   inference on graphs with unseen entities.
//! - [`eval`]: filtered MRR / Hits@K under full and partial ranking
//!   protocols, plus a brute-force rank oracle.
//! - [`driver`]: run orchestration shared by the CLI (train / eval /
//!   inductive / verify) with checkpointing.

pub mod checkpoint;
pub mod config;
pub mod driver;
pub mod eval;
pub mod kg;
pub mod refactor;
pub mod scoring;
pub mod synth;
pub mod training;

mod error;

pub use error::{Error, Result};
