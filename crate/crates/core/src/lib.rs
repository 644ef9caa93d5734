//! Structural-role node embeddings for heterogeneous networks.
//!
//! The pipeline samples random walks from every node, rewrites each walk as
//! an anonymous token (plain, typed, or coarse typed), and trains a
//! paragraph-vector model in which every node is a "document" whose words
//! are the tokens sampled from it. Nodes with the same typed neighborhood
//! structure end up close in embedding space.
//!
//! Modules:
//! - [`hetgraph`]: typed graph, TSV IO, synthetic generators, typed WL roles
//! - [`walklang`]: walk sampling, anonymization, counting and exact oracles
//! - [`corpus`]: per-node token contexts and the lexicon
//! - [`pvdm`]: hierarchical-softmax paragraph-vector trainer
//! - [`evalharness`]: classification, similarity search, sweeps, runtime

pub mod corpus;
pub mod error;
pub mod evalharness;
pub mod hetgraph;
pub mod par;
pub mod pvdm;
pub mod seed;
pub mod walklang;

pub use corpus::{build_corpus, Corpus, Lexicon};
pub use error::{Error, Result};
pub use hetgraph::{HeteroGraph, RoleLabeling};
pub use pvdm::{train, EmbeddingModel, TrainConfig};
pub use walklang::WalkMode;
