//! Paragraph-vector training over walk corpora.
//!
//! Each node plays the role of a paragraph and the tokens sampled from it
//! are its words. A token is predicted from the sum of its neighbors in a
//! window of half-width Δ together with the node's own vector, through a
//! hierarchical softmax over a Huffman tree of the lexicon.

mod export;
mod gradcheck;
mod huffman;
mod model;
mod train;

pub use export::{export_embeddings, read_embeddings, Embeddings};
pub use gradcheck::grad_check;
pub use huffman::HuffmanTree;
pub use model::{
    context_log_prob, objective, score, window_log_prob, window_range, EmbeddingModel, Layout, Provenance,
};
pub use train::{full_batch_ascent, full_gradient, train, train_with_report, TrainConfig, TrainReport};

pub(crate) use model::ascend_window;

/// `exp(window log-prob)` summed over every possible target, for an
/// explicit context. Equals 1 for any parameter values.
pub fn leaf_probability_sum(
    model: &EmbeddingModel,
    context: &[crate::corpus::TokenId],
    node: crate::hetgraph::NodeId,
) -> crate::Result<f64> {
    let mut total = 0.0;
    for t in 0..model.lexicon_size() as u32 {
        total += context_log_prob(model, context, node, t)?.exp();
    }
    Ok(total)
}
