//! Finite-difference check of the window gradient.

use super::model::{log_prob_raw, window_context, window_range, GradAccumulator, Scratch};
use super::{ascend_window, EmbeddingModel};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::hetgraph::NodeId;

/// Compares the analytic gradient of the window log-probability at
/// `(node, t)` against central differences for every parameter the window
/// touches: the node vector, the context token vectors, the shared `u` and
/// `b`, and the classifiers on the target's path. Returns the largest
/// relative error `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn grad_check(model: &EmbeddingModel, corpus: &Corpus, node: NodeId, t: usize, epsilon: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside [1e-7, 1e-3]")));
    }
    let window = model.provenance.window;
    if node >= corpus.num_nodes() || !corpus.has_context(node) {
        return Err(Error::invalid(format!("node {node} has no context")));
    }
    if !window_range(corpus.samples, window).contains(&t) {
        return Err(Error::invalid(format!("position {t} outside window-valid range")));
    }
    let tokens = corpus.context(node);
    let mut ctx = Vec::new();
    window_context(tokens, t, window, &mut ctx);
    let target = tokens[t];
    let layout = model.layout;
    let d = layout.dim;

    let mut analytic = vec![0.0; model.params.len()];
    {
        let mut acc = GradAccumulator {
            params: &model.params,
            grad: &mut analytic,
        };
        ascend_window(&mut acc, &layout, &model.tree, &ctx, node, target, 1.0, &mut Scratch::new(d));
    }

    let mut indices: Vec<usize> = (layout.node(node)..layout.node(node) + d).collect();
    let mut distinct = ctx.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for &tok in &distinct {
        let o = layout.token(tok as usize);
        indices.extend(o..o + d);
    }
    indices.extend(layout.shared_weight()..=layout.shared_bias());
    for &k in model.tree.points(target as usize) {
        let o = layout.inner_weight(k as usize);
        indices.extend(o..o + 2 * d);
        indices.push(layout.inner_bias(k as usize));
    }

    let mut params = model.params.clone();
    let mut worst: f64 = 0.0;
    for i in indices {
        let orig = params[i];
        params[i] = orig + epsilon;
        let up = log_prob_raw(&params, &layout, &model.tree, &ctx, node, target);
        params[i] = orig - epsilon;
        let down = log_prob_raw(&params, &layout, &model.tree, &ctx, node, target);
        params[i] = orig;
        let numeric = (up - down) / (2.0 * epsilon);
        let a = analytic[i];
        let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(err);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Lexicon, TokenId};
    use crate::seed;
    use crate::walklang::WalkMode;
    use rand::Rng;

    fn toy() -> (Corpus, Lexicon) {
        let contexts: Vec<Vec<TokenId>> = (0..3)
            .map(|v| (0..12).map(|i| ((i * 5 + v * 2) % 7) as TokenId).collect())
            .collect();
        let mut freq = [0u64; 7];
        contexts.iter().flatten().for_each(|&t| freq[t as usize] += 1);
        let lex = Lexicon::from_entries((0..7).map(|i| (format!("t{i}"), freq[i]))).unwrap();
        (Corpus { contexts, samples: 12, walk_length: 3, mode: WalkMode::Haw }, lex)
    }

    fn random_model(s: u64) -> (EmbeddingModel, Corpus) {
        let (c, lex) = toy();
        let mut m = EmbeddingModel::zeros(&c, &lex, 4, 2).unwrap();
        let mut rng = seed::rng(s);
        for p in m.params_mut() {
            *p = rng.gen_range(-1.0..1.0);
        }
        (m, c)
    }

    #[test]
    fn random_models_pass() {
        for s in 0..20 {
            let (m, c) = random_model(s);
            for t in [2, 5, 9] {
                let e = grad_check(&m, &c, (s % 3) as usize, t, 1e-5).unwrap();
                assert!(e < 1e-4, "seed {s} t {t}: {e}");
            }
        }
    }

    #[test]
    fn zero_model_agrees() {
        let (c, lex) = toy();
        let m = EmbeddingModel::zeros(&c, &lex, 4, 2).unwrap();
        assert!(grad_check(&m, &c, 0, 4, 1e-4).unwrap() < 1e-9);
    }

    #[test]
    fn error_shrinks_with_epsilon() {
        let (m, c) = random_model(99);
        let coarse = grad_check(&m, &c, 1, 5, 1e-3).unwrap();
        let fine = grad_check(&m, &c, 1, 5, 1e-5).unwrap();
        assert!(fine < coarse, "{fine} !< {coarse}");
    }

    #[test]
    fn bad_arguments() {
        let (m, c) = random_model(0);
        assert!(grad_check(&m, &c, 0, 5, 1e-2).is_err());
        assert!(grad_check(&m, &c, 0, 1, 1e-5).is_err());
        assert!(grad_check(&m, &c, 7, 5, 1e-5).is_err());
    }
}
