//! Parameters, forward pass and per-window gradients.
//!
//! For node `v` and window center `t` the input is `x = [ŵ, z_v]`, where
//! `ŵ` sums the token vectors at positions `t-Δ..t+Δ` except `t` itself.
//! The shared prediction `y = b + u·x` is extended to each internal
//! Huffman node `k` with its own offsets, giving the branch logit
//! `s_k = (b + c_k) + (u + v_k)·x`. The log-probability of the target token
//! is `sum_k log σ(±s_k)` along its code.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use super::HuffmanTree;
use crate::corpus::{Corpus, Lexicon, TokenId};
use crate::error::{Error, Result};
use crate::hetgraph::NodeId;
use crate::walklang::WalkMode;

/// Offsets of each parameter block inside the flat parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub dim: usize,
    pub num_nodes: usize,
    pub num_tokens: usize,
}

impl Layout {
    pub fn num_internal(&self) -> usize {
        self.num_tokens.saturating_sub(1)
    }
    #[inline]
    pub fn node(&self, v: usize) -> usize {
        v * self.dim
    }
    #[inline]
    pub fn token(&self, t: usize) -> usize {
        (self.num_nodes + t) * self.dim
    }
    #[inline]
    pub fn shared_weight(&self) -> usize {
        (self.num_nodes + self.num_tokens) * self.dim
    }
    #[inline]
    pub fn shared_bias(&self) -> usize {
        self.shared_weight() + 2 * self.dim
    }
    #[inline]
    pub fn inner_weight(&self, k: usize) -> usize {
        self.shared_bias() + 1 + k * 2 * self.dim
    }
    #[inline]
    pub fn inner_bias(&self, k: usize) -> usize {
        self.inner_weight(self.num_internal()) + k
    }
    pub fn len(&self) -> usize {
        self.inner_bias(self.num_internal())
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Settings recorded alongside trained embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub mode: WalkMode,
    pub walk_length: usize,
    pub samples: usize,
    pub window: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub(crate) params: Vec<f64>,
    pub(crate) layout: Layout,
    pub(crate) tree: HuffmanTree,
    pub(crate) provenance: Provenance,
    /// Nodes that had a context during training.
    pub(crate) trained: Vec<bool>,
}

impl EmbeddingModel {
    /// Node and token vectors uniform in `[-0.5/d, 0.5/d]`; every
    /// prediction parameter zero.
    pub fn init<R: Rng + ?Sized>(corpus: &Corpus, lexicon: &Lexicon, dim: usize, window: usize, rng: &mut R) -> Result<Self> {
        let mut model = Self::zeros(corpus, lexicon, dim, window)?;
        let scale = 0.5 / dim as f64;
        let end = model.layout.shared_weight();
        for p in &mut model.params[..end] {
            *p = rng.gen_range(-scale..scale);
        }
        for v in 0..model.layout.num_nodes {
            if !model.trained[v] {
                let o = model.layout.node(v);
                model.params[o..o + dim].fill(0.0);
            }
        }
        Ok(model)
    }

    pub fn zeros(corpus: &Corpus, lexicon: &Lexicon, dim: usize, window: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("embedding dimension must be at least 1"));
        }
        let tree = HuffmanTree::build(lexicon.frequencies())?;
        let layout = Layout {
            dim,
            num_nodes: corpus.num_nodes(),
            num_tokens: lexicon.len(),
        };
        Ok(EmbeddingModel {
            params: vec![0.0; layout.len()],
            layout,
            tree,
            provenance: Provenance {
                mode: corpus.mode,
                walk_length: corpus.walk_length,
                samples: corpus.samples,
                window,
            },
            trained: corpus.contexts.iter().map(|c| !c.is_empty()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.dim
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn tree(&self) -> &HuffmanTree {
        &self.tree
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn num_nodes(&self) -> usize {
        self.layout.num_nodes
    }

    pub fn lexicon_size(&self) -> usize {
        self.layout.num_tokens
    }

    pub fn is_trained(&self, v: NodeId) -> bool {
        self.trained[v]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn node_vec(&self, v: NodeId) -> &[f64] {
        let o = self.layout.node(v);
        &self.params[o..o + self.layout.dim]
    }

    pub fn token_vec(&self, t: TokenId) -> &[f64] {
        let o = self.layout.token(t as usize);
        &self.params[o..o + self.layout.dim]
    }

    pub fn shared_weight(&self) -> &[f64] {
        let o = self.layout.shared_weight();
        &self.params[o..o + 2 * self.layout.dim]
    }

    pub fn shared_bias(&self) -> f64 {
        self.params[self.layout.shared_bias()]
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Little-endian bytes of every parameter, for checksums.
    pub fn param_bytes(&self) -> Vec<u8> {
        self.params.iter().flat_map(|p| p.to_le_bytes()).collect()
    }

    fn check_ids(&self, context: &[TokenId], node: NodeId) -> Result<()> {
        if node >= self.layout.num_nodes {
            return Err(Error::invalid(format!("node {node} out of range")));
        }
        if let Some(&t) = context.iter().find(|&&t| t as usize >= self.layout.num_tokens) {
            return Err(Error::invalid(format!("token {t} out of range")));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

#[inline]
pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `[ŵ, z_v]` for a window.
fn input_vector(params: &[f64], layout: &Layout, context: &[TokenId], node: NodeId, x: &mut [f64]) {
    let d = layout.dim;
    x.fill(0.0);
    for &t in context {
        let o = layout.token(t as usize);
        for (xi, p) in x[..d].iter_mut().zip(&params[o..o + d]) {
            *xi += p;
        }
    }
    let o = layout.node(node);
    x[d..].copy_from_slice(&params[o..o + d]);
}

/// `y = b + u·[ŵ, z_v]`, the shared prediction score of a window.
pub fn score(model: &EmbeddingModel, context: &[TokenId], node: NodeId, target: TokenId) -> Result<f64> {
    if context.is_empty() {
        return Err(Error::invalid("context must not be empty"));
    }
    model.check_ids(context, node)?;
    model.check_ids(&[target], node)?;
    let mut x = vec![0.0; 2 * model.layout.dim];
    input_vector(&model.params, &model.layout, context, node, &mut x);
    Ok(model.shared_bias() + dot(model.shared_weight(), &x))
}

/// Forward-only log-probability of `target` given `context` and `node`.
pub(crate) fn log_prob_raw(
    params: &[f64],
    layout: &Layout,
    tree: &HuffmanTree,
    context: &[TokenId],
    node: NodeId,
    target: TokenId,
) -> f64 {
    let d = layout.dim;
    let mut x = vec![0.0; 2 * d];
    input_vector(params, layout, context, node, &mut x);
    let u = &params[layout.shared_weight()..layout.shared_weight() + 2 * d];
    let base = params[layout.shared_bias()] + dot(u, &x);
    let target = target as usize;
    tree.code(target)
        .iter()
        .zip(tree.points(target))
        .map(|(&bit, &k)| {
            let o = layout.inner_weight(k as usize);
            let s = base + params[layout.inner_bias(k as usize)] + dot(&params[o..o + 2 * d], &x);
            log_sigmoid(if bit { -s } else { s })
        })
        .sum()
}

/// Log-probability of an arbitrary target given an explicit context.
pub fn context_log_prob(model: &EmbeddingModel, context: &[TokenId], node: NodeId, target: TokenId) -> Result<f64> {
    model.check_ids(context, node)?;
    model.check_ids(&[target], node)?;
    Ok(log_prob_raw(&model.params, &model.layout, &model.tree, context, node, target))
}

/// Writes the context of window `t` (positions `t-Δ..=t+Δ` minus `t`).
#[inline]
pub(crate) fn window_context(tokens: &[TokenId], t: usize, window: usize, out: &mut Vec<TokenId>) {
    out.clear();
    out.extend_from_slice(&tokens[t - window..t]);
    out.extend_from_slice(&tokens[t + 1..=t + window]);
}

/// Valid window centers for contexts of length `samples`.
pub fn window_range(samples: usize, window: usize) -> std::ops::Range<usize> {
    if samples <= 2 * window {
        return 0..0;
    }
    window..samples - window
}

/// `log p(w_t | context, z_v)` for the token at position `t` of node `v`'s
/// context.
pub fn window_log_prob(model: &EmbeddingModel, corpus: &Corpus, node: NodeId, t: usize) -> Result<f64> {
    let window = model.provenance.window;
    if node >= corpus.num_nodes() || !corpus.has_context(node) {
        return Err(Error::invalid(format!("node {node} has no context")));
    }
    if !window_range(corpus.samples, window).contains(&t) {
        return Err(Error::invalid(format!(
            "position {t} outside window-valid range {:?}",
            window_range(corpus.samples, window)
        )));
    }
    let tokens = corpus.context(node);
    let mut ctx = Vec::with_capacity(2 * window);
    window_context(tokens, t, window, &mut ctx);
    context_log_prob(model, &ctx, node, tokens[t])
}

/// The training objective: mean window log-probability,
/// `1/(|V| T) sum_v sum_t log p`, over nodes with a context.
pub fn objective(model: &EmbeddingModel, corpus: &Corpus) -> f64 {
    let window = model.provenance.window;
    let mut ctx = Vec::with_capacity(2 * window);
    let mut total = 0.0;
    let mut nodes = 0usize;
    for (v, tokens) in corpus.contexts.iter().enumerate() {
        if tokens.is_empty() {
            continue;
        }
        nodes += 1;
        for t in window_range(corpus.samples, window) {
            window_context(tokens, t, window, &mut ctx);
            total += log_prob_raw(&model.params, &model.layout, &model.tree, &ctx, v, tokens[t]);
        }
    }
    total / (nodes.max(1) * corpus.samples) as f64
}

/// Parameter storage the window update writes through: plain slices for
/// deterministic training, relaxed atomics for hogwild workers, or a
/// read-one/write-another pair for accumulating exact gradients.
pub(crate) trait ParamStore {
    fn read(&self, offset: usize, out: &mut [f64]);
    fn get(&self, offset: usize) -> f64;
    fn dot(&self, offset: usize, x: &[f64]) -> f64;
    fn axpy(&mut self, offset: usize, alpha: f64, x: &[f64]);
    fn add(&mut self, offset: usize, delta: f64);
}

impl ParamStore for [f64] {
    #[inline]
    fn read(&self, offset: usize, out: &mut [f64]) {
        out.copy_from_slice(&self[offset..offset + out.len()]);
    }
    #[inline]
    fn get(&self, offset: usize) -> f64 {
        self[offset]
    }
    #[inline]
    fn dot(&self, offset: usize, x: &[f64]) -> f64 {
        dot(&self[offset..offset + x.len()], x)
    }
    #[inline]
    fn axpy(&mut self, offset: usize, alpha: f64, x: &[f64]) {
        for (p, xi) in self[offset..offset + x.len()].iter_mut().zip(x) {
            *p += alpha * xi;
        }
    }
    #[inline]
    fn add(&mut self, offset: usize, delta: f64) {
        self[offset] += delta;
    }
}

/// Shared parameters for lock-free concurrent updates. Loads and stores are
/// individually atomic; read-modify-write sequences may interleave.
pub(crate) struct AtomicParams(Vec<AtomicU64>);

impl AtomicParams {
    pub(crate) fn from_slice(p: &[f64]) -> Self {
        AtomicParams(p.iter().map(|x| AtomicU64::new(x.to_bits())).collect())
    }

    pub(crate) fn into_vec(self) -> Vec<f64> {
        self.0.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
    }

    pub(crate) fn view(&self) -> AtomicView<'_> {
        AtomicView(&self.0)
    }
}

pub(crate) struct AtomicView<'a>(&'a [AtomicU64]);

impl AtomicView<'_> {
    #[inline]
    fn load(&self, i: usize) -> f64 {
        f64::from_bits(self.0[i].load(Ordering::Relaxed))
    }
    #[inline]
    fn store(&self, i: usize, v: f64) {
        self.0[i].store(v.to_bits(), Ordering::Relaxed);
    }
}

impl ParamStore for AtomicView<'_> {
    fn read(&self, offset: usize, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.load(offset + i);
        }
    }
    fn get(&self, offset: usize) -> f64 {
        self.load(offset)
    }
    fn dot(&self, offset: usize, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(i, xi)| self.load(offset + i) * xi).sum()
    }
    fn axpy(&mut self, offset: usize, alpha: f64, x: &[f64]) {
        for (i, xi) in x.iter().enumerate() {
            self.store(offset + i, self.load(offset + i) + alpha * xi);
        }
    }
    fn add(&mut self, offset: usize, delta: f64) {
        self.store(offset, self.load(offset) + delta);
    }
}

/// Reads from `params`, accumulates writes into `grad`.
pub(crate) struct GradAccumulator<'a> {
    pub params: &'a [f64],
    pub grad: &'a mut [f64],
}

impl ParamStore for GradAccumulator<'_> {
    fn read(&self, offset: usize, out: &mut [f64]) {
        self.params.read(offset, out)
    }
    fn get(&self, offset: usize) -> f64 {
        self.params[offset]
    }
    fn dot(&self, offset: usize, x: &[f64]) -> f64 {
        ParamStore::dot(self.params, offset, x)
    }
    fn axpy(&mut self, offset: usize, alpha: f64, x: &[f64]) {
        self.grad.axpy(offset, alpha, x)
    }
    fn add(&mut self, offset: usize, delta: f64) {
        self.grad[offset] += delta;
    }
}

/// Scratch buffers for [`ascend_window`].
pub(crate) struct Scratch {
    x: Vec<f64>,
    e: Vec<f64>,
    u: Vec<f64>,
    inner: Vec<f64>,
    row: Vec<f64>,
}

impl Scratch {
    pub(crate) fn new(dim: usize) -> Self {
        Scratch {
            x: vec![0.0; 2 * dim],
            e: vec![0.0; 2 * dim],
            u: vec![0.0; 2 * dim],
            inner: vec![0.0; 2 * dim],
            row: vec![0.0; dim],
        }
    }
}

/// Adds `lr * ∇ log p(target | context, z_node)` to the store and returns
/// the log-probability before the update. Every gradient term is computed
/// from pre-update values, so with a [`GradAccumulator`] this yields the
/// exact gradient scaled by `lr`.
pub(crate) fn ascend_window<S: ParamStore + ?Sized>(
    store: &mut S,
    layout: &Layout,
    tree: &HuffmanTree,
    context: &[TokenId],
    node: NodeId,
    target: TokenId,
    lr: f64,
    s: &mut Scratch,
) -> f64 {
    let d = layout.dim;
    s.x.fill(0.0);
    for &t in context {
        store.read(layout.token(t as usize), &mut s.row);
        for (xi, r) in s.x[..d].iter_mut().zip(&s.row) {
            *xi += r;
        }
    }
    store.read(layout.node(node), &mut s.x[d..]);
    store.read(layout.shared_weight(), &mut s.u);
    let base = store.get(layout.shared_bias()) + dot(&s.u, &s.x);

    let target = target as usize;
    let mut log_p = 0.0;
    let mut g_total = 0.0;
    s.e.fill(0.0);
    for (&bit, &k) in tree.code(target).iter().zip(tree.points(target)) {
        let k = k as usize;
        let wo = layout.inner_weight(k);
        let bo = layout.inner_bias(k);
        let logit = base + store.get(bo) + store.dot(wo, &s.x);
        let signed = if bit { -logit } else { logit };
        log_p += log_sigmoid(signed);
        // d/dlogit log σ(±logit) = ±σ(∓logit)
        let g = lr * if bit { -sigmoid(logit) } else { sigmoid(-logit) };
        g_total += g;
        // e += g * v_k, read before v_k moves
        store.read(wo, &mut s.inner);
        for (ei, vi) in s.e.iter_mut().zip(&s.inner) {
            *ei += g * vi;
        }
        store.axpy(wo, g, &s.x);
        store.add(bo, g);
    }
    for (ei, ui) in s.e.iter_mut().zip(&s.u) {
        *ei += g_total * ui;
    }
    store.axpy(layout.shared_weight(), g_total, &s.x);
    store.add(layout.shared_bias(), g_total);
    for &t in context {
        store.axpy(layout.token(t as usize), 1.0, &s.e[..d]);
    }
    store.axpy(layout.node(node), 1.0, &s.e[d..]);
    log_p
}
