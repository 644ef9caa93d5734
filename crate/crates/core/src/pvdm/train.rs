//! Stochastic gradient ascent on the window log-likelihood.

use rand::seq::SliceRandom;

use super::model::{ascend_window, window_context, window_range, GradAccumulator, Scratch};
use super::{objective, EmbeddingModel};
use crate::corpus::{Corpus, Lexicon};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Context half-width Δ.
    pub window: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub seed: u64,
    /// Worker count for hogwild training; ignored when `deterministic`.
    pub threads: usize,
    pub deterministic: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 128,
            window: 5,
            epochs: 100,
            lr_start: 0.025,
            lr_end: 0.0001,
            seed: 0,
            threads: 1,
            deterministic: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if self.window < 1 {
            return Err(Error::invalid("window must be at least 1"));
        }
        if self.epochs < 1 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if !(self.lr_end > 0.0 && self.lr_start >= self.lr_end && self.lr_start.is_finite()) {
            return Err(Error::invalid("learning rates must satisfy lr_start >= lr_end > 0"));
        }
        Ok(())
    }

    fn hogwild(&self) -> bool {
        cfg!(feature = "parallel") && !self.deterministic && self.threads > 1
    }
}

/// Mean window log-probability per epoch, as seen during the updates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    pub epoch_mean_log_prob: Vec<f64>,
    pub windows_per_epoch: usize,
}

pub fn train(corpus: &Corpus, lexicon: &Lexicon, cfg: &TrainConfig) -> Result<EmbeddingModel> {
    train_with_report(corpus, lexicon, cfg).map(|(m, _)| m)
}

fn windows(corpus: &Corpus, window: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::new();
    for (v, ctx) in corpus.contexts.iter().enumerate() {
        if !ctx.is_empty() {
            pairs.extend(window_range(corpus.samples, window).map(|t| (v as u32, t as u32)));
        }
    }
    pairs
}

#[inline]
fn learning_rate(cfg: &TrainConfig, done: usize, total: usize) -> f64 {
    let frac = done as f64 / total.max(1) as f64;
    cfg.lr_start - (cfg.lr_start - cfg.lr_end) * frac
}

/// One epoch visits every (node, window center) pair once in shuffled
/// order; the learning rate decays linearly from `lr_start` to `lr_end`
/// across all updates.
pub fn train_with_report(corpus: &Corpus, lexicon: &Lexicon, cfg: &TrainConfig) -> Result<(EmbeddingModel, TrainReport)> {
    cfg.validate()?;
    corpus.validate(lexicon)?;
    if corpus.contexts.iter().all(Vec::is_empty) {
        return Err(Error::NoWalkableNodes);
    }
    if corpus.samples <= 2 * cfg.window {
        return Err(Error::invalid(format!(
            "samples per node ({}) must exceed twice the window ({})",
            corpus.samples, cfg.window
        )));
    }
    let mut rng = seed::rng(cfg.seed);
    let mut model = EmbeddingModel::init(corpus, lexicon, cfg.dim, cfg.window, &mut rng)?;
    let pairs = windows(corpus, cfg.window);

    let report = if cfg.hogwild() {
        train_hogwild(&mut model, corpus, cfg, pairs)?
    } else {
        train_sequential(&mut model, corpus, cfg, pairs, &mut rng)?
    };
    Ok((model, report))
}

fn train_sequential(
    model: &mut EmbeddingModel,
    corpus: &Corpus,
    cfg: &TrainConfig,
    mut pairs: Vec<(u32, u32)>,
    rng: &mut seed::Rng,
) -> Result<TrainReport> {
    let total = cfg.epochs * pairs.len();
    let mut done = 0;
    let mut scratch = Scratch::new(cfg.dim);
    let mut ctx = Vec::with_capacity(2 * cfg.window);
    let mut report = TrainReport {
        windows_per_epoch: pairs.len(),
        ..Default::default()
    };
    let EmbeddingModel { params, layout, tree, .. } = model;
    for epoch in 0..cfg.epochs {
        pairs.shuffle(rng);
        let mut sum = 0.0;
        for &(v, t) in &pairs {
            let lr = learning_rate(cfg, done, total);
            let tokens = corpus.context(v as usize);
            window_context(tokens, t as usize, cfg.window, &mut ctx);
            sum += ascend_window(&mut params[..], layout, tree, &ctx, v as usize, tokens[t as usize], lr, &mut scratch);
            done += 1;
        }
        report.epoch_mean_log_prob.push(sum / pairs.len() as f64);
        if !params.iter().all(|p| p.is_finite()) {
            return Err(Error::invalid(format!("parameters became non-finite in epoch {epoch}")));
        }
    }
    Ok(report)
}

#[cfg(feature = "parallel")]
fn train_hogwild(model: &mut EmbeddingModel, corpus: &Corpus, cfg: &TrainConfig, pairs: Vec<(u32, u32)>) -> Result<TrainReport> {
    use super::model::AtomicParams;
    use rayon::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    let workers = cfg.threads;
    let total = cfg.epochs * pairs.len();
    let windows_per_epoch = pairs.len();
    // disjoint node shards
    let mut shards: Vec<Vec<(u32, u32)>> = vec![Vec::new(); workers];
    for p in pairs {
        shards[p.0 as usize % workers].push(p);
    }
    let shared = AtomicParams::from_slice(&model.params);
    let done = AtomicUsize::new(0);
    let sums = Mutex::new(vec![0.0f64; cfg.epochs]);
    let layout = model.layout;
    let tree = &model.tree;

    crate::par::with_threads(workers, || {
        shards.into_par_iter().enumerate().for_each(|(w, mut shard)| {
            let mut rng = seed::derived_rng(cfg.seed, w as u64 + 1);
            let mut view = shared.view();
            let mut scratch = Scratch::new(cfg.dim);
            let mut ctx = Vec::with_capacity(2 * cfg.window);
            for epoch in 0..cfg.epochs {
                shard.shuffle(&mut rng);
                let mut sum = 0.0;
                for &(v, t) in &shard {
                    let lr = learning_rate(cfg, done.fetch_add(1, Ordering::Relaxed), total);
                    let tokens = corpus.context(v as usize);
                    window_context(tokens, t as usize, cfg.window, &mut ctx);
                    sum += ascend_window(&mut view, &layout, tree, &ctx, v as usize, tokens[t as usize], lr, &mut scratch);
                }
                sums.lock().expect("no worker panics while holding the lock")[epoch] += sum;
            }
        })
    });

    model.params = shared.into_vec();
    if !model.is_finite() {
        return Err(Error::invalid("parameters became non-finite"));
    }
    let sums = sums.into_inner().expect("workers finished");
    Ok(TrainReport {
        epoch_mean_log_prob: sums.iter().map(|s| s / windows_per_epoch as f64).collect(),
        windows_per_epoch,
    })
}

#[cfg(not(feature = "parallel"))]
fn train_hogwild(_: &mut EmbeddingModel, _: &Corpus, _: &TrainConfig, _: Vec<(u32, u32)>) -> Result<TrainReport> {
    unreachable!("hogwild training requires the `parallel` feature")
}

/// Exact gradient of the objective with respect to every parameter.
pub fn full_gradient(model: &EmbeddingModel, corpus: &Corpus) -> Vec<f64> {
    let window = model.provenance.window;
    let mut grad = vec![0.0; model.params.len()];
    let active = corpus.contexts.iter().filter(|c| !c.is_empty()).count();
    let scale = 1.0 / (active.max(1) * corpus.samples) as f64;
    let mut scratch = Scratch::new(model.dim());
    let mut ctx = Vec::with_capacity(2 * window);
    let mut acc = GradAccumulator {
        params: &model.params,
        grad: &mut grad,
    };
    for (v, tokens) in corpus.contexts.iter().enumerate() {
        if tokens.is_empty() {
            continue;
        }
        for t in window_range(corpus.samples, window) {
            window_context(tokens, t, window, &mut ctx);
            ascend_window(&mut acc, &model.layout, &model.tree, &ctx, v, tokens[t], scale, &mut scratch);
        }
    }
    grad
}

/// Plain full-batch gradient ascent with a fixed step. Returns the
/// objective before the first step and after each step.
pub fn full_batch_ascent(model: &mut EmbeddingModel, corpus: &Corpus, lr: f64, steps: usize) -> Vec<f64> {
    let mut trace = vec![objective(model, corpus)];
    for _ in 0..steps {
        let g = full_gradient(model, corpus);
        for (p, gi) in model.params.iter_mut().zip(&g) {
            *p += lr * gi;
        }
        trace.push(objective(model, corpus));
    }
    trace
}
