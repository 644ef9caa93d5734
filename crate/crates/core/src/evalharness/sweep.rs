//! End-to-end pipeline runs and one-parameter sweeps.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use super::{classify, nn_accuracy, ClassifyConfig, Features};
use crate::corpus::build_corpus;
use crate::error::{Error, Result};
use crate::hetgraph::HeteroGraph;
use crate::pvdm::{train, Embeddings, TrainConfig};
use crate::seed;
use crate::walklang::WalkMode;

#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    /// Mean held-out softmax-regression accuracy.
    Classify(ClassifyConfig),
    /// Leave-one-out 1-nearest-neighbor accuracy.
    NearestNeighbor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub samples: usize,
    pub walk_length: usize,
    pub mode: WalkMode,
    pub train: TrainConfig,
    pub metric: Metric,
    /// Corpus, training and split seeds are all derived from this one.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            samples: 1024,
            walk_length: 6,
            mode: WalkMode::Haw,
            train: TrainConfig::default(),
            metric: Metric::Classify(ClassifyConfig::default()),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub embeddings: Embeddings,
    pub accuracy: f64,
}

/// Rows of `emb` whose node carries a label, with those labels.
pub fn labeled_features(emb: &Embeddings, graph: &HeteroGraph, labels: &[Option<usize>]) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut data = Vec::new();
    let mut ys = Vec::new();
    for (i, raw) in emb.raw_ids.iter().enumerate() {
        let v = graph.node_by_raw(raw).ok_or_else(|| Error::UnknownNode(raw.clone()))?;
        if let Some(y) = labels.get(v).copied().flatten() {
            data.extend_from_slice(emb.row(i));
            ys.push(y);
        }
    }
    Ok((data, ys))
}

/// Corpus, training and evaluation on one graph.
pub fn run_pipeline(graph: &HeteroGraph, labels: &[Option<usize>], cfg: &PipelineConfig) -> Result<PipelineRun> {
    if labels.len() != graph.num_nodes() {
        return Err(Error::invalid("label vector does not match the graph"));
    }
    let (corpus, lexicon) = build_corpus(graph, cfg.samples, cfg.walk_length, cfg.mode, seed::derive(cfg.seed, 0))?;
    let tcfg = TrainConfig {
        seed: seed::derive(cfg.seed, 1),
        ..cfg.train.clone()
    };
    let model = train(&corpus, &lexicon, &tcfg)?;
    let embeddings = Embeddings::from_model(&model, graph.raw_ids());
    let (data, ys) = labeled_features(&embeddings, graph, labels)?;
    let features = Features::new(&data, embeddings.dim)?;
    let accuracy = match &cfg.metric {
        Metric::Classify(c) => {
            let c = ClassifyConfig {
                seed: seed::derive(cfg.seed, 2),
                ..c.clone()
            };
            classify(features, &ys, &c)?.mean
        }
        Metric::NearestNeighbor => nn_accuracy(features, &ys)?,
    };
    Ok(PipelineRun { embeddings, accuracy })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    WalkLength,
    Samples,
    Dim,
    Window,
}

impl SweepParam {
    pub fn apply(self, cfg: &PipelineConfig, value: usize) -> PipelineConfig {
        let mut c = cfg.clone();
        match self {
            SweepParam::WalkLength => c.walk_length = value,
            SweepParam::Samples => c.samples = value,
            SweepParam::Dim => c.train.dim = value,
            SweepParam::Window => c.train.window = value,
        }
        c
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "L" | "walk-length" => Ok(SweepParam::WalkLength),
            "T" | "samples" => Ok(SweepParam::Samples),
            "d" | "dim" => Ok(SweepParam::Dim),
            "delta" | "window" => Ok(SweepParam::Window),
            _ => Err(Error::invalid(format!("unknown sweep parameter `{s}` (expected L, T, d or delta)"))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::WalkLength => "L",
            SweepParam::Samples => "T",
            SweepParam::Dim => "d",
            SweepParam::Window => "delta",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: usize,
    pub accuracy: f64,
}

/// Reruns the pipeline once per value with only `param` changed.
pub fn sweep(
    param: SweepParam,
    values: &[usize],
    base: &PipelineConfig,
    graph: &HeteroGraph,
    labels: &[Option<usize>],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::invalid("sweep needs at least one value"));
    }
    values
        .iter()
        .map(|&value| {
            let run = run_pipeline(graph, labels, &param.apply(base, value))?;
            Ok(SweepRow {
                value,
                accuracy: run.accuracy,
            })
        })
        .collect()
}

pub fn write_sweep_tsv<W: Write>(param: SweepParam, rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{param}\taccuracy")?;
    for r in rows {
        writeln!(w, "{}\t{:.6}", r.value, r.accuracy)?;
    }
    Ok(())
}
