//! Wall-clock scaling of corpus construction plus training.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use crate::corpus::build_corpus;
use crate::error::{Error, Result};
use crate::hetgraph::{gen_ba, gen_er, HeteroGraph};
use crate::pvdm::{train, TrainConfig};
use crate::seed;
use crate::walklang::WalkMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Er,
    Ba,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(Family::Er),
            "ba" => Ok(Family::Ba),
            _ => Err(Error::invalid(format!("unknown graph family `{s}` (expected er or ba)"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Er => "er",
            Family::Ba => "ba",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub samples: usize,
    pub walk_length: usize,
    pub mode: WalkMode,
    pub train: TrainConfig,
    pub runs: usize,
    pub num_types: usize,
    /// ER edge probability is `avg_degree_factor / n`.
    pub avg_degree_factor: f64,
    /// BA attachment count.
    pub ba_edges: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            samples: 32,
            walk_length: 6,
            mode: WalkMode::Haw,
            train: TrainConfig {
                dim: 16,
                window: 5,
                epochs: 1,
                ..Default::default()
            },
            runs: 5,
            num_types: 2,
            avg_degree_factor: 10.0,
            ba_edges: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub nodes: usize,
    pub edges: usize,
    /// Mean over runs.
    pub seconds: f64,
}

pub fn bench_graph(family: Family, n: usize, cfg: &BenchConfig, graph_seed: u64) -> Result<HeteroGraph> {
    match family {
        Family::Er => gen_er(n, (cfg.avg_degree_factor / n as f64).min(1.0), cfg.num_types, graph_seed),
        Family::Ba => gen_ba(n, cfg.ba_edges, cfg.num_types, graph_seed),
    }
}

/// Seconds for one corpus build plus training run on `graph`.
pub fn time_pipeline(graph: &HeteroGraph, cfg: &BenchConfig, run_seed: u64) -> Result<f64> {
    let start = Instant::now();
    let (corpus, lexicon) = build_corpus(graph, cfg.samples, cfg.walk_length, cfg.mode, seed::derive(run_seed, 0))?;
    let tcfg = TrainConfig {
        seed: seed::derive(run_seed, 1),
        ..cfg.train.clone()
    };
    let model = train(&corpus, &lexicon, &tcfg)?;
    let elapsed = start.elapsed().as_secs_f64();
    std::hint::black_box(model);
    Ok(elapsed)
}

/// Times the pipeline on one generated graph per size. Graph generation is
/// not timed, and one untimed warm-up run on the smallest graph precedes
/// the measurements.
pub fn bench_runtime(sizes: &[usize], family: Family, cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sizes must be non-empty and strictly ascending"));
    }
    if cfg.runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let mut warmed = false;
    sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let graph = bench_graph(family, n, cfg, seed::derive(cfg.seed, i as u64))?;
            if !warmed {
                time_pipeline(&graph, cfg, cfg.seed)?;
                warmed = true;
            }
            let mut total = 0.0;
            for r in 0..cfg.runs {
                total += time_pipeline(&graph, cfg, seed::derive(cfg.seed ^ 0x5eed, (i * cfg.runs + r) as u64))?;
            }
            Ok(BenchRow {
                nodes: n,
                edges: graph.num_edges(),
                seconds: total / cfg.runs as f64,
            })
        })
        .collect()
}

/// Least-squares slope of `ln seconds` against `ln nodes`.
pub fn loglog_slope(rows: &[BenchRow]) -> Option<f64> {
    if rows.len() < 2 || rows.iter().any(|r| r.seconds <= 0.0) {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.nodes as f64).ln(), r.seconds.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn write_bench_tsv<W: Write>(rows: &[BenchRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "n\tedges\tseconds")?;
    for r in rows {
        writeln!(w, "{}\t{}\t{:.6}", r.nodes, r.edges, r.seconds)?;
    }
    Ok(())
}
