//! Exact and empirical token distributions of walks from a fixed start.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use rand::Rng;

use super::{sample_walk_into, TokenWriter, WalkMode};
use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, NodeId};

/// Largest number of walk-tree nodes the exhaustive enumeration will visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Probability of each canonical token.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WalkDistribution {
    pub support: BTreeMap<String, f64>,
}

impl WalkDistribution {
    pub fn total(&self) -> f64 {
        self.support.values().sum()
    }

    pub fn prob(&self, token: &str) -> f64 {
        self.support.get(token).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Total-variation distance `1/2 * sum |p - q|`.
    pub fn tv_distance(&self, other: &WalkDistribution) -> f64 {
        let mut d = 0.0;
        for (k, p) in &self.support {
            d += (p - other.prob(k)).abs();
        }
        for (k, q) in &other.support {
            if !self.support.contains_key(k) {
                d += q;
            }
        }
        d / 2.0
    }

    /// Entries by descending probability, ties by token.
    pub fn sorted(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.support.iter().map(|(k, &p)| (k.as_str(), p)).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# token\tprobability")?;
        for (tok, p) in self.sorted() {
            writeln!(w, "{tok}\t{p:.12e}")?;
        }
        Ok(())
    }
}

pub fn exact_walk_distribution(
    graph: &HeteroGraph,
    start: NodeId,
    length: usize,
    mode: WalkMode,
) -> Result<WalkDistribution> {
    exact_walk_distribution_with_budget(graph, start, length, mode, DEFAULT_BUDGET)
}

/// Depth-first enumeration of every walk of `length` steps from `start`.
/// A walk's probability is the product of `1/degree` along it.
pub fn exact_walk_distribution_with_budget(
    graph: &HeteroGraph,
    start: NodeId,
    length: usize,
    mode: WalkMode,
    budget: u64,
) -> Result<WalkDistribution> {
    if start >= graph.num_nodes() {
        return Err(Error::UnknownNode(start.to_string()));
    }
    if length < 1 {
        return Err(Error::invalid("walk length must be at least 1"));
    }
    if graph.degree(start) == 0 {
        return Err(Error::IsolatedNode(start));
    }

    let mut acc: HashMap<String, f64> = HashMap::new();
    let mut writer = TokenWriter::default();
    let mut tok = String::new();
    let mut path = vec![start];
    let mut probs = vec![1.0f64];
    // per-depth index of the next neighbor to try
    let mut next_child = vec![0usize];
    let mut visited: u64 = 0;

    while let Some(&v) = path.last() {
        let depth = path.len() - 1;
        if depth == length {
            writer.write(&path, graph, mode, &mut tok);
            *acc.entry(tok.clone()).or_insert(0.0) += probs[depth];
            path.pop();
            probs.pop();
            next_child.pop();
            continue;
        }
        let ns = graph.neighbors(v);
        let i = next_child[depth];
        if i == ns.len() {
            path.pop();
            probs.pop();
            next_child.pop();
            continue;
        }
        next_child[depth] += 1;
        visited += 1;
        if visited > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        path.push(ns[i]);
        probs.push(probs[depth] / ns.len() as f64);
        next_child.push(0);
    }

    Ok(WalkDistribution {
        support: acc.into_iter().collect(),
    })
}

/// Empirical token frequencies of `samples` independent walks.
pub fn sampled_distribution<R: Rng + ?Sized>(
    graph: &HeteroGraph,
    start: NodeId,
    length: usize,
    mode: WalkMode,
    samples: usize,
    rng: &mut R,
) -> Result<WalkDistribution> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut writer = TokenWriter::default();
    let mut nodes = Vec::with_capacity(length + 1);
    let mut tok = String::new();
    for _ in 0..samples {
        sample_walk_into(graph, start, length, rng, &mut nodes)?;
        writer.write(&nodes, graph, mode, &mut tok);
        match counts.get_mut(tok.as_str()) {
            Some(c) => *c += 1,
            None => {
                counts.insert(tok.clone(), 1);
            }
        }
    }
    Ok(WalkDistribution {
        support: counts
            .into_iter()
            .map(|(k, c)| (k, c as f64 / samples as f64))
            .collect(),
    })
}
