//! Walks and their anonymized token forms.
//!
//! A walk of length `l` has `l` edges and `l + 1` entries. Anonymization
//! replaces every node by the 0-based index of its first occurrence among
//! the distinct nodes of the walk, so `(5,9,2,7,2,9)` becomes
//! `(0,1,2,3,2,1)`. The typed variant keeps each entry's node type next to
//! its position; the coarse typed variant keeps the plain anonymous walk
//! plus the node types in order of first appearance with their
//! occurrence counts.

mod count;
mod exact;
mod sample;

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::Error;
use crate::hetgraph::{HeteroGraph, NodeId, TypeId};

pub use count::{bell, count_haws, enumerate_aws, HawCount, MAX_ENUMERATION_LENGTH};
pub use exact::{
    exact_walk_distribution, exact_walk_distribution_with_budget, sampled_distribution, WalkDistribution,
    DEFAULT_BUDGET,
};
pub use sample::{sample_walk, sample_walk_into};

/// Which token form a walk is reduced to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkMode {
    Aw,
    Haw,
    Chaw,
}

impl WalkMode {
    pub const ALL: [WalkMode; 3] = [WalkMode::Aw, WalkMode::Haw, WalkMode::Chaw];

    pub fn as_str(self) -> &'static str {
        match self {
            WalkMode::Aw => "aw",
            WalkMode::Haw => "haw",
            WalkMode::Chaw => "chaw",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            WalkMode::Aw => 0,
            WalkMode::Haw => 1,
            WalkMode::Chaw => 2,
        }
    }

    pub(crate) fn from_code(c: u8) -> Option<Self> {
        WalkMode::ALL.into_iter().find(|m| m.code() == c)
    }
}

impl fmt::Display for WalkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WalkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "aw" => Ok(WalkMode::Aw),
            "haw" => Ok(WalkMode::Haw),
            "chaw" => Ok(WalkMode::Chaw),
            _ => Err(Error::InvalidArgument(format!("unknown walk mode `{s}` (aw, haw, chaw)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Walk {
    pub nodes: Vec<NodeId>,
}

impl Walk {
    /// Number of edges.
    pub fn len(&self) -> usize {
        self.nodes.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 1
    }

    pub fn is_valid_in(&self, graph: &HeteroGraph) -> bool {
        !self.nodes.is_empty()
            && self.nodes.iter().all(|&v| v < graph.num_nodes())
            && self
                .nodes
                .windows(2)
                .all(|w| w[0] != w[1] && graph.neighbors(w[0]).binary_search(&w[1]).is_ok())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnonWalk {
    pub positions: Vec<usize>,
}

impl AnonWalk {
    /// Starts at 0, never repeats the previous entry, and never jumps more
    /// than one past the largest value seen so far.
    pub fn is_valid(&self) -> bool {
        let p = &self.positions;
        if p.first() != Some(&0) {
            return false;
        }
        let mut max = 0;
        for w in p.windows(2) {
            if w[1] == w[0] || w[1] > max + 1 {
                return false;
            }
            max = max.max(w[1]);
        }
        true
    }

    pub fn distinct(&self) -> usize {
        self.positions.iter().max().map_or(0, |m| m + 1)
    }

    pub fn token(&self) -> String {
        let mut s = String::new();
        write_positions(&self.positions, &mut s);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Haw {
    pub entries: Vec<(usize, TypeId)>,
}

impl Haw {
    pub fn aw(&self) -> AnonWalk {
        AnonWalk {
            positions: self.entries.iter().map(|e| e.0).collect(),
        }
    }

    /// Valid position projection, and a single type per position.
    pub fn is_valid(&self) -> bool {
        if !self.aw().is_valid() {
            return false;
        }
        let mut seen: Vec<Option<TypeId>> = vec![None; self.entries.len()];
        self.entries.iter().all(|&(p, t)| *seen[p].get_or_insert(t) == t)
    }

    pub fn token(&self, type_names: &[String]) -> String {
        let mut s = String::new();
        for (i, &(p, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                s.push('-');
            }
            let _ = write!(s, "{p}{}", type_names[t]);
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chaw {
    pub aw: AnonWalk,
    pub type_counts: Vec<(TypeId, usize)>,
}

impl Chaw {
    pub fn token(&self, type_names: &[String]) -> String {
        let mut s = self.aw.token();
        write_counts(&self.type_counts, type_names, &mut s);
        s
    }
}

pub fn anonymize(walk: &Walk) -> AnonWalk {
    let mut positions = Vec::with_capacity(walk.nodes.len());
    anonymize_into(&walk.nodes, &mut Vec::new(), &mut positions);
    AnonWalk { positions }
}

pub fn to_haw(walk: &Walk, graph: &HeteroGraph) -> Haw {
    let aw = anonymize(walk);
    Haw {
        entries: aw
            .positions
            .iter()
            .zip(&walk.nodes)
            .map(|(&p, &v)| (p, graph.node_type(v)))
            .collect(),
    }
}

pub fn to_chaw(haw: &Haw) -> Chaw {
    let mut type_counts: Vec<(TypeId, usize)> = Vec::new();
    for &(_, t) in &haw.entries {
        match type_counts.iter_mut().find(|(tt, _)| *tt == t) {
            Some(e) => e.1 += 1,
            None => type_counts.push((t, 1)),
        }
    }
    Chaw {
        aw: haw.aw(),
        type_counts,
    }
}

/// Canonical token of `walk` in the given mode.
pub fn token(walk: &Walk, graph: &HeteroGraph, mode: WalkMode) -> String {
    let mut out = String::new();
    TokenWriter::default().write(&walk.nodes, graph, mode, &mut out);
    out
}

fn anonymize_into(nodes: &[NodeId], seen: &mut Vec<NodeId>, positions: &mut Vec<usize>) {
    seen.clear();
    positions.clear();
    for &v in nodes {
        let p = match seen.iter().position(|&s| s == v) {
            Some(p) => p,
            None => {
                seen.push(v);
                seen.len() - 1
            }
        };
        positions.push(p);
    }
}

fn write_positions(positions: &[usize], out: &mut String) {
    for (i, p) in positions.iter().enumerate() {
        if i > 0 {
            out.push('-');
        }
        let _ = write!(out, "{p}");
    }
}

fn write_counts(counts: &[(TypeId, usize)], type_names: &[String], out: &mut String) {
    out.push('|');
    for (i, &(t, c)) in counts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{}:{c}", type_names[t]);
    }
}

/// Reusable scratch space for rendering tokens straight from node
/// sequences without building the intermediate structs.
#[derive(Debug, Default)]
pub struct TokenWriter {
    seen: Vec<NodeId>,
    positions: Vec<usize>,
    counts: Vec<(TypeId, usize)>,
}

impl TokenWriter {
    /// Clears `out` and writes the canonical token for `nodes`.
    pub fn write(&mut self, nodes: &[NodeId], graph: &HeteroGraph, mode: WalkMode, out: &mut String) {
        out.clear();
        anonymize_into(nodes, &mut self.seen, &mut self.positions);
        match mode {
            WalkMode::Aw => write_positions(&self.positions, out),
            WalkMode::Haw => {
                for (i, (&p, &v)) in self.positions.iter().zip(nodes).enumerate() {
                    if i > 0 {
                        out.push('-');
                    }
                    let _ = write!(out, "{p}{}", graph.type_name(graph.node_type(v)));
                }
            }
            WalkMode::Chaw => {
                write_positions(&self.positions, out);
                self.counts.clear();
                for &v in nodes {
                    let t = graph.node_type(v);
                    match self.counts.iter_mut().find(|(tt, _)| *tt == t) {
                        Some(e) => e.1 += 1,
                        None => self.counts.push((t, 1)),
                    }
                }
                write_counts(&self.counts, graph.type_names(), out);
            }
        }
    }
}
