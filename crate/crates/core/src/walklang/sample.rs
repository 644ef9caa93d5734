use rand::Rng;

use super::Walk;
use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, NodeId};

/// Uniform random walk with `length` steps from `start`.
pub fn sample_walk<R: Rng + ?Sized>(graph: &HeteroGraph, start: NodeId, length: usize, rng: &mut R) -> Result<Walk> {
    if start >= graph.num_nodes() {
        return Err(Error::UnknownNode(start.to_string()));
    }
    if length < 1 {
        return Err(Error::invalid("walk length must be at least 1"));
    }
    let mut nodes = Vec::with_capacity(length + 1);
    sample_walk_into(graph, start, length, rng, &mut nodes)?;
    Ok(Walk { nodes })
}

/// Allocation-free variant: overwrites `out` with the `length + 1` nodes.
#[inline]
pub fn sample_walk_into<R: Rng + ?Sized>(
    graph: &HeteroGraph,
    start: NodeId,
    length: usize,
    rng: &mut R,
    out: &mut Vec<NodeId>,
) -> Result<()> {
    if graph.degree(start) == 0 {
        return Err(Error::IsolatedNode(start));
    }
    out.clear();
    out.push(start);
    let mut cur = start;
    for _ in 0..length {
        let ns = graph.neighbors(cur);
        cur = ns[rng.gen_range(0..ns.len())];
        out.push(cur);
    }
    Ok(())
}
