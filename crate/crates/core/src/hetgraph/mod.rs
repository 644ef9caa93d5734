//! Undirected, simple, node-typed graphs.
//!
//! Nodes carry dense ids `0..num_nodes` assigned in file (or generation)
//! order; the original string ids are kept for reporting. Edge types are
//! not represented.

mod generators;
mod io;
mod roles;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use generators::{gen_ba, gen_er, gen_pinwheel, default_type_names};
pub use io::{load_graph, load_labels, read_label_pairs, read_node_ids, write_graph, write_roles};
pub use roles::{wl_roles, RoleLabeling};

pub type NodeId = usize;
pub type TypeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroGraph {
    adjacency: Vec<Vec<NodeId>>,
    node_types: Vec<TypeId>,
    type_names: Vec<String>,
    labels: Vec<Option<usize>>,
    label_names: Vec<String>,
    raw_ids: Vec<String>,
    id_index: HashMap<String, NodeId>,
}

impl HeteroGraph {
    /// Builds a graph from typed nodes and an edge list. Duplicate edges
    /// (in either orientation) collapse to one; self-loops are rejected.
    pub fn from_edges(
        node_types: Vec<TypeId>,
        type_names: Vec<String>,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let n = node_types.len();
        if let Some(&t) = node_types.iter().find(|&&t| t >= type_names.len()) {
            return Err(Error::invalid(format!(
                "type id {t} out of range for {} types",
                type_names.len()
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownNode(u.max(v).to_string()));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop on node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let raw_ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Ok(Self::assemble(adjacency, node_types, type_names, raw_ids))
    }

    fn assemble(
        adjacency: Vec<Vec<NodeId>>,
        node_types: Vec<TypeId>,
        type_names: Vec<String>,
        raw_ids: Vec<String>,
    ) -> Self {
        let n = node_types.len();
        let id_index = raw_ids
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), i))
            .collect();
        HeteroGraph {
            adjacency,
            node_types,
            type_names,
            labels: vec![None; n],
            label_names: Vec::new(),
            raw_ids,
            id_index,
        }
    }

    /// Replaces the generated raw ids. `raw_ids` must be unique.
    pub fn with_raw_ids(mut self, raw_ids: Vec<String>) -> Result<Self> {
        if raw_ids.len() != self.num_nodes() {
            return Err(Error::invalid("raw id count does not match node count"));
        }
        let mut index = HashMap::with_capacity(raw_ids.len());
        for (i, r) in raw_ids.iter().enumerate() {
            if index.insert(r.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate raw id `{r}`")));
            }
        }
        self.raw_ids = raw_ids;
        self.id_index = index;
        Ok(self)
    }

    /// Attaches class labels; `names[c]` is the printable name of class `c`.
    pub fn with_labels(mut self, labels: Vec<Option<usize>>, names: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_nodes() {
            return Err(Error::invalid("label count does not match node count"));
        }
        if labels.iter().flatten().any(|&c| c >= names.len()) {
            return Err(Error::invalid("label id out of range"));
        }
        self.labels = labels;
        self.label_names = names;
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.node_types.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn num_types(&self) -> usize {
        self.type_names.len()
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    #[inline]
    pub fn node_type(&self, v: NodeId) -> TypeId {
        self.node_types[v]
    }

    pub fn node_types(&self) -> &[TypeId] {
        &self.node_types
    }

    pub fn type_names(&self) -> &[String] {
        &self.type_names
    }

    pub fn type_name(&self, t: TypeId) -> &str {
        &self.type_names[t]
    }

    pub fn raw_id(&self, v: NodeId) -> &str {
        &self.raw_ids[v]
    }

    pub fn raw_ids(&self) -> &[String] {
        &self.raw_ids
    }

    pub fn node_by_raw(&self, raw: &str) -> Option<NodeId> {
        self.id_index.get(raw).copied()
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    pub fn has_labels(&self) -> bool {
        self.labels.iter().any(Option::is_some)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn isolated_nodes(&self) -> Vec<NodeId> {
        (0..self.num_nodes()).filter(|&v| self.degree(v) == 0).collect()
    }

    /// Full scan of the structural invariants: symmetric adjacency, sorted
    /// neighbor lists without duplicates or self-loops, ids and types in
    /// range.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.num_nodes();
        if self.adjacency.len() != n || self.raw_ids.len() != n || self.labels.len() != n {
            return Err(Error::invalid("per-node arrays disagree in length"));
        }
        for (u, ns) in self.adjacency.iter().enumerate() {
            if self.node_types[u] >= self.num_types() {
                return Err(Error::invalid(format!("node {u} has out-of-range type")));
            }
            for w in ns.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!("neighbors of {u} not strictly sorted")));
                }
            }
            for &v in ns {
                if v >= n {
                    return Err(Error::invalid(format!("edge {u}-{v} out of range")));
                }
                if v == u {
                    return Err(Error::invalid(format!("self-loop on {u}")));
                }
                if self.adjacency[v].binary_search(&u).is_err() {
                    return Err(Error::invalid(format!("edge {u}-{v} is not symmetric")));
                }
            }
        }
        Ok(())
    }

    /// Returns the same graph with node `v` renamed to `perm[v]`. Raw ids,
    /// types and labels travel with their nodes.
    pub fn permuted(&self, perm: &[NodeId]) -> Result<Self> {
        let n = self.num_nodes();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::invalid("not a permutation"));
        }
        let mut types = vec![0; n];
        let mut raw = vec![String::new(); n];
        let mut labels = vec![None; n];
        for v in 0..n {
            types[perm[v]] = self.node_types[v];
            raw[perm[v]] = self.raw_ids[v].clone();
            labels[perm[v]] = self.labels[v];
        }
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        HeteroGraph::from_edges(types, self.type_names.clone(), edges)?
            .with_raw_ids(raw)?
            .with_labels(labels, self.label_names.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        default_type_names(k)
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let g = HeteroGraph::from_edges(vec![0, 0], names(1), [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        g.check_invariants().unwrap();
    }

    #[test]
    fn self_loops_and_bad_ids_rejected() {
        assert!(HeteroGraph::from_edges(vec![0, 0], names(1), [(1, 1)]).is_err());
        assert!(matches!(
            HeteroGraph::from_edges(vec![0, 0], names(1), [(0, 5)]),
            Err(Error::UnknownNode(_))
        ));
        assert!(HeteroGraph::from_edges(vec![0, 3], names(2), []).is_err());
    }

    #[test]
    fn permutation_round_trips() {
        let g = HeteroGraph::from_edges(vec![0, 1, 0], names(2), [(0, 1), (1, 2)]).unwrap();
        let p = g.permuted(&[2, 0, 1]).unwrap();
        p.check_invariants().unwrap();
        assert_eq!(p.node_type(0), 1);
        assert_eq!(p.neighbors(0), &[1, 2]);
        assert_eq!(p.raw_id(2), "0");
        assert!(g.permuted(&[0, 0, 1]).is_err());
    }

    #[test]
    fn isolated_nodes_are_listed() {
        let g = HeteroGraph::from_edges(vec![0; 4], names(1), [(0, 1)]).unwrap();
        assert_eq!(g.isolated_nodes(), vec![2, 3]);
    }
}
