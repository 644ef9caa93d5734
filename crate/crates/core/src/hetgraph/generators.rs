//! Synthetic graph families: pinwheels, Erdős–Rényi and Barabási–Albert.

use rand::Rng as _;

use super::{HeteroGraph, NodeId, TypeId};
use crate::error::{Error, Result};
use crate::seed;

/// `A`, `B`, ..., `Z`, then `T26`, `T27`, ...
pub fn default_type_names(k: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            if i < 26 {
                char::from(b'A' + i as u8).to_string()
            } else {
                format!("T{i}")
            }
        })
        .collect()
}

/// A ring of `num_blades` hub nodes, each carrying a pendant path of
/// `blade_len` nodes. Hubs are ids `0..num_blades`; blade `i` occupies
/// `num_blades + i*blade_len ..` from the hub outward.
///
/// In heterogeneous mode types alternate along every blade (hub, mid, tip,
/// ...) and the starting type alternates from blade to blade, so the
/// two-blade rotation is the only symmetry that preserves types. This needs
/// an even number of blades.
pub fn gen_pinwheel(num_blades: usize, blade_len: usize, heterogeneous: bool, _seed: u64) -> Result<HeteroGraph> {
    if num_blades < 3 {
        return Err(Error::invalid("pinwheel needs at least 3 blades"));
    }
    if blade_len < 1 {
        return Err(Error::invalid("pinwheel blades need at least one node"));
    }
    if heterogeneous && num_blades % 2 == 1 {
        return Err(Error::invalid("heterogeneous pinwheel needs an even number of blades"));
    }
    let n = num_blades * (blade_len + 1);
    let mut types = vec![0; n];
    let mut edges = Vec::with_capacity(n);
    for i in 0..num_blades {
        edges.push((i, (i + 1) % num_blades));
        let mut prev = i;
        for j in 1..=blade_len {
            let v = num_blades + i * blade_len + (j - 1);
            edges.push((prev, v));
            prev = v;
            if heterogeneous {
                types[v] = (i + j) % 2;
            }
        }
        if heterogeneous {
            types[i] = i % 2;
        }
    }
    let k = if heterogeneous { 2 } else { 1 };
    HeteroGraph::from_edges(types, default_type_names(k), edges)
}

fn random_types(rng: &mut seed::Rng, n: usize, num_types: usize) -> Vec<TypeId> {
    (0..n).map(|_| rng.gen_range(0..num_types)).collect()
}

/// G(n, p) with uniformly random node types. Uses geometric skipping over
/// the lower-triangular pair sequence, so the cost is O(n + m).
pub fn gen_er(num_nodes: usize, edge_prob: f64, num_types: usize, seed: u64) -> Result<HeteroGraph> {
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::invalid(format!("edge probability {edge_prob} outside [0, 1]")));
    }
    if num_types < 1 {
        return Err(Error::invalid("need at least one node type"));
    }
    let mut rng = seed::rng(seed);
    let types = random_types(&mut rng, num_nodes, num_types);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    if edge_prob >= 1.0 {
        for v in 1..num_nodes {
            edges.extend((0..v).map(|w| (v, w)));
        }
    } else if edge_prob > 0.0 {
        let log_q = (1.0 - edge_prob).ln();
        let mut v: usize = 1;
        let mut w: i64 = -1;
        while v < num_nodes {
            let r: f64 = rng.gen();
            w += 1 + ((1.0 - r).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < num_nodes {
                w -= v as i64;
                v += 1;
            }
            if v < num_nodes {
                edges.push((v, w as usize));
            }
        }
    }
    HeteroGraph::from_edges(types, default_type_names(num_types), edges)
}

/// Preferential attachment from an initial star on `edges_per_node + 1`
/// nodes. Each later node attaches to `edges_per_node` distinct existing
/// nodes chosen proportionally to degree. With one edge per node the result
/// is a tree.
pub fn gen_ba(num_nodes: usize, edges_per_node: usize, num_types: usize, seed: u64) -> Result<HeteroGraph> {
    let m = edges_per_node;
    if m < 1 {
        return Err(Error::invalid("edges_per_node must be at least 1"));
    }
    if num_nodes <= m {
        return Err(Error::invalid("num_nodes must exceed edges_per_node"));
    }
    if num_types < 1 {
        return Err(Error::invalid("need at least one node type"));
    }
    let mut rng = seed::rng(seed);
    let types = random_types(&mut rng, num_nodes, num_types);
    let mut edges = Vec::with_capacity(m * num_nodes);
    // every edge endpoint, so a uniform draw is degree-proportional
    let mut endpoints: Vec<NodeId> = Vec::with_capacity(2 * m * num_nodes);
    for leaf in 1..=m {
        edges.push((0, leaf));
        endpoints.extend([0, leaf]);
    }
    let mut targets = Vec::with_capacity(m);
    for v in (m + 1)..num_nodes {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((v, t));
            endpoints.extend([v, t]);
        }
    }
    HeteroGraph::from_edges(types, default_type_names(num_types), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetgraph::wl_roles;

    fn is_forest(g: &HeteroGraph) -> bool {
        // union-find cycle check
        let mut parent: Vec<usize> = (0..g.num_nodes()).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (u, v) in g.edges() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    #[test]
    fn pinwheel_role_counts() {
        let homo = gen_pinwheel(8, 2, false, 1).unwrap();
        let hetero = gen_pinwheel(8, 2, true, 1).unwrap();
        homo.check_invariants().unwrap();
        hetero.check_invariants().unwrap();
        assert_eq!(homo.num_nodes(), 24);
        assert_eq!(homo.num_edges(), 24);
        assert_eq!(wl_roles(&homo, 10).unwrap().num_roles, 3);
        // three underlying positions, each split by the two types
        assert_eq!(wl_roles(&hetero, 10).unwrap().num_roles, 6);
    }

    #[test]
    fn pinwheel_preconditions() {
        assert!(gen_pinwheel(3, 1, true, 0).is_err());
        assert!(gen_pinwheel(2, 1, false, 0).is_err());
        assert!(gen_pinwheel(4, 0, false, 0).is_err());
        assert!(gen_pinwheel(3, 1, false, 0).is_ok());
    }

    #[test]
    fn er_edge_count_near_expectation() {
        let n = 1000;
        let p = 10.0 / n as f64;
        let g = gen_er(n, p, 2, 3).unwrap();
        g.check_invariants().unwrap();
        let expected = p * (n * (n - 1)) as f64 / 2.0;
        let m = g.num_edges() as f64;
        assert!((m - expected).abs() < 0.1 * expected, "{m} vs {expected}");
    }

    #[test]
    fn er_extremes_and_determinism() {
        assert_eq!(gen_er(50, 0.0, 1, 0).unwrap().num_edges(), 0);
        assert_eq!(gen_er(10, 1.0, 1, 0).unwrap().num_edges(), 45);
        assert_eq!(gen_er(300, 0.05, 3, 9).unwrap(), gen_er(300, 0.05, 3, 9).unwrap());
        assert_ne!(gen_er(300, 0.05, 3, 9).unwrap(), gen_er(300, 0.05, 3, 10).unwrap());
        assert!(gen_er(10, 1.5, 1, 0).is_err());
        assert!(gen_er(10, 0.5, 0, 0).is_err());
    }

    #[test]
    fn er_types_cover_all_ids() {
        let g = gen_er(2000, 0.001, 2, 5).unwrap();
        let ones = g.node_types().iter().filter(|&&t| t == 1).count();
        assert!((900..1100).contains(&ones), "{ones}");
    }

    #[test]
    fn ba_is_tree_with_one_edge_per_node() {
        let g = gen_ba(100, 1, 2, 4).unwrap();
        g.check_invariants().unwrap();
        assert_eq!(g.num_edges(), 99);
        assert!(is_forest(&g));
        assert!(g.isolated_nodes().is_empty());

        let g = gen_ba(2, 1, 1, 0).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn ba_general_m() {
        let g = gen_ba(500, 3, 2, 1).unwrap();
        g.check_invariants().unwrap();
        assert_eq!(g.num_edges(), 3 * (500 - 3));
        assert!(gen_ba(3, 3, 1, 0).is_err());
        assert!(gen_ba(3, 0, 1, 0).is_err());
        assert_eq!(gen_ba(500, 3, 2, 1).unwrap(), g);
    }

    #[test]
    fn ba_degree_is_heavy_tailed() {
        for s in 0..5 {
            let g = gen_ba(10_000, 1, 2, s).unwrap();
            let mean = 2.0 * g.num_edges() as f64 / g.num_nodes() as f64;
            let max = (0..g.num_nodes()).map(|v| g.degree(v)).max().unwrap() as f64;
            assert!(max > 10.0 * mean, "seed {s}: max {max} mean {mean}");
        }
    }
}
