//! Typed 1-dimensional Weisfeiler–Lehman color refinement, used as the
//! ground-truth structural role oracle for synthetic graphs.

use std::collections::BTreeMap;

use super::HeteroGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleLabeling {
    pub roles: Vec<usize>,
    pub num_roles: usize,
}

impl RoleLabeling {
    pub fn as_labels(&self) -> Vec<Option<usize>> {
        self.roles.iter().copied().map(Some).collect()
    }
}

/// Refines colors starting from node types. Each round the new color of a
/// node is the rank of `(own color, sorted neighbor colors)` among all
/// signatures present, so colors are canonical: isomorphic graphs get the
/// same color for corresponding nodes, not just the same partition.
pub fn wl_roles(graph: &HeteroGraph, max_iters: usize) -> Result<RoleLabeling> {
    if max_iters < 1 {
        return Err(Error::invalid("max_iters must be at least 1"));
    }
    let n = graph.num_nodes();
    let mut colors = relabel(graph.node_types().to_vec());
    let mut count = distinct(&colors);
    for _ in 0..max_iters {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut ns: Vec<usize> = graph.neighbors(v).iter().map(|&u| colors[u]).collect();
                ns.sort_unstable();
                (colors[v], ns)
            })
            .collect();
        let next = relabel(signatures);
        let next_count = distinct(&next);
        colors = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }
    Ok(RoleLabeling {
        roles: colors,
        num_roles: count,
    })
}

fn relabel<K: Ord + Clone>(keys: Vec<K>) -> Vec<usize> {
    let mut rank: BTreeMap<K, usize> = keys.iter().cloned().map(|k| (k, 0)).collect();
    for (i, r) in rank.values_mut().enumerate() {
        *r = i;
    }
    keys.iter().map(|k| rank[k]).collect()
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetgraph::{default_type_names, gen_er, gen_pinwheel};
    use proptest::prelude::*;
    use rand::seq::SliceRandom;

    fn graph(types: Vec<usize>, k: usize, edges: &[(usize, usize)]) -> HeteroGraph {
        HeteroGraph::from_edges(types, default_type_names(k), edges.iter().copied()).unwrap()
    }

    #[test]
    fn path_one_type_has_two_roles() {
        let g = graph(vec![0; 3], 1, &[(0, 1), (1, 2)]);
        let r = wl_roles(&g, 5).unwrap();
        assert_eq!(r.num_roles, 2);
        assert_eq!(r.roles[0], r.roles[2]);
        assert_ne!(r.roles[0], r.roles[1]);
    }

    #[test]
    fn complete_graph_has_one_role() {
        let edges: Vec<_> = (0..5).flat_map(|u| (u + 1..5).map(move |v| (u, v))).collect();
        let g = graph(vec![0; 5], 1, &edges);
        assert_eq!(wl_roles(&g, 5).unwrap().num_roles, 1);
    }

    #[test]
    fn typed_path_aba() {
        let g = graph(vec![0, 1, 0], 2, &[(0, 1), (1, 2)]);
        let r = wl_roles(&g, 5).unwrap();
        assert_eq!(r.num_roles, 2);
        assert_eq!(r.roles[0], r.roles[2]);
    }

    #[test]
    fn max_iters_zero_rejected() {
        let g = graph(vec![0; 2], 1, &[(0, 1)]);
        assert!(wl_roles(&g, 0).is_err());
    }

    #[test]
    fn single_round_limit_stops_early() {
        // path of 5: converged partition is {ends, next-to-ends, center}
        let g = graph(vec![0; 5], 1, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(wl_roles(&g, 1).unwrap().num_roles, 2);
        assert_eq!(wl_roles(&g, 10).unwrap().num_roles, 3);
    }

    #[test]
    fn pinwheel_roles_refine_types() {
        let g = gen_pinwheel(8, 3, true, 0).unwrap();
        let r = wl_roles(&g, 20).unwrap();
        for u in 0..g.num_nodes() {
            for v in 0..g.num_nodes() {
                if r.roles[u] == r.roles[v] {
                    assert_eq!(g.node_type(u), g.node_type(v));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn roles_are_isomorphism_invariant(seed in 0u64..1000, n in 5usize..40) {
            let g = gen_er(n, 0.2, 2, seed).unwrap();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut crate::seed::rng(seed ^ 0xABCD));
            let p = g.permuted(&perm).unwrap();
            let a = wl_roles(&g, 50).unwrap();
            let b = wl_roles(&p, 50).unwrap();
            prop_assert_eq!(a.num_roles, b.num_roles);
            for v in 0..n {
                prop_assert_eq!(a.roles[v], b.roles[perm[v]]);
            }
        }

        #[test]
        fn roles_refine_types(seed in 0u64..1000) {
            let g = gen_er(30, 0.15, 3, seed).unwrap();
            let r = wl_roles(&g, 50).unwrap();
            for u in 0..30 {
                for v in 0..30 {
                    if r.roles[u] == r.roles[v] {
                        prop_assert_eq!(g.node_type(u), g.node_type(v));
                    }
                }
            }
            let max = r.roles.iter().max().copied().unwrap();
            prop_assert_eq!(max + 1, r.num_roles);
        }
    }
}
