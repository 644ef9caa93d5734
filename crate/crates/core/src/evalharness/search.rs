//! Euclidean nearest-neighbor queries over embeddings.

use std::io::Write;

use super::Features;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborList {
    pub target: String,
    /// `(raw id, distance)`, nearest first.
    pub neighbors: Vec<(String, f64)>,
}

impl NeighborList {
    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# target={}", self.target)?;
        writeln!(w, "rank\tid\tdistance")?;
        for (i, (id, d)) in self.neighbors.iter().enumerate() {
            writeln!(w, "{}\t{id}\t{d:.8e}", i + 1)?;
        }
        Ok(())
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Indices and distances of all rows other than `target`, ascending by
/// distance with ties broken by row index.
fn ranking(features: Features<'_>, target: usize) -> Vec<(usize, f64)> {
    let t = features.row(target);
    let mut all: Vec<(usize, f64)> = (0..features.rows())
        .filter(|&i| i != target)
        .map(|i| (i, distance(t, features.row(i))))
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all
}

/// The `k` rows nearest to row `target`, excluding the target itself.
pub fn topk_search(features: Features<'_>, ids: &[String], target: usize, k: usize) -> Result<NeighborList> {
    let n = features.rows();
    if ids.len() != n {
        return Err(Error::invalid("id list does not match embedding rows"));
    }
    if target >= n {
        return Err(Error::UnknownNode(target.to_string()));
    }
    if k >= n {
        return Err(Error::invalid(format!("k = {k} must be below the node count {n}")));
    }
    let mut all = ranking(features, target);
    all.truncate(k);
    Ok(NeighborList {
        target: ids[target].clone(),
        neighbors: all.into_iter().map(|(i, d)| (ids[i].clone(), d)).collect(),
    })
}

/// Leave-one-out 1-nearest-neighbor accuracy: the fraction of rows whose
/// nearest other row carries the same label.
pub fn nn_accuracy(features: Features<'_>, labels: &[usize]) -> Result<f64> {
    let n = features.rows();
    if labels.len() != n || n < 2 {
        return Err(Error::invalid("1-NN accuracy needs one label per row and at least 2 rows"));
    }
    let hits = crate::par::map_indexed(n, |i| {
        let nearest = ranking(features, i)[0].0;
        labels[nearest] == labels[i]
    });
    Ok(hits.iter().filter(|&&h| h).count() as f64 / n as f64)
}

/// Fraction of rows whose `k` nearest neighbors all share the row's label.
pub fn knn_purity(features: Features<'_>, labels: &[usize], k: usize) -> Result<f64> {
    let n = features.rows();
    if labels.len() != n || k >= n {
        return Err(Error::invalid("k-NN purity needs one label per row and k below the row count"));
    }
    let pure = crate::par::map_indexed(n, |i| ranking(features, i)[..k].iter().all(|&(j, _)| labels[j] == labels[i]));
    Ok(pure.iter().filter(|&&p| p).count() as f64 / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("n{i}")).collect()
    }

    #[test]
    fn duplicate_row_ranks_first() {
        let data = [0.0, 0.0, 3.0, 4.0, 1.0, 1.0, 3.0, 4.0];
        let f = Features::new(&data, 2).unwrap();
        let r = topk_search(f, &ids(4), 1, 2).unwrap();
        assert_eq!(r.target, "n1");
        assert_eq!(r.neighbors[0], ("n3".to_string(), 0.0));
        assert_eq!(r.neighbors[1].0, "n2");
    }

    #[test]
    fn full_ranking_is_sorted() {
        let data: Vec<f64> = (0..30).map(|i| ((i * 7919) % 31) as f64).collect();
        let f = Features::new(&data, 3).unwrap();
        let r = topk_search(f, &ids(10), 4, 9).unwrap();
        assert_eq!(r.neighbors.len(), 9);
        assert!(r.neighbors.iter().all(|(id, _)| id != "n4"));
        assert!(r.neighbors.windows(2).all(|w| w[0].1 <= w[1].1));
    }

    #[test]
    fn ties_go_to_lower_index() {
        let data = [0.0, 1.0, -1.0, 1.0];
        let f = Features::new(&data, 1).unwrap();
        let r = topk_search(f, &ids(4), 0, 3).unwrap();
        let order: Vec<&str> = r.neighbors.iter().map(|(id, _)| id.as_str()).collect();
        assert_eq!(order, ["n1", "n2", "n3"]);
    }

    #[test]
    fn bad_queries() {
        let data = [0.0, 1.0, 2.0];
        let f = Features::new(&data, 1).unwrap();
        assert!(matches!(topk_search(f, &ids(3), 3, 1), Err(Error::UnknownNode(_))));
        assert!(topk_search(f, &ids(3), 0, 3).is_err());
    }

    #[test]
    fn nearest_neighbor_scores() {
        let data = [0.0, 0.1, 5.0, 5.1, 10.0, 10.2];
        let f = Features::new(&data, 1).unwrap();
        assert_eq!(nn_accuracy(f, &[0, 0, 1, 1, 2, 2]).unwrap(), 1.0);
        assert_eq!(nn_accuracy(f, &[0, 1, 0, 1, 0, 1]).unwrap(), 0.0);
        assert_eq!(knn_purity(f, &[0, 0, 1, 1, 2, 2], 1).unwrap(), 1.0);
        assert_eq!(knn_purity(f, &[0, 0, 1, 1, 2, 2], 2).unwrap(), 0.0);
    }
}
