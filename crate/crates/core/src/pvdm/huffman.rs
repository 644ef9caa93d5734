//! Frequency-weighted Huffman tree over the lexicon.
//!
//! Leaves are tokens; the `|L| - 1` internal nodes each own a binary
//! classifier. A token's probability is the product of the sigmoid
//! decisions along its root-to-leaf path.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTree {
    /// Per leaf, the branch bits from the root down (`true` = right child).
    codes: Vec<Vec<bool>>,
    /// Per leaf, the internal node ids visited from the root down.
    points: Vec<Vec<u32>>,
}

impl HuffmanTree {
    /// Ties between equal weights break toward the smaller id, with leaf `i`
    /// holding id `i` and the `k`-th merged node id `num_leaves + k`.
    pub fn build(frequencies: &[u64]) -> Result<Self> {
        let n = frequencies.len();
        if n == 0 {
            return Err(Error::invalid("cannot build a Huffman tree over an empty lexicon"));
        }
        if n == 1 {
            return Ok(HuffmanTree {
                codes: vec![Vec::new()],
                points: vec![Vec::new()],
            });
        }
        let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
            frequencies.iter().enumerate().map(|(i, &f)| Reverse((f, i))).collect();
        // parent[x] = (internal id, bit) for every tree node x except the root
        let mut parent: Vec<(u32, bool)> = vec![(0, false); 2 * n - 1];
        for k in 0..n - 1 {
            let Reverse((f0, a)) = heap.pop().expect("heap has two nodes");
            let Reverse((f1, b)) = heap.pop().expect("heap has two nodes");
            parent[a] = (k as u32, false);
            parent[b] = (k as u32, true);
            heap.push(Reverse((f0 + f1, n + k)));
        }
        let root = 2 * n - 2;
        let mut codes = Vec::with_capacity(n);
        let mut points = Vec::with_capacity(n);
        for leaf in 0..n {
            let mut code = Vec::new();
            let mut point = Vec::new();
            let mut x = leaf;
            while x != root {
                let (p, bit) = parent[x];
                code.push(bit);
                point.push(p);
                x = n + p as usize;
            }
            code.reverse();
            point.reverse();
            codes.push(code);
            points.push(point);
        }
        Ok(HuffmanTree { codes, points })
    }

    pub fn num_leaves(&self) -> usize {
        self.codes.len()
    }

    pub fn num_internal(&self) -> usize {
        self.codes.len() - 1
    }

    pub fn code(&self, leaf: usize) -> &[bool] {
        &self.codes[leaf]
    }

    pub fn points(&self, leaf: usize) -> &[u32] {
        &self.points[leaf]
    }

    pub fn code_len(&self, leaf: usize) -> usize {
        self.codes[leaf].len()
    }

    /// `sum 2^-len` over leaves; 1 for any full binary tree.
    pub fn kraft_sum(&self) -> f64 {
        self.codes.iter().map(|c| 0.5f64.powi(c.len() as i32)).sum()
    }
}
