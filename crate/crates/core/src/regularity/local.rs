//! Compressed bipartite adjacency between two vertex lists.

use crate::graph::{Density, Graph, VertexSet};

/// Adjacency of the pair `(A, B)` re-indexed to local ids `0..|A|` and
/// `0..|B|`, in ascending global-id order.
pub(crate) struct LocalPair {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    a_words: usize,
    b_words: usize,
    /// Row `i` is the neighbourhood of `a[i]` over local B ids.
    a_rows: Vec<u64>,
    /// Row `j` is the neighbourhood of `b[j]` over local A ids.
    b_rows: Vec<u64>,
}

impl LocalPair {
    pub fn new(g: &Graph, a: &VertexSet, b: &VertexSet) -> Self {
        let a_ids = a.to_vec();
        let b_ids = b.to_vec();
        let a_words = a_ids.len().div_ceil(64).max(1);
        let b_words = b_ids.len().div_ceil(64).max(1);
        let mut a_rows = vec![0u64; a_ids.len() * b_words];
        let mut b_rows = vec![0u64; b_ids.len() * a_words];
        for (i, &u) in a_ids.iter().enumerate() {
            let row = g.row(u);
            for (j, &v) in b_ids.iter().enumerate() {
                if (row[v >> 6] >> (v & 63)) & 1 == 1 {
                    a_rows[i * b_words + (j >> 6)] |= 1 << (j & 63);
                    b_rows[j * a_words + (i >> 6)] |= 1 << (i & 63);
                }
            }
        }
        LocalPair {
            a: a_ids,
            b: b_ids,
            a_words,
            b_words,
            a_rows,
            b_rows,
        }
    }

    /// The same pair with the roles of the sides exchanged.
    pub fn swapped(self) -> Self {
        LocalPair {
            a: self.b,
            b: self.a,
            a_words: self.b_words,
            b_words: self.a_words,
            a_rows: self.b_rows,
            b_rows: self.a_rows,
        }
    }

    pub fn a_words(&self) -> usize {
        self.a_words
    }

    pub fn b_row(&self, j: usize) -> &[u64] {
        &self.b_rows[j * self.a_words..(j + 1) * self.a_words]
    }

    pub fn a_row(&self, i: usize) -> &[u64] {
        &self.a_rows[i * self.b_words..(i + 1) * self.b_words]
    }

    pub fn a_degree(&self, i: usize) -> usize {
        self.a_row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn b_degree(&self, j: usize) -> usize {
        self.b_row(j).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Degrees of every B vertex into the local A subset `mask`.
    pub fn counts_into_a(&self, mask: &[u64], out: &mut Vec<u32>) {
        out.clear();
        out.extend((0..self.b.len()).map(|j| {
            self.b_row(j)
                .iter()
                .zip(mask)
                .map(|(x, y)| (x & y).count_ones())
                .sum::<u32>()
        }));
    }

    /// Degrees of every A vertex into the local B subset `mask`.
    pub fn counts_into_b(&self, mask: &[u64], out: &mut Vec<u32>) {
        out.clear();
        out.extend((0..self.a.len()).map(|i| {
            self.a_row(i)
                .iter()
                .zip(mask)
                .map(|(x, y)| (x & y).count_ones())
                .sum::<u32>()
        }));
    }

    pub fn density(&self, a_sel: &[usize], b_mask: &[u64]) -> Density {
        let edges: u64 = a_sel
            .iter()
            .map(|&i| {
                self.a_row(i)
                    .iter()
                    .zip(b_mask)
                    .map(|(x, y)| (x & y).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum();
        let b_len: u64 = b_mask.iter().map(|w| w.count_ones() as u64).sum();
        Density {
            edges,
            pairs: a_sel.len() as u64 * b_len,
        }
    }
}

pub(crate) fn mask_of(ids: &[usize], words: usize) -> Vec<u64> {
    let mut m = vec![0u64; words];
    for &i in ids {
        m[i >> 6] |= 1 << (i & 63);
    }
    m
}

/// Local indices of the `k` smallest `counts`, ties broken by lower index.
pub(crate) fn k_smallest(counts: &[u32], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..counts.len()).collect();
    idx.sort_by_key(|&j| (counts[j], j));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}
