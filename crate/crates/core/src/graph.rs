//! Dense bit-row graphs, vertex subsets and edge colourings.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rational::{self, Rational};

#[inline]
fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A subset of `[n]` stored as a dense bit row with a cached cardinality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "SetRecord", try_from = "SetRecord")]
pub struct VertexSet {
    n: usize,
    bits: Vec<u64>,
    len: usize,
}

/// Serialized form: the universe size and the sorted member ids.
#[derive(Serialize, Deserialize)]
struct SetRecord {
    n: usize,
    ids: Vec<usize>,
}

impl From<VertexSet> for SetRecord {
    fn from(set: VertexSet) -> Self {
        SetRecord {
            n: set.n,
            ids: set.to_vec(),
        }
    }
}

impl TryFrom<SetRecord> for VertexSet {
    type Error = String;

    fn try_from(rec: SetRecord) -> std::result::Result<Self, String> {
        match rec.ids.iter().find(|&&v| v >= rec.n) {
            Some(v) => Err(format!("vertex {v} outside universe of {}", rec.n)),
            None => Ok(VertexSet::from_iter(rec.n, rec.ids)),
        }
    }
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet {
            n,
            bits: vec![0; words_for(n)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut set = VertexSet::empty(n);
        for v in 0..n {
            set.insert(v);
        }
        set
    }

    /// Builds a set from vertex ids; duplicates are ignored.
    ///
    /// Panics if an id is `>= n`.
    pub fn from_iter<I: IntoIterator<Item = usize>>(n: usize, ids: I) -> Self {
        let mut set = VertexSet::empty(n);
        for v in ids {
            set.insert(v);
        }
        set
    }

    /// The contiguous range `start..end`.
    pub fn range(n: usize, start: usize, end: usize) -> Self {
        VertexSet::from_iter(n, start..end)
    }

    fn from_bits(n: usize, bits: Vec<u64>) -> Self {
        let len = bits.iter().map(|w| w.count_ones() as usize).sum();
        VertexSet { n, bits, len }
    }

    /// Universe size.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.n && (self.bits[v >> 6] >> (v & 63)) & 1 == 1
    }

    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.n, "vertex {v} outside universe {}", self.n);
        let (w, b) = (v >> 6, 1u64 << (v & 63));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.len += 1;
        true
    }

    pub fn remove(&mut self, v: usize) -> bool {
        if !self.contains(v) {
            return false;
        }
        self.bits[v >> 6] &= !(1u64 << (v & 63));
        self.len -= 1;
        true
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    /// The `k` lowest ids of the set (all of it if smaller).
    pub fn lowest(&self, k: usize) -> VertexSet {
        VertexSet::from_iter(self.n, self.iter().take(k))
    }

    fn zip(&self, other: &VertexSet, f: impl Fn(u64, u64) -> u64) -> VertexSet {
        assert_eq!(self.n, other.n, "universe mismatch");
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| f(a, b))
            .collect();
        VertexSet::from_bits(self.n, bits)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        self.zip(other, |a, b| a & !b)
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected graph on `0..n` with dense symmetric bit rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    adj: Vec<u64>,
    edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
            edges: 0,
        }
    }

    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Result<Self> {
        let mut g = Graph::new(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts `uv`; returns whether it was new. Loops are rejected.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return domain(format!("loop at vertex {u}"));
        }
        if self.has_edge(u, v) {
            return Ok(false);
        }
        self.adj[u * self.words + (v >> 6)] |= 1 << (v & 63);
        self.adj[v * self.words + (u >> 6)] |= 1 << (u & 63);
        self.edges += 1;
        Ok(true)
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || !self.has_edge(u, v) {
            return false;
        }
        self.adj[u * self.words + (v >> 6)] &= !(1 << (v & 63));
        self.adj[v * self.words + (u >> 6)] &= !(1 << (u & 63));
        self.edges -= 1;
        true
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.words..(v + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && (self.adj[u * self.words + (v >> 6)] >> (v & 63)) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn neighbours(&self, v: usize) -> VertexSet {
        VertexSet::from_bits(self.n, self.row(v).to_vec())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbours(u)
                .iter()
                .filter(move |&v| v > u)
                .collect::<Vec<_>>()
                .into_iter()
                .map(move |v| (u, v))
        })
    }

    /// Number of edges with one endpoint in `a` and the other in `b`.
    ///
    /// Edges inside `a ∩ b` would be counted twice; callers pass disjoint sets.
    pub fn edges_between(&self, a: &VertexSet, b: &VertexSet) -> u64 {
        let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        small
            .iter()
            .map(|v| {
                self.row(v)
                    .iter()
                    .zip(large.bits())
                    .map(|(x, y)| (x & y).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum()
    }

    /// Subgraph induced on `keep`, relabelled to `0..keep.len()` in id order.
    pub fn induced(&self, keep: &VertexSet) -> Graph {
        let ids = keep.to_vec();
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(ids.len());
        for (i, &v) in ids.iter().enumerate() {
            for w in self.neighbours(v).intersection(keep).iter() {
                if index[w] > i {
                    g.add_edge(i, index[w]).expect("valid ids");
                }
            }
        }
        g
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Exact edge density `edges / pairs` of a bipartite pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Density {
    pub edges: u64,
    pub pairs: u64,
}

impl Density {
    pub fn ratio(&self) -> Rational {
        Rational::new(self.edges as i128, self.pairs as i128)
    }

    pub fn as_f64(&self) -> f64 {
        self.edges as f64 / self.pairs as f64
    }

    /// Strictly below `threshold`, compared exactly.
    pub fn is_below(&self, threshold: Rational) -> bool {
        rational::below(self.edges, self.pairs, threshold)
    }
}

fn check_pair(a: &VertexSet, b: &VertexSet) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return domain("pair density needs non-empty sets");
    }
    if !a.is_disjoint(b) {
        return domain("pair density needs disjoint sets");
    }
    Ok(())
}

/// `e(A, B) / (|A||B|)` for disjoint non-empty `A`, `B`.
pub fn pair_density(g: &Graph, a: &VertexSet, b: &VertexSet) -> Result<Density> {
    check_pair(a, b)?;
    Ok(Density {
        edges: g.edges_between(a, b),
        pairs: (a.len() * b.len()) as u64,
    })
}

/// `|N(v) ∩ B|`.
pub fn degree_into(g: &Graph, v: usize, b: &VertexSet) -> Result<usize> {
    g.check_vertex(v)?;
    Ok(g.row(v)
        .iter()
        .zip(b.bits())
        .map(|(x, y)| (x & y).count_ones() as usize)
        .sum())
}

/// `N(v) ∩ B`.
pub fn neighbours_in(g: &Graph, v: usize, b: &VertexSet) -> Result<VertexSet> {
    g.check_vertex(v)?;
    let bits = g.row(v).iter().zip(b.bits()).map(|(x, y)| x & y).collect();
    Ok(VertexSet::from_bits(g.vertex_count(), bits))
}

/// Assignment of a colour in `0..r` to every edge, keyed by `(min, max)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "ColouringRecord", try_from = "ColouringRecord")]
pub struct EdgeColouring {
    r: u8,
    edges: Vec<(u32, u32)>,
    colours: Vec<u8>,
}

/// Serialized form: colour count and `(u, v, c)` triples.
#[derive(Serialize, Deserialize)]
struct ColouringRecord {
    r: u8,
    edges: Vec<(usize, usize, u8)>,
}

impl From<EdgeColouring> for ColouringRecord {
    fn from(chi: EdgeColouring) -> Self {
        ColouringRecord {
            r: chi.r,
            edges: chi.iter().collect(),
        }
    }
}

impl TryFrom<ColouringRecord> for EdgeColouring {
    type Error = Error;

    fn try_from(rec: ColouringRecord) -> Result<Self> {
        EdgeColouring::new(rec.r, rec.edges)
    }
}

impl EdgeColouring {
    /// Builds a colouring from `(u, v, c)` triples; endpoints are canonicalised.
    pub fn new<I: IntoIterator<Item = (usize, usize, u8)>>(r: u8, triples: I) -> Result<Self> {
        if r < 1 {
            return domain("colour count must be positive");
        }
        let mut items: Vec<((u32, u32), u8)> = Vec::new();
        for (u, v, c) in triples {
            if c >= r {
                return domain(format!("colour {c} outside [0, {r})"));
            }
            if u == v {
                return domain(format!("loop at vertex {u}"));
            }
            let key = (u.min(v) as u32, u.max(v) as u32);
            items.push((key, c));
        }
        items.sort_unstable();
        for w in items.windows(2) {
            if w[0].0 == w[1].0 {
                return domain(format!("edge {:?} coloured twice", w[0].0));
            }
        }
        let (edges, colours) = items.into_iter().unzip();
        Ok(EdgeColouring { r, edges, colours })
    }

    /// Every edge of `g` gets colour `c`.
    pub fn monochromatic(g: &Graph, r: u8, c: u8) -> Result<Self> {
        EdgeColouring::new(r, g.edges().map(|(u, v)| (u, v, c)))
    }

    /// Colours from a closure over canonical edges, in edge order.
    pub fn from_fn(g: &Graph, r: u8, mut f: impl FnMut(usize, usize) -> u8) -> Result<Self> {
        EdgeColouring::new(r, g.edges().map(|(u, v)| (u, v, f(u, v))).collect::<Vec<_>>())
    }

    pub fn colours(&self) -> u8 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn colour_of(&self, u: usize, v: usize) -> Option<u8> {
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges
            .binary_search(&key)
            .ok()
            .map(|i| self.colours[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        self.edges
            .iter()
            .zip(&self.colours)
            .map(|(&(u, v), &c)| (u as usize, v as usize, c))
    }

    pub fn set(&mut self, u: usize, v: usize, c: u8) -> Result<()> {
        if c >= self.r {
            return domain(format!("colour {c} outside [0, {})", self.r));
        }
        let key = (u.min(v) as u32, u.max(v) as u32);
        match self.edges.binary_search(&key) {
            Ok(i) => {
                self.colours[i] = c;
                Ok(())
            }
            Err(_) => domain(format!("edge ({u}, {v}) is not coloured")),
        }
    }

    /// Checks that the coloured edges are exactly the edges of `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.edges.len() != g.edge_count() {
            return domain(format!(
                "colouring has {} edges, graph has {}",
                self.edges.len(),
                g.edge_count()
            ));
        }
        for &(u, v) in &self.edges {
            if !g.has_edge(u as usize, v as usize) {
                return domain(format!("coloured pair ({u}, {v}) is not an edge"));
            }
        }
        Ok(())
    }
}

/// Spanning subgraph of `g` formed by the edges of colour `c`.
pub fn colour_subgraph(g: &Graph, chi: &EdgeColouring, c: u8) -> Result<Graph> {
    if c >= chi.colours() {
        return domain(format!("colour {c} outside [0, {})", chi.colours()));
    }
    let mut out = Graph::new(g.vertex_count());
    for (u, v, col) in chi.iter() {
        if col == c && g.has_edge(u, v) {
            out.add_edge(u, v)?;
        }
    }
    Ok(out)
}

/// All colour classes at once, indexed by colour.
pub fn colour_layers(g: &Graph, chi: &EdgeColouring) -> Vec<Graph> {
    let mut layers = vec![Graph::new(g.vertex_count()); chi.colours() as usize];
    for (u, v, c) in chi.iter() {
        if g.has_edge(u, v) {
            layers[c as usize].add_edge(u, v).expect("valid edge");
        }
    }
    layers
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn density_examples() {
        let full = Graph::from_edges(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
        let a = VertexSet::range(6, 0, 3);
        let b = VertexSet::range(6, 3, 6);
        assert_eq!(pair_density(&full, &a, &b).unwrap().ratio(), Rational::from_integer(1));
        let empty = Graph::new(6);
        assert_eq!(pair_density(&empty, &a, &b).unwrap().edges, 0);

        let g = Graph::from_edges(4, [(0, 2), (1, 3), (1, 2)]).unwrap();
        let d = pair_density(&g, &VertexSet::from_iter(4, [0, 1]), &VertexSet::from_iter(4, [2, 3])).unwrap();
        assert_eq!(d.ratio(), Rational::new(3, 4));
    }

    #[test]
    fn density_rejects_bad_sets() {
        let g = Graph::new(4);
        let a = VertexSet::from_iter(4, [0, 1]);
        assert!(pair_density(&g, &a, &VertexSet::empty(4)).is_err());
        assert!(pair_density(&g, &a, &VertexSet::from_iter(4, [1, 2])).is_err());
    }

    #[test]
    fn degree_and_neighbours() {
        let star = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        let leaves = VertexSet::range(6, 1, 6);
        assert_eq!(degree_into(&star, 0, &leaves).unwrap(), 5);
        let isolated = Graph::new(4);
        assert_eq!(degree_into(&isolated, 0, &VertexSet::full(4)).unwrap(), 0);

        let c5 = cycle(5);
        let b = VertexSet::from_iter(5, [1, 2, 3]);
        // N(0) = {1, 4} in C_5.
        assert_eq!(degree_into(&c5, 0, &b).unwrap(), 1);
        assert_eq!(neighbours_in(&c5, 0, &b).unwrap().to_vec(), vec![1]);
        assert!(degree_into(&c5, 7, &b).is_err());

        let g = Graph::from_edges(4, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(neighbours_in(&g, 0, &VertexSet::from_iter(4, [2, 3])).unwrap().to_vec(), vec![2]);
        assert!(neighbours_in(&g, 0, &VertexSet::empty(4)).unwrap().is_empty());
    }

    #[test]
    fn colour_subgraph_examples() {
        let k3 = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mono = EdgeColouring::monochromatic(&k3, 2, 0).unwrap();
        assert_eq!(colour_subgraph(&k3, &mono, 0).unwrap(), k3);
        assert_eq!(colour_subgraph(&k3, &mono, 1).unwrap().edge_count(), 0);

        let chi = EdgeColouring::new(2, [(0, 1, 0), (1, 2, 0), (0, 2, 1)]).unwrap();
        let red = colour_subgraph(&k3, &chi, 0).unwrap();
        assert_eq!(red.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(colour_subgraph(&k3, &chi, 2).is_err());
    }

    #[test]
    fn colouring_rejects_duplicates_and_bad_colours() {
        assert!(EdgeColouring::new(2, [(0, 1, 0), (1, 0, 1)]).is_err());
        assert!(EdgeColouring::new(2, [(0, 1, 2)]).is_err());
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let chi = EdgeColouring::new(2, [(0, 2, 0)]).unwrap();
        assert!(chi.validate(&g).is_err());
    }

    #[test]
    fn vertex_set_ops() {
        let a = VertexSet::from_iter(130, [0, 64, 129]);
        let b = VertexSet::from_iter(130, [64, 100]);
        assert_eq!(a.len(), 3);
        assert_eq!(a.union(&b).to_vec(), vec![0, 64, 100, 129]);
        assert_eq!(a.intersection(&b).to_vec(), vec![64]);
        assert_eq!(a.difference(&b).len(), 2);
        assert!(!a.is_disjoint(&b));
        assert_eq!(a.lowest(2).to_vec(), vec![0, 64]);
    }
}
