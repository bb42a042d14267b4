use serde::{Deserialize, Serialize};

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum SubgraphSearch {
    /// `map[t]` is the image of pattern vertex `t`.
    Found { map: Vec<usize>, nodes: u64 },
    Absent { nodes: u64 },
    Unknown { nodes: u64 },
}

impl SubgraphSearch {
    pub fn map(&self) -> Option<&[usize]> {
        match self {
            SubgraphSearch::Found { map, .. } => Some(map),
            _ => None,
        }
    }
}

/// True iff `map` is injective, in range, and sends every edge of `t` to an
/// edge of `g`.
pub fn is_embedding(g: &Graph, t: &Graph, map: &[usize]) -> bool {
    if map.len() != t.vertex_count() || map.iter().any(|&v| v >= g.vertex_count()) {
        return false;
    }
    let distinct: std::collections::HashSet<_> = map.iter().collect();
    distinct.len() == map.len() && t.edges().all(|(a, b)| g.has_edge(map[a], map[b]))
}

/// Pattern vertices in BFS order from `roots`; further components start at
/// their highest-degree vertex (lowest id on ties).
fn search_order(t: &Graph, roots: &[usize]) -> Vec<usize> {
    let n = t.vertex_count();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    for &r in roots {
        if !seen[r] {
            seen[r] = true;
            order.push(r);
            queue.push_back(r);
        }
    }
    loop {
        while let Some(u) = queue.pop_front() {
            for w in t.neighbours(u).iter() {
                if !seen[w] {
                    seen[w] = true;
                    order.push(w);
                    queue.push_back(w);
                }
            }
        }
        let next = (0..n).filter(|&v| !seen[v]).max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v)));
        match next {
            Some(v) => {
                seen[v] = true;
                order.push(v);
                queue.push_back(v);
            }
            None => break,
        }
    }
    order
}

/// Backtracking matcher over bit rows.
pub(crate) struct Matcher<'a> {
    g: &'a Graph,
    order: Vec<usize>,
    /// Earlier positions adjacent in the pattern, per position.
    back: Vec<Vec<usize>>,
    need_degree: Vec<usize>,
    images: Vec<usize>,
    used: Vec<u64>,
    pub nodes: u64,
    budget: u64,
}

impl<'a> Matcher<'a> {
    /// Pattern vertices `roots` are placed first, in the given order.
    pub fn new(g: &'a Graph, t: &Graph, roots: &[usize], budget: u64) -> Self {
        let order = search_order(t, roots);
        let mut pos = vec![0; t.vertex_count()];
        for (k, &v) in order.iter().enumerate() {
            pos[v] = k;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(k, &v)| t.neighbours(v).iter().map(|w| pos[w]).filter(|&j| j < k).collect())
            .collect();
        let need_degree = order.iter().map(|&v| t.degree(v)).collect();
        Matcher {
            g,
            order,
            back,
            need_degree,
            images: Vec::with_capacity(t.vertex_count()),
            used: vec![0; g.vertex_count().div_ceil(64)],
            nodes: 0,
            budget,
        }
    }

    fn place(&mut self, v: usize) {
        self.images.push(v);
        self.used[v >> 6] |= 1 << (v & 63);
    }

    fn unplace(&mut self) {
        let v = self.images.pop().unwrap();
        self.used[v >> 6] &= !(1 << (v & 63));
    }

    fn candidates(&self) -> Vec<usize> {
        let k = self.images.len();
        let words = self.used.len();
        let mut cand: Vec<u64> = match self.back[k].first() {
            Some(&j) => self.g.row(self.images[j]).to_vec(),
            None => {
                let mut all = vec![u64::MAX; words];
                let n = self.g.vertex_count();
                if !n.is_multiple_of(64) {
                    all[words - 1] = (1u64 << (n % 64)) - 1;
                }
                all
            }
        };
        for &j in self.back[k].iter().skip(1) {
            for (c, r) in cand.iter_mut().zip(self.g.row(self.images[j])) {
                *c &= r;
            }
        }
        let mut out = Vec::new();
        for (w, (c, u)) in cand.iter().zip(&self.used).enumerate() {
            let mut bits = c & !u;
            while bits != 0 {
                let v = w * 64 + bits.trailing_zeros() as usize;
                if self.g.degree(v) >= self.need_degree[k] {
                    out.push(v);
                }
                bits &= bits - 1;
            }
        }
        out
    }

    /// Whether the fixed prefix `pre` is consistent with the pattern edges.
    fn prefix_ok(&self, pre: &[usize]) -> bool {
        pre.iter().enumerate().all(|(k, &v)| {
            self.g.degree(v) >= self.need_degree[k] && self.back[k].iter().all(|&j| self.g.has_edge(pre[j], v))
        }) && {
            let s: std::collections::HashSet<_> = pre.iter().collect();
            s.len() == pre.len()
        }
    }

    /// `Some(true)` if an embedding extending the current images exists.
    fn search(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if self.images.len() == self.order.len() {
            return Some(true);
        }
        for v in self.candidates() {
            self.place(v);
            match self.search() {
                Some(false) => self.unplace(),
                other => return other,
            }
        }
        Some(false)
    }

    /// Number of embeddings extending the current images.
    fn count(&mut self) -> Option<u64> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if self.images.len() == self.order.len() {
            return Some(1);
        }
        let mut total = 0;
        for v in self.candidates() {
            self.place(v);
            let c = self.count();
            self.unplace();
            total += c?;
        }
        Some(total)
    }

    fn result_map(&self) -> Vec<usize> {
        let mut map = vec![0; self.order.len()];
        for (k, &t) in self.order.iter().enumerate() {
            map[t] = self.images[k];
        }
        map
    }

    /// Searches with the first `pre.len()` positions pinned to `pre`.
    pub fn find_from(&mut self, pre: &[usize]) -> Option<Option<Vec<usize>>> {
        if !self.prefix_ok(pre) {
            return Some(None);
        }
        for &v in pre {
            self.place(v);
        }
        let res = self.search();
        let out = res.map(|ok| ok.then(|| self.result_map()));
        while !self.images.is_empty() {
            self.unplace();
        }
        out
    }
}

fn roots_for(t: &Graph) -> Vec<usize> {
    (0..t.vertex_count())
        .max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v)))
        .into_iter()
        .collect()
}

/// Backtracking search for a copy of `t` in `g`; `budget` caps search nodes.
pub fn contains_subgraph(g: &Graph, t: &Graph, budget: u64) -> SubgraphSearch {
    if t.vertex_count() > g.vertex_count() {
        return SubgraphSearch::Absent { nodes: 0 };
    }
    let mut m = Matcher::new(g, t, &roots_for(t), budget);
    match m.find_from(&[]) {
        Some(Some(map)) => SubgraphSearch::Found { map, nodes: m.nodes },
        Some(None) => SubgraphSearch::Absent { nodes: m.nodes },
        None => SubgraphSearch::Unknown { nodes: m.nodes },
    }
}

/// Number of labelled copies (injective edge-preserving maps) of `t` in `g`,
/// or `None` when `budget` search nodes are not enough.
pub fn count_embeddings(g: &Graph, t: &Graph, budget: u64) -> Option<u64> {
    if t.vertex_count() > g.vertex_count() {
        return Some(0);
    }
    let mut m = Matcher::new(g, t, &roots_for(t), budget);
    m.count()
}
