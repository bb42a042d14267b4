#![allow(dead_code)]

use gridramsey::{Graph, VertexSet};
use rand::Rng;

/// Random bipartite graph between `0..na` and `na..na+nb`.
pub fn random_bipartite(na: usize, nb: usize, p: f64, seed: u64) -> (Graph, VertexSet, VertexSet) {
    let n = na + nb;
    let mut rng = gridramsey::rng::stream(seed, &[]);
    let mut g = Graph::new(n);
    for u in 0..na {
        for v in na..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    (g, VertexSet::range(n, 0, na), VertexSet::range(n, na, n))
}

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
}

/// Every subset of `items`, as vectors.
pub fn subsets(items: &[usize]) -> Vec<Vec<usize>> {
    (0u32..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Edge count between two vertex lists by adjacency lookups.
pub fn naive_edges(g: &Graph, a: &[usize], b: &[usize]) -> u64 {
    a.iter().map(|&u| b.iter().filter(|&&v| g.has_edge(u, v)).count() as u64).sum()
}

/// Lower-regularity straight from the definition: all sub-pairs with
/// `|A'| >= eps|A|`, `|B'| >= eps|B|`, compared in integers via
/// `edges * den < (den - num) * p_num/p_den * pairs` with `eps = num/den`.
pub fn naive_lower_regular(g: &Graph, a: &[usize], b: &[usize], eps: (i64, i64), p: (i64, i64)) -> bool {
    let (en, ed) = eps;
    let (pn, pd) = p;
    let sa = subsets(a);
    let sb = subsets(b);
    for x in &sa {
        if x.is_empty() || (x.len() as i64) * ed < en * a.len() as i64 {
            continue;
        }
        for y in &sb {
            if y.is_empty() || (y.len() as i64) * ed < en * b.len() as i64 {
                continue;
            }
            let e = naive_edges(g, x, y) as i64;
            let pairs = (x.len() * y.len()) as i64;
            // e / pairs < (1 - en/ed) * pn/pd
            if e * ed * pd < (ed - en) * pn * pairs {
                return false;
            }
        }
    }
    true
}

/// All permutations of `0..n` choose `k`, as injective maps.
pub fn injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let mut used = vec![false; n];
    fn rec(n: usize, k: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(n, k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    rec(n, k, &mut cur, &mut used, &mut out);
    out
}
