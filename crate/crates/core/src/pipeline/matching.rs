use serde::{Deserialize, Serialize};

use crate::blowup::HostGraph;
use crate::graph::Graph;

/// Edge-disjoint matchings covering every host edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingDecomposition {
    pub matchings: Vec<Vec<(usize, usize)>>,
}

impl MatchingDecomposition {
    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    /// True iff every class is a matching and the classes partition `E(h)`.
    pub fn is_valid_for(&self, h: &Graph) -> bool {
        let mut seen = std::collections::HashSet::new();
        for m in &self.matchings {
            let mut touched = std::collections::HashSet::new();
            for &(u, v) in m {
                if !h.has_edge(u, v) || !touched.insert(u) || !touched.insert(v) {
                    return false;
                }
                if !seen.insert((u.min(v), u.max(v))) {
                    return false;
                }
            }
        }
        seen.len() == h.edge_count()
    }
}

/// Proper edge colouring with at most `Δ + 1` colours (Misra–Gries).
struct FanColouring {
    /// `at[v][c]` is the neighbour joined to `v` by colour `c`.
    at: Vec<Vec<Option<usize>>>,
}

impl FanColouring {
    fn free(&self, v: usize, c: usize) -> bool {
        self.at[v][c].is_none()
    }

    fn first_free(&self, v: usize) -> usize {
        (0..self.at[v].len()).find(|&c| self.free(v, c)).expect("Δ+1 colours leave one free")
    }

    fn colour(&self, u: usize, v: usize) -> Option<usize> {
        self.at[u].iter().position(|&w| w == Some(v))
    }

    fn set(&mut self, u: usize, v: usize, c: usize) {
        self.at[u][c] = Some(v);
        self.at[v][c] = Some(u);
    }

    fn unset(&mut self, u: usize, v: usize, c: usize) {
        self.at[u][c] = None;
        self.at[v][c] = None;
    }

    fn colour_edge(&mut self, h: &Graph, u: usize, v: usize) {
        // Maximal fan of u starting at v.
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = h.neighbours(u).iter().find(|&w| {
                !fan.contains(&w) && self.colour(u, w).is_some_and(|c| self.free(last, c))
            });
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let c = self.first_free(u);
        let d = self.first_free(*fan.last().unwrap());

        // Invert the cd-path through u (it leaves u along colour d).
        let mut path = Vec::new();
        let (mut cur, mut col) = (u, d);
        while let Some(next) = self.at[cur][col] {
            path.push((cur, next, col));
            cur = next;
            col = if col == d { c } else { d };
        }
        for &(a, b, col) in &path {
            self.unset(a, b, col);
        }
        for &(a, b, col) in &path {
            self.set(a, b, if col == d { c } else { d });
        }

        // Shortest prefix of the fan that is still a fan and ends where d is free.
        let mut w = None;
        for i in 0..fan.len() {
            if i > 0 {
                let ok = self.colour(u, fan[i]).is_some_and(|col| self.free(fan[i - 1], col));
                if !ok {
                    break;
                }
            }
            if self.free(fan[i], d) {
                w = Some(i);
                break;
            }
        }
        let w = w.expect("Misra-Gries invariant: some fan prefix ends at a vertex missing d");
        for j in 0..w {
            let col = self.colour(u, fan[j + 1]).expect("fan edges beyond the first are coloured");
            self.unset(u, fan[j + 1], col);
            self.set(u, fan[j], col);
        }
        self.set(u, fan[w], d);
    }
}

/// Partitions `E(H)` into at most `Δ + 1` non-empty matchings, listed in
/// colour order with edges as `(min, max)` in lexicographic order.
pub fn matching_decomposition(host: &HostGraph) -> MatchingDecomposition {
    let h = host.graph();
    let k = h.max_degree() + 1;
    let mut fc = FanColouring {
        at: vec![vec![None; k]; h.vertex_count()],
    };
    for (u, v) in h.edges() {
        fc.colour_edge(h, u, v);
    }
    let mut classes = vec![Vec::new(); k];
    for (u, v) in h.edges() {
        classes[fc.colour(u, v).expect("every edge coloured")].push((u, v));
    }
    MatchingDecomposition {
        matchings: classes.into_iter().filter(|m| !m.is_empty()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decomp(g: Graph) -> (Graph, MatchingDecomposition) {
        let h = HostGraph::with_actual_degree(g.clone()).unwrap();
        (g, matching_decomposition(&h))
    }

    #[test]
    fn perfect_matching_is_one_class() {
        let (g, d) = decomp(Graph::from_edges(6, [(0, 1), (2, 3), (4, 5)]).unwrap());
        assert_eq!(d.len(), 1);
        assert!(d.is_valid_for(&g));
    }

    #[test]
    fn odd_cycle_needs_three() {
        let (g, d) = decomp(HostGraph::cycle(5).unwrap().graph().clone());
        assert_eq!(d.len(), 3);
        assert!(d.is_valid_for(&g));
    }

    #[test]
    fn petersen_needs_four() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::from_edges(10, outer.chain(spokes).chain(inner)).unwrap();
        let (g, d) = decomp(g);
        assert_eq!(d.len(), 4);
        assert!(d.is_valid_for(&g));
    }

    #[test]
    fn complete_graphs_stay_within_bound() {
        for n in 3..=9 {
            let g = Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap();
            let (g, d) = decomp(g);
            assert!(d.len() <= n);
            assert!(d.is_valid_for(&g));
        }
    }
}
