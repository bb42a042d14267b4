use serde::{Deserialize, Serialize};

use crate::blowup::HostGraph;
use crate::error::{domain, Result};
use crate::graph::{colour_subgraph, EdgeColouring, Graph, VertexSet};

/// A monochromatic cycle in the host.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub colour: u8,
    pub vertices: Vec<usize>,
}

impl CycleCertificate {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Distinct vertices, consecutive (cyclically) pairs are host edges of
    /// the certificate's colour, and the length lies in `[l_min, l_max]`.
    pub fn is_valid(&self, host: &Graph, phi: &EdgeColouring, l_min: usize, l_max: usize) -> bool {
        let l = self.vertices.len();
        if l < 3 || l < l_min || l > l_max {
            return false;
        }
        let distinct: std::collections::HashSet<_> = self.vertices.iter().collect();
        if distinct.len() != l {
            return false;
        }
        (0..l).all(|i| {
            let (u, v) = (self.vertices[i], self.vertices[(i + 1) % l]);
            host.has_edge(u, v) && phi.colour_of(u, v) == Some(self.colour)
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum CycleSearch {
    Found { cycle: CycleCertificate, nodes: u64 },
    /// The search space was exhausted: no cycle in range exists.
    NotFound { nodes: u64 },
    BudgetExhausted { nodes: u64 },
}

impl CycleSearch {
    pub fn cycle(&self) -> Option<&CycleCertificate> {
        match self {
            CycleSearch::Found { cycle, .. } => Some(cycle),
            _ => None,
        }
    }
}

/// Vertices of the 2-core of `g`.
fn two_core(g: &Graph) -> VertexSet {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = VertexSet::full(n);
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < 2).collect();
    while let Some(v) = stack.pop() {
        if !alive.remove(v) {
            continue;
        }
        for w in g.neighbours(v).iter() {
            if alive.contains(w) {
                deg[w] -= 1;
                if deg[w] == 1 {
                    stack.push(w);
                }
            }
        }
    }
    alive
}

/// Vertices reachable from `v` inside `allowed`.
fn component(g: &Graph, v: usize, allowed: &VertexSet) -> VertexSet {
    let mut seen = VertexSet::empty(g.vertex_count());
    seen.insert(v);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for w in g.neighbours(u).iter() {
            if allowed.contains(w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

struct Dfs<'a> {
    g: &'a Graph,
    allowed: VertexSet,
    start: usize,
    target: usize,
    path: Vec<usize>,
    on_path: VertexSet,
    nodes: u64,
    budget: u64,
}

impl Dfs<'_> {
    /// `Some(true)` on success, `Some(false)` when exhausted, `None` on budget.
    fn extend(&mut self) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        let last = *self.path.last().unwrap();
        if self.path.len() == self.target {
            return Some(self.g.has_edge(last, self.start));
        }
        let next: Vec<usize> = self
            .g
            .neighbours(last)
            .iter()
            .filter(|&w| self.allowed.contains(w) && !self.on_path.contains(w))
            .collect();
        for w in next {
            self.path.push(w);
            self.on_path.insert(w);
            match self.extend() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.on_path.remove(w);
            self.path.pop();
        }
        Some(false)
    }
}

/// Longest monochromatic cycle with length in `[l_min, l_max]`, searching
/// lengths from `l_max` down and colours in index order. Each cycle is
/// reported from its lowest vertex. `budget` caps DFS node expansions.
pub fn find_mono_cycle(host: &HostGraph, phi: &EdgeColouring, l_min: usize, l_max: usize, budget: u64) -> Result<CycleSearch> {
    let h = host.graph();
    if !(3 <= l_min && l_min <= l_max && l_max <= h.vertex_count()) {
        return domain(format!(
            "cycle lengths need 3 <= {l_min} <= {l_max} <= {}",
            h.vertex_count()
        ));
    }
    phi.validate(h)?;
    let layers: Vec<(Graph, VertexSet)> = (0..phi.colours())
        .map(|c| {
            let g = colour_subgraph(h, phi, c)?;
            let core = two_core(&g);
            Ok((g, core))
        })
        .collect::<Result<_>>()?;
    let mut nodes = 0u64;
    for l in (l_min..=l_max).rev() {
        for (c, (g, core)) in layers.iter().enumerate() {
            for start in core.iter() {
                // Only vertices above `start`, so each cycle is found from its minimum.
                let mut allowed = core.clone();
                for v in 0..start {
                    allowed.remove(v);
                }
                let comp = component(g, start, &allowed);
                if comp.len() < l {
                    continue;
                }
                let mut dfs = Dfs {
                    g,
                    allowed: comp,
                    start,
                    target: l,
                    path: vec![start],
                    on_path: VertexSet::from_iter(h.vertex_count(), [start]),
                    nodes: 0,
                    budget: budget.saturating_sub(nodes),
                };
                let res = dfs.extend();
                nodes += dfs.nodes;
                match res {
                    Some(true) => {
                        return Ok(CycleSearch::Found {
                            cycle: CycleCertificate {
                                colour: c as u8,
                                vertices: dfs.path,
                            },
                            nodes,
                        })
                    }
                    None => return Ok(CycleSearch::BudgetExhausted { nodes }),
                    Some(false) => {}
                }
            }
        }
    }
    Ok(CycleSearch::NotFound { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_ten_cycle() {
        let h = HostGraph::cycle(10).unwrap();
        let phi = EdgeColouring::monochromatic(h.graph(), 2, 1).unwrap();
        let out = find_mono_cycle(&h, &phi, 10, 10, 1_000_000).unwrap();
        let cyc = out.cycle().unwrap();
        assert_eq!(cyc.colour, 1);
        assert_eq!(cyc.len(), 10);
        assert!(cyc.is_valid(h.graph(), &phi, 10, 10));
    }

    #[test]
    fn alternating_colouring_has_none() {
        let h = HostGraph::cycle(10).unwrap();
        let phi = EdgeColouring::from_fn(h.graph(), 2, |u, v| if u.abs_diff(v) == 1 { (u.min(v) % 2) as u8 } else { 1 }).unwrap();
        assert!(matches!(find_mono_cycle(&h, &phi, 3, 10, 1_000_000).unwrap(), CycleSearch::NotFound { .. }));
    }

    #[test]
    fn budget_is_reported() {
        let n = 9;
        let k = Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap();
        let h = HostGraph::with_actual_degree(k).unwrap();
        let phi = EdgeColouring::monochromatic(h.graph(), 2, 1).unwrap();
        // Colour 0 is empty, colour 1 is K_9; one node is not enough.
        assert!(matches!(find_mono_cycle(&h, &phi, 9, 9, 1).unwrap(), CycleSearch::BudgetExhausted { .. }));
    }

    #[test]
    fn range_checked() {
        let h = HostGraph::cycle(5).unwrap();
        let phi = EdgeColouring::monochromatic(h.graph(), 2, 0).unwrap();
        assert!(find_mono_cycle(&h, &phi, 2, 5, 10).is_err());
        assert!(find_mono_cycle(&h, &phi, 3, 6, 10).is_err());
    }
}
