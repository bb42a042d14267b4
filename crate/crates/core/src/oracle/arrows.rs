use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{colour_subgraph, EdgeColouring, Graph};

use super::subgraph::{contains_subgraph, Matcher, SubgraphSearch};

/// Largest host edge count searched without an explicit override.
pub const ARROW_EDGE_GUARD: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArrowStatus {
    Arrows,
    NotArrows,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowResult {
    pub status: ArrowStatus,
    /// A colouring with no monochromatic copy, for `NotArrows`.
    pub witness: Option<EdgeColouring>,
    /// Search-tree nodes visited.
    pub nodes: u64,
}

struct Search<'a> {
    t: &'a Graph,
    t_edges: Vec<(usize, usize)>,
    edges: Vec<(usize, usize)>,
    layers: Vec<Graph>,
    colours: Vec<u8>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Whether colour class `c` has a copy of `t` through its edge `uv`.
    fn copy_through(&self, c: usize, u: usize, v: usize) -> bool {
        let g = &self.layers[c];
        self.t_edges.iter().any(|&(a, b)| {
            let mut m = Matcher::new(g, self.t, &[a, b], u64::MAX);
            [(u, v), (v, u)]
                .iter()
                .any(|&(x, y)| matches!(m.find_from(&[x, y]), Some(Some(_))))
        })
    }

    /// `Some(true)` once an avoiding colouring is complete.
    fn run(&mut self, i: usize) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return None;
        }
        if i == self.edges.len() {
            return Some(true);
        }
        let (u, v) = self.edges[i];
        // The first edge's colour is fixed: colour classes are interchangeable.
        let choices = if i == 0 { 1 } else { self.layers.len() };
        for c in 0..choices {
            self.layers[c].add_edge(u, v).expect("host edge in range");
            if !self.copy_through(c, u, v) {
                self.colours.push(c as u8);
                match self.run(i + 1) {
                    Some(false) => {
                        self.colours.pop();
                    }
                    other => return other,
                }
            }
            self.layers[c].remove_edge(u, v);
        }
        Some(false)
    }
}

/// Decides `g -> (t)_r` by exhaustive colouring with incremental detection
/// of monochromatic copies. Refuses hosts with more than
/// [`ARROW_EDGE_GUARD`] edges unless `allow_large`.
pub fn arrows(g: &Graph, t: &Graph, r: u8, budget: u64, allow_large: bool) -> Result<ArrowResult> {
    if r == 0 {
        return domain("need at least one colour");
    }
    if g.edge_count() > ARROW_EDGE_GUARD && !allow_large {
        return Err(Error::Refused(format!(
            "host has {} edges (> {ARROW_EDGE_GUARD}); pass an explicit override",
            g.edge_count()
        )));
    }
    if t.edge_count() == 0 {
        let status = if t.vertex_count() <= g.vertex_count() {
            ArrowStatus::Arrows
        } else {
            ArrowStatus::NotArrows
        };
        let witness = (status == ArrowStatus::NotArrows).then(|| EdgeColouring::monochromatic(g, r, 0)).transpose()?;
        return Ok(ArrowResult { status, witness, nodes: 0 });
    }
    let mut s = Search {
        t,
        t_edges: t.edges().collect(),
        edges: g.edges().collect(),
        layers: vec![Graph::new(g.vertex_count()); r as usize],
        colours: Vec::new(),
        nodes: 0,
        budget,
    };
    let status = match s.run(0) {
        Some(true) => ArrowStatus::NotArrows,
        Some(false) => ArrowStatus::Arrows,
        None => ArrowStatus::Unknown,
    };
    let witness = if status == ArrowStatus::NotArrows {
        let chi = EdgeColouring::new(r, s.edges.iter().zip(&s.colours).map(|(&(u, v), &c)| (u, v, c)))?;
        // Full re-check of the leaf, independent of the incremental test.
        for c in 0..r {
            let layer = colour_subgraph(g, &chi, c)?;
            assert!(
                matches!(contains_subgraph(&layer, t, u64::MAX), SubgraphSearch::Absent { .. }),
                "avoiding colouring has a monochromatic copy in colour {c}"
            );
        }
        Some(chi)
    } else {
        None
    };
    Ok(ArrowResult {
        status,
        witness,
        nodes: s.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn ramsey_three_three() {
        let k3 = complete(3);
        assert_eq!(arrows(&complete(6), &k3, 2, u64::MAX, false).unwrap().status, ArrowStatus::Arrows);
        let five = arrows(&complete(5), &k3, 2, u64::MAX, false).unwrap();
        assert_eq!(five.status, ArrowStatus::NotArrows);
        // The avoiding colouring of K_5 is two 5-cycles.
        let chi = five.witness.unwrap();
        for c in 0..2 {
            let layer = colour_subgraph(&complete(5), &chi, c).unwrap();
            assert_eq!(layer.edge_count(), 5);
            assert!((0..5).all(|v| layer.degree(v) == 2));
        }
    }

    #[test]
    fn one_colour_is_containment() {
        let t = complete(3);
        assert_eq!(arrows(&t, &t, 1, u64::MAX, false).unwrap().status, ArrowStatus::Arrows);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(arrows(&path, &t, 1, u64::MAX, false).unwrap().status, ArrowStatus::NotArrows);
    }

    #[test]
    fn guard_and_budget() {
        assert!(matches!(
            arrows(&complete(9), &complete(3), 2, 10, false),
            Err(Error::Refused(_))
        ));
        assert_eq!(
            arrows(&complete(6), &complete(3), 2, 3, false).unwrap().status,
            ArrowStatus::Unknown
        );
    }
}
