//! Brute-force ground truth at small scale: subgraph search, arrow
//! relations and first-moment grid counts.

mod arrows;
mod grid_count;
mod subgraph;

use crate::graph::Graph;

pub use arrows::{arrows, ArrowResult, ArrowStatus, ARROW_EDGE_GUARD};
pub use grid_count::{
    expected_grid_count, grid_automorphisms, log_expected_grid_count, monte_carlo_grid_count, random_graph,
    GridCountReport,
};
pub use subgraph::{contains_subgraph, count_embeddings, is_embedding, SubgraphSearch};

/// The `a x b` grid with cell `(i, j)` at vertex `i * b + j`.
pub fn grid_graph(a: usize, b: usize) -> Graph {
    let mut g = Graph::new(a * b);
    for i in 0..a {
        for j in 0..b {
            let v = i * b + j;
            if j + 1 < b {
                g.add_edge(v, v + 1).expect("in range");
            }
            if i + 1 < a {
                g.add_edge(v, v + b).expect("in range");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grids() {
        let p = grid_graph(1, 6);
        assert_eq!(p.edge_count(), 5);
        assert_eq!(p.max_degree(), 2);
        let c4 = grid_graph(2, 2);
        assert_eq!(c4.edge_count(), 4);
        assert!((0..4).all(|v| c4.degree(v) == 2));
        let g = grid_graph(3, 3);
        let mut degs: Vec<usize> = (0..9).map(|v| g.degree(v)).collect();
        degs.sort_unstable();
        assert_eq!(degs, vec![2, 2, 2, 2, 3, 3, 3, 3, 4]);
        assert_eq!(g.edge_count(), 12);
        for (a, b) in [(1, 1), (2, 5), (4, 4), (3, 7)] {
            assert_eq!(grid_graph(a, b).edge_count(), 2 * a * b - a - b);
        }
    }
}
