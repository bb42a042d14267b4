use serde::{Deserialize, Serialize};

use crate::graph::{EdgeColouring, Graph};

use super::GridEmbedding;

pub type Cell = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Violation {
    /// The image list does not have `rows * cols` entries.
    Shape { expected: usize, found: usize },
    OutOfRange { cell: Cell, vertex: usize },
    NonInjective { first: Cell, second: Cell, vertex: usize },
    MissingEdge { from: Cell, to: Cell },
    WrongColour { from: Cell, to: Cell, found: u8 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCheck {
    pub valid: bool,
    /// Grid edges examined; `2ab - a - b` when the shape is right.
    pub edges_checked: usize,
    pub violations: Vec<Violation>,
}

/// Checks injectivity, range, and presence and colour of every grid edge.
pub fn verify_grid_embedding(g: &Graph, chi: &EdgeColouring, emb: &GridEmbedding) -> GridCheck {
    let (a, b) = (emb.rows, emb.cols);
    let mut violations = Vec::new();
    if emb.image.len() != a * b {
        violations.push(Violation::Shape {
            expected: a * b,
            found: emb.image.len(),
        });
        return GridCheck {
            valid: false,
            edges_checked: 0,
            violations,
        };
    }
    let n = g.vertex_count();
    let mut owner: std::collections::HashMap<usize, Cell> = std::collections::HashMap::new();
    for i in 0..a {
        for j in 0..b {
            let v = emb.image(i, j);
            if v >= n {
                violations.push(Violation::OutOfRange { cell: (i, j), vertex: v });
            }
            if let Some(&first) = owner.get(&v) {
                violations.push(Violation::NonInjective {
                    first,
                    second: (i, j),
                    vertex: v,
                });
            } else {
                owner.insert(v, (i, j));
            }
        }
    }
    let mut edges_checked = 0;
    for i in 0..a {
        for j in 0..b {
            let mut nbrs = Vec::with_capacity(2);
            if j + 1 < b {
                nbrs.push((i, j + 1));
            }
            if i + 1 < a {
                nbrs.push((i + 1, j));
            }
            for to in nbrs {
                edges_checked += 1;
                let (u, v) = (emb.image(i, j), emb.image(to.0, to.1));
                if u >= n || v >= n || u == v || !g.has_edge(u, v) {
                    violations.push(Violation::MissingEdge { from: (i, j), to });
                    continue;
                }
                match chi.colour_of(u, v) {
                    Some(c) if c == emb.colour => {}
                    Some(c) => violations.push(Violation::WrongColour { from: (i, j), to, found: c }),
                    None => violations.push(Violation::MissingEdge { from: (i, j), to }),
                }
            }
        }
    }
    GridCheck {
        valid: violations.is_empty(),
        edges_checked,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: usize, b: usize) -> Graph {
        let mut g = Graph::new(a * b);
        for i in 0..a {
            for j in 0..b {
                if j + 1 < b {
                    g.add_edge(i * b + j, i * b + j + 1).unwrap();
                }
                if i + 1 < a {
                    g.add_edge(i * b + j, (i + 1) * b + j).unwrap();
                }
            }
        }
        g
    }

    fn identity(a: usize, b: usize) -> GridEmbedding {
        GridEmbedding {
            rows: a,
            cols: b,
            colour: 0,
            image: (0..a * b).collect(),
        }
    }

    #[test]
    fn identity_is_valid() {
        let g = grid(3, 4);
        let chi = EdgeColouring::monochromatic(&g, 2, 0).unwrap();
        let check = verify_grid_embedding(&g, &chi, &identity(3, 4));
        assert!(check.valid);
        assert_eq!(check.edges_checked, 17);
    }

    #[test]
    fn recoloured_edge_is_named() {
        let g = grid(3, 4);
        let mut chi = EdgeColouring::monochromatic(&g, 2, 0).unwrap();
        chi.set(5, 9, 1).unwrap();
        let check = verify_grid_embedding(&g, &chi, &identity(3, 4));
        assert!(!check.valid);
        assert_eq!(
            check.violations,
            vec![Violation::WrongColour {
                from: (1, 1),
                to: (2, 1),
                found: 1
            }]
        );
    }

    #[test]
    fn duplicate_and_range() {
        let g = grid(2, 2);
        let chi = EdgeColouring::monochromatic(&g, 2, 0).unwrap();
        let mut emb = identity(2, 2);
        emb.image[3] = 0;
        let check = verify_grid_embedding(&g, &chi, &emb);
        assert!(check.violations.contains(&Violation::NonInjective {
            first: (0, 0),
            second: (1, 1),
            vertex: 0
        }));
        emb.image[3] = 17;
        let check = verify_grid_embedding(&g, &chi, &emb);
        assert!(check.violations.contains(&Violation::OutOfRange { cell: (1, 1), vertex: 17 }));
    }
}
