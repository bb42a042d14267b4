//! Line-oriented text formats for graphs, colourings and grid embeddings.
//!
//! Graph files start with `n <count>` followed by one `u v` pair per line.
//! Colouring files hold `u v c` triples, optionally preceded by `r <count>`.
//! Ids are 0-based, fields are whitespace-separated and `#` starts a comment.

use std::fmt::Write as _;

use crate::embedder::GridEmbedding;
use crate::error::{Error, Result};
use crate::graph::{EdgeColouring, Graph};

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        message: message.into(),
    })
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = line.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn num<T: std::str::FromStr>(line: usize, field: &str) -> Result<T> {
    field
        .parse()
        .or_else(|_| parse_err(line, format!("expected a number, found `{field}`")))
}

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", g.vertex_count()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn read_graph(text: &str) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (line, header) = match lines.next() {
        Some(h) => h,
        None => return parse_err(0, "missing `n <count>` header"),
    };
    if header.len() != 2 || header[0] != "n" {
        return parse_err(line, "expected header `n <count>`");
    }
    let n: usize = num(line, header[1])?;
    let mut g = Graph::new(n);
    for (line, fields) in lines {
        if fields.len() != 2 {
            return parse_err(line, "expected `u v`");
        }
        let u: usize = num(line, fields[0])?;
        let v: usize = num(line, fields[1])?;
        g.add_edge(u, v).or_else(|e| parse_err(line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_colouring(chi: &EdgeColouring) -> String {
    let mut out = String::new();
    writeln!(out, "r {}", chi.colours()).unwrap();
    for (u, v, c) in chi.iter() {
        writeln!(out, "{u} {v} {c}").unwrap();
    }
    out
}

/// Parses a colouring; without an `r` header the colour count is
/// `max(2, largest colour + 1)`.
pub fn read_colouring(text: &str) -> Result<EdgeColouring> {
    let mut r: Option<u8> = None;
    let mut triples = Vec::new();
    for (line, fields) in content_lines(text) {
        match fields.as_slice() {
            ["r", count] if r.is_none() && triples.is_empty() => r = Some(num(line, count)?),
            [u, v, c] => triples.push((num(line, u)?, num(line, v)?, num::<u8>(line, c)?)),
            _ => return parse_err(line, "expected `u v c`"),
        }
    }
    let r = r.unwrap_or_else(|| {
        triples
            .iter()
            .map(|t: &(usize, usize, u8)| t.2 + 1)
            .max()
            .unwrap_or(2)
            .max(2)
    });
    EdgeColouring::new(r, triples)
}

pub fn write_embedding(emb: &GridEmbedding) -> String {
    let mut out = String::new();
    writeln!(out, "grid {} {} colour {}", emb.rows, emb.cols, emb.colour).unwrap();
    for i in 0..emb.rows {
        for j in 0..emb.cols {
            writeln!(out, "{i} {j} {}", emb.image(i, j)).unwrap();
        }
    }
    out
}

pub fn read_embedding(text: &str) -> Result<GridEmbedding> {
    let mut lines = content_lines(text);
    let (line, header) = match lines.next() {
        Some(h) => h,
        None => return parse_err(0, "missing `grid a b colour c` header"),
    };
    let (rows, cols, colour) = match header.as_slice() {
        ["grid", a, b, "colour", c] => (num::<usize>(line, a)?, num::<usize>(line, b)?, num::<u8>(line, c)?),
        _ => return parse_err(line, "expected header `grid a b colour c`"),
    };
    let mut image = vec![None; rows * cols];
    for (line, fields) in lines {
        if fields.len() != 3 {
            return parse_err(line, "expected `i j vertex`");
        }
        let i: usize = num(line, fields[0])?;
        let j: usize = num(line, fields[1])?;
        let v: usize = num(line, fields[2])?;
        if i >= rows || j >= cols {
            return parse_err(line, format!("cell ({i}, {j}) outside {rows}x{cols} grid"));
        }
        if image[i * cols + j].replace(v).is_some() {
            return parse_err(line, format!("cell ({i}, {j}) listed twice"));
        }
    }
    let image = image
        .into_iter()
        .enumerate()
        .map(|(k, v)| v.ok_or(k))
        .collect::<std::result::Result<Vec<_>, _>>()
        .or_else(|k| parse_err(0, format!("cell ({}, {}) missing", k / cols, k % cols)))?;
    Ok(GridEmbedding {
        rows,
        cols,
        colour,
        image,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip_with_comments() {
        let text = "# a triangle\nn 3\n0 1\n1 2 # last\n\n0 2\n";
        let g = read_graph(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(read_graph(&write_graph(&g)).unwrap(), g);
    }

    #[test]
    fn graph_parse_errors() {
        assert!(read_graph("").is_err());
        assert!(read_graph("n 3\n0 5\n").is_err());
        assert!(read_graph("n 3\n0 x\n").is_err());
        assert!(read_graph("m 3\n").is_err());
    }

    #[test]
    fn colouring_header_optional() {
        let chi = read_colouring("0 1 0\n1 2 1\n").unwrap();
        assert_eq!(chi.colours(), 2);
        let chi3 = read_colouring("r 3\n0 1 2\n").unwrap();
        assert_eq!(chi3.colours(), 3);
        assert_eq!(read_colouring(&write_colouring(&chi3)).unwrap(), chi3);
        assert!(read_colouring("r 2\n0 1 2\n").is_err());
    }

    #[test]
    fn embedding_round_trip() {
        let emb = GridEmbedding {
            rows: 2,
            cols: 3,
            colour: 1,
            image: vec![5, 6, 7, 8, 9, 10],
        };
        assert_eq!(read_embedding(&write_embedding(&emb)).unwrap(), emb);
        assert!(read_embedding("grid 1 2 colour 0\n0 0 4\n").is_err());
    }
}
