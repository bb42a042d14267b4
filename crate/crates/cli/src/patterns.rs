//! Small named graphs for the oracle commands.

use anyhow::{bail, Context, Result};
use gridramsey::io::read_graph;
use gridramsey::oracle::grid_graph;
use gridramsey::Graph;

pub fn complete(n: usize) -> Graph {
    Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("in range")
}

pub fn path(n: usize) -> Graph {
    Graph::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("in range")
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        bail!("cycle needs at least 3 vertices");
    }
    Ok(Graph::from_edges(n, (0..n).map(|v| (v, (v + 1) % n)))?)
}

/// `complete N | path N | cycle N | grid A B | file PATH`, or a bare path.
pub fn parse_graph(spec: &str) -> Result<Graph> {
    let f: Vec<&str> = spec.split_whitespace().collect();
    let num = |s: &str| s.parse::<usize>().with_context(|| format!("bad size `{s}` in `{spec}`"));
    match f.as_slice() {
        ["complete", n] | ["K", n] => Ok(complete(num(n)?)),
        ["path", n] | ["P", n] => Ok(path(num(n)?)),
        ["cycle", n] | ["C", n] => cycle(num(n)?),
        ["grid", a, b] => Ok(grid_graph(num(a)?, num(b)?)),
        ["file", p] | [p] => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading graph {p}"))?;
            Ok(read_graph(&text)?)
        }
        _ => bail!("bad graph spec `{spec}` (complete N | path N | cycle N | grid A B | file PATH)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_shapes() {
        assert_eq!(parse_graph("complete 6").unwrap().edge_count(), 15);
        assert_eq!(parse_graph("P 3").unwrap().edge_count(), 2);
        assert_eq!(parse_graph("cycle 5").unwrap().edge_count(), 5);
        assert_eq!(parse_graph("grid 3 4").unwrap().edge_count(), 17);
        assert!(parse_graph("cycle 2").is_err());
        assert!(parse_graph("wheel 5").is_err());
    }
}
