use anyhow::{bail, Context, Result};
use gridramsey::blowup::HostGraph;
use gridramsey::io::read_graph;
use gridramsey::{rng, Graph};
use rand::seq::SliceRandom;

use crate::config::HostSpec;

/// Pairings tried before giving up on a simple graph.
const PAIRING_ATTEMPTS: usize = 10_000;

/// `d`-regular simple graph on `n` vertices from the pairing model, redrawing
/// the whole pairing until it has no loops or repeated pairs.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        bail!("random-regular {n} {d}: n*d = {} is odd", n * d);
    }
    if d >= n && !(d == 0 && n <= 1) {
        bail!("random-regular {n} {d}: degree must be below n");
    }
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    for attempt in 0..PAIRING_ATTEMPTS {
        let mut rng = rng::stream(seed, &[attempt as u64]);
        points.shuffle(&mut rng);
        let mut g = Graph::new(n);
        let simple = points.chunks(2).all(|pair| pair[0] != pair[1] && g.add_edge(pair[0], pair[1]).unwrap_or(false));
        if simple {
            return Ok(g);
        }
    }
    bail!("random-regular {n} {d}: no simple pairing in {PAIRING_ATTEMPTS} attempts")
}

pub fn build_host(spec: &HostSpec) -> Result<HostGraph> {
    let g = match spec {
        HostSpec::Cycle { m } => return Ok(HostGraph::cycle(*m)?),
        HostSpec::RandomRegular { n, d, seed } => random_regular(*n, *d, *seed)?,
        HostSpec::File { path } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading host {}", path.display()))?;
            read_graph(&text)?
        }
    };
    Ok(HostGraph::with_actual_degree(g)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_regular_on_twenty() {
        let g = random_regular(20, 3, 1).unwrap();
        assert_eq!(g.edge_count(), 30);
        assert!((0..20).all(|v| g.degree(v) == 3));
        assert_eq!(random_regular(20, 3, 1).unwrap(), g);
    }

    #[test]
    fn odd_product_rejected() {
        assert!(random_regular(5, 3, 0).is_err());
    }
}
