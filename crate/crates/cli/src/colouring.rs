use anyhow::{bail, Result};
use gridramsey::blowup::BlowupGraph;
use gridramsey::{rng, EdgeColouring, Graph};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::config::Strategy;

/// Colour of host edge `xy` under the default host 2-colouring used by
/// `host-split`: edges in sorted order get colours `0, 1, ..., r-1, 0, ...`.
/// On an even cycle this alternates except for one repeat at vertex 1.
pub fn host_colouring(host: &Graph, r: u8) -> Result<EdgeColouring> {
    let edges: Vec<(usize, usize)> = host.edges().collect();
    Ok(EdgeColouring::new(r, edges.iter().enumerate().map(|(i, &(u, v))| (u, v, (i % r as usize) as u8)))?)
}

pub fn colour(gamma: &BlowupGraph, strategy: &Strategy, r: u8, seed: u64) -> Result<EdgeColouring> {
    let g = &gamma.gamma;
    let chi = match strategy {
        Strategy::Mono { colour } => {
            if *colour >= r {
                bail!("mono colour {colour} not below r = {r}");
            }
            EdgeColouring::monochromatic(g, r, *colour)?
        }
        Strategy::UniformRandom => {
            let mut rng = rng::stream(seed, &[]);
            EdgeColouring::from_fn(g, r, |_, _| rng.gen_range(0..r))?
        }
        Strategy::HostSplit => {
            let phi = host_colouring(gamma.host.graph(), r)?;
            EdgeColouring::from_fn(g, r, |u, v| {
                phi.colour_of(gamma.part_of(u), gamma.part_of(v))
                    .expect("blow-up edges lie over host edges")
            })?
        }
        Strategy::DegreeAdversary => degree_adversary(g, r, seed)?,
    };
    Ok(chi)
}

/// Edges in a seeded random order; each takes the colour with the fewest
/// edges already at its two endpoints, lowest colour on ties.
pub fn degree_adversary(g: &Graph, r: u8, seed: u64) -> Result<EdgeColouring> {
    let mut edges: Vec<(usize, usize)> = g.edges().collect();
    edges.shuffle(&mut rng::stream(seed, &[]));
    let mut load = vec![0usize; g.vertex_count() * r as usize];
    let mut triples = Vec::with_capacity(edges.len());
    for (u, v) in edges {
        let c = (0..r)
            .min_by_key(|&c| load[u * r as usize + c as usize] + load[v * r as usize + c as usize])
            .expect("r >= 1");
        load[u * r as usize + c as usize] += 1;
        load[v * r as usize + c as usize] += 1;
        triples.push((u, v, c));
    }
    Ok(EdgeColouring::new(r, triples)?)
}

/// Edges per colour.
pub fn colour_counts(chi: &EdgeColouring) -> Vec<usize> {
    let mut counts = vec![0; chi.colours() as usize];
    for (_, _, c) in chi.iter() {
        counts[c as usize] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use gridramsey::blowup::{build_blowup, HostGraph};

    #[test]
    fn host_split_is_constant_on_pairs() {
        let host = HostGraph::cycle(10).unwrap();
        let b = build_blowup(&host, 8, 0.5, 2).unwrap();
        let chi = colour(&b, &Strategy::HostSplit, 2, 0).unwrap();
        let phi = host_colouring(host.graph(), 2).unwrap();
        for (u, v, c) in chi.iter() {
            assert_eq!(phi.colour_of(b.part_of(u), b.part_of(v)), Some(c));
        }
    }

    #[test]
    fn uniform_is_reproducible_and_balanced() {
        let b = build_blowup(&HostGraph::cycle(6).unwrap(), 40, 0.5, 1).unwrap();
        let a = colour(&b, &Strategy::UniformRandom, 2, 5).unwrap();
        assert_eq!(a, colour(&b, &Strategy::UniformRandom, 2, 5).unwrap());
        let counts = colour_counts(&a);
        let total = counts[0] + counts[1];
        assert!((counts[0] as f64 / total as f64 - 0.5).abs() < 0.05);
    }

    #[test]
    fn adversary_balances_degrees() {
        let b = build_blowup(&HostGraph::cycle(4).unwrap(), 20, 1.0, 1).unwrap();
        let chi = degree_adversary(&b.gamma, 2, 3).unwrap();
        let counts = colour_counts(&chi);
        assert!(counts[0].abs_diff(counts[1]) <= b.gamma.vertex_count());
    }
}
