use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::rng;

use super::grid_graph;
use super::subgraph::count_embeddings;

/// Labelled copies above which Monte Carlo counting is refused.
const MAX_EXPECTED_LABELLED: f64 = 5e7;
/// Search nodes allowed per sampled graph.
const COUNT_BUDGET: u64 = 2_000_000_000;

/// `|Aut|` of the `a x b` grid.
pub fn grid_automorphisms(a: usize, b: usize) -> u64 {
    match (a.min(b), a.max(b)) {
        (1, 1) => 1,
        (1, _) => 2,
        (x, y) if x == y => 8,
        _ => 4,
    }
}

/// Natural log of the expected number of unlabelled `a x b` grids in
/// `G(n, p)` (labelled copies when `labelled`).
pub fn log_expected_grid_count(n: usize, p: f64, a: usize, b: usize, labelled: bool) -> Result<f64> {
    if a == 0 || b == 0 {
        return domain("grid sides must be positive");
    }
    let k = a * b;
    if k > n {
        return domain(format!("grid has {k} vertices but the graph only {n}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p {p} outside [0, 1]"));
    }
    let edges = (2 * a * b - a - b) as f64;
    let falling: f64 = (0..k).map(|i| ((n - i) as f64).ln()).sum();
    let aut = if labelled { 1.0 } else { grid_automorphisms(a, b) as f64 };
    let pf = if edges == 0.0 { 0.0 } else { edges * p.ln() };
    Ok(falling + pf - aut.ln())
}

/// `(n)_{ab} p^{2ab - a - b} / |Aut|`.
pub fn expected_grid_count(n: usize, p: f64, a: usize, b: usize) -> Result<f64> {
    log_expected_grid_count(n, p, a, b, false).map(f64::exp)
}

/// `G(n, p)` drawn pair by pair from one seeded stream.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng::stream(seed, &[]);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v).expect("in range");
            }
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCountReport {
    pub n: usize,
    pub p: f64,
    pub a: usize,
    pub b: usize,
    pub expectation: f64,
    pub samples: usize,
    /// Unlabelled copies per sample.
    pub counts: Vec<u64>,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
    /// `|mean - expectation| > 3 max(std_error, sqrt(expectation / samples))`.
    pub flagged: bool,
}

/// Exact unlabelled grid counts over `samples` draws of `G(n, p)`.
pub fn monte_carlo_grid_count(n: usize, p: f64, a: usize, b: usize, samples: usize, seed: u64) -> Result<GridCountReport> {
    if samples == 0 {
        return domain("need at least one sample");
    }
    let expectation = expected_grid_count(n, p, a, b)?;
    let labelled = log_expected_grid_count(n, p, a, b, true)?.exp();
    if labelled > MAX_EXPECTED_LABELLED {
        return Err(Error::Refused(format!(
            "about {labelled:.3e} labelled copies per sample; too many to enumerate"
        )));
    }
    let t = grid_graph(a, b);
    let aut = grid_automorphisms(a, b);
    let counts: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let g = random_graph(n, p, rng::derive_seed(seed, &[i as u64]));
            count_embeddings(&g, &t, COUNT_BUDGET)
                .map(|c| c / aut)
                .ok_or_else(|| Error::Refused(format!("sample {i} exceeded the search budget")))
        })
        .collect::<Result<_>>()?;
    let m = samples as f64;
    let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / m;
    let variance = if samples > 1 {
        counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let std_error = (variance / m).sqrt();
    // Poisson floor so that all-zero samples of a rare grid are not flagged.
    let scale = std_error.max((expectation / m).sqrt());
    let flagged = if scale > 0.0 {
        (mean - expectation).abs() > 3.0 * scale
    } else {
        mean != expectation
    };
    Ok(GridCountReport {
        n,
        p,
        a,
        b,
        expectation,
        samples,
        counts,
        mean,
        variance,
        std_error,
        flagged,
    })
}
