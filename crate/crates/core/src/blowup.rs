//! Random blow-ups of bounded-degree hosts.
//!
//! Each host vertex `x` becomes an independent set `V_x` of `s` vertices
//! (ids `x*s .. (x+1)*s`), and each host edge `xy` becomes a random
//! bipartite graph between `V_x` and `V_y` with edge probability `p`.

use std::fmt::Write as _;

use rand::distributions::{Bernoulli, Distribution};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{degree_into, Graph, VertexSet};
use crate::io::write_graph;
use crate::rng;

/// A host graph together with its declared degree bound.
#[derive(Clone, Debug, PartialEq)]
pub struct HostGraph {
    graph: Graph,
    max_degree: usize,
}

impl HostGraph {
    pub fn new(graph: Graph, max_degree: usize) -> Result<Self> {
        if max_degree < 2 {
            return domain("host degree bound must be at least 2");
        }
        if graph.vertex_count() < 2 {
            return domain("host needs at least two vertices");
        }
        if let Some(v) = (0..graph.vertex_count()).find(|&v| graph.degree(v) > max_degree) {
            return domain(format!(
                "host vertex {v} has degree {} > {max_degree}",
                graph.degree(v)
            ));
        }
        Ok(HostGraph { graph, max_degree })
    }

    /// Uses the larger of 2 and the actual maximum degree as the bound.
    pub fn with_actual_degree(graph: Graph) -> Result<Self> {
        let d = graph.max_degree().max(2);
        HostGraph::new(graph, d)
    }

    pub fn cycle(m: usize) -> Result<Self> {
        if m < 3 {
            return domain("cycle needs at least three vertices");
        }
        HostGraph::new(Graph::from_edges(m, (0..m).map(|i| (i, (i + 1) % m)))?, 2)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// 64-bit FNV-1a hash of the serialised host.
    pub fn fingerprint(&self) -> u64 {
        write_graph(&self.graph)
            .bytes()
            .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
    }
}

/// The blow-up `Γ` with its part structure and generation parameters.
#[derive(Clone, Debug)]
pub struct BlowupGraph {
    pub gamma: Graph,
    pub host: HostGraph,
    pub part_size: usize,
    pub p: f64,
    pub seed: u64,
    parts: Vec<VertexSet>,
}

impl BlowupGraph {
    /// Reassembles a blow-up from a stored `Γ`, checking the part invariants.
    pub fn from_parts(gamma: Graph, host: HostGraph, part_size: usize, p: f64, seed: u64) -> Result<Self> {
        let n = host.vertex_count() * part_size;
        if gamma.vertex_count() != n {
            return domain(format!(
                "graph has {} vertices, expected {} parts of size {part_size}",
                gamma.vertex_count(),
                host.vertex_count()
            ));
        }
        let parts = (0..host.vertex_count())
            .map(|x| VertexSet::range(n, x * part_size, (x + 1) * part_size))
            .collect();
        let b = BlowupGraph {
            gamma,
            host,
            part_size,
            p,
            seed,
            parts,
        };
        for (u, v) in b.gamma.edges() {
            let (x, y) = (b.part_of(u), b.part_of(v));
            if !b.host.graph().has_edge(x, y) {
                return domain(format!("edge ({u}, {v}) joins parts {x}, {y} that are not adjacent in the host"));
            }
        }
        Ok(b)
    }

    pub fn part_of(&self, v: usize) -> usize {
        v / self.part_size
    }

    pub fn part(&self, x: usize) -> &VertexSet {
        &self.parts[x]
    }

    pub fn parts(&self) -> &[VertexSet] {
        &self.parts
    }

    /// Text key-value sidecar describing how `Γ` was generated.
    pub fn metadata(&self, density_constant: Option<f64>) -> String {
        let mut out = String::new();
        writeln!(out, "s {}", self.part_size).unwrap();
        writeln!(out, "p {}", self.p).unwrap();
        match density_constant {
            Some(c) => writeln!(out, "C {c}").unwrap(),
            None => writeln!(out, "C none").unwrap(),
        }
        writeln!(out, "seed {}", self.seed).unwrap();
        writeln!(out, "host_vertices {}", self.host.vertex_count()).unwrap();
        writeln!(out, "host_max_degree {}", self.host.max_degree()).unwrap();
        writeln!(out, "host_hash {:016x}", self.host.fingerprint()).unwrap();
        out
    }
}

/// Builds `Γ` with one independent random stream per host edge.
pub fn build_blowup(host: &HostGraph, s: usize, p: f64, seed: u64) -> Result<BlowupGraph> {
    if !(p > 0.0 && p <= 1.0) {
        return domain(format!("edge probability {p} outside (0, 1]"));
    }
    if s == 0 {
        return domain("part size must be positive");
    }
    let coin = Bernoulli::new(p).expect("p in (0, 1]");
    let host_edges: Vec<(usize, usize)> = host.graph().edges().collect();
    let pair_edges: Vec<Vec<(u32, u32)>> = host_edges
        .par_iter()
        .map(|&(x, y)| {
            let mut rng = rng::stream(seed, &[x as u64, y as u64]);
            let mut out = Vec::new();
            for a in 0..s {
                for b in 0..s {
                    if coin.sample(&mut rng) {
                        out.push(((x * s + a) as u32, (y * s + b) as u32));
                    }
                }
            }
            out
        })
        .collect();
    let n = host.vertex_count() * s;
    let mut gamma = Graph::new(n);
    for (u, v) in pair_edges.into_iter().flatten() {
        gamma.add_edge(u as usize, v as usize)?;
    }
    let parts = (0..host.vertex_count())
        .map(|x| VertexSet::range(n, x * s, (x + 1) * s))
        .collect();
    Ok(BlowupGraph {
        gamma,
        host: host.clone(),
        part_size: s,
        p,
        seed,
        parts,
    })
}

/// Mean edge count `e(H) s^2 p` of the blow-up.
pub fn expected_edges(host: &HostGraph, s: usize, p: f64) -> f64 {
    host.edge_count() as f64 * (s * s) as f64 * p
}

/// The handshake upper bound `|V(H)| * Δ/2 * (1 + λ) s^2 p` on `|E(Γ)|`
/// for a uniform blow-up.
pub fn edge_upper_bound(host: &HostGraph, lambda: f64, s: usize, p: f64) -> f64 {
    host.vertex_count() as f64 * host.max_degree() as f64 / 2.0 * (1.0 + lambda) * (s * s) as f64 * p
}

/// A pair of vertex lists `(X, Y)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsetPair {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// Outcome of a sampled uniformity audit of one host-edge pair.
///
/// The audit is a falsifier: a report without violations is not a proof
/// that the pair is uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub lambda: f64,
    pub pairs_tested: usize,
    /// Largest `|e(X,Y) / (|X||Y|p) - 1|` seen.
    pub worst_ratio: f64,
    /// Up to [`MAX_WITNESSES`] violating pairs.
    pub violations: Vec<SubsetPair>,
    pub violation_count: usize,
    /// True when no subset sizes satisfy `|X||Y|p >= c s / λ^2`.
    pub vacuous: bool,
}

pub const MAX_WITNESSES: usize = 16;

/// Settings for [`audit_uniformity`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformityAudit {
    pub lambda: f64,
    pub budget: usize,
    /// The constant `c` in the size floor `|X||Y|p >= c s / λ^2`.
    pub size_constant: f64,
}

impl UniformityAudit {
    pub fn new(lambda: f64, budget: usize) -> Self {
        UniformityAudit {
            lambda,
            budget,
            size_constant: 100.0,
        }
    }
}

fn deviation(g: &Graph, x: &VertexSet, y: &VertexSet, p: f64) -> f64 {
    let expected = (x.len() * y.len()) as f64 * p;
    (g.edges_between(x, y) as f64 / expected - 1.0).abs()
}

/// `k` vertices of `from` ordered by degree into `into`; ties by id.
fn extremal(g: &Graph, from: &VertexSet, into: &VertexSet, k: usize, lowest: bool) -> VertexSet {
    let mut scored: Vec<(usize, usize)> = from
        .iter()
        .map(|v| (degree_into(g, v, into).expect("in range"), v))
        .collect();
    if lowest {
        scored.sort_unstable();
    } else {
        scored.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    }
    VertexSet::from_iter(from.universe(), scored.into_iter().take(k).map(|(_, v)| v))
}

fn random_subset(set: &VertexSet, k: usize, rng: &mut rng::Rng) -> VertexSet {
    let members = set.to_vec();
    VertexSet::from_iter(set.universe(), members.choose_multiple(rng, k).copied())
}

/// Samples subset pairs of the host-edge pair `xy` above the size floor and
/// records the worst deviation from `|X||Y|p`.
pub fn audit_uniformity(
    blowup: &BlowupGraph,
    xy: (usize, usize),
    audit: UniformityAudit,
    seed: u64,
) -> Result<UniformityReport> {
    let (x, y) = xy;
    if !blowup.host.graph().has_edge(x, y) {
        return domain(format!("({x}, {y}) is not a host edge"));
    }
    let s = blowup.part_size;
    let p = blowup.p;
    let lambda = audit.lambda;
    let floor = audit.size_constant * s as f64 / (lambda * lambda);
    let mut report = UniformityReport {
        lambda,
        pairs_tested: 0,
        worst_ratio: 0.0,
        violations: Vec::new(),
        violation_count: 0,
        vacuous: false,
    };
    if ((s * s) as f64) * p < floor {
        report.vacuous = true;
        return Ok(report);
    }
    let (vx, vy) = (blowup.part(x), blowup.part(y));
    let g = &blowup.gamma;
    let record = |a: &VertexSet, b: &VertexSet, report: &mut UniformityReport| {
        let ratio = deviation(g, a, b, p);
        report.pairs_tested += 1;
        report.worst_ratio = report.worst_ratio.max(ratio);
        if ratio > lambda {
            report.violation_count += 1;
            if report.violations.len() < MAX_WITNESSES {
                report.violations.push(SubsetPair {
                    left: a.to_vec(),
                    right: b.to_vec(),
                });
            }
        }
    };

    record(vx, vy, &mut report);
    // Smallest square sizes meeting the floor, plus extremal-degree sets.
    let side = ((floor / p).sqrt().ceil() as usize).clamp(1, s);
    for lowest in [true, false] {
        let a = extremal(g, vx, vy, side, lowest);
        let b = extremal(g, vy, &a, side, lowest);
        record(&a, &b, &mut report);
    }
    let mut rng = rng::stream(seed, &[x as u64, y as u64]);
    let a_min = ((floor / (s as f64 * p)).ceil() as usize).clamp(1, s);
    for _ in 0..audit.budget {
        let a = rng.gen_range(a_min..=s);
        let b_min = ((floor / (a as f64 * p)).ceil() as usize).clamp(1, s);
        let b = rng.gen_range(b_min..=s);
        let xs = random_subset(vx, a, &mut rng);
        let ys = random_subset(vy, b, &mut rng);
        record(&xs, &ys, &mut report);
    }
    Ok(report)
}

/// Worst deviation over `samples` random `size x size` subset pairs of `xy`
/// and the extremal low/high-degree pairs of that size, ignoring the size floor.
pub fn worst_deviation_at_size(blowup: &BlowupGraph, xy: (usize, usize), size: usize, samples: usize, seed: u64) -> Result<f64> {
    let (x, y) = xy;
    if !blowup.host.graph().has_edge(x, y) {
        return domain(format!("({x}, {y}) is not a host edge"));
    }
    if size == 0 || size > blowup.part_size {
        return domain(format!("subset size {size} outside [1, {}]", blowup.part_size));
    }
    let g = &blowup.gamma;
    let (vx, vy) = (blowup.part(x), blowup.part(y));
    let mut worst: f64 = 0.0;
    for lowest in [true, false] {
        let a = extremal(g, vx, vy, size, lowest);
        let b = extremal(g, vy, &a, size, lowest);
        worst = worst.max(deviation(g, &a, &b, blowup.p));
    }
    let mut rng = rng::stream(seed, &[x as u64, y as u64, size as u64]);
    for _ in 0..samples {
        let a = random_subset(vx, size, &mut rng);
        let b = random_subset(vy, size, &mut rng);
        worst = worst.max(deviation(g, &a, &b, blowup.p));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge() -> HostGraph {
        HostGraph::new(Graph::from_edges(2, [(0, 1)]).unwrap(), 2).unwrap()
    }

    #[test]
    fn p_one_gives_complete_pair() {
        let b = build_blowup(&single_edge(), 2, 1.0, 9).unwrap();
        assert_eq!(b.gamma.edge_count(), 4);
        for u in 0..2 {
            for v in 2..4 {
                assert!(b.gamma.has_edge(u, v));
            }
        }
    }

    #[test]
    fn probability_must_be_in_range() {
        let h = single_edge();
        assert!(build_blowup(&h, 3, 0.0, 1).is_err());
        assert!(build_blowup(&h, 3, 1.5, 1).is_err());
        assert!(build_blowup(&h, 3, -0.1, 1).is_err());
    }

    #[test]
    fn tiny_p_is_reproducible() {
        let h = single_edge();
        for seed in 0..5 {
            let a = build_blowup(&h, 3, 1e-9, seed).unwrap();
            let b = build_blowup(&h, 3, 1e-9, seed).unwrap();
            assert_eq!(a.gamma, b.gamma);
            assert_eq!(a.gamma.edge_count(), 0);
        }
    }

    #[test]
    fn structural_invariants() {
        let h = HostGraph::new(Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap(), 2).unwrap();
        let b = build_blowup(&h, 10, 0.5, 3).unwrap();
        let total: usize = b.parts().iter().map(|p| p.len()).sum();
        assert_eq!(total, b.gamma.vertex_count());
        for (i, a) in b.parts().iter().enumerate() {
            for c in &b.parts()[i + 1..] {
                assert!(a.is_disjoint(c));
            }
        }
        for (u, v) in b.gamma.edges() {
            assert_ne!(b.part_of(u), b.part_of(v));
            assert!(h.graph().has_edge(b.part_of(u), b.part_of(v)));
        }
        assert_eq!(b.gamma.edges_between(b.part(0), b.part(2)), 0);
        assert!(BlowupGraph::from_parts(b.gamma.clone(), h.clone(), 10, 0.5, 3).is_ok());
    }

    #[test]
    fn expected_edge_examples() {
        assert_eq!(expected_edges(&single_edge(), 10, 0.5), 50.0);
        let c50 = HostGraph::cycle(50).unwrap();
        assert!((expected_edges(&c50, 200, 0.424) - 848_000.0).abs() < 1e-6);
        let bound = edge_upper_bound(&HostGraph::new(c50.graph().clone(), 4).unwrap(), 0.01, 200, 0.424);
        assert!(bound >= expected_edges(&c50, 200, 0.424));
    }

    #[test]
    fn host_validation() {
        assert!(HostGraph::new(Graph::new(1), 2).is_err());
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(HostGraph::new(star.clone(), 2).is_err());
        assert_eq!(HostGraph::with_actual_degree(star).unwrap().max_degree(), 3);
    }

    #[test]
    fn complete_pair_audit_is_clean() {
        let b = build_blowup(&single_edge(), 200, 1.0, 1).unwrap();
        let mut audit = UniformityAudit::new(0.5, 50);
        audit.size_constant = 1.0;
        let r = audit_uniformity(&b, (0, 1), audit, 4).unwrap();
        assert!(!r.vacuous);
        assert_eq!(r.worst_ratio, 0.0);
        assert!(r.violations.is_empty());
        assert_eq!(r.pairs_tested, 53);
    }

    #[test]
    fn unreachable_floor_is_vacuous() {
        let b = build_blowup(&single_edge(), 20, 0.5, 1).unwrap();
        let r = audit_uniformity(&b, (0, 1), UniformityAudit::new(0.2, 10), 1).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.pairs_tested, 0);
        assert!(audit_uniformity(&b, (0, 0), UniformityAudit::new(0.2, 10), 1).is_err());
    }

    #[test]
    fn sparse_pair_flags_violations() {
        // A near-empty pair audited against a much larger p must deviate.
        let mut b = build_blowup(&single_edge(), 100, 1e-9, 1).unwrap();
        b.p = 0.5;
        let mut audit = UniformityAudit::new(0.5, 5);
        audit.size_constant = 1.0;
        let r = audit_uniformity(&b, (0, 1), audit, 2).unwrap();
        assert!(r.worst_ratio > 0.5);
        assert_eq!(r.violation_count, r.pairs_tested);
        assert!(!r.violations.is_empty());
    }
}
