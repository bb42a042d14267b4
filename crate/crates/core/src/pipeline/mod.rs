//! Level-by-level refinement of the blow-up parts over a matching
//! decomposition of the host, and monochromatic cycle search in the host
//! colouring it induces.

mod cycle;
mod matching;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::BlowupGraph;
use crate::error::{domain, Error, Result};
use crate::graph::{colour_layers, EdgeColouring, Graph, VertexSet};
use crate::rational;
use crate::regularity::{check_pair, find_lower_regular_pair, CheckConfig, EpsSchedule, IncrementOutcome, RegParams, RegVerdict};
use crate::rng;

pub use cycle::{find_mono_cycle, CycleCertificate, CycleSearch};
pub use matching::{matching_decomposition, MatchingDecomposition};

/// Edges of each colour between `a` and `b`.
fn colour_counts(layers: &[Graph], a: &VertexSet, b: &VertexSet) -> Vec<u64> {
    layers.iter().map(|g| g.edges_between(a, b)).collect()
}

fn argmax_lowest(counts: &[u64]) -> u8 {
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best as u8
}

/// Colour with the most edges between `a` and `b`; ties go to the lower
/// colour. `a` and `b` must lie in the parts of a host edge.
pub fn majority_colour(gamma: &BlowupGraph, chi: &EdgeColouring, a: &VertexSet, b: &VertexSet) -> Result<u8> {
    let parts_of = |s: &VertexSet| -> Result<usize> {
        let Some(first) = s.first() else {
            return domain("majority colour needs non-empty sets");
        };
        let x = gamma.part_of(first);
        if !s.is_subset(gamma.part(x)) {
            return domain("set spans several parts");
        }
        Ok(x)
    };
    let (x, y) = (parts_of(a)?, parts_of(b)?);
    if !gamma.host.graph().has_edge(x, y) {
        return domain(format!("parts {x} and {y} are not adjacent in the host"));
    }
    let g = &gamma.gamma;
    let mut counts = vec![0u64; chi.colours() as usize];
    for u in a.iter() {
        for v in g.neighbours(u).intersection(b).iter() {
            let c = chi
                .colour_of(u, v)
                .ok_or_else(|| Error::Domain(format!("edge ({u}, {v}) is uncoloured")))?;
            counts[c as usize] += 1;
        }
    }
    if counts.iter().all(|&k| k == 0) {
        return Err(Error::EmptyPair);
    }
    Ok(argmax_lowest(&counts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Iteration cap for each density-increment search.
    pub increment_budget: usize,
    pub check: CheckConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            increment_budget: 64,
            check: CheckConfig::default(),
        }
    }
}

/// What happened to one host edge at the level that processed it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub x: usize,
    pub y: usize,
    pub colour: u8,
    /// Edges of `colour` between the chain sets before refinement.
    pub colour_edges: u64,
    /// `(1 - lambda) |U_x| |U_y| p / r`.
    pub density_bound: f64,
    pub density_bound_met: bool,
    pub iterations: usize,
    pub verdict: RegVerdict,
}

/// Re-check of a pair found at an earlier level on the current chain sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub x: usize,
    pub y: usize,
    pub found_at: usize,
    pub verdict: RegVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelLog {
    pub level: usize,
    pub eps: f64,
    pub lambda: f64,
    /// Common size of every chain set after this level.
    pub set_size: usize,
    pub edges: Vec<EdgeRecord>,
    pub audits: Vec<AuditRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    /// Colouring of the host edges.
    pub phi: EdgeColouring,
    /// Final set `U_x` per host vertex.
    pub final_sets: Vec<VertexSet>,
    pub log: Vec<LevelLog>,
}

impl PipelineResult {
    /// Colour-`phi(xy)` pair verdicts at the final level, one per host edge.
    pub fn final_verdicts(&self) -> impl Iterator<Item = (usize, usize, &RegVerdict)> {
        self.log.iter().flat_map(|l| {
            let last = l.level == self.log.len();
            l.edges
                .iter()
                .filter(move |_| last)
                .map(|e| (e.x, e.y, &e.verdict))
                .chain(l.audits.iter().filter(move |_| last).map(|a| (a.x, a.y, &a.verdict)))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineStage {
    Increment,
    Inheritance,
    Precondition,
}

/// A level that could not be completed.
#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
#[error("pipeline failed at level {level}{} ({stage:?}): {message}", edge_label(edge))]
pub struct PipelineFailure {
    pub level: usize,
    pub edge: Option<(usize, usize)>,
    pub stage: PipelineStage,
    pub message: String,
    /// The best verdict seen for the failing pair.
    pub verdict: Option<RegVerdict>,
    /// Levels completed before the failure.
    pub log: Vec<LevelLog>,
}

fn edge_label(edge: &Option<(usize, usize)>) -> String {
    edge.map(|(x, y)| format!(", host edge ({x}, {y})")).unwrap_or_default()
}

/// Runs the refinement: level `i` handles matching `H_i` of the
/// decomposition at `(eps_i, alpha p)` with shrink factor `lambda_i`, shrinks
/// uncovered host vertices to their lowest-id vertices, and re-audits every
/// pair found at an earlier level on the shrunken sets at `(eps_i, alpha p)`.
pub fn regular_subgraph(
    gamma: &BlowupGraph,
    chi: &EdgeColouring,
    params: &RegParams,
    schedule: &EpsSchedule,
    cfg: PipelineConfig,
    seed: u64,
) -> Result<std::result::Result<PipelineResult, PipelineFailure>> {
    let host = gamma.host.graph();
    chi.validate(&gamma.gamma)?;
    if chi.colours() != params.r {
        return domain(format!("colouring has {} colours, parameters say {}", chi.colours(), params.r));
    }
    let decomposition = matching_decomposition(&gamma.host);
    if decomposition.len() > schedule.depth() {
        return domain(format!(
            "{} matchings but the schedule has {} levels",
            decomposition.len(),
            schedule.depth()
        ));
    }
    let layers = colour_layers(&gamma.gamma, chi);
    let (alpha, p, r) = (params.alpha, gamma.p, params.r as f64);
    let ap = alpha * p;
    let hv = host.vertex_count();

    let mut current: Vec<VertexSet> = gamma.parts().to_vec();
    let mut found_at: Vec<(usize, usize, u8, usize)> = Vec::new();
    let mut log: Vec<LevelLog> = Vec::new();
    let mut phi_edges: Vec<(usize, usize, u8)> = Vec::new();

    for level in 1..=schedule.depth() {
        let lv = schedule.level(level);
        let prev_size = current[0].len();
        let size = rational::ceil_mul(lv.lambda, prev_size).max(1);
        let matching: &[(usize, usize)] = decomposition.matchings.get(level - 1).map_or(&[], |m| m.as_slice());

        let outcomes: Vec<Result<(EdgeRecord, VertexSet, VertexSet), PipelineFailure>> = matching
            .par_iter()
            .map(|&(x, y)| {
                let (a, b) = (&current[x], &current[y]);
                let counts = colour_counts(&layers, a, b);
                let c = argmax_lowest(&counts);
                let density_bound = (1.0 - params.lambda) * (a.len() * b.len()) as f64 * p / r;
                let fail = |stage, message: String, verdict| PipelineFailure {
                    level,
                    edge: Some((x, y)),
                    stage,
                    message,
                    verdict,
                    log: Vec::new(),
                };
                let edge_seed = rng::derive_seed(seed, &[level as u64, x as u64, y as u64]);
                let out = find_lower_regular_pair(
                    &layers[c as usize],
                    a,
                    b,
                    lv.eps,
                    alpha,
                    p,
                    lv.lambda,
                    cfg.increment_budget,
                    cfg.check,
                    edge_seed,
                )
                .map_err(|e| fail(PipelineStage::Precondition, e.to_string(), None))?;
                match out {
                    IncrementOutcome::Found { pair, iterations } => Ok((
                        EdgeRecord {
                            x,
                            y,
                            colour: c,
                            colour_edges: counts[c as usize],
                            density_bound,
                            density_bound_met: counts[c as usize] as f64 >= density_bound,
                            iterations,
                            verdict: pair.verdict,
                        },
                        pair.left,
                        pair.right,
                    )),
                    IncrementOutcome::Stalled { best, iterations } => Err(fail(
                        PipelineStage::Increment,
                        format!("density increment stalled after {iterations} iterations in colour {c}"),
                        best.map(|b| b.verdict),
                    )),
                }
            })
            .collect();

        let mut next: Vec<Option<VertexSet>> = vec![None; hv];
        let mut edges = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            match o {
                Ok((rec, ux, uy)) => {
                    next[rec.x] = Some(ux);
                    next[rec.y] = Some(uy);
                    found_at.push((rec.x, rec.y, rec.colour, level));
                    phi_edges.push((rec.x, rec.y, rec.colour));
                    edges.push(rec);
                }
                Err(mut f) => {
                    f.log = log;
                    return Ok(Err(f));
                }
            }
        }
        let next: Vec<VertexSet> = next
            .into_iter()
            .enumerate()
            .map(|(x, s)| s.unwrap_or_else(|| current[x].lowest(size)))
            .collect();
        for (x, s) in next.iter().enumerate() {
            assert!(
                s.len() == size && s.is_subset(&current[x]),
                "chain condition broken at level {level}, host vertex {x}"
            );
        }
        current = next;

        let earlier: Vec<(usize, usize, u8, usize)> = found_at.iter().copied().filter(|e| e.3 < level).collect();
        let audits: Vec<Result<AuditRecord>> = earlier
            .par_iter()
            .map(|&(x, y, c, at)| {
                let audit_seed = rng::derive_seed(seed, &[level as u64, x as u64, y as u64, 1]);
                let verdict = check_pair(&layers[c as usize], &current[x], &current[y], lv.eps, ap, cfg.check, audit_seed)?;
                Ok(AuditRecord { x, y, found_at: at, verdict })
            })
            .collect();
        let audits = audits.into_iter().collect::<Result<Vec<_>>>()?;
        let failed = audits.iter().find(|a| !a.verdict.passed).cloned();
        log.push(LevelLog {
            level,
            eps: lv.eps,
            lambda: lv.lambda,
            set_size: size,
            edges,
            audits,
        });
        if let Some(a) = failed {
            return Ok(Err(PipelineFailure {
                level,
                edge: Some((a.x, a.y)),
                stage: PipelineStage::Inheritance,
                message: format!("pair found at level {} no longer lower-regular", a.found_at),
                verdict: Some(a.verdict),
                log,
            }));
        }
    }
    let phi = EdgeColouring::new(params.r, phi_edges)?;
    Ok(Ok(PipelineResult {
        phi,
        final_sets: current,
        log,
    }))
}
