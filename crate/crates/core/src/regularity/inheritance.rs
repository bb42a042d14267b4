use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blowup::BlowupGraph;
use crate::error::{domain, Error, Result};
use crate::graph::{neighbours_in, Graph, VertexSet};
use crate::rational;
use crate::rng;

use super::{check_pair, CheckConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSetConfig {
    /// Sampled `(N_v, N_w)` draws per candidate vertex.
    pub trials: usize,
    pub check: CheckConfig,
}

impl Default for BadSetConfig {
    fn default() -> Self {
        BadSetConfig {
            trials: 20,
            check: CheckConfig::default(),
        }
    }
}

fn random_subset(rng: &mut rng::Rng, from: &VertexSet, k: usize) -> VertexSet {
    let ids = from.to_vec();
    VertexSet::from_iter(from.universe(), ids.choose_multiple(rng, k).copied())
}

/// Vertices of `ambient` whose sampled neighbourhood subsets fail to inherit
/// `(eps, alpha p)`-lower-regularity, without the size bound.
///
/// For a candidate `v` each trial draws `N_v ⊆ N(v, V_1)` of size
/// `ceil(alpha |V_1| p / 4)`, a partner `w ∈ V_1` with at least that many
/// neighbours in `V_2`, and `N_w ⊆ N(w, V_2)` of the same size; `v` is bad
/// as soon as `(N_v, V_2)` or `(N_v, N_w)` fails in `g_c`. Neighbourhoods
/// are taken in Γ. Vertices with too few neighbours in `V_1` are bad
/// outright.
#[allow(clippy::too_many_arguments)]
pub fn scan_bad_vertices(
    gamma: &BlowupGraph,
    g_c: &Graph,
    v1: &VertexSet,
    v2: &VertexSet,
    ambient: &VertexSet,
    eps: f64,
    alpha: f64,
    p: f64,
    cfg: BadSetConfig,
    seed: u64,
) -> Result<VertexSet> {
    if cfg.trials == 0 {
        return domain("bad-set audit needs at least one trial");
    }
    if v1.is_empty() || v2.is_empty() || !v1.is_disjoint(v2) {
        return domain("bad-set audit needs disjoint non-empty V_1, V_2");
    }
    let g = &gamma.gamma;
    if g_c.vertex_count() != g.vertex_count() {
        return domain("colour subgraph and blow-up differ in vertex count");
    }
    let k = rational::ceil_of(rational::rational(alpha) * rational::rational(p) * v1.len() as i128 / 4).max(1);
    let ap = alpha * p;
    let partners: Vec<(usize, VertexSet)> = v1
        .iter()
        .map(|w| neighbours_in(g, w, v2).map(|nw| (w, nw)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|(_, nw)| nw.len() >= k)
        .collect();

    let verdicts: Vec<Result<Option<usize>>> = ambient
        .to_vec()
        .into_par_iter()
        .map(|v| {
            let nv_all = neighbours_in(g, v, v1)?;
            if nv_all.len() < k || partners.is_empty() {
                return Ok(Some(v));
            }
            for t in 0..cfg.trials {
                let mut rng = rng::stream(seed, &[v as u64, t as u64]);
                let nv = random_subset(&mut rng, &nv_all, k);
                let one = check_pair(g_c, &nv, v2, eps, ap, cfg.check, rng::derive_seed(seed, &[v as u64, t as u64, 1]))?;
                if !one.passed {
                    return Ok(Some(v));
                }
                let (_, nw_all) = partners.choose(&mut rng).expect("partners non-empty");
                let nw = random_subset(&mut rng, nw_all, k);
                let two = check_pair(g_c, &nv, &nw, eps, ap, cfg.check, rng::derive_seed(seed, &[v as u64, t as u64, 2]))?;
                if !two.passed {
                    return Ok(Some(v));
                }
            }
            Ok(None)
        })
        .collect();
    let mut bad = VertexSet::empty(g.vertex_count());
    for v in verdicts {
        if let Some(v) = v? {
            bad.insert(v);
        }
    }
    Ok(bad)
}

/// [`scan_bad_vertices`] with the bound `|B| <= eps |ambient|` enforced.
#[allow(clippy::too_many_arguments)]
pub fn compute_bad_set(
    gamma: &BlowupGraph,
    g_c: &Graph,
    v1: &VertexSet,
    v2: &VertexSet,
    ambient: &VertexSet,
    eps: f64,
    alpha: f64,
    p: f64,
    cfg: BadSetConfig,
    seed: u64,
) -> Result<VertexSet> {
    let bad = scan_bad_vertices(gamma, g_c, v1, v2, ambient, eps, alpha, p, cfg, seed)?;
    let allowed = rational::floor_of(rational::rational(eps) * ambient.len() as i128);
    if bad.len() > allowed {
        return Err(Error::InheritanceAudit { bad: bad.len(), allowed });
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blowup::{build_blowup, HostGraph};

    fn path3(s: usize, p: f64) -> BlowupGraph {
        let h = HostGraph::new(Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap(), 2).unwrap();
        build_blowup(&h, s, p, 9).unwrap()
    }

    #[test]
    fn complete_blowup_has_no_bad_vertices() {
        let b = path3(20, 1.0);
        let (v1, v2, amb) = (b.part(1).clone(), b.part(2).clone(), b.part(0).clone());
        let bad = compute_bad_set(&b, &b.gamma, &v1, &v2, &amb, 0.25, 0.5, 1.0, BadSetConfig::default(), 1).unwrap();
        assert!(bad.is_empty());
    }

    #[test]
    fn isolated_candidate_is_bad() {
        let mut b = path3(20, 1.0);
        for u in b.part(1).to_vec() {
            b.gamma.remove_edge(0, u);
        }
        let (v1, v2, amb) = (b.part(1).clone(), b.part(2).clone(), b.part(0).clone());
        let bad = scan_bad_vertices(&b, &b.gamma, &v1, &v2, &amb, 0.25, 0.5, 1.0, BadSetConfig::default(), 1).unwrap();
        assert_eq!(bad.to_vec(), vec![0]);
        // One bad vertex out of 20 is within 0.25 * 20.
        assert!(compute_bad_set(&b, &b.gamma, &v1, &v2, &amb, 0.25, 0.5, 1.0, BadSetConfig::default(), 1).is_ok());
        assert!(matches!(
            compute_bad_set(&b, &b.gamma, &v1, &v2, &amb, 0.01, 0.5, 1.0, BadSetConfig::default(), 1),
            Err(Error::InheritanceAudit { bad: 1, allowed: 0 })
        ));
    }
}
