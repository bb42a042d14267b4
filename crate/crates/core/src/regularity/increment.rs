use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{pair_density, Density, Graph, VertexSet};
use crate::rational;
use crate::rng;

use super::{check_pair, CheckConfig, RegVerdict};

/// A sub-pair together with the verdict it received.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularPair {
    pub left: VertexSet,
    pub right: VertexSet,
    pub verdict: RegVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum IncrementOutcome {
    Found { pair: RegularPair, iterations: usize },
    /// No passing pair before the sizes or the budget ran out. `best` is the
    /// failing candidate whose witness was densest.
    Stalled { best: Option<RegularPair>, iterations: usize },
}

impl IncrementOutcome {
    pub fn found(&self) -> Option<&RegularPair> {
        match self {
            IncrementOutcome::Found { pair, .. } => Some(pair),
            IncrementOutcome::Stalled { .. } => None,
        }
    }

    pub fn iterations(&self) -> usize {
        match self {
            IncrementOutcome::Found { iterations, .. } | IncrementOutcome::Stalled { iterations, .. } => *iterations,
        }
    }
}

/// Peels minimum-degree vertices (degree into the opposite side) until the
/// sides have `ka` and `kb` vertices. Sides alternate while both are too
/// large; among equal degrees the higher id goes first.
fn trim(g: &Graph, a: &VertexSet, b: &VertexSet, ka: usize, kb: usize) -> (VertexSet, VertexSet) {
    let mut sides = [a.clone(), b.clone()];
    let targets = [ka, kb];
    let mut deg = vec![0usize; g.vertex_count()];
    for s in 0..2 {
        for v in sides[s].iter() {
            deg[v] = g.row(v).iter().zip(sides[1 - s].bits()).map(|(x, y)| (x & y).count_ones() as usize).sum();
        }
    }
    let mut turn = 0;
    loop {
        let over = [sides[0].len() > targets[0], sides[1].len() > targets[1]];
        let s = match over {
            [false, false] => break,
            [true, false] => 0,
            [false, true] => 1,
            [true, true] => {
                turn ^= 1;
                1 - turn
            }
        };
        let victim = sides[s]
            .iter()
            .min_by_key(|&v| (deg[v], std::cmp::Reverse(v)))
            .expect("side above target is non-empty");
        sides[s].remove(victim);
        let row = g.row(victim);
        let other = &sides[1 - s];
        for (w, (x, y)) in row.iter().zip(other.bits()).enumerate() {
            let mut bits = x & y;
            while bits != 0 {
                deg[w * 64 + bits.trailing_zeros() as usize] -= 1;
                bits &= bits - 1;
            }
        }
    }
    let [a, b] = sides;
    (a, b)
}

/// Density-increment search for an `(eps, alpha p)`-lower-regular sub-pair
/// with both sides of size `ceil(lambda_target |V_1|)`.
///
/// Each round trims the current pair to the target size and checks it. On
/// failure with witness `(W_1, W_2)` the search moves to the densest of
/// `(W_1, V_2 - W_2)`, `(V_1 - W_1, W_2)`, `(V_1 - W_1, V_2 - W_2)` (taken in
/// the current pair) whose sides are still at least the target size, and
/// trims it to equal sides.
#[allow(clippy::too_many_arguments)]
pub fn find_lower_regular_pair(
    g: &Graph,
    v1: &VertexSet,
    v2: &VertexSet,
    eps: f64,
    alpha: f64,
    p: f64,
    lambda_target: f64,
    budget: usize,
    cfg: CheckConfig,
    seed: u64,
) -> Result<IncrementOutcome> {
    if v1.len() != v2.len() {
        return domain(format!("parts differ in size: {} vs {}", v1.len(), v2.len()));
    }
    if !(lambda_target > 0.0 && lambda_target <= 1.0) {
        return domain(format!("lambda target {lambda_target} outside (0, 1]"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return domain(format!("alpha {alpha} outside (0, 1]"));
    }
    let d = pair_density(g, v1, v2)?;
    let need = rational::rational(alpha) * rational::rational(p);
    if d.ratio() < need {
        return domain(format!(
            "pair density {}/{} below alpha p = {}",
            d.edges,
            d.pairs,
            rational::to_f64(need)
        ));
    }
    let ap = alpha * p;
    let target = rational::ceil_mul(lambda_target, v1.len()).max(1);
    let mut cur = (v1.clone(), v2.clone());
    let mut best: Option<(Density, RegularPair)> = None;
    for iter in 0..budget {
        let (left, right) = trim(g, &cur.0, &cur.1, target, target);
        let verdict = check_pair(g, &left, &right, eps, ap, cfg, rng::derive_seed(seed, &[iter as u64]))?;
        if verdict.passed {
            return Ok(IncrementOutcome::Found {
                pair: RegularPair { left, right, verdict },
                iterations: iter + 1,
            });
        }
        let witness = verdict.witness.as_ref().expect("failed verdict has a witness");
        let w1 = VertexSet::from_iter(g.vertex_count(), witness.left.iter().copied());
        let w2 = VertexSet::from_iter(g.vertex_count(), witness.right.iter().copied());
        let wd = witness.density;
        if best.as_ref().is_none_or(|(bd, _)| wd.ratio() > bd.ratio()) {
            best = Some((wd, RegularPair { left, right, verdict }));
        }
        let options = [
            (w1.clone(), cur.1.difference(&w2)),
            (cur.0.difference(&w1), w2.clone()),
            (cur.0.difference(&w1), cur.1.difference(&w2)),
        ];
        let mut next: Option<(Density, VertexSet, VertexSet)> = None;
        for (x, y) in options {
            if x.len() < target || y.len() < target {
                continue;
            }
            let dens = pair_density(g, &x, &y)?;
            if next.as_ref().is_none_or(|(nd, _, _)| dens.ratio() > nd.ratio()) {
                next = Some((dens, x, y));
            }
        }
        match next {
            Some((_, x, y)) => {
                let m = x.len().min(y.len());
                cur = trim(g, &x, &y, m, m);
            }
            None => {
                return Ok(IncrementOutcome::Stalled {
                    best: best.map(|(_, b)| b),
                    iterations: iter + 1,
                })
            }
        }
    }
    Ok(IncrementOutcome::Stalled {
        best: best.map(|(_, b)| b),
        iterations: budget,
    })
}
