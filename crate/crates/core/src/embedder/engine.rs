use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::BlowupGraph;
use crate::error::{domain, Result};
use crate::graph::{colour_subgraph, degree_into, neighbours_in, EdgeColouring, Graph, VertexSet};
use crate::pipeline::{CycleCertificate, PipelineResult};
use crate::rational::{self, Rational};
use crate::regularity::{sampled_lower_regular, scan_bad_vertices, BadSetConfig, RegVerdict};
use crate::rng;

use super::GridEmbedding;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedParams {
    pub eps: f64,
    pub alpha: f64,
    pub p: f64,
    /// Part size of the blow-up.
    pub s: usize,
    /// Trials for every sampled (b)/(c) decision.
    pub trials: usize,
    pub subsets_per_vertex: usize,
    pub vertices_per_position: usize,
    pub bad: BadSetConfig,
}

impl EmbedParams {
    pub fn new(eps: f64, alpha: f64, p: f64, s: usize) -> Self {
        EmbedParams {
            eps,
            alpha,
            p,
            s,
            trials: 64,
            subsets_per_vertex: 10,
            vertices_per_position: 50,
            bad: BadSetConfig::default(),
        }
    }

    fn asp(&self) -> Rational {
        rational::rational(self.alpha) * rational::rational(self.p) * self.s as i128
    }

    /// `ceil(alpha s p / 4)`.
    pub fn candidate_size(&self) -> usize {
        rational::ceil_of(self.asp() / 4).max(1)
    }

    /// `ceil(alpha s p / 16)`: vertices of `S` the degree filter may drop.
    pub fn filter_slack(&self) -> usize {
        rational::ceil_of(self.asp() / 16)
    }

    /// `ceil(alpha s p / 8)`.
    pub fn backward_cut(&self) -> usize {
        rational::ceil_of(self.asp() / 8)
    }

    /// `floor(2 eps s)`, the order every `Q` set is padded to.
    pub fn q_size(&self) -> usize {
        rational::floor_of(rational::rational(self.eps) * 2 * self.s as i128)
    }

    /// `floor(eps s)`.
    pub fn bad_cap(&self) -> usize {
        rational::floor_of(rational::rational(self.eps) * self.s as i128)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EmbedStage {
    Precondition,
    BadSets,
    FirstRow,
    Filter,
    Backward,
    Path,
    NextFamily,
}

#[derive(Clone, Debug, PartialEq, Error, Serialize, Deserialize)]
#[error("embedding failed at row {row}, position {position} ({stage:?}): {message}")]
pub struct EmbedFailure {
    pub stage: EmbedStage,
    pub row: usize,
    pub position: usize,
    pub message: String,
    /// Last failing verdicts at this position, if any.
    pub verdicts: Vec<RegVerdict>,
    pub log: EmbedLog,
}

/// Counters for the decisions taken during an embedding.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EmbedLog {
    pub bad_set_sizes: Vec<usize>,
    pub checks_run: usize,
    pub checks_failed: usize,
    /// `|S - S'|` per row and position, rows from the second on.
    pub filter_drops: Vec<Vec<usize>>,
    /// `|S''|` per row and position.
    pub backward_sizes: Vec<Vec<usize>>,
    pub rows_embedded: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedOutcome {
    pub embedding: GridEmbedding,
    pub log: EmbedLog,
}

/// The cycle of sets being embedded into, with its bad sets.
pub struct EmbedContext<'a> {
    pub g: &'a Graph,
    pub u: Vec<VertexSet>,
    pub b: Vec<VertexSet>,
    pub colour: u8,
    pub params: EmbedParams,
    clean: Vec<VertexSet>,
}

impl<'a> EmbedContext<'a> {
    pub fn new(g: &'a Graph, u: Vec<VertexSet>, b: Vec<VertexSet>, colour: u8, params: EmbedParams) -> Result<Self> {
        let m = u.len();
        if m < 2 {
            return domain("need a cycle of at least two sets");
        }
        if b.len() != m {
            return domain("one bad set per cycle set required");
        }
        for i in 0..m {
            if !b[i].is_subset(&u[i]) {
                return domain(format!("B_{i} is not inside U_{i}"));
            }
            if b[i].len() > params.bad_cap() {
                return domain(format!("|B_{i}| = {} exceeds eps s = {}", b[i].len(), params.bad_cap()));
            }
            for j in i + 1..m {
                if !u[i].is_disjoint(&u[j]) {
                    return domain(format!("U_{i} and U_{j} overlap"));
                }
            }
        }
        let clean = u.iter().zip(&b).map(|(u, b)| u.difference(b)).collect();
        Ok(EmbedContext {
            g,
            u,
            b,
            colour,
            params,
            clean,
        })
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn idx(&self, i: usize) -> usize {
        i % self.u.len()
    }

    fn check(&self, a: &VertexSet, b: &VertexSet, seed: u64, log: &mut EmbedLog) -> Result<RegVerdict> {
        let v = sampled_lower_regular(
            self.g,
            a,
            b,
            self.params.eps,
            self.params.alpha * self.params.p,
            self.params.trials,
            seed,
        )?;
        log.checks_run += 1;
        if !v.passed {
            log.checks_failed += 1;
        }
        Ok(v)
    }
}

/// Images of one grid row and the candidate sets for the next row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RowState {
    pub row: usize,
    pub images: Vec<usize>,
    /// `families[j]` lies in the set of column `j` of the next row.
    pub families: Vec<VertexSet>,
}

fn random_subset(pool: &[usize], k: usize, n: usize, seed: u64) -> VertexSet {
    let mut rng = rng::stream(seed, &[]);
    VertexSet::from_iter(n, pool.choose_multiple(&mut rng, k).copied())
}

type Step<T> = std::result::Result<T, EmbedFailure>;

fn failure(stage: EmbedStage, row: usize, position: usize, message: String, verdicts: Vec<RegVerdict>, log: &EmbedLog) -> EmbedFailure {
    EmbedFailure {
        stage,
        row,
        position,
        message,
        verdicts,
        log: log.clone(),
    }
}

/// Tries up to `subsets_per_vertex` random `k`-subsets of `pool` that pass
/// `(F, U_ahead - B_ahead)` and, when given, `(prev, F)`.
fn pick_family(
    ctx: &EmbedContext,
    pool: &[usize],
    ahead: usize,
    prev: Option<&VertexSet>,
    seed: u64,
    log: &mut EmbedLog,
    last: &mut Vec<RegVerdict>,
) -> Result<Option<VertexSet>> {
    let k = ctx.params.candidate_size();
    if pool.len() < k {
        return Ok(None);
    }
    for t in 0..ctx.params.subsets_per_vertex {
        let fam = random_subset(pool, k, ctx.g.vertex_count(), rng::derive_seed(seed, &[t as u64]));
        let one = ctx.check(&fam, &ctx.clean[ahead], rng::derive_seed(seed, &[t as u64, 1]), log)?;
        if !one.passed {
            *last = vec![one];
            continue;
        }
        if let Some(prev) = prev {
            let two = ctx.check(prev, &fam, rng::derive_seed(seed, &[t as u64, 2]), log)?;
            if !two.passed {
                *last = vec![two];
                continue;
            }
        }
        return Ok(Some(fam));
    }
    Ok(None)
}

/// Embeds the first row: `v_0 ∈ U_0 - B_0`, then `v_j ∈ S_j`, each time
/// choosing `S_{j+1} ⊆ N(v_j, U_{j+1} - B_{j+1})` that passes the (b)/(c)
/// checks. Vertices are tried in ascending id.
pub fn seed_first_row(ctx: &EmbedContext, seed: u64, log: &mut EmbedLog) -> Result<Step<RowState>> {
    let m = ctx.len();
    let k = ctx.params.candidate_size();
    let n = ctx.g.vertex_count();
    let mut used = VertexSet::empty(n);
    let mut images = Vec::with_capacity(m);
    let mut families: Vec<VertexSet> = Vec::with_capacity(m);
    for j in 0..m {
        let (next, ahead) = (ctx.idx(j + 1), ctx.idx(j + 2));
        let source: Vec<usize> = if j == 0 {
            ctx.clean[0].to_vec()
        } else {
            families[j - 1].iter().filter(|&v| !used.contains(v)).collect()
        };
        let prev = if j == 0 { None } else { families.last() };
        let mut last = Vec::new();
        let mut chosen = None;
        let mut tried = 0;
        for v in source {
            if tried == ctx.params.vertices_per_position {
                break;
            }
            let nbrs = neighbours_in(ctx.g, v, &ctx.clean[next])?;
            if nbrs.len() < k {
                continue;
            }
            tried += 1;
            let pool: Vec<usize> = nbrs.iter().filter(|&w| !used.contains(w) && w != v).collect();
            let s = rng::derive_seed(seed, &[0, j as u64, v as u64]);
            if let Some(fam) = pick_family(ctx, &pool, ahead, prev, s, log, &mut last)? {
                chosen = Some((v, fam));
                break;
            }
        }
        match chosen {
            Some((v, fam)) => {
                used.insert(v);
                images.push(v);
                families.push(fam);
            }
            None => {
                return Ok(Err(failure(
                    EmbedStage::FirstRow,
                    0,
                    j,
                    format!("no vertex among {tried} with degree >= {k} into U_{next} - B_{next} admits a family"),
                    last,
                    log,
                )))
            }
        }
    }
    log.rows_embedded = 1;
    Ok(Ok(RowState {
        row: 0,
        images,
        families,
    }))
}

/// `Q` padded with the lowest-id vertices of `U_t` outside it up to
/// `floor(2 eps s)`; `None` if `Q` is already larger.
fn pad_q(ctx: &EmbedContext, t: usize, q: &VertexSet) -> Option<VertexSet> {
    let cap = ctx.params.q_size();
    if q.len() > cap {
        return None;
    }
    let mut out = q.clone();
    for v in ctx.u[t].iter() {
        if out.len() >= cap {
            break;
        }
        out.insert(v);
    }
    Some(out)
}

/// `S' = {v ∈ S - occupied : deg(v, U_t - Q) >= candidate_size}`, where `Q`
/// has been padded. Errors if at least `ceil(alpha s p / 16)` unoccupied
/// vertices drop.
pub fn filter_well_connected(
    ctx: &EmbedContext,
    s: &VertexSet,
    t: usize,
    q_padded: &VertexSet,
    occupied: &VertexSet,
) -> Result<std::result::Result<VertexSet, (usize, usize)>> {
    let k = ctx.params.candidate_size();
    let target = ctx.u[t].difference(q_padded);
    let free = s.difference(occupied);
    let mut kept = VertexSet::empty(ctx.g.vertex_count());
    for v in free.iter() {
        if degree_into(ctx.g, v, &target)? >= k {
            kept.insert(v);
        }
    }
    let dropped = free.len() - kept.len();
    let slack = ctx.params.filter_slack();
    if dropped > 0 && dropped >= slack {
        return Ok(Err((dropped, slack)));
    }
    Ok(Ok(kept))
}

/// Trims the last `S'` to its lowest `|S| - ceil(alpha s p / 8)` vertices,
/// then walks back keeping the vertices of each `S'_j` with a neighbour in
/// `S''_{j+1}`. Errors with the first index that keeps too few.
pub fn backward_filter(
    ctx: &EmbedContext,
    s_prime: &[VertexSet],
) -> Result<std::result::Result<Vec<VertexSet>, (usize, usize, usize)>> {
    let k = ctx.params.candidate_size();
    let need = k.saturating_sub(ctx.params.backward_cut());
    let m = s_prime.len();
    let mut out = vec![VertexSet::empty(ctx.g.vertex_count()); m];
    if s_prime[m - 1].len() < need.max(1) {
        return Ok(Err((m - 1, s_prime[m - 1].len(), need)));
    }
    out[m - 1] = s_prime[m - 1].lowest(need.max(1));
    for j in (0..m - 1).rev() {
        let mut keep = VertexSet::empty(ctx.g.vertex_count());
        for v in s_prime[j].iter() {
            if ctx.g.neighbours(v).intersection_len(&out[j + 1]) > 0 {
                keep.insert(v);
            }
        }
        if keep.len() < need.max(1) {
            return Ok(Err((j, keep.len(), need)));
        }
        out[j] = keep;
    }
    Ok(Ok(out))
}

/// Embeds row `prev.row + 1` from the families left by the previous row and
/// picks the families for the row after it. `placed` holds the images of all
/// earlier rows, row-major.
pub fn embed_row(ctx: &EmbedContext, prev: &RowState, placed: &[Vec<usize>], seed: u64, log: &mut EmbedLog) -> Result<Step<RowState>> {
    let m = ctx.len();
    let r = prev.row + 1;
    let n = ctx.g.vertex_count();
    let k = ctx.params.candidate_size();
    let mut used = VertexSet::empty(n);
    for row in placed {
        for &v in row {
            used.insert(v);
        }
    }
    // Q_t = B_t plus earlier images in U_t.
    let q: Vec<VertexSet> = (0..m).map(|t| ctx.b[t].union(&ctx.u[t].intersection(&used))).collect();
    let mut padded = Vec::with_capacity(m);
    for j in 0..m {
        let t = ctx.idx(r + j + 1);
        match pad_q(ctx, t, &q[t]) {
            Some(p) => padded.push(p),
            None => {
                return Ok(Err(failure(
                    EmbedStage::Precondition,
                    r,
                    j,
                    format!("|Q_{t}| = {} exceeds 2 eps s = {}", q[t].len(), ctx.params.q_size()),
                    Vec::new(),
                    log,
                )))
            }
        }
    }
    let mut s_prime = Vec::with_capacity(m);
    let mut drops = Vec::with_capacity(m);
    for j in 0..m {
        let t = ctx.idx(r + j + 1);
        match filter_well_connected(ctx, &prev.families[j], t, &padded[j], &used)? {
            Ok(sp) => {
                drops.push(prev.families[j].difference(&used).len() - sp.len());
                s_prime.push(sp);
            }
            Err((dropped, slack)) => {
                return Ok(Err(failure(
                    EmbedStage::Filter,
                    r,
                    j,
                    format!("{dropped} of {} candidates lack {k} neighbours outside Q (allowed < {slack})", prev.families[j].len()),
                    Vec::new(),
                    log,
                )))
            }
        }
    }
    log.filter_drops.push(drops);
    let s2 = match backward_filter(ctx, &s_prime)? {
        Ok(s2) => s2,
        Err((j, kept, need)) => {
            return Ok(Err(failure(
                EmbedStage::Backward,
                r,
                j,
                format!("backward filter kept {kept} vertices, need {need}"),
                Vec::new(),
                log,
            )))
        }
    };
    log.backward_sizes.push(s2.iter().map(|s| s.len()).collect());
    let mut images = Vec::with_capacity(m);
    for j in 0..m {
        let v = if j == 0 {
            s2[0].first()
        } else {
            ctx.g.neighbours(images[j - 1]).intersection(&s2[j]).first()
        };
        match v {
            Some(v) => images.push(v),
            None => {
                return Ok(Err(failure(
                    EmbedStage::Path,
                    r,
                    j,
                    "path broke: no neighbour in the next S''".into(),
                    Vec::new(),
                    log,
                )))
            }
        }
    }
    for &v in &images {
        used.insert(v);
    }
    log.rows_embedded = r + 1;
    if r + 1 == m {
        return Ok(Ok(RowState {
            row: r,
            images,
            families: Vec::new(),
        }));
    }
    let mut families: Vec<VertexSet> = Vec::with_capacity(m);
    for (j, &v) in images.iter().enumerate() {
        let t = ctx.idx(r + j + 1);
        let avoid = q[t].union(&used);
        let pool: Vec<usize> = neighbours_in(ctx.g, v, &ctx.u[t].difference(&avoid))?.to_vec();
        let mut last = Vec::new();
        let s = rng::derive_seed(seed, &[r as u64, j as u64]);
        match pick_family(ctx, &pool, ctx.idx(t + 1), families.last(), s, log, &mut last)? {
            Some(f) => families.push(f),
            None => {
                return Ok(Err(failure(
                    EmbedStage::NextFamily,
                    r,
                    j,
                    format!("no family of size {k} among {} free neighbours passed its checks", pool.len()),
                    last,
                    log,
                )))
            }
        }
    }
    Ok(Ok(RowState { row: r, images, families }))
}

/// Embeds the `m x m` grid into the context's cycle of sets, `m` = its length.
pub fn embed_in_sets(ctx: &EmbedContext, seed: u64, mut log: EmbedLog) -> Result<Step<EmbedOutcome>> {
    let m = ctx.len();
    if ctx.params.s == 0 || ctx.params.candidate_size() > ctx.params.s {
        return domain("candidate size exceeds the part size");
    }
    let first = match seed_first_row(ctx, rng::derive_seed(seed, &[0]), &mut log)? {
        Ok(r) => r,
        Err(f) => return Ok(Err(f)),
    };
    let mut rows = vec![first.images.clone()];
    let mut state = first;
    for r in 1..m {
        state = match embed_row(ctx, &state, &rows, rng::derive_seed(seed, &[r as u64]), &mut log)? {
            Ok(s) => s,
            Err(f) => return Ok(Err(f)),
        };
        rows.push(state.images.clone());
    }
    let embedding = GridEmbedding {
        rows: m,
        cols: m,
        colour: ctx.colour,
        image: rows.concat(),
    };
    Ok(Ok(EmbedOutcome { embedding, log }))
}

/// Bad sets along the cycle, then the row-by-row embedding of the
/// `side x side` grid. The cycle must have exactly `side` host vertices.
pub fn embed_grid(
    gamma: &BlowupGraph,
    chi: &EdgeColouring,
    pipeline: &PipelineResult,
    cycle: &CycleCertificate,
    params: EmbedParams,
    side: usize,
    seed: u64,
) -> Result<Step<EmbedOutcome>> {
    if cycle.len() != side {
        return domain(format!("cycle has length {} but the grid side is {side}", cycle.len()));
    }
    if side < 2 {
        return domain("grid side must be at least 2");
    }
    if !cycle.is_valid(gamma.host.graph(), &pipeline.phi, side, side) {
        return domain("cycle is not monochromatic under the pipeline colouring");
    }
    let g = colour_subgraph(&gamma.gamma, chi, cycle.colour)?;
    let u: Vec<VertexSet> = cycle.vertices.iter().map(|&x| pipeline.final_sets[x].clone()).collect();
    let m = u.len();
    let mut log = EmbedLog::default();
    let mut b = Vec::with_capacity(m);
    for i in 0..m {
        let bad = scan_bad_vertices(
            gamma,
            &g,
            &u[(i + 1) % m],
            &u[(i + 2) % m],
            &u[i],
            params.eps,
            params.alpha,
            params.p,
            params.bad,
            rng::derive_seed(seed, &[1, i as u64]),
        )?;
        log.bad_set_sizes.push(bad.len());
        b.push(bad);
    }
    if let Some(i) = (0..m).find(|&i| b[i].len() > params.bad_cap()) {
        let sizes = log.bad_set_sizes.clone();
        return Ok(Err(failure(
            EmbedStage::BadSets,
            0,
            i,
            format!("|B_{i}| = {} exceeds eps s = {} (all sizes {sizes:?})", b[i].len(), params.bad_cap()),
            Vec::new(),
            &log,
        )));
    }
    let ctx = EmbedContext::new(&g, u, b, cycle.colour, params)?;
    embed_in_sets(&ctx, rng::derive_seed(seed, &[2]), log)
}
