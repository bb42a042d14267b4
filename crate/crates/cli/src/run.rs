//! The end-to-end driver behind `run`.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use gridramsey::blowup::{build_blowup, edge_upper_bound, expected_edges, BlowupGraph};
use gridramsey::embedder::{embed_grid, verify_grid_embedding, EmbedFailure, EmbedLog, EmbedParams, EmbedStage, GridCheck};
use gridramsey::io::{write_colouring, write_embedding, write_graph};
use gridramsey::pipeline::{find_mono_cycle, regular_subgraph, CycleSearch, PipelineConfig, PipelineFailure, PipelineResult};
use gridramsey::rational;
use gridramsey::regularity::{BadSetConfig, CheckConfig};
use gridramsey::rng::derive_seed;
use serde::Serialize;

use crate::colouring::{colour, colour_counts};
use crate::config::RunConfig;
use crate::hostgen::build_host;

pub const BLOWUP_TAG: u64 = 1;
pub const COLOUR_TAG: u64 = 2;
pub const PIPELINE_TAG: u64 = 3;
pub const EMBED_TAG: u64 = 4;

/// Seed of one stage; `blowup` and `colour` use the same streams as `run`.
pub fn stage_seed(seed: u64, tag: u64) -> u64 {
    derive_seed(seed, &[tag])
}

#[derive(Clone, Debug, Serialize)]
pub struct HostStage {
    pub vertices: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub hash: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlowupStage {
    pub vertices: usize,
    pub edges: usize,
    pub expected_edges: f64,
    pub edge_upper_bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub level: usize,
    pub eps: f64,
    pub lambda: f64,
    pub set_size: usize,
    pub pairs_found: usize,
    pub audits: usize,
    pub audits_passed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineStageReport {
    pub levels: Vec<LevelSummary>,
    /// `(x, y, colour)` per host edge.
    pub phi: Vec<(usize, usize, u8)>,
    pub final_set_sizes: Vec<usize>,
    pub final_pairs: usize,
    pub final_pairs_passed: usize,
    /// `|U_x^i| = ceil(lambda_i |U_x^{i-1}|)` at every level.
    pub chain_ok: bool,
    pub failure: Option<PipelineFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleStage {
    pub found: bool,
    pub colour: Option<u8>,
    pub vertices: Vec<usize>,
    pub nodes: u64,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbedStageReport {
    pub candidate_size: usize,
    pub grid_side: usize,
    pub colour: Option<u8>,
    pub log: Option<EmbedLog>,
    pub failure: Option<EmbedFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    /// `success` or `failed-at-<stage>`.
    pub status: String,
    pub message: Option<String>,
    pub config: RunConfig,
    pub host: Option<HostStage>,
    pub blowup: Option<BlowupStage>,
    pub colouring: Option<Vec<usize>>,
    pub pipeline: Option<PipelineStageReport>,
    pub cycle: Option<CycleStage>,
    pub bad_set_sizes: Option<Vec<usize>>,
    pub embedding: Option<EmbedStageReport>,
    pub verify: Option<GridCheck>,
    /// Artifact file names inside the output directory.
    pub artifacts: BTreeMap<String, String>,
}

impl RunReport {
    pub fn success(&self) -> bool {
        self.status == "success"
    }

    /// Stage name after `failed-at-`, if the run failed.
    pub fn failed_stage(&self) -> Option<&str> {
        self.status.strip_prefix("failed-at-")
    }
}

struct Artifacts<'a> {
    dir: Option<&'a Path>,
    written: BTreeMap<String, String>,
    timings: Vec<(String, f64)>,
    clock: Instant,
}

impl Artifacts<'_> {
    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.timings.push((stage.into(), (now - self.clock).as_secs_f64()));
        self.clock = now;
    }

    fn write(&mut self, key: &str, name: &str, contents: &str) -> Result<()> {
        if let Some(dir) = self.dir {
            let path = dir.join(name);
            std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
            self.written.insert(key.into(), name.into());
        }
        Ok(())
    }
}

fn summarise(res: &PipelineResult, gamma: &BlowupGraph, schedule_lambdas: &[f64]) -> PipelineStageReport {
    let mut chain_ok = true;
    let mut prev = gamma.part_size;
    for (l, lam) in res.log.iter().zip(schedule_lambdas) {
        if l.set_size != rational::ceil_mul(*lam, prev) {
            chain_ok = false;
        }
        prev = l.set_size;
    }
    chain_ok &= res.final_sets.iter().all(|u| u.len() == prev);
    let finals: Vec<bool> = res.final_verdicts().map(|(_, _, v)| v.passed).collect();
    PipelineStageReport {
        levels: res.log.iter().map(level_summary).collect(),
        phi: res.phi.iter().collect(),
        final_set_sizes: res.final_sets.iter().map(|u| u.len()).collect(),
        final_pairs: finals.len(),
        final_pairs_passed: finals.iter().filter(|&&p| p).count(),
        chain_ok,
        failure: None,
    }
}

fn level_summary(l: &gridramsey::pipeline::LevelLog) -> LevelSummary {
    LevelSummary {
        level: l.level,
        eps: l.eps,
        lambda: l.lambda,
        set_size: l.set_size,
        pairs_found: l.edges.len(),
        audits: l.audits.len(),
        audits_passed: l.audits.iter().filter(|a| a.verdict.passed).count(),
    }
}

/// Runs every stage; stage failures end up in the report, only input and
/// I/O problems are errors.
pub fn run(cfg: &RunConfig, out: Option<&Path>) -> Result<RunReport> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut art = Artifacts {
        dir: out,
        written: BTreeMap::new(),
        timings: Vec::new(),
        clock: Instant::now(),
    };
    let mut report = RunReport {
        status: "success".into(),
        message: None,
        config: cfg.clone(),
        host: None,
        blowup: None,
        colouring: None,
        pipeline: None,
        cycle: None,
        bad_set_sizes: None,
        embedding: None,
        verify: None,
        artifacts: BTreeMap::new(),
    };
    let result = stages(cfg, &mut report, &mut art);
    result?;
    if let Some(dir) = out {
        // Wall-clock times live apart from the report so reruns compare equal.
        let timings: BTreeMap<String, f64> = art.timings.iter().cloned().collect();
        art.write("timings", "timings.json", &(serde_json::to_string_pretty(&timings)? + "\n"))?;
        report.artifacts = art.written.clone();
        report.artifacts.insert("report".into(), "report.json".into());
        let json = serde_json::to_string_pretty(&report)? + "\n";
        std::fs::write(dir.join("report.json"), json)?;
    }
    Ok(report)
}

fn fail(report: &mut RunReport, stage: &str, message: impl Into<String>) {
    report.status = format!("failed-at-{stage}");
    report.message = Some(message.into());
}

fn stages(cfg: &RunConfig, report: &mut RunReport, art: &mut Artifacts) -> Result<()> {
    let host = match build_host(&cfg.host) {
        Ok(h) => h,
        Err(e) => {
            fail(report, "gen-host", e.to_string());
            return Ok(());
        }
    };
    report.host = Some(HostStage {
        vertices: host.vertex_count(),
        edges: host.edge_count(),
        max_degree: host.max_degree(),
        hash: format!("{:016x}", host.fingerprint()),
    });
    art.write("host", "host.graph", &write_graph(host.graph()))?;
    art.lap("host");

    let gamma = match build_blowup(&host, cfg.s, cfg.p, stage_seed(cfg.seed, BLOWUP_TAG)) {
        Ok(b) => b,
        Err(e) => {
            fail(report, "blowup", e.to_string());
            return Ok(());
        }
    };
    report.blowup = Some(BlowupStage {
        vertices: gamma.gamma.vertex_count(),
        edges: gamma.gamma.edge_count(),
        expected_edges: expected_edges(&host, cfg.s, cfg.p),
        edge_upper_bound: edge_upper_bound(&host, cfg.lambda, cfg.s, cfg.p),
    });
    art.write("gamma", "gamma.graph", &write_graph(&gamma.gamma))?;
    art.write("gamma_meta", "gamma.meta", &gamma.metadata(cfg.density_constant()))?;
    art.lap("blowup");

    let chi = match colour(&gamma, &cfg.colouring, cfg.r, stage_seed(cfg.seed, COLOUR_TAG)) {
        Ok(c) => c,
        Err(e) => {
            fail(report, "colour", e.to_string());
            return Ok(());
        }
    };
    report.colouring = Some(colour_counts(&chi));
    art.write("colouring", "colouring.txt", &write_colouring(&chi))?;
    art.lap("colour");

    let embed_params = EmbedParams {
        trials: cfg.embed_trials,
        subsets_per_vertex: cfg.subsets_per_vertex,
        vertices_per_position: cfg.vertices_per_position,
        bad: BadSetConfig {
            trials: cfg.bad_trials,
            check: CheckConfig {
                exact_cap: cfg.exact_cap,
                trials: cfg.check_trials,
            },
        },
        ..EmbedParams::new(cfg.eps, cfg.alpha, cfg.p, cfg.s)
    };
    let mut embed_report = EmbedStageReport {
        candidate_size: embed_params.candidate_size(),
        grid_side: cfg.grid_side,
        colour: None,
        log: None,
        failure: None,
    };
    // Scale check before any expensive stage.
    if cfg.grid_side < 3 {
        report.embedding = Some(embed_report);
        fail(
            report,
            "embed",
            format!(
                "grid side floor(delta s) = floor({} * {}) = {} is below 3; the part size is too small for this delta",
                cfg.delta, cfg.s, cfg.grid_side
            ),
        );
        return Ok(());
    }

    let schedule = cfg.schedule()?;
    let pcfg = PipelineConfig {
        increment_budget: cfg.increment_budget,
        check: CheckConfig {
            exact_cap: cfg.exact_cap,
            trials: cfg.check_trials,
        },
    };
    let pipeline = regular_subgraph(&gamma, &chi, &cfg.params(), &schedule, pcfg, stage_seed(cfg.seed, PIPELINE_TAG));
    art.lap("pipeline");
    let lambdas: Vec<f64> = schedule.levels.iter().map(|l| l.lambda).collect();
    let pr = match pipeline {
        Ok(Ok(pr)) => pr,
        Ok(Err(f)) => {
            let mut summary = PipelineStageReport {
                levels: f.log.iter().map(level_summary).collect(),
                phi: Vec::new(),
                final_set_sizes: Vec::new(),
                final_pairs: 0,
                final_pairs_passed: 0,
                chain_ok: true,
                failure: None,
            };
            let msg = f.to_string();
            art.write("pipeline", "pipeline.json", &(serde_json::to_string_pretty(&f)? + "\n"))?;
            summary.failure = Some(f);
            report.pipeline = Some(summary);
            fail(report, "pipeline", msg);
            return Ok(());
        }
        Err(e) => {
            fail(report, "pipeline", e.to_string());
            return Ok(());
        }
    };
    report.pipeline = Some(summarise(&pr, &gamma, &lambdas));
    art.write("pipeline", "pipeline.json", &(serde_json::to_string_pretty(&pr)? + "\n"))?;

    let side = cfg.grid_side;
    let cycle = match find_mono_cycle(&gamma.host, &pr.phi, side, side, cfg.cycle_budget) {
        Ok(c) => c,
        Err(e) => {
            fail(report, "cycle", e.to_string());
            return Ok(());
        }
    };
    let (cert, nodes, exhausted) = match &cycle {
        CycleSearch::Found { cycle, nodes } => (Some(cycle.clone()), *nodes, false),
        CycleSearch::NotFound { nodes } => (None, *nodes, false),
        CycleSearch::BudgetExhausted { nodes } => (None, *nodes, true),
    };
    report.cycle = Some(CycleStage {
        found: cert.is_some(),
        colour: cert.as_ref().map(|c| c.colour),
        vertices: cert.as_ref().map(|c| c.vertices.clone()).unwrap_or_default(),
        nodes,
        budget_exhausted: exhausted,
    });
    let Some(cert) = cert else {
        let why = if exhausted { "search budget exhausted" } else { "none exists" };
        fail(report, "cycle", format!("no monochromatic cycle of length {side} in phi ({why})"));
        return Ok(());
    };

    art.lap("cycle");
    embed_report.colour = Some(cert.colour);
    let outcome = embed_grid(&gamma, &chi, &pr, &cert, embed_params, side, stage_seed(cfg.seed, EMBED_TAG));
    let emb = match outcome {
        Ok(Ok(o)) => {
            report.bad_set_sizes = Some(o.log.bad_set_sizes.clone());
            embed_report.log = Some(o.log);
            report.embedding = Some(embed_report);
            o.embedding
        }
        Ok(Err(f)) => {
            report.bad_set_sizes = Some(f.log.bad_set_sizes.clone());
            let stage = if f.stage == EmbedStage::BadSets { "bad-sets" } else { "embed" };
            let msg = f.to_string();
            embed_report.failure = Some(f);
            report.embedding = Some(embed_report);
            fail(report, stage, msg);
            return Ok(());
        }
        Err(e) => {
            report.embedding = Some(embed_report);
            fail(report, "embed", e.to_string());
            return Ok(());
        }
    };
    art.write("embedding", "embedding.txt", &write_embedding(&emb))?;
    art.lap("embed");

    let check = verify_grid_embedding(&gamma.gamma, &chi, &emb);
    let valid = check.valid;
    report.verify = Some(check);
    art.lap("verify");
    if !valid {
        fail(report, "verify", "embedding did not verify");
    }
    Ok(())
}
