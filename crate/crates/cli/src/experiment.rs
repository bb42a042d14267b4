//! Sweep experiments that emit CSV tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use gridramsey::blowup::{build_blowup, worst_deviation_at_size};
use gridramsey::oracle::{log_expected_grid_count, monte_carlo_grid_count};
use gridramsey::rng::derive_seed;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::hostgen::build_host;
use crate::run::{run, stage_seed, BLOWUP_TAG};

#[derive(Clone, Debug)]
pub struct FirstMoment {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    /// Explicit probabilities; empty means multiples of `n^{-1/2}`.
    pub ps: Vec<f64>,
    pub samples: usize,
}

/// Multiples of `n^{-1/2}` swept when no probabilities are given.
pub const DEFAULT_P_FACTORS: [f64; 7] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0];

/// Status cell for a row that was not computed; commas would split the cell.
fn skipped(e: impl std::fmt::Display) -> String {
    format!("skipped: {}", e.to_string().replace([',', '\n'], ";"))
}

fn csv_f64(x: f64) -> String {
    format!("{x:.6e}")
}

/// One row per `p`: closed-form expectation next to the Monte Carlo mean.
/// Rows whose enumeration is refused are marked `skipped`.
pub fn first_moment(spec: &FirstMoment, seed: u64) -> Result<String> {
    let ps: Vec<f64> = if spec.ps.is_empty() {
        let base = (spec.n as f64).powf(-0.5);
        DEFAULT_P_FACTORS.iter().map(|f| (f * base).min(1.0)).collect()
    } else {
        spec.ps.clone()
    };
    let rows: Vec<String> = ps
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let head = format!("{},{},{},{}", spec.n, p, spec.a, spec.b);
            let log_e = match log_expected_grid_count(spec.n, p, spec.a, spec.b, false) {
                Ok(l) => l,
                Err(e) => return format!("{head},,,,,,,{}", skipped(e)),
            };
            let e = log_e.exp();
            if spec.samples == 0 {
                return format!("{head},{},{},0,,,,ok", csv_f64(e), csv_f64(log_e));
            }
            match monte_carlo_grid_count(spec.n, p, spec.a, spec.b, spec.samples, derive_seed(seed, &[i as u64])) {
                Ok(r) => format!(
                    "{head},{},{},{},{},{},{},ok",
                    csv_f64(e),
                    csv_f64(log_e),
                    r.samples,
                    csv_f64(r.mean),
                    csv_f64(r.std_error),
                    r.flagged
                ),
                Err(err) => format!("{head},{},{},{},,,,{}", csv_f64(e), csv_f64(log_e), spec.samples, skipped(err)),
            }
        })
        .collect();
    let mut out = String::from("n,p,a,b,expectation,log_expectation,samples,mc_mean,mc_std_error,flagged,status\n");
    for r in rows {
        writeln!(out, "{r}").unwrap();
    }
    Ok(out)
}

/// Worst `|e(X,Y)/(|X||Y|p) - 1|` over host edges for each subset size.
pub fn uniformity_sweep(cfg: &RunConfig, sizes: &[usize], samples: usize) -> Result<String> {
    let host = build_host(&cfg.host)?;
    let gamma = build_blowup(&host, cfg.s, cfg.p, stage_seed(cfg.seed, BLOWUP_TAG))?;
    let edges: Vec<(usize, usize)> = host.graph().edges().collect();
    let sizes: Vec<usize> = if sizes.is_empty() {
        (1..=10).map(|k| (k * cfg.s).div_ceil(10)).collect()
    } else {
        sizes.to_vec()
    };
    let rows: Vec<String> = sizes
        .par_iter()
        .map(|&size| {
            let worst = edges.iter().try_fold(0.0f64, |w, &xy| {
                worst_deviation_at_size(&gamma, xy, size, samples, derive_seed(cfg.seed, &[size as u64]))
                    .map(|d| w.max(d))
            });
            match worst {
                Ok(w) => format!("{},{},{},{},ok", cfg.s, cfg.p, size, csv_f64(w)),
                Err(e) => format!("{},{},{},,{}", cfg.s, cfg.p, size, skipped(e)),
            }
        })
        .collect();
    let mut out = String::from("s,p,size,worst_ratio,status\n");
    for r in rows {
        writeln!(out, "{r}").unwrap();
    }
    Ok(out)
}

/// Runs seeds `first..first+count` in parallel and tabulates final statuses.
/// Reports go to `out/seed-<n>/` when an output directory is given.
pub fn pipeline_success_rate(cfg: &RunConfig, first: u64, count: u64, out: Option<&Path>) -> Result<String> {
    let results: Vec<(u64, String)> = (first..first + count)
        .into_par_iter()
        .map(|seed| {
            let dir = out.map(|d| d.join(format!("seed-{seed}")));
            run(&cfg.with_seed(seed), dir.as_deref()).map(|r| (seed, r.status))
        })
        .collect::<Result<_>>()?;
    let mut table: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (seed, status) in results {
        table.entry(status).or_default().push(seed);
    }
    let mut csv = String::from("status,count,seeds\n");
    for (status, seeds) in &table {
        let list: Vec<String> = seeds.iter().map(u64::to_string).collect();
        writeln!(csv, "{status},{},{}", seeds.len(), list.join(" ")).unwrap();
    }
    Ok(csv)
}
