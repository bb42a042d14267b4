use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gridramsey::blowup::{build_blowup, BlowupGraph, HostGraph};
use gridramsey::embedder::verify_grid_embedding;
use gridramsey::graph::colour_subgraph;
use gridramsey::io::{read_colouring, read_embedding, read_graph, write_colouring, write_graph};
use gridramsey::oracle::{arrows, contains_subgraph, grid_graph, monte_carlo_grid_count, ArrowStatus, SubgraphSearch};

use gridramsey_cli::colouring::{colour, colour_counts};
use gridramsey_cli::config::{number, HostSpec, RunConfig, Strategy};
use gridramsey_cli::experiment::{first_moment, pipeline_success_rate, uniformity_sweep, FirstMoment};
use gridramsey_cli::hostgen::build_host;
use gridramsey_cli::patterns::parse_graph;
use gridramsey_cli::run::{run, stage_seed, BLOWUP_TAG, COLOUR_TAG};

#[derive(Parser)]
#[command(name = "gridramsey", version, about = "Blow-up, regularity and grid-embedding laboratory")]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// `desk` or `paper-s3`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Config override `key=value`; repeatable, wins over the file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Writes a host graph: `cycle M`, `random-regular N D [SEED]` or `file PATH`.
    GenHost {
        #[arg(required = true, num_args = 1..)]
        spec: Vec<String>,
    },
    /// Random blow-up of a host; `s`, `p` and `c` come from the config.
    Blowup {
        /// Host graph file; defaults to the config's host spec.
        #[arg(long)]
        host: Option<PathBuf>,
    },
    /// Colours the edges of a stored blow-up.
    Colour {
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        host: PathBuf,
        /// Overrides the config's `colouring`.
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Full pipeline with a JSON report.
    Run,
    /// Checks a grid embedding against a graph and colouring.
    Verify {
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        colouring: PathBuf,
        #[arg(long)]
        embedding: PathBuf,
    },
    #[command(subcommand)]
    Oracle(OracleCmd),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Decides whether every r-colouring of G has a monochromatic T.
    Arrows {
        /// `complete N | path N | cycle N | grid A B | file PATH`.
        #[arg(long)]
        graph: String,
        #[arg(long)]
        pattern: String,
        #[arg(long, default_value_t = 2)]
        r: u8,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        /// Allow graphs above the edge guard.
        #[arg(long)]
        allow_large: bool,
    },
    /// Looks for an `a x b` grid, optionally inside one colour class.
    Grid {
        #[arg(long)]
        graph: String,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, requires = "colour")]
        colouring: Option<PathBuf>,
        #[arg(long)]
        colour: Option<u8>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Monte Carlo grid counts in G(n, p) against the expectation.
    Count {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_number)]
        p: f64,
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand)]
enum ExperimentCmd {
    FirstMoment {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        a: usize,
        #[arg(long, default_value_t = 3)]
        b: usize,
        /// Comma-separated probabilities; default sweeps around n^{-1/2}.
        #[arg(long, value_delimiter = ',', value_parser = parse_number)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    UniformitySweep {
        /// Comma-separated subset sizes; default tenths of s.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    PipelineSuccessRate(SeedBatch),
}

#[derive(Args)]
struct SeedBatch {
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    number(s).map_err(|e| e.to_string())
}

/// A failed stage or verification; reported with exit code 1.
struct StageFailure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(StageFailure)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn config(cli: &Cli) -> Result<RunConfig> {
    RunConfig::resolve(cli.config.as_deref(), cli.preset.as_deref(), cli.seed, &cli.sets)
}

/// Writes `name` into the output directory, or prints it.
fn emit(cli: &Cli, name: &str, text: &str) -> Result<()> {
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let path = dir.join(name);
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_host(path: &Path) -> Result<HostGraph> {
    build_host(&HostSpec::File { path: path.to_path_buf() })
}

type Outcome = std::result::Result<(), StageFailure>;

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.cmd {
        Cmd::GenHost { spec } => {
            let host = build_host(&HostSpec::parse(&spec.join(" "))?)?;
            eprintln!(
                "host: {} vertices, {} edges, max degree {}",
                host.vertex_count(),
                host.edge_count(),
                host.max_degree()
            );
            emit(cli, "host.graph", &write_graph(host.graph()))?;
        }
        Cmd::Blowup { host } => {
            let cfg = config(cli)?;
            let host = match host {
                Some(p) => load_host(p)?,
                None => build_host(&cfg.host)?,
            };
            let gamma = build_blowup(&host, cfg.s, cfg.p, stage_seed(cfg.seed, BLOWUP_TAG))?;
            eprintln!("gamma: {} vertices, {} edges", gamma.gamma.vertex_count(), gamma.gamma.edge_count());
            emit(cli, "gamma.graph", &write_graph(&gamma.gamma))?;
            emit(cli, "gamma.meta", &gamma.metadata(cfg.density_constant()))?;
        }
        Cmd::Colour { gamma, host, strategy } => {
            let cfg = config(cli)?;
            let host = load_host(host)?;
            let g = read_graph(&read(gamma)?)?;
            let k = host.vertex_count();
            if g.vertex_count() % k != 0 {
                bail!("{} vertices do not split into {k} equal parts", g.vertex_count());
            }
            let s = g.vertex_count() / k;
            let blowup = BlowupGraph::from_parts(g, host, s, cfg.p, stage_seed(cfg.seed, BLOWUP_TAG))?;
            let strategy = match strategy {
                Some(s) => Strategy::parse(s)?,
                None => cfg.colouring.clone(),
            };
            let chi = colour(&blowup, &strategy, cfg.r, stage_seed(cfg.seed, COLOUR_TAG))?;
            eprintln!("edges per colour: {:?}", colour_counts(&chi));
            emit(cli, "colouring.txt", &write_colouring(&chi))?;
        }
        Cmd::Run => {
            let cfg = config(cli)?;
            let report = run(&cfg, cli.out.as_deref())?;
            if cli.out.is_none() {
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            match &report.message {
                Some(m) => eprintln!("{}: {m}", report.status),
                None => eprintln!("{}", report.status),
            }
            if !report.success() {
                return Ok(Err(StageFailure));
            }
        }
        Cmd::Verify { gamma, colouring, embedding } => {
            let g = read_graph(&read(gamma)?).with_context(|| format!("parsing {}", gamma.display()))?;
            let chi = read_colouring(&read(colouring)?).with_context(|| format!("parsing {}", colouring.display()))?;
            let emb = read_embedding(&read(embedding)?).with_context(|| format!("parsing {}", embedding.display()))?;
            let check = verify_grid_embedding(&g, &chi, &emb);
            for v in &check.violations {
                println!("violation: {}", serde_json::to_string(v)?);
            }
            println!(
                "{} ({} edges checked, {} violations)",
                if check.valid { "valid" } else { "invalid" },
                check.edges_checked,
                check.violations.len()
            );
            if !check.valid {
                return Ok(Err(StageFailure));
            }
        }
        Cmd::Oracle(o) => return oracle(cli, o),
        Cmd::Experiment(e) => {
            let (name, csv) = match e {
                ExperimentCmd::FirstMoment { n, a, b, p, samples } => {
                    let spec = FirstMoment {
                        n: *n,
                        a: *a,
                        b: *b,
                        ps: p.clone(),
                        samples: *samples,
                    };
                    ("first-moment.csv", first_moment(&spec, cli.seed.unwrap_or(0))?)
                }
                ExperimentCmd::UniformitySweep { sizes, samples } => {
                    ("uniformity-sweep.csv", uniformity_sweep(&config(cli)?, sizes, *samples)?)
                }
                ExperimentCmd::PipelineSuccessRate(batch) => {
                    let cfg = config(cli)?;
                    let csv = pipeline_success_rate(&cfg, batch.first_seed, batch.seeds, cli.out.as_deref())?;
                    ("pipeline-success-rate.csv", csv)
                }
            };
            emit(cli, name, &csv)?;
        }
    }
    Ok(Ok(()))
}

fn oracle(cli: &Cli, cmd: &OracleCmd) -> Result<Outcome> {
    match cmd {
        OracleCmd::Arrows {
            graph,
            pattern,
            r,
            budget,
            allow_large,
        } => {
            let g = parse_graph(graph)?;
            let t = parse_graph(pattern)?;
            let res = arrows(&g, &t, *r, *budget, *allow_large)?;
            emit(cli, "arrows.json", &(serde_json::to_string_pretty(&res)? + "\n"))?;
            if res.status == ArrowStatus::Unknown {
                return Ok(Err(StageFailure));
            }
        }
        OracleCmd::Grid {
            graph,
            a,
            b,
            colouring,
            colour,
            budget,
        } => {
            let mut g = parse_graph(graph)?;
            if let (Some(path), Some(c)) = (colouring, colour) {
                let chi = read_colouring(&read(path)?)?;
                g = colour_subgraph(&g, &chi, *c)?;
            }
            let res = contains_subgraph(&g, &grid_graph(*a, *b), *budget);
            emit(cli, "grid.json", &(serde_json::to_string_pretty(&res)? + "\n"))?;
            if matches!(res, SubgraphSearch::Unknown { .. }) {
                return Ok(Err(StageFailure));
            }
        }
        OracleCmd::Count { n, p, a, b, samples } => {
            let rep = monte_carlo_grid_count(*n, *p, *a, *b, *samples, cli.seed.unwrap_or(0))?;
            emit(cli, "count.json", &(serde_json::to_string_pretty(&rep)? + "\n"))?;
        }
    }
    Ok(Ok(()))
}
