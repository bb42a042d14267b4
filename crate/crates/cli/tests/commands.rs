use std::path::Path;
use std::process::{Command, Output};

use gridramsey::embedder::verify_grid_embedding;
use gridramsey::io::{read_colouring, read_embedding, read_graph, write_embedding};

const BIN: &str = env!("CARGO_BIN_EXE_gridramsey");

/// Complete blow-up of C_4 with a monochromatic colouring: small enough to
/// succeed end to end in well under a second.
const COMPLETE: &[&str] = &[
    "--set", "host=cycle 4",
    "--set", "s=64",
    "--set", "delta=1/16",
    "--set", "p=1",
    "--set", "colouring=mono 0",
    "--set", "alpha=1/2",
    "--set", "alpha_deviation=true",
];

fn cli(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn report(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&read(&dir.join("report.json"))).unwrap()
}

fn run_in(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    cli(&args)
}

#[test]
fn gen_host_cycle_and_regular() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&cli(&["gen-host", "cycle", "10", "--out", d])), 0);
    let g = read_graph(&read(&dir.path().join("host.graph"))).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count(), g.max_degree()), (10, 10, 2));

    let o = cli(&["gen-host", "random-regular", "20", "3", "1"]);
    assert_eq!(code(&o), 0);
    let g = read_graph(&stdout(&o)).unwrap();
    assert_eq!(g.vertex_count(), 20);
    for v in 0..20 {
        assert_eq!(g.neighbours(v).len(), 3, "vertex {v}");
        assert!(!g.has_edge(v, v));
    }
}

#[test]
fn gen_host_parity_is_an_input_error() {
    let o = cli(&["gen-host", "random-regular", "5", "3"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn blowup_and_colour_match_run_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let run_dir = dir.path().join("run");
    assert_eq!(code(&run_in(&run_dir, COMPLETE)), 0);
    let host = run_dir.join("host.graph");
    let split = dir.path().join("split");
    let s = split.to_str().unwrap();
    let mut args = vec!["blowup", "--host", host.to_str().unwrap(), "--out", s];
    args.extend_from_slice(COMPLETE);
    assert_eq!(code(&cli(&args)), 0);
    let gamma = split.join("gamma.graph");
    let mut args = vec!["colour", "--gamma", gamma.to_str().unwrap(), "--host", host.to_str().unwrap(), "--out", s];
    args.extend_from_slice(COMPLETE);
    assert_eq!(code(&cli(&args)), 0);
    for f in ["gamma.graph", "gamma.meta", "colouring.txt"] {
        assert_eq!(read(&run_dir.join(f)), read(&split.join(f)), "{f}");
    }
}

#[test]
fn colour_mono_and_unknown_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let base = ["--set", "s=12", "--set", "host=cycle 5"];
    let mut args = vec!["blowup", "--out", d];
    args.extend_from_slice(&base);
    assert_eq!(code(&cli(&args)), 0);
    assert_eq!(code(&cli(&["gen-host", "cycle", "5", "--out", d])), 0);
    let gamma = dir.path().join("gamma.graph");
    let host = dir.path().join("host.graph");
    let (g, h) = (gamma.to_str().unwrap(), host.to_str().unwrap());

    let o = cli(&["colour", "--gamma", g, "--host", h, "--strategy", "mono 0", "--set", "s=12"]);
    assert_eq!(code(&o), 0);
    let chi = read_colouring(&stdout(&o)).unwrap();
    assert!(!chi.is_empty());
    assert!(chi.iter().all(|(_, _, c)| c == 0));

    let o = cli(&["colour", "--gamma", g, "--host", h, "--strategy", "stripes"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "# small\nseed = 5\ns = 10\nhost = cycle 6\ncolouring = degree-adversary\n").unwrap();
    let out = dir.path().join("out");
    let o = cli(&[
        "run",
        "--config",
        conf.to_str().unwrap(),
        "--set",
        "s=11",
        "--seed",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let cfg = &report(&out)["config"];
    assert_eq!(cfg["s"], 11);
    assert_eq!(cfg["seed"], 9);
    assert_eq!(cfg["host"]["m"], 6);
    assert_eq!(cfg["colouring"]["kind"], "degree-adversary");
    // Every key a config may set is echoed, defaulted or not.
    for key in gridramsey_cli::config::KEYS {
        assert!(cfg.get(key).is_some(), "{key} missing from echo");
    }
}

#[test]
fn delta_above_bound_rejected_at_load() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["--set", "delta=0.07"]);
    assert_eq!(code(&o), 2);
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn tiny_parts_fail_at_embed_with_reason() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["--set", "s=10"]);
    assert_eq!(code(&o), 1);
    let r = report(dir.path());
    assert_eq!(r["status"], "failed-at-embed");
    assert!(r["message"].as_str().unwrap().contains("too small"));
    // Artifacts up to the failure are kept.
    for f in ["host.graph", "gamma.graph", "gamma.meta", "colouring.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!dir.path().join("embedding.txt").exists());
}

#[test]
fn successful_reports_point_at_verified_embeddings() {
    for seed in ["1", "2", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let mut args = COMPLETE.to_vec();
        args.extend_from_slice(&["--seed", seed]);
        assert_eq!(code(&run_in(dir.path(), &args)), 0);
        let r = report(dir.path());
        assert_eq!(r["status"], "success");
        let art = &r["artifacts"];
        let file = |k: &str| dir.path().join(art[k].as_str().unwrap());
        let g = read_graph(&read(&file("gamma"))).unwrap();
        let chi = read_colouring(&read(&file("colouring"))).unwrap();
        let emb = read_embedding(&read(&file("embedding"))).unwrap();
        assert!(verify_grid_embedding(&g, &chi, &emb).valid);
        assert_eq!(r["pipeline"]["chain_ok"], true);
        assert_eq!((emb.rows, emb.cols), (4, 4));
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&run_in(p, COMPLETE)), 0);
    let arg = |f: &str| p.join(f).to_str().unwrap().to_string();
    let verify = |emb: &str| {
        cli(&[
            "verify",
            "--gamma",
            &arg("gamma.graph"),
            "--colouring",
            &arg("colouring.txt"),
            "--embedding",
            emb,
        ])
    };
    assert_eq!(code(&verify(&arg("embedding.txt"))), 0);

    // Cell (0, 0) reuses the image of cell (0, 1).
    let mut emb = read_embedding(&read(&p.join("embedding.txt"))).unwrap();
    emb.image[0] = emb.image[1];
    std::fs::write(p.join("bad.txt"), write_embedding(&emb)).unwrap();
    let o = verify(&arg("bad.txt"));
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("violation"));

    assert_eq!(code(&verify(&arg("missing.txt"))), 2);
    std::fs::write(p.join("junk.txt"), "grid x\n").unwrap();
    assert_eq!(code(&verify(&arg("junk.txt"))), 2);
}

#[test]
fn oracle_commands() {
    let o = cli(&["oracle", "arrows", "--graph", "complete 6", "--pattern", "complete 3"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "arrows");

    let o = cli(&["oracle", "arrows", "--graph", "complete 5", "--pattern", "complete 3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["status"], "not-arrows");
    assert!(v["witness"].is_object());

    let o = cli(&["oracle", "arrows", "--graph", "complete 9", "--pattern", "complete 3"]);
    assert_eq!(code(&o), 2, "36 edges is above the guard");

    let o = cli(&["oracle", "grid", "--graph", "grid 4 5", "--a", "3", "--b", "4"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("found"));

    let o = cli(&["oracle", "count", "--n", "8", "--p", "1", "--a", "2", "--b", "2", "--samples", "2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // K_8 has 3 C_4 per 4-set.
    assert_eq!(v["counts"][0], 3 * 70);
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn first_moment_expectation_increases_in_p() {
    let o = cli(&["experiment", "first-moment", "--n", "25", "--p", "0.1,0.2,0.3,0.4,0.5", "--samples", "0"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    let e: Vec<f64> = rows.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(e.windows(2).all(|w| w[0] < w[1]), "{e:?}");
}

#[test]
fn first_moment_marks_intractable_rows() {
    let o = cli(&["experiment", "first-moment", "--n", "400", "--a", "4", "--b", "4", "--p", "0.1", "--samples", "1"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert!(rows[0].last().unwrap().starts_with("skipped"));
}

#[test]
fn uniformity_sweep_complete_pairs_have_zero_deviation() {
    let o = cli(&["experiment", "uniformity-sweep", "--set", "p=1", "--set", "s=30", "--samples", "10"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn success_rate_tabulates_every_seed() {
    let mut args = vec!["experiment", "pipeline-success-rate", "--seeds", "4"];
    args.extend_from_slice(COMPLETE);
    let o = cli(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "status,count,seeds\nsuccess,4,0 1 2 3\n");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for extra in [COMPLETE, &["--set", "p=0.35", "--set", "colouring=host-split"][..]] {
        let ca = code(&run_in(a.path(), extra));
        assert_eq!(ca, code(&run_in(b.path(), extra)));
        for entry in std::fs::read_dir(a.path()).unwrap() {
            let name = entry.unwrap().file_name();
            if name == "timings.json" {
                continue;
            }
            assert_eq!(
                std::fs::read(a.path().join(&name)).unwrap(),
                std::fs::read(b.path().join(&name)).unwrap(),
                "{name:?}"
            );
        }
    }
}
