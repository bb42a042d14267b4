mod common;

use gridramsey::blowup::{build_blowup, HostGraph};
use gridramsey::embedder::{embed_grid, embed_in_sets, verify_grid_embedding, EmbedContext, EmbedLog, EmbedParams, GridEmbedding, Violation};
use gridramsey::graph::colour_subgraph;
use gridramsey::io::{read_embedding, write_embedding};
use gridramsey::oracle::{contains_subgraph, grid_graph, is_embedding};
use gridramsey::pipeline::{find_mono_cycle, regular_subgraph, PipelineConfig};
use gridramsey::regularity::{EpsSchedule, RegParams};
use gridramsey::{EdgeColouring, Graph, VertexSet};
use proptest::prelude::*;

/// A full run on the blow-up of `C_m` with complete pairs.
fn end_to_end(m: usize, seed: u64) -> (Graph, EdgeColouring, GridEmbedding) {
    let host = HostGraph::cycle(m).unwrap();
    let b = build_blowup(&host, 40, 1.0, seed).unwrap();
    let chi = EdgeColouring::monochromatic(&b.gamma, 2, 1).unwrap();
    let sched = EpsSchedule::constant(0.25, 2, 0.5, 0.9).unwrap();
    let params = RegParams {
        r: 2,
        max_degree: 2,
        eps: 0.25,
        eps_prime: 0.25,
        alpha: 0.5,
        lambda: sched.lambda,
        delta: 0.1,
        c: 6.0,
        p: 1.0,
    };
    let pr = regular_subgraph(&b, &chi, &params, &sched, PipelineConfig::default(), seed).unwrap().unwrap();
    let cycle = find_mono_cycle(&b.host, &pr.phi, m, m, 1 << 20).unwrap().cycle().unwrap().clone();
    let out = embed_grid(&b, &chi, &pr, &cycle, EmbedParams::new(0.25, 0.5, 1.0, 40), m, seed).unwrap().unwrap();
    assert_eq!(out.log.bad_set_sizes, vec![0; m]);
    (b.gamma, chi, out.embedding)
}

#[test]
fn complete_blowups_embed_and_verify() {
    for m in [3, 4, 5] {
        let (g, chi, emb) = end_to_end(m, m as u64);
        let check = verify_grid_embedding(&g, &chi, &emb);
        assert!(check.valid, "{:?}", check.violations);
        assert_eq!(check.edges_checked, 2 * m * m - 2 * m);
        // Independent confirmation: the image is a copy of the grid in the
        // colour subgraph, and the subgraph search finds one too.
        let layer = colour_subgraph(&g, &chi, emb.colour).unwrap();
        assert!(is_embedding(&layer, &grid_graph(m, m), &emb.image));
        assert!(contains_subgraph(&layer, &grid_graph(m, m), 1 << 24).map().is_some());
        assert_eq!(read_embedding(&write_embedding(&emb)).unwrap(), emb);
    }
}

#[test]
fn reruns_are_identical() {
    assert_eq!(end_to_end(4, 9).2, end_to_end(4, 9).2);
}

#[test]
fn two_sets_give_a_four_cycle_grid() {
    let n = 60;
    let mut g = Graph::new(n);
    for u in 0..30 {
        for v in 30..60 {
            g.add_edge(u, v).unwrap();
        }
    }
    let u = vec![VertexSet::range(n, 0, 30), VertexSet::range(n, 30, 60)];
    let b = vec![VertexSet::empty(n); 2];
    let ctx = EmbedContext::new(&g, u, b, 0, EmbedParams::new(0.25, 0.5, 1.0, 30)).unwrap();
    let out = embed_in_sets(&ctx, 2, EmbedLog::default()).unwrap().unwrap();
    let chi = EdgeColouring::monochromatic(&g, 1, 0).unwrap();
    assert!(verify_grid_embedding(&g, &chi, &out.embedding).valid);
}

fn fixture() -> &'static (Graph, EdgeColouring, GridEmbedding) {
    static F: std::sync::OnceLock<(Graph, EdgeColouring, GridEmbedding)> = std::sync::OnceLock::new();
    F.get_or_init(|| end_to_end(4, 1))
}

fn cell_of(v: &Violation) -> Vec<(usize, usize)> {
    match v {
        Violation::Shape { .. } => vec![],
        Violation::OutOfRange { cell, .. } => vec![*cell],
        Violation::NonInjective { first, second, .. } => vec![*first, *second],
        Violation::MissingEdge { from, to } | Violation::WrongColour { from, to, .. } => vec![*from, *to],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Replacing one image by any other vertex is caught at that cell.
    #[test]
    fn corrupted_vertex_is_localised(cell in 0usize..16, target in 0usize..200) {
        let (g, chi, mut emb) = fixture().clone();
        prop_assume!(emb.image[cell] != target);
        emb.image[cell] = target;
        let layer = colour_subgraph(&g, &chi, emb.colour).unwrap();
        let still_grid = is_embedding(&layer, &grid_graph(4, 4), &emb.image);
        let check = verify_grid_embedding(&g, &chi, &emb);
        prop_assert_eq!(check.valid, still_grid);
        if !check.valid {
            let at = (cell / 4, cell % 4);
            prop_assert!(check.violations.iter().any(|v| cell_of(v).contains(&at)));
        }
    }

    /// Recolouring one grid edge is reported as that edge.
    #[test]
    fn recoloured_edge_is_localised(i in 0usize..4, j in 0usize..3) {
        let (g, mut chi, emb) = fixture().clone();
        let (u, v) = (emb.image(i, j), emb.image(i, j + 1));
        chi.set(u, v, 0).unwrap();
        let check = verify_grid_embedding(&g, &chi, &emb);
        prop_assert!(!check.valid);
        prop_assert_eq!(check.violations.len(), 1);
        let is_edge = matches!(check.violations[0], Violation::WrongColour { from, to, found: 0 } if from == (i, j) && to == (i, j + 1));
        prop_assert!(is_edge);
    }
}
