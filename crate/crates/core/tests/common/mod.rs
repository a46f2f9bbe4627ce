//! Fixture corpora shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use sectorwalk_core::densities::NdppKernel;
use sectorwalk_core::graph::{generate, Family};
use sectorwalk_core::rng::stream;
use sectorwalk_core::EmbeddedGraph;
use std::sync::Arc;

pub const WEIGHT_CYCLE: [f64; 3] = [1.0 / 3.0, 1.0, 2.0];

pub fn graph(f: Family) -> EmbeddedGraph {
    generate(&f).unwrap()
}

pub fn shared(f: Family) -> Arc<EmbeddedGraph> {
    Arc::new(graph(f))
}

pub fn edge_weighted(g: EmbeddedGraph, offset: usize) -> EmbeddedGraph {
    g.with_edge_weights(|i, _| WEIGHT_CYCLE[(i + offset) % 3]).unwrap()
}

pub fn vertex_weighted(g: EmbeddedGraph, lambda: &[f64]) -> EmbeddedGraph {
    let n = g.n();
    g.with_lambda((0..n).map(|v| lambda[v % lambda.len()]).collect()).unwrap()
}

/// Every built-in family member on at most `max_n` vertices.
pub fn families_up_to(max_n: usize) -> Vec<Family> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(Family::Path(n));
    }
    for n in 3..=max_n {
        out.push(Family::Cycle(n));
    }
    for k in 3..max_n {
        out.push(Family::Wheel(k));
    }
    for r in 2..=max_n {
        for c in r..=max_n {
            if r * c <= max_n {
                out.push(Family::Grid(r, c));
                out.push(Family::TriangulatedGrid(r, c));
            }
        }
    }
    out
}

/// Monomer-dimer fixtures on at most 8 vertices with varied weights.
pub fn monomer_dimer_fixtures() -> Vec<(String, Arc<EmbeddedGraph>)> {
    vec![
        ("path(4)".into(), shared(Family::Path(4))),
        ("path(6) lambda 0.5".into(), Arc::new(vertex_weighted(graph(Family::Path(6)), &[0.5]))),
        ("cycle(5)".into(), shared(Family::Cycle(5))),
        ("cycle(6) weighted".into(), Arc::new(edge_weighted(graph(Family::Cycle(6)), 0))),
        ("grid(2,3)".into(), shared(Family::Grid(2, 3))),
        ("grid(2,4) lambda 2".into(), Arc::new(vertex_weighted(graph(Family::Grid(2, 4)), &[2.0]))),
        ("wheel(4)".into(), shared(Family::Wheel(4))),
        ("wheel(5) weighted".into(), Arc::new(edge_weighted(graph(Family::Wheel(5)), 1))),
        (
            "triangulated(2,3) lambda 0.7/1.3".into(),
            Arc::new(vertex_weighted(graph(Family::TriangulatedGrid(2, 3)), &[0.7, 1.3])),
        ),
        (
            "path(8) weighted".into(),
            Arc::new(vertex_weighted(edge_weighted(graph(Family::Path(8)), 2), &[1.5, 0.8])),
        ),
    ]
}

/// Monomer-dimer fixtures on at most 6 vertices, each unit and weighted.
pub fn small_monomer_dimer_fixtures() -> Vec<(String, Arc<EmbeddedGraph>)> {
    let mut out = Vec::new();
    for f in families_up_to(6) {
        let g = graph(f);
        if g.edge_count() == 0 {
            continue;
        }
        out.push((format!("{f:?}"), Arc::new(g.clone())));
        out.push((
            format!("{f:?} weighted"),
            Arc::new(vertex_weighted(edge_weighted(g, 0), &[0.6, 1.7, 1.0])),
        ));
    }
    out
}

/// `(name, graph, matching size)` on planar graphs with at most 10 vertices.
pub fn k_matching_fixtures() -> Vec<(String, Arc<EmbeddedGraph>, usize)> {
    let plain = [
        (Family::Path(6), 1),
        (Family::Path(6), 2),
        (Family::Cycle(6), 2),
        (Family::Cycle(7), 2),
        (Family::Grid(2, 3), 1),
        (Family::Grid(2, 3), 2),
        (Family::Grid(2, 4), 2),
        (Family::Grid(2, 4), 3),
        (Family::Wheel(5), 2),
        (Family::TriangulatedGrid(2, 3), 2),
        (Family::Grid(2, 5), 3),
        (Family::Grid(2, 5), 4),
        (Family::Cycle(9), 3),
        (Family::Wheel(8), 3),
    ];
    let mut out: Vec<_> = plain
        .iter()
        .map(|&(f, m)| (format!("{f:?} m={m}"), shared(f), m))
        .collect();
    out.push((
        "grid(2,4) weighted m=2".into(),
        Arc::new(vertex_weighted(edge_weighted(graph(Family::Grid(2, 4)), 0), &[0.5, 2.0])),
        2,
    ));
    out.push((
        "triangulated(3,3) weighted m=3".into(),
        Arc::new(edge_weighted(graph(Family::TriangulatedGrid(3, 3)), 1)),
        3,
    ));
    out
}

/// `L = B B^T / n + (A - A^T)`: symmetric part PSD, generally nonsymmetric.
pub fn random_kernel(n: usize, seed: u64) -> NdppKernel {
    let mut rng = stream(seed, 77);
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-0.7..0.7)).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sym: f64 = (0..n).map(|t| b[i * n + t] * b[j * n + t]).sum::<f64>() / n as f64;
                    sym + a[i * n + j] - a[j * n + i]
                })
                .collect()
        })
        .collect();
    NdppKernel::new(rows).unwrap()
}

/// Ten `(name, kernel, k)` fixtures with `n <= 8` and `k in {2, 3, 4}`.
pub fn ndpp_fixtures() -> Vec<(String, Arc<NdppKernel>, usize)> {
    [(8, 2), (7, 3), (7, 4), (6, 3), (8, 3), (6, 4), (7, 2), (6, 2), (5, 3), (6, 4)]
        .iter()
        .enumerate()
        .map(|(i, &(n, k))| (format!("ndpp#{i}(n={n}, k={k})"), Arc::new(random_kernel(n, 100 + i as u64)), k))
        .collect()
}
