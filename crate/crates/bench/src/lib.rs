//! Shared fixtures for the benchmarks.

use rand::Rng;
use sectorwalk_core::densities::NdppKernel;
use sectorwalk_core::graph::{generate, Family};
use sectorwalk_core::rng::stream;
use sectorwalk_core::EmbeddedGraph;
use std::sync::Arc;

pub fn grid(rows: usize, cols: usize) -> Arc<EmbeddedGraph> {
    Arc::new(generate(&Family::Grid(rows, cols)).expect("valid grid"))
}

pub fn triangulated(rows: usize, cols: usize) -> Arc<EmbeddedGraph> {
    Arc::new(generate(&Family::TriangulatedGrid(rows, cols)).expect("valid grid"))
}

/// `B B^T / n` plus a random antisymmetric part, so the symmetric part is PSD.
pub fn random_kernel(n: usize, seed: u64) -> Arc<NdppKernel> {
    let mut rng = stream(seed, 0);
    let b: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let a: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sym: f64 = (0..n).map(|t| b[i * n + t] * b[j * n + t]).sum::<f64>() / n as f64;
                    sym + a[i * n + j] - a[j * n + i] + if i == j { 0.1 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    Arc::new(NdppKernel::new(rows).expect("kernel is PSD by construction"))
}
