use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sectorwalk_bench::{grid, random_kernel, triangulated};
use sectorwalk_core::counting::count_k_matchings;
use sectorwalk_core::densities::{k_matching_density, monomer_dimer_density, ndpp_density};
use sectorwalk_core::diagnostics::{correlation_matrices, enumerate_density};
use sectorwalk_core::fkt::{pm_partition_function, pm_partition_function_exact};
use sectorwalk_core::graph::find_matching_of_size;
use sectorwalk_core::rng::stream;
use sectorwalk_core::walk::Walker;
use sectorwalk_core::{CountConfig, DensityRef};
use std::hint::black_box;
use std::sync::Arc;

fn fkt(c: &mut Criterion) {
    let mut group = c.benchmark_group("pm_partition_function");
    for side in [4, 8, 16] {
        let g = grid(side, side);
        group.bench_with_input(BenchmarkId::new("grid", side), &g, |b, g| b.iter(|| pm_partition_function(black_box(g))));
    }
    let g = triangulated(4, 6);
    group.bench_function("exact/triangulated(4,6)", |b| b.iter(|| pm_partition_function_exact(black_box(&g))));
    group.finish();
}

fn down_up(c: &mut Criterion) {
    let mut group = c.benchmark_group("down_up_step");
    for side in [4, 6] {
        let g = grid(side, side);
        let m = side * side / 4;
        let mu: DensityRef = Arc::new(k_matching_density(g.clone(), m).unwrap());
        let start = find_matching_of_size(&g, m).unwrap().monomers(&g);
        for (label, capacity) in [("memo", 1 << 16), ("plain", 0)] {
            let walker = Walker::with_capacity(mu.clone(), 2, capacity).unwrap();
            group.bench_function(BenchmarkId::new(format!("k-matchings/{label}"), side), |b| {
                let mut rng = stream(1, 0);
                let mut s = start.clone();
                b.iter(|| s = walker.step(&s, &mut rng))
            });
        }
    }
    let g = grid(4, 4);
    let md = monomer_dimer_density(g.clone());
    let start = md.encode(&sectorwalk_core::graph::maximum_matching(&g).monomers(&g));
    let walker = Walker::with_capacity(Arc::new(md), 2, 0).unwrap();
    group.bench_function("monomer-dimer/grid(4,4)", |b| {
        let mut rng = stream(2, 0);
        let mut s = start.clone();
        b.iter(|| s = walker.step(&s, &mut rng))
    });
    for k in [2, 4] {
        let mu: DensityRef = Arc::new(ndpp_density(random_kernel(20, 3), k).unwrap());
        let walker = Walker::with_capacity(mu, 2, 0).unwrap();
        let start: Vec<usize> = (0..k).collect();
        group.bench_function(BenchmarkId::new("ndpp/n=20", k), |b| {
            let mut rng = stream(3, 0);
            let mut s = start.clone();
            b.iter(|| s = walker.step(&s, &mut rng))
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let mut group = c.benchmark_group("count_k_matchings");
    group.sample_size(10);
    let g = grid(3, 4);
    let cfg = CountConfig { eps: 0.2, delta: 0.1, gap: 2, steps: 20, seed: 0, samples_per_level: Some(2000) };
    group.bench_function("grid(3,4) m=3, 2000 chains per level", |b| b.iter(|| count_k_matchings(&g, 3, black_box(&cfg))));
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagnostics");
    let mu = ndpp_density(random_kernel(12, 4), 4).unwrap();
    group.bench_function("enumerate ndpp n=12 k=4", |b| b.iter(|| enumerate_density(black_box(&mu))));
    let dist = enumerate_density(&mu).unwrap();
    group.bench_function("correlation spectra n=12", |b| b.iter(|| correlation_matrices(black_box(&dist)).cor_spectrum()));
    group.finish();
}

criterion_group!(benches, fkt, down_up, counting, diagnostics);
criterion_main!(benches);
