use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use retgk::embed_approx::{embed_dataset, rff_sample, EmbeddingMaps};
use retgk::embed_exact::{retgk1_gram, GraphKernelParams, GraphSetRep};
use retgk::kernels::{KernelSpec, NodeKernelSpec};
use retgk::pipeline::{build_grams, PipelineConfig, Variant};
use retgk::rpf::{rpf_bruteforce, rpf_exact, rpf_monte_carlo};
use retgk::synth;
use retgk_bench::structural_dataset;

fn bench_rpf(c: &mut Criterion) {
    let mut group = c.benchmark_group("rpf");
    for &n in &[30usize, 100] {
        let g = synth::random_connected_graph(n, 0.1, true, 42);
        group.bench_with_input(BenchmarkId::new("spectral", n), &g, |b, g| {
            b.iter(|| rpf_exact(black_box(g), 50).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bruteforce", n), &g, |b, g| {
            b.iter(|| rpf_bruteforce(black_box(g), 50).unwrap())
        });
    }
    let sparse = synth::ring_with_chords(10_000, 2_000, 7);
    group.sample_size(10);
    group.bench_function("monte_carlo_10k_nodes_m200", |b| {
        b.iter(|| rpf_monte_carlo(black_box(&sparse), 50, 200, 3).unwrap())
    });
    group.finish();
}

fn bench_grams(c: &mut Criterion) {
    let mut group = c.benchmark_group("gram");
    group.sample_size(10);
    let dataset = structural_dataset(60, 12, 100);
    let reps: Vec<GraphSetRep> = dataset
        .graphs
        .iter()
        .map(|g| GraphSetRep::from_graph(g, rpf_exact(g, 50).unwrap()).unwrap())
        .collect();
    let spec = NodeKernelSpec::structural(KernelSpec::LaplacianRbf { gamma: 1.0 }).unwrap();
    group.bench_function("exact_mmd_60_graphs", |b| {
        b.iter(|| {
            retgk1_gram(
                black_box(&reps),
                &spec,
                &GraphKernelParams::Exponential { gamma: None, p: 2.0 },
            )
            .unwrap()
        })
    });
    let maps = EmbeddingMaps::new(rff_sample(50, 200, 1.0, 5), None, None);
    group.bench_function("tensor_embed_60_graphs_d200", |b| {
        b.iter(|| embed_dataset(black_box(&reps), &maps).unwrap())
    });
    group.finish();
}

fn bench_end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    let dataset = structural_dataset(40, 10, 400);
    for (label, variant) in [("retgk1", Variant::RetGk1), ("retgk2", Variant::RetGk2)] {
        group.bench_function(BenchmarkId::new("grams", label), |b| {
            b.iter(|| {
                let mut config = PipelineConfig::new("BENCH");
                config.variant = variant;
                build_grams(black_box(&dataset), &config).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rpf, bench_grams, bench_end_to_end);
criterion_main!(benches);
