//! Sequential versus rayon-backed execution of the data-parallel stages.
//! Build with `--no-default-features` to measure the fallback path alone.

use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mpbmc::bmc::check_single;
use mpbmc::cluster::{build_family, FamilyOptions};
use mpbmc::embed::{design_signatures, SignatureOptions};
use mpbmc::par::{self, Workers};
use mpbmc::{generate, BmcConfig, Budget, UnfoldMode};

fn modes() -> Vec<(&'static str, Workers)> {
    let mut m = vec![("sequential", Workers::SEQUENTIAL)];
    if par::is_parallel_enabled() {
        m.push(("parallel", Workers::all()));
    }
    m
}

fn standalone_runs(c: &mut Criterion) {
    let n = generate::equivalence_miter(3, 12, 2, 8);
    let cfg = BmcConfig {
        budget: Budget::Conflicts(300),
        mode: UnfoldMode::InitialState,
        max_depth: Some(20),
        ..BmcConfig::default()
    };
    let props: Vec<usize> = (0..n.num_properties()).collect();
    let mut g = c.benchmark_group("standalone_bmc");
    g.sample_size(10);
    for (name, workers) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::map(&props, workers, |&p| check_single(&n, p, &cfg).map(|v| v.depth)))
        });
    }
    g.finish();
}

fn signatures(c: &mut Criterion) {
    let n = generate::random_netlist(5, 24, 8, 400, 16);
    let opts = SignatureOptions::default();
    let mut g = c.benchmark_group("signatures");
    g.sample_size(10);
    for (name, workers) in modes() {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| design_signatures(black_box(&n), &opts, workers).unwrap())
        });
    }
    g.finish();
}

fn cluster_family(c: &mut Criterion) {
    let n = generate::random_netlist(6, 16, 6, 200, 24);
    let tensors = design_signatures(&n, &SignatureOptions::default(), Workers::SEQUENTIAL).unwrap();
    let emb: BTreeMap<usize, Vec<f64>> = tensors.into_iter().map(|t| (t.property, t.values)).collect();
    let mut g = c.benchmark_group("build_family");
    g.sample_size(10);
    for (name, workers) in modes() {
        let opts = FamilyOptions {
            workers,
            ..FamilyOptions::default()
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| build_family("d", black_box(&emb), 0, &opts).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, standalone_runs, signatures, cluster_family);
criterion_main!(benches);
