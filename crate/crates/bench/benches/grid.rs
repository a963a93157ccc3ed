// Licensed under the Apache-2.0 license

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use rotsim_bench::headline_specs;
use rotsim_core::{reference_grid, run_benchmark};

fn cells(c: &mut Criterion) {
    let mut g = c.benchmark_group("cell");
    for spec in headline_specs() {
        g.throughput(Throughput::Bytes(spec.payload_bytes));
        let id = format!("{}/{}/{}", spec.algorithm, spec.location, spec.payload_bytes);
        g.bench_with_input(BenchmarkId::from_parameter(id), &spec, |b, s| {
            b.iter(|| run_benchmark(s).expect("cell runs"))
        });
    }
    g.finish();
}

fn full_grid(c: &mut Criterion) {
    let specs = reference_grid();
    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    g.bench_function("reference_48", |b| {
        b.iter(|| {
            for s in &specs {
                run_benchmark(s).expect("cell runs");
            }
        })
    });
    g.finish();
}

criterion_group!(benches, cells, full_grid);
criterion_main!(benches);
