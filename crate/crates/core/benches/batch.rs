use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flockbench::harness::{run_batch, ExecMode, ExperimentConfig, ModelTag};

fn batch(c: &mut Criterion) {
    let cfg = ExperimentConfig {
        n: 20,
        steps: 30,
        runs: 8,
        ..Default::default()
    };
    let mut group = c.benchmark_group("batch");
    group.sample_size(10);
    for tag in [ModelTag::Reynolds, ModelTag::DfDistributed, ModelTag::DfCentralized] {
        for (name, mode) in [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)] {
            group.bench_with_input(BenchmarkId::new(tag.as_str(), name), &mode, |b, &mode| {
                b.iter(|| run_batch(&cfg, tag, mode).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, batch);
criterion_main!(benches);
