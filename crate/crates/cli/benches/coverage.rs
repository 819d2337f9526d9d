//! Parallel vs sequential throughput of the Monte-Carlo coverage harness.

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use pairdiff_cli::{coverage, coverage_seq};
use pairdiff_core::synth::{Noise, Profile, SynthSpec};

fn bench_coverage(c: &mut Criterion) {
    let spec = SynthSpec {
        n: 400,
        m: 100,
        profile: Profile::Null,
        noise: Noise::Gaussian(0.1),
        seed: 0,
    };
    let trials = 2000usize;
    let mut group = c.benchmark_group("coverage");
    group.throughput(Throughput::Elements(trials as u64));
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| coverage_seq(trials, &spec, 7).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("parallel", |b| b.iter(|| coverage(trials, &spec, 7).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_coverage);
criterion_main!(benches);
