//! Rayon path against the sequential fallback on the three hot loops:
//! gain evaluation, the correlation grid design and brute force.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use welfare::distributions::{sample, smooth, GeneratorKind, GeneratorSpec, SmoothingSpec};
use welfare::metrics::gain;
use welfare::model::{CostModel, Mechanism, Projection, QualityFunction, SampleSet, ThresholdMechanism};
use welfare::par::force_sequential;
use welfare::threshold::{algorithm1, bruteforce_opt, Algorithm1Params};

struct Instance {
    s: SampleSet,
    p: Projection,
    f: QualityFunction,
    cm: CostModel,
}

fn instance(m: usize) -> Instance {
    let spec = GeneratorSpec::new(GeneratorKind::UniformBall { r: 1.0 }, 3, 7);
    let raw = sample(&spec, m).unwrap();
    let s = smooth(&raw, &SmoothingSpec::new(0.2).unwrap(), 8).unwrap();
    Instance {
        s,
        p: Projection::coordinates(3, &[1, 2]).unwrap(),
        f: QualityFunction::linear(vec![0.6, 0.0, 0.8], 0.0).unwrap(),
        cm: CostModel::new(4.0).unwrap(),
    }
}

const MODES: [(&str, bool); 2] = [("parallel", false), ("sequential", true)];

fn bench_gain(c: &mut Criterion) {
    let inst = instance(1_000_000);
    let g: Mechanism = ThresholdMechanism::new(vec![0.0, 0.6, 0.8], 0.1).unwrap().into();
    let mut group = c.benchmark_group("gain_1e6");
    for (name, seq) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            force_sequential(seq);
            b.iter(|| gain(&g, &inst.s, &inst.f, &inst.cm).unwrap());
        });
    }
    group.finish();
    force_sequential(false);
}

fn bench_algorithm1(c: &mut Criterion) {
    let inst = instance(20_000);
    let params = Algorithm1Params::new(0.2, 1.0, 0.2);
    let mut group = c.benchmark_group("algorithm1");
    group.sample_size(10);
    for (name, seq) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            force_sequential(seq);
            b.iter(|| algorithm1(&inst.s, &inst.p, &inst.f, &inst.cm, &params).unwrap());
        });
    }
    group.finish();
    force_sequential(false);
}

fn bench_bruteforce(c: &mut Criterion) {
    let inst = instance(20_000);
    let mut group = c.benchmark_group("bruteforce");
    group.sample_size(10);
    for (name, seq) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            force_sequential(seq);
            b.iter(|| bruteforce_opt(&inst.s, &inst.p, &inst.f, &inst.cm, 256, 1024).unwrap());
        });
    }
    group.finish();
    force_sequential(false);
}

criterion_group!(benches, bench_gain, bench_algorithm1, bench_bruteforce);
criterion_main!(benches);
