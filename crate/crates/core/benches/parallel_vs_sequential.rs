use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use multispace::coalesce::{verify_infinitesimal_limit, CoalesceOptions};
use multispace::verify::{self, VerifyConfig};
use multispace::{parse, CoalescenceSchedule, ExactScalar, Execution, VectorField};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn trial_batches(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_trials");
    group.sample_size(10);
    for (name, execution) in MODES {
        let cfg = VerifyConfig { execution, ..VerifyConfig::default() };
        group.bench_with_input(BenchmarkId::new("direct_recursive", name), &cfg, |b, cfg| {
            b.iter(|| verify::check_direct_recursive(cfg, 64))
        });
        group.bench_with_input(BenchmarkId::new("determinant_identity", name), &cfg, |b, cfg| {
            b.iter(|| verify::check_determinant_identity(cfg, 64))
        });
    }
    group.finish();
}

fn coalescence_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("coalescence_sweep");
    group.sample_size(10);
    let curve = parse("x^5").unwrap();
    let vf = VectorField::rotation();
    let sched = CoalescenceSchedule::default_for(ExactScalar::one(), 3);
    for (name, execution) in MODES {
        let opts = CoalesceOptions { execution, ..CoalesceOptions::default() };
        group.bench_function(BenchmarkId::new("rotation_x5_k3", name), |b| {
            b.iter(|| verify_infinitesimal_limit(&vf, &curve, 3, &sched, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trial_batches, coalescence_sweep);
criterion_main!(benches);
