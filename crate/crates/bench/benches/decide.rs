use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cirquent_bench::{instances, matching_heavy};
use cirquent_core::scaling::{identity_chain, Family};
use cirquent_core::{decide_ccc, decide_cl5};

fn decide(c: &mut Criterion) {
    let mut group = c.benchmark_group("decide_cl5");
    for (name, f) in matching_heavy() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &f, |b, f| b.iter(|| decide_cl5(f)));
    }
    for inst in instances(Family::Qbf, 4) {
        group.bench_with_input(BenchmarkId::from_parameter(&inst.id), &inst.formula, |b, f| b.iter(|| decide_cl5(f)));
    }
    group.finish();

    let mut group = c.benchmark_group("decide_ccc");
    for n in [2, 6, 12] {
        let f = identity_chain(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| decide_ccc(f)));
    }
    group.finish();
}

criterion_group!(benches, decide);
criterion_main!(benches);
