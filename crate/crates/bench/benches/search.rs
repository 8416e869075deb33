use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cirquent_bench::instances;
use cirquent_core::scaling::Family;
use cirquent_core::{prove, SearchBudget};

fn search(c: &mut Criterion) {
    let budget = SearchBudget::default();
    for family in [Family::Identity, Family::Vc, Family::Qbf] {
        let mut group = c.benchmark_group(format!("prove/{family:?}").to_lowercase());
        group.sample_size(10);
        for inst in instances(family, 4) {
            let k = inst.formula.length();
            group.bench_with_input(BenchmarkId::new(inst.id, k), &inst.formula, |b, f| {
                b.iter(|| prove(family.system(), f, &budget))
            });
        }
        group.finish();
    }
}

criterion_group!(benches, search);
criterion_main!(benches);
