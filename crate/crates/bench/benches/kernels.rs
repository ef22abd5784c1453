use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use klab::expsums::PhaseTable;
use klab::meanvalue::lemma1_lhs_with;
use klab::modarith::batch_inv;
use klab::solver::{count_solutions, error_term_with};
use klab::SumSpec;
use klab_bench::{interval_pair, prime, random_residues};

fn batch_inversion(c: &mut Criterion) {
    let p = prime(1_000_003);
    let mut group = c.benchmark_group("batch_inv");
    for n in [1_000usize, 100_000] {
        let values = random_residues(&p, n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &values, |b, v| {
            b.iter(|| batch_inv(black_box(v), &p).unwrap())
        });
    }
    group.finish();
}

fn phase_table(c: &mut Criterion) {
    let p = prime(100_003);
    c.bench_function("phase_table/100003", |b| {
        b.iter(|| PhaseTable::new(black_box(p)))
    });
}

fn windows(c: &mut Criterion) {
    let mut group = c.benchmark_group("all_windows");
    group.sample_size(10);
    for p in [10_007u64, 1_000_003] {
        let spec = SumSpec::new(2, prime(p)).unwrap();
        group.throughput(Throughput::Elements(p));
        group.bench_with_input(BenchmarkId::new("H=1000", p), &spec, |b, s| {
            b.iter(|| klab::expsums::all_windows(black_box(s), 1000).unwrap())
        });
    }
    group.finish();
}

fn kloosterman(c: &mut Criterion) {
    let table = PhaseTable::new(prime(10_007));
    c.bench_function("kloosterman/10007", |b| {
        b.iter(|| table.kloosterman(black_box(3), black_box(17)).unwrap())
    });
    c.bench_function("lemma1_lhs/10007/H=256", |b| {
        b.iter(|| lemma1_lhs_with(&table, black_box(5), 256).unwrap())
    });
}

fn solver(c: &mut Criterion) {
    let p = prime(10_007);
    let table = PhaseTable::new(p);
    let (i1, i2) = interval_pair(&p, 159, 159);
    c.bench_function("error_term/10007/159x159", |b| {
        b.iter(|| error_term_with(&table, black_box(&i1), black_box(&i2)).unwrap())
    });
    c.bench_function("count_solutions/10007/159x159", |b| {
        b.iter(|| count_solutions(black_box(&i1), black_box(&i2), &p).unwrap())
    });
}

criterion_group!(
    benches,
    batch_inversion,
    phase_table,
    windows,
    kloosterman,
    solver
);
criterion_main!(benches);
