use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hrsft::dynamics::{separated_count_with, CountMode};
use hrsft::matrices::families::{full_two_shift, golden_tensor};
use hrsft::nclemma::verify_lemma;
use hrsft::pressure::{partition_function_log_with, Potential};
use hrsft::search::{exhaustive_search, ExhaustiveConfig};
use hrsft::words::EnumBudget;
use hrsft::{Exec, Shape};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn exhaustive(c: &mut Criterion) {
    let mut group = c.benchmark_group("exhaustive_search_size3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| exhaustive_search(ExhaustiveConfig::new(3), exec).unwrap())
        });
    }
    group.finish();
}

fn separated(c: &mut Criterion) {
    let fam = full_two_shift();
    let p = Shape::new(vec![1]);
    let mut group = c.benchmark_group("separated_count_bruteforce_g2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| separated_count_with(&fam, &p, 2, 6, CountMode::Bruteforce, EnumBudget::default(), exec).unwrap())
        });
    }
    group.finish();
}

fn lemma(c: &mut Criterion) {
    let fam = golden_tensor();
    let p = Shape::cube(2, 1);
    let max = Shape::cube(2, 1);
    let mut group = c.benchmark_group("verify_lemma_g3");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| verify_lemma(&fam, &p, &max, None, exec).unwrap())
        });
    }
    group.finish();
}

fn partition(c: &mut Criterion) {
    let fam = full_two_shift();
    let p = Shape::new(vec![1]);
    let f = Potential::vertex(1, &[0.0, 0.5]);
    let mut group = c.benchmark_group("partition_function_enumerate_g2");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| partition_function_log_with(&fam, &f, &p, 1, 14, EnumBudget::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exhaustive, separated, lemma, partition);
criterion_main!(benches);
