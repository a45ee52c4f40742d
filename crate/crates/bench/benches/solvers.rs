use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qroute::ising::ising_to_qubo;
use qroute::solvers::{solve_backtracking, solve_exact, solve_simulated_annealing, AnnealSchedule, BacktrackOptions};
use qroute_bench::{random_ising, swp};

fn exact(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact");
    for n in [12, 16, 20] {
        let q = ising_to_qubo(&random_ising(n, 1));
        group.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| {
            b.iter(|| solve_exact(q, 24).unwrap())
        });
    }
    group.finish();
}

fn anneal(c: &mut Criterion) {
    let m = random_ising(16, 2);
    let sched = AnnealSchedule::default_for(&m);
    c.bench_function("sa/16-spins", |b| b.iter(|| solve_simulated_annealing(&m, &sched, 0).unwrap()));
}

fn backtracking(c: &mut Criterion) {
    let mut group = c.benchmark_group("backtracking");
    for n in [5, 7, 9] {
        let (inst, w, _) = swp(n, 2, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &(inst, w), |b, (inst, w)| {
            b.iter(|| solve_backtracking(inst, w, &BacktrackOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, exact, anneal, backtracking);
criterion_main!(benches);
