use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qroute::ising::{qubo_to_ising, to_pauli_terms};
use qroute::vqsim::{build_ansatz, expectation, AnsatzForm, Entanglement, Gate, Statevector};
use qroute_bench::swp;

fn gates(c: &mut Criterion) {
    let mut group = c.benchmark_group("gate");
    for n in [10, 16, 20] {
        group.bench_with_input(BenchmarkId::new("ry", n), &n, |b, &n| {
            let mut s = Statevector::zero(n).unwrap();
            b.iter(|| s.apply(&Gate::Ry(n / 2, 0.3)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("cz", n), &n, |b, &n| {
            let mut s = Statevector::plus(n).unwrap();
            b.iter(|| s.apply(&Gate::Cz(0, n - 1)).unwrap())
        });
    }
    group.finish();
}

fn ansatz(c: &mut Criterion) {
    let (_, _, q) = swp(3, 1, 0);
    let terms = to_pauli_terms(&qubo_to_ising(&q));
    let circ = build_ansatz(12, 3, AnsatzForm::RyRz, Entanglement::Linear).unwrap();
    let params = vec![0.1; circ.param_count()];
    c.bench_function("ansatz/12q-ryrz-d3", |b| {
        b.iter(|| {
            let s = circ.state(&params).unwrap();
            expectation(&s, &terms).unwrap()
        })
    });
}

criterion_group!(benches, gates, ansatz);
criterion_main!(benches);
