use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use luinv_bench::{mirrored2, orbit2, orbit3};
use luinv_core::families::DEFAULT_DEPTH;
use luinv_core::invariants::DEFAULT_TOL;
use luinv_core::{decide2, decide3, fingerprint2, fingerprint3};

fn two_qubits(c: &mut Criterion) {
    let (a, b) = orbit2(1);
    let (m, n) = mirrored2(1);
    c.bench_function("fingerprint2", |bench| bench.iter(|| fingerprint2(black_box(&a))));
    c.bench_function("decide2/orbit", |bench| bench.iter(|| decide2(black_box(&a), black_box(&b), DEFAULT_TOL)));
    c.bench_function("decide2/mirrored", |bench| bench.iter(|| decide2(black_box(&m), black_box(&n), DEFAULT_TOL)));
}

fn three_qubits(c: &mut Criterion) {
    let (a, b) = orbit3(1);
    c.bench_function("fingerprint3/depth2", |bench| bench.iter(|| fingerprint3(black_box(&a), DEFAULT_DEPTH)));
    c.bench_function("fingerprint3/depth3", |bench| bench.iter(|| fingerprint3(black_box(&a), 3)));
    c.bench_function("decide3/orbit", |bench| {
        bench.iter(|| decide3(black_box(&a), black_box(&b), DEFAULT_DEPTH, DEFAULT_TOL))
    });
}

criterion_group!(benches, two_qubits, three_qubits);
criterion_main!(benches);
