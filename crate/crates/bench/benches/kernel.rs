//! Criterion benchmarks for the exact kernel: scalar field arithmetic,
//! the core-quotient bijection, one small Macdonald cell solve, and one
//! long-dual pairing evaluation.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use wmac_core::macdonald::{enumerate_cell, solve_cell, SolveOptions};
use wmac_core::partitions::{combine, core_quotient, partitions_of, Partition};
use wmac_core::scalars::{Scalar, XorShift};
use wmac_core::shuffle::{f_pn, pairing_r};

fn bench_scalar_ops(c: &mut Criterion) {
    let mut rng = XorShift::new(17);
    let values: Vec<Scalar> = (0..32).map(|_| rng.scalar(4)).collect();
    c.bench_function("scalar_mul_add_canonical", |b| {
        b.iter(|| {
            let mut acc = Scalar::zero();
            for pair in values.chunks(2) {
                acc = &acc + &(&pair[0] * &pair[1]);
            }
            black_box(acc)
        })
    });
}

fn bench_core_quotient(c: &mut Criterion) {
    let lams: Vec<Partition> = (0..=14u64).flat_map(partitions_of).collect();
    c.bench_function("core_quotient_roundtrip_le14_ell3", |b| {
        b.iter(|| {
            for lam in &lams {
                let (core, _, quot) = core_quotient(lam, 3);
                black_box(combine(&core, &quot, 3).unwrap());
            }
        })
    });
}

fn bench_macdonald_cell(c: &mut Criterion) {
    let cell = enumerate_cell(&[0, 0, 0], 1, 3).unwrap();
    c.bench_function("solve_cell_ell3_n1", |b| {
        b.iter(|| {
            black_box(
                solve_cell(
                    &cell,
                    SolveOptions {
                        precheck_seed: None,
                    },
                )
                .unwrap(),
            )
        })
    });
}

fn bench_pairing(c: &mut Criterion) {
    let f = f_pn(1, 1, 3);
    c.bench_function("pairing_r_f11_ell3", |b| {
        b.iter(|| black_box(pairing_r(&f, 0, 1).unwrap()))
    });
}

criterion_group!(
    benches,
    bench_scalar_ops,
    bench_core_quotient,
    bench_macdonald_cell,
    bench_pairing
);
criterion_main!(benches);
