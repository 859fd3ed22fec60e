use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use embezzle_bench::{random_qubits, vdh_circuit};
use embezzle_core::bounds::{asymptotic_bound, finite_n_bound, saturation_length};
use embezzle_core::circuit::{cut_entropies, evolve_final, EvolveOptions};
use embezzle_core::qcore::{partial_trace_keep_prefix, von_neumann_entropy};
use embezzle_core::{BoundParams, LogBase};

fn qcore_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("qcore");
    for n in [4usize, 6, 8] {
        let rho = random_qubits(n, 1);
        group.bench_with_input(BenchmarkId::new("partial_trace_half", n), &rho, |b, rho| {
            b.iter(|| partial_trace_keep_prefix(black_box(rho), n / 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("entropy", n), &rho, |b, rho| {
            b.iter(|| von_neumann_entropy(black_box(rho), LogBase::NATURAL))
        });
        group.bench_with_input(BenchmarkId::new("cut_profile", n), &rho, |b, rho| {
            b.iter(|| cut_entropies(black_box(rho)))
        });
    }
    group.finish();
}

fn circuit_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("circuit");
    group.sample_size(20);
    for n in [2usize, 3, 4] {
        let circuit = vdh_circuit(n);
        group.bench_function(BenchmarkId::new("compile_vdh", n), |b| {
            b.iter(|| vdh_circuit(black_box(n)))
        });
        group.bench_function(BenchmarkId::new("evolve_vdh", n), |b| {
            b.iter(|| {
                evolve_final(
                    black_box(&circuit.initial),
                    &circuit.schedule,
                    EvolveOptions {
                        substeps: 1,
                        ..EvolveOptions::default()
                    },
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bound_kernels(c: &mut Criterion) {
    let mut group = c.benchmark_group("bounds");
    for eps in [1e-2, 1e-3, 1e-4] {
        let p = BoundParams::new(std::f64::consts::LN_2, eps, 2, 2).unwrap();
        let n = saturation_length(&p).unwrap().max(1);
        group.bench_with_input(BenchmarkId::new("finite_n_saturated", eps), &p, |b, p| {
            b.iter(|| finite_n_bound(black_box(p), n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("asymptotic", eps), &p, |b, p| {
            b.iter(|| asymptotic_bound(black_box(p)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, qcore_kernels, circuit_kernels, bound_kernels);
criterion_main!(benches);
