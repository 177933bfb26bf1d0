use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hfa_bench::chain_model;
use hfa_core::scf::Algorithm;
use hfa_core::{effective_interaction, eig_symmetric, spectral_projector};

fn spectral(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    group.sample_size(10);
    for n in [100, 200, 400] {
        let model = chain_model(n, 1).unwrap();
        let h = model.linear_hamiltonian().unwrap();
        group.bench_with_input(BenchmarkId::new("eig", n), &h, |b, h| {
            b.iter(|| eig_symmetric(h.matrix()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("projector", n), &h, |b, h| {
            b.iter(|| spectral_projector(h.matrix(), 0.5).unwrap())
        });
    }
    group.finish();
}

fn interaction(c: &mut Criterion) {
    let mut group = c.benchmark_group("effective_interaction");
    for n in [100, 200, 400] {
        let model = chain_model(n, 1).unwrap();
        let h = model.linear_hamiltonian().unwrap();
        let gamma = spectral_projector(h.matrix(), 0.5).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &gamma, |b, gamma| {
            b.iter(|| effective_interaction(gamma, &model.kernel, &model.lattice).unwrap())
        });
    }
    group.finish();
}

fn scf(c: &mut Criterion) {
    let mut group = c.benchmark_group("scf_l200");
    group.sample_size(10);
    for (name, algorithm) in [
        ("fixed_point", Algorithm::FixedPoint),
        ("oda", Algorithm::Oda),
    ] {
        let mut model = chain_model(200, 7).unwrap();
        model.config.algorithm = algorithm;
        group.bench_function(name, |b| b.iter(|| model.solve().unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spectral, interaction, scf);
criterion_main!(benches);
