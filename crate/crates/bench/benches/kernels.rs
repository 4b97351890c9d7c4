use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use phaselaw::diophantine::{count_lv_convolution_u128, count_lv_mitm, enumerate_lv, VinogradovSystem, DEFAULT_STATE_CAP};
use phaselaw::ensemble::{build_matrix, sample_omegas};
use phaselaw::fluctuations::{fluctuation_samples, FluctuationContext};
use phaselaw::spectral::{draw_spectrum, eig_herm, eigvals_herm, gram, SpectralSource};
use phaselaw::{EnsembleParams, C64};

fn matrix(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_matrix");
    for n in [100usize, 400] {
        let params = EnsembleParams::new(n, 3, 1);
        let omegas = sample_omegas(&params, 0, None).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| build_matrix(&params, black_box(&omegas)).unwrap()));
    }
    group.finish();
}

fn eigen(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigen");
    group.sample_size(10);
    for n in [200usize, 500] {
        let params = EnsembleParams::new(n, 3, 1);
        let h = gram(&build_matrix(&params, &sample_omegas(&params, 0, None).unwrap()).unwrap());
        group.bench_with_input(BenchmarkId::new("values", n), &n, |b, _| b.iter(|| eigvals_herm(black_box(&h), SpectralSource::Gram).unwrap()));
        group.bench_with_input(BenchmarkId::new("vectors", n), &n, |b, _| b.iter(|| eig_herm(black_box(&h), SpectralSource::Gram).unwrap()));
    }
    group.bench_function("draw_spectrum/300", |b| b.iter(|| draw_spectrum(&EnsembleParams::new(300, 3, black_box(2)), false).unwrap()));
    group.finish();
}

fn diophantine(c: &mut Criterion) {
    let mut group = c.benchmark_group("diophantine");
    let sys = VinogradovSystem::homogeneous(8, 2, 2).unwrap();
    group.bench_function("mitm/N8_d2_p2", |b| b.iter(|| count_lv_mitm(black_box(&sys), true, DEFAULT_STATE_CAP).unwrap()));
    group.bench_function("enumerate/N8_d2_p2", |b| b.iter(|| enumerate_lv(black_box(&sys), false, DEFAULT_STATE_CAP).unwrap().len()));
    let big = VinogradovSystem::homogeneous(12, 3, 2).unwrap();
    group.bench_function("convolution/N12_d3_p2", |b| b.iter(|| count_lv_convolution_u128(black_box(&big)).unwrap()));
    group.finish();
}

fn fluctuations(c: &mut Criterion) {
    let ctx = FluctuationContext::new(&EnsembleParams::new(100, 3, 1), 0).unwrap();
    c.bench_function("fluctuation_samples/N100_x200", |b| b.iter(|| fluctuation_samples(&ctx, C64::new(2.0, 0.2), 1, black_box(200)).unwrap()));
}

criterion_group!(benches, matrix, eigen, diophantine, fluctuations);
criterion_main!(benches);
