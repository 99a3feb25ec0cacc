use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fermat_dde_core::growth::{proximity, zeros_in_disk, DEFAULT_SAMPLES};
use fermat_dde_core::{
    classify, normalize, parse_exp_poly, search, AnsatzSpec, ComplexScalar, ExpPoly, FermatDde, Forcing,
};

fn symmetric(n: u32, a: f64, b: ComplexScalar, p: f64) -> FermatDde {
    FermatDde::new(
        (n, n),
        1,
        ComplexScalar::real(a),
        ComplexScalar::ZERO,
        [
            Forcing::constant(ComplexScalar::real(p), b),
            Forcing::constant(ComplexScalar::real(p), -b),
        ],
        1,
    )
    .unwrap()
}

fn algebra(c: &mut Criterion) {
    let f = parse_exp_poly("(z + 1)*exp(i*z) + z^2*exp(-2*z) + 3 - exp(z^2)").unwrap();
    c.bench_function("pow 5", |b| b.iter(|| black_box(&f).pow(5)));
    let raw = f.pow(3).to_raw();
    c.bench_function("normalize", |b| b.iter(|| normalize(black_box(raw.clone()))));
    c.bench_function("shift + differentiate", |b| {
        b.iter(|| black_box(&f).shift(ComplexScalar::new(0.3, 2.0 * PI)).differentiate(2))
    });
    let text = f.pow(2).to_string();
    c.bench_function("parse", |b| b.iter(|| parse_exp_poly(black_box(&text)).unwrap()));
}

fn equation(c: &mut Criterion) {
    let i = ComplexScalar::I;
    let eq = FermatDde::new(
        (5, 4),
        0,
        ComplexScalar::ONE,
        ComplexScalar::real(2.0 * PI),
        [
            Forcing::constant(ComplexScalar::ONE, i * 5.0),
            Forcing::constant(ComplexScalar::ONE, i * 4.0),
        ],
        1,
    )
    .unwrap();
    let f = ExpPoly::monomial_exp(ComplexScalar::ONE, i, 1);
    c.bench_function("verify (5,4)", |b| b.iter(|| eq.verify(black_box(&f))));
    c.bench_function("classify (5,4)", |b| b.iter(|| classify(black_box(&eq)).unwrap()));
    let quartic = symmetric(4, -1.0, ComplexScalar::imag(2.0), 0.5);
    c.bench_function("classify n=4 symmetric", |b| b.iter(|| classify(black_box(&quartic)).unwrap()));
}

fn growth(c: &mut Criterion) {
    let f = parse_exp_poly("exp(5i*z) + exp(4i*z)").unwrap();
    c.bench_function("proximity r=100", |b| b.iter(|| proximity(black_box(&f), 100.0, DEFAULT_SAMPLES).unwrap()));
    let g = parse_exp_poly("exp(i*z) - 1").unwrap();
    c.bench_function("zeros_in_disk r=7", |b| b.iter(|| zeros_in_disk(black_box(&g), 7.0).unwrap()));
}

fn ansatz(c: &mut Criterion) {
    let eq = symmetric(2, -1.0, ComplexScalar::imag(2.0), 0.5);
    let spec = AnsatzSpec::new(vec![ComplexScalar::I, -ComplexScalar::I]);
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("cos/sin 64 starts", |b| b.iter(|| search(&eq, black_box(&spec)).unwrap()));
    group.finish();
}

criterion_group!(benches, algebra, equation, growth, ansatz);
criterion_main!(benches);
