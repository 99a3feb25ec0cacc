#![allow(dead_code)]

use std::f64::consts::PI;

use fermat_dde_core::{normalize, ComplexScalar, ExpPoly, FermatDde, Forcing, Poly};
use proptest::collection::vec;
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

pub fn r(x: f64) -> ComplexScalar {
    ComplexScalar::real(x)
}

pub fn e(coeff: ComplexScalar, w: ComplexScalar) -> ExpPoly {
    ExpPoly::monomial_exp(coeff, w, 1)
}

pub fn scalar(bound: f64) -> impl Strategy<Value = ComplexScalar> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| ComplexScalar::new(re, im))
}

pub fn poly(max_degree: usize) -> impl Strategy<Value = Poly> {
    vec(scalar(2.0), 1..=max_degree + 1).prop_map(Poly::new)
}

/// Exponent polynomial of degree 1 or 2 with zero constant term.
pub fn exponent() -> impl Strategy<Value = Poly> {
    vec(scalar(1.5), 1..=2).prop_map(|mut cs| {
        cs.insert(0, ComplexScalar::ZERO);
        Poly::new(cs)
    })
}

/// Small exponential polynomials: up to 3 terms, coefficient degree <= 2,
/// sometimes with a pure polynomial part.
pub fn exp_poly() -> impl Strategy<Value = ExpPoly> {
    (
        vec((poly(2), exponent()), 0..=3),
        proptest::option::of(poly(1)),
    )
        .prop_map(|(mut raw, plain)| {
            if let Some(p) = plain {
                raw.push((p, Poly::zero()));
            }
            normalize(raw)
        })
}

pub fn nonzero_exp_poly() -> impl Strategy<Value = ExpPoly> {
    exp_poly().prop_filter("nonzero", |f| !f.is_zero())
}

pub fn shift() -> impl Strategy<Value = ComplexScalar> {
    scalar(1.0)
}

pub fn equation(
    (n, m): (u32, u32),
    l: u32,
    a: ComplexScalar,
    delay: ComplexScalar,
    (p1, a1): (ComplexScalar, ComplexScalar),
    (p2, a2): (ComplexScalar, ComplexScalar),
) -> FermatDde {
    FermatDde::new(
        (n, m),
        l,
        a,
        delay,
        [Forcing::constant(p1, a1), Forcing::constant(p2, a2)],
        1,
    )
    .expect("valid equation")
}

pub fn two_pi() -> ComplexScalar {
    r(2.0 * PI)
}

/// `f^n + a (f')^n = p1 e^{bz} + p2 e^{-bz}`.
pub fn symmetric(n: u32, a: ComplexScalar, b: ComplexScalar, p1: ComplexScalar, p2: ComplexScalar) -> FermatDde {
    equation((n, n), 1, a, ComplexScalar::ZERO, (p1, b), (p2, -b))
}

/// The three equations solved by `e^{iz}` with `n, m` in `{4, 5}`.
pub fn five_four_equations() -> Vec<FermatDde> {
    let i = ComplexScalar::I;
    vec![
        equation((5, 4), 0, r(1.0), two_pi(), (r(1.0), i * 5.0), (r(1.0), i * 4.0)),
        equation((5, 4), 1, r(1.0), two_pi(), (r(1.0), i * 5.0), (r(1.0), i * 4.0)),
        equation((4, 5), 2, r(1.0), two_pi(), (r(1.0), i * 4.0), (r(-1.0), i * 5.0)),
    ]
}

/// `f^4 - (f'(z + 2π))^4 = 8 e^{2iz} + 8 e^{-2iz}`.
pub fn quartic_delay_equation() -> FermatDde {
    let i = ComplexScalar::I;
    equation((4, 4), 1, r(-1.0), two_pi(), (r(8.0), i * 2.0), (r(8.0), i * -2.0))
}

/// `f^5 + f^2(z + 2π) = e^{5iz} + e^{2iz}` and the `(2, 5)` mirror.
pub fn difference_equations() -> Vec<FermatDde> {
    let i = ComplexScalar::I;
    vec![
        equation((5, 2), 0, r(1.0), two_pi(), (r(1.0), i * 5.0), (r(1.0), i * 2.0)),
        equation((2, 5), 0, r(1.0), two_pi(), (r(1.0), i * 2.0), (r(1.0), i * 5.0)),
    ]
}

/// `f^2 - (1/9)(f')^2 = (8/9) e^{2z} + (8/3) e^{-2z}`.
pub fn three_halves_equation() -> FermatDde {
    symmetric(2, r(-1.0 / 9.0), r(2.0), r(8.0 / 9.0), r(8.0 / 3.0))
}

pub fn cos_sin_equation() -> FermatDde {
    symmetric(2, r(-1.0), c(0.0, 2.0), r(0.5), r(0.5))
}

pub fn quartic_equation() -> FermatDde {
    symmetric(4, r(-1.0), c(0.0, 2.0), r(0.5), r(0.5))
}

/// `±cos z` and `±i sin z` as exponential sums.
pub fn cos_sin_solutions() -> Vec<ExpPoly> {
    let i = ComplexScalar::I;
    let half = r(0.5);
    let cos = &e(half, i) + &e(half, -i);
    let isin = &e(half, i) - &e(half, -i);
    vec![cos.clone(), -&cos, isin.clone(), -&isin]
}
