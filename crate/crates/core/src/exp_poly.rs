//! Exponential polynomials `Σ P_j(z) e^{Q_j(z)}`.
//!
//! An [`ExpPoly`] is always kept in canonical form:
//!
//! * every exponent `Q_j` has zero constant term (the factor `e^{Q_j(0)}` is
//!   folded into `P_j`);
//! * exponents are pairwise distinct under approximate equality;
//! * no coefficient is the zero polynomial;
//! * terms are sorted by exponent degree, then lexicographically on the
//!   exponent coefficients (leading first, real part before imaginary part).
//!
//! Functions with pairwise non-constant exponent differences and polynomial
//! coefficients are linearly independent over the polynomials (Borel), so a
//! canonical form is empty exactly when the function vanishes identically.
//! That makes [`ExpPoly::is_zero`] a decision procedure rather than a
//! numerical test.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::scalar::{tolerance, ComplexScalar};

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    coeff: Poly,
    exponent: Poly,
}

impl ExpTerm {
    pub fn coeff(&self) -> &Poly {
        &self.coeff
    }

    pub fn exponent(&self) -> &Poly {
        &self.exponent
    }

    /// Degree of the exponent; `None` for the plain polynomial term.
    pub fn exponent_degree(&self) -> Option<usize> {
        self.exponent.degree()
    }

    fn eval_log_parts(&self, z: ComplexScalar) -> (ComplexScalar, ComplexScalar) {
        (self.coeff.eval(z), self.exponent.eval(z))
    }
}

#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpPoly {
    terms: Vec<ExpTerm>,
}

/// Canonicalizes a raw list of `(coefficient, exponent)` pairs.
///
/// Exponent constants are folded into coefficients, equal exponents are
/// merged, and coefficient entries are dropped when they fall below the
/// tolerance threshold relative to the largest input coefficient. Measuring
/// against the inputs (not the merged result) is what lets exact
/// cancellations, such as the residual of a true solution, come out empty.
pub fn normalize(raw: Vec<(Poly, Poly)>) -> ExpPoly {
    let tol = tolerance();
    let mut scale: f64 = 0.0;
    let mut groups: Vec<(Poly, Vec<ComplexScalar>)> = Vec::new();
    let mut exact: HashMap<Vec<u64>, usize> = HashMap::new();

    for (coeff, exponent) in raw {
        if coeff.is_zero() {
            continue;
        }
        let q0 = exponent.constant_term();
        let factor = if q0 == ComplexScalar::ZERO {
            ComplexScalar::ONE
        } else {
            q0.exp()
        };
        let folded: Vec<ComplexScalar> = coeff.coeffs().iter().map(|&c| c * factor).collect();
        scale = folded.iter().map(|c| c.norm()).fold(scale, f64::max);
        let exponent = clean_exponent(&exponent, tol.abs);

        let key = exponent_bits(&exponent);
        let slot = match exact.get(&key) {
            Some(&i) => Some(i),
            None => groups
                .iter()
                .position(|(e, _)| exponents_match(e, &exponent)),
        };
        match slot {
            Some(i) => {
                let acc = &mut groups[i].1;
                if acc.len() < folded.len() {
                    acc.resize(folded.len(), ComplexScalar::ZERO);
                }
                for (a, c) in acc.iter_mut().zip(folded) {
                    *a += c;
                }
                exact.insert(key, i);
            }
            None => {
                exact.insert(key, groups.len());
                groups.push((exponent, folded));
            }
        }
    }

    let thr = tol.zero_threshold(scale);
    let mut terms: Vec<ExpTerm> = groups
        .into_iter()
        .filter_map(|(exponent, mut acc)| {
            for c in acc.iter_mut() {
                if c.norm() <= thr {
                    *c = ComplexScalar::ZERO;
                }
            }
            while acc.last().is_some_and(|c| c.norm() == 0.0) {
                acc.pop();
            }
            (!acc.is_empty()).then(|| ExpTerm {
                coeff: Poly::from_clean(acc),
                exponent,
            })
        })
        .collect();
    terms.sort_by(|a, b| exponent_cmp(&a.exponent, &b.exponent));
    ExpPoly { terms }
}

fn clean_exponent(q: &Poly, abs: f64) -> Poly {
    let mut coeffs: Vec<ComplexScalar> = q.coeffs().iter().map(|c| c.snap_components(abs)).collect();
    if let Some(c0) = coeffs.first_mut() {
        *c0 = ComplexScalar::ZERO;
    }
    Poly::new(coeffs)
}

fn exponent_bits(q: &Poly) -> Vec<u64> {
    q.coeffs()
        .iter()
        .flat_map(|c| [c.re.to_bits(), c.im.to_bits()])
        .collect()
}

/// Two exponents match iff every coefficient is approximately equal.
pub fn exponents_match(p: &Poly, q: &Poly) -> bool {
    let len = p.coeffs().len().max(q.coeffs().len());
    (0..len).all(|i| p.coeff(i).approx_eq(q.coeff(i)))
}

/// Canonical term order: by exponent degree (plain polynomial first), then
/// lexicographically from the leading exponent coefficient down.
pub fn exponent_cmp(p: &Poly, q: &Poly) -> Ordering {
    p.degree().cmp(&q.degree()).then_with(|| {
        p.coeffs()
            .iter()
            .rev()
            .zip(q.coeffs().iter().rev())
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

impl ExpPoly {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ComplexScalar::ONE)
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_poly(p: Poly) -> Self {
        normalize(vec![(p, Poly::zero())])
    }

    /// `coeff * e^{exponent}`.
    pub fn term(coeff: Poly, exponent: Poly) -> Self {
        normalize(vec![(coeff, exponent)])
    }

    /// `c * e^{w z^k}`.
    pub fn monomial_exp(c: ComplexScalar, w: ComplexScalar, k: usize) -> Self {
        Self::term(Poly::constant(c), Poly::monomial(w, k))
    }

    /// `e^{exponent}`.
    pub fn exp_of(exponent: Poly) -> Self {
        Self::term(Poly::one(), exponent)
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The identity test: true iff the canonical form has no terms, which by
    /// Borel's theorem is equivalent to the function vanishing identically.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn equals(&self, other: &Self) -> bool {
        (self - other).is_zero()
    }

    /// Raw `(coeff, exponent)` pairs, suitable for feeding back to [`normalize`].
    pub fn to_raw(&self) -> Vec<(Poly, Poly)> {
        self.terms
            .iter()
            .map(|t| (t.coeff.clone(), t.exponent.clone()))
            .collect()
    }

    /// The polynomial part if `self` has no exponential terms.
    pub fn as_poly(&self) -> Option<Poly> {
        match self.terms.as_slice() {
            [] => Some(Poly::zero()),
            [t] if t.exponent.is_zero() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    /// The value if `self` is a constant function.
    pub fn as_constant(&self) -> Option<ComplexScalar> {
        self.as_poly()
            .filter(Poly::is_constant)
            .map(|p| p.constant_term())
    }

    /// Largest modulus over all coefficient entries (0 for the zero function).
    pub fn max_coeff_abs(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff.max_abs())
            .fold(0.0, f64::max)
    }

    /// Largest exponent degree; `None` for the zero function.
    pub fn max_exponent_degree(&self) -> Option<usize> {
        self.terms
            .iter()
            .map(|t| t.exponent.degree().unwrap_or(0))
            .max()
    }

    /// The term with zero exponent, if any (`H_0` in a growth context).
    pub fn polynomial_part(&self) -> Option<&Poly> {
        self.terms
            .iter()
            .find(|t| t.exponent.is_zero())
            .map(|t| &t.coeff)
    }

    pub fn scale(&self, c: ComplexScalar) -> Self {
        normalize(
            self.terms
                .iter()
                .map(|t| (t.coeff.scale(c), t.exponent.clone()))
                .collect(),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// The `l`-th derivative, using `(P e^Q)' = (P' + P Q') e^Q`.
    pub fn differentiate(&self, l: u32) -> Self {
        let mut f = self.clone();
        for _ in 0..l {
            f = normalize(
                f.terms
                    .iter()
                    .map(|t| {
                        let dq = t.exponent.derivative();
                        (&t.coeff.derivative() + &(&t.coeff * &dq), t.exponent.clone())
                    })
                    .collect(),
            );
        }
        f
    }

    /// `f(z + c)`.
    pub fn shift(&self, c: ComplexScalar) -> Self {
        if c == ComplexScalar::ZERO {
            return self.clone();
        }
        normalize(
            self.terms
                .iter()
                .map(|t| (t.coeff.compose_shift(c), t.exponent.compose_shift(c)))
                .collect(),
        )
    }

    /// Direct evaluation by term summation.
    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.terms
            .iter()
            .map(|t| {
                let (p, q) = t.eval_log_parts(z);
                p * q.exp()
            })
            .sum()
    }

    /// Largest `Re Q_j(z)` over the terms, the natural rescaling exponent.
    pub fn max_real_exponent(&self, z: ComplexScalar) -> f64 {
        self.terms
            .iter()
            .map(|t| t.exponent.eval(z).re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `f(z) * e^{-shift}`, computed without forming `e^{Q(z)}` unscaled.
    pub fn eval_scaled(&self, z: ComplexScalar, shift: f64) -> ComplexScalar {
        self.terms
            .iter()
            .map(|t| {
                let (p, q) = t.eval_log_parts(z);
                p * (q - ComplexScalar::real(shift)).exp()
            })
            .sum()
    }

    /// `log |f(z)|`, with overflow avoided by rescaling with the dominant
    /// exponential. Returns `-inf` at an exact zero.
    pub fn log_abs(&self, z: ComplexScalar) -> f64 {
        if self.terms.is_empty() {
            return f64::NEG_INFINITY;
        }
        let shift = self.max_real_exponent(z);
        shift + self.eval_scaled(z, shift).norm().ln()
    }

    /// Total order on canonical forms, used to sort solution lists.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let o = exponent_cmp(&a.exponent, &b.exponent).then_with(|| {
                a.coeff
                    .coeffs()
                    .iter()
                    .zip(b.coeff.coeffs())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or_else(|| a.coeff.coeffs().len().cmp(&b.coeff.coeffs().len()))
            });
            if o.is_ne() {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl Add for &ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        let mut raw = self.to_raw();
        raw.extend(rhs.to_raw());
        normalize(raw)
    }
}

impl Sub for &ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        let mut raw = self.to_raw();
        raw.extend(rhs.terms.iter().map(|t| (-&t.coeff, t.exponent.clone())));
        normalize(raw)
    }
}

impl Mul for &ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        let mut raw = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                raw.push((&a.coeff * &b.coeff, &a.exponent + &b.exponent));
            }
        }
        normalize(raw)
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        ExpPoly {
            terms: self
                .terms
                .iter()
                .map(|t| ExpTerm {
                    coeff: -&t.coeff,
                    exponent: t.exponent.clone(),
                })
                .collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExpPoly {
            type Output = ExpPoly;
            fn $m(self, rhs: ExpPoly) -> ExpPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.exponent.is_zero() {
                write!(f, "[{:?}]", t.coeff)?;
            } else {
                write!(f, "[{:?}]·e^[{:?}]", t.coeff, t.exponent)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const I: ComplexScalar = ComplexScalar::I;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    /// `coeff * e^{w z}`
    fn e(coeff: f64, w: ComplexScalar) -> ExpPoly {
        ExpPoly::monomial_exp(ComplexScalar::real(coeff), w, 1)
    }

    fn lin(w: ComplexScalar) -> Poly {
        Poly::monomial(w, 1)
    }

    #[test]
    fn normalize_folds_constant_exponent() {
        let f = normalize(vec![(Poly::one(), Poly::new(vec![c(0.0, PI), I]))]);
        assert_eq!(f.len(), 1);
        let t = &f.terms()[0];
        assert!(t.coeff().approx_eq(&Poly::constant(c(-1.0, 0.0))));
        assert_eq!(t.exponent(), &lin(I));
    }

    #[test]
    fn normalize_cancels_and_merges() {
        let f = normalize(vec![(Poly::one(), lin(I)), (Poly::constant(c(-1.0, 0.0)), lin(I))]);
        assert!(f.is_zero());

        let two_i = c(0.0, 2.0);
        let f = normalize(vec![
            (Poly::one(), lin(two_i)),
            (Poly::one(), lin(I)),
            (Poly::one(), lin(two_i)),
        ]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.terms()[0].exponent(), &lin(I));
        assert_eq!(f.terms()[1].coeff(), &Poly::constant(c(2.0, 0.0)));
    }

    #[test]
    fn products() {
        assert!((&e(1.0, I) * &e(1.0, c(0.0, 4.0))).equals(&e(1.0, c(0.0, 5.0))));
        assert!((&e(1.0, I) * &ExpPoly::zero()).is_zero());
        let cos2 = &e(1.0, I) + &e(1.0, -I);
        let sq = &cos2 * &cos2;
        let expected = &(&e(1.0, c(0.0, 2.0)) + &ExpPoly::constant(c(2.0, 0.0))) + &e(1.0, c(0.0, -2.0));
        assert!(sq.equals(&expected));
        assert!((&(&sq - &e(1.0, c(0.0, 2.0))) - &(&ExpPoly::constant(c(2.0, 0.0)) + &e(1.0, c(0.0, -2.0)))).is_zero());
    }

    #[test]
    fn powers() {
        assert!(e(1.0, I).pow(5).equals(&e(1.0, c(0.0, 5.0))));
        let f = &e(1.0, I) + &e(1.0, -I);
        assert!(f.pow(1).equals(&f));
        assert!(f.pow(0).equals(&ExpPoly::one()));
        // binomial coefficients 1 4 6 4 1, cross-checked by repeated multiplication
        let by_hand = &(&(&f * &f) * &f) * &f;
        let expected = [
            e(1.0, c(0.0, 4.0)),
            e(4.0, c(0.0, 2.0)),
            ExpPoly::constant(c(6.0, 0.0)),
            e(4.0, c(0.0, -2.0)),
            e(1.0, c(0.0, -4.0)),
        ]
        .iter()
        .fold(ExpPoly::zero(), |acc, t| &acc + t);
        assert!(f.pow(4).equals(&expected));
        assert!(by_hand.equals(&expected));
    }

    #[test]
    fn derivatives() {
        assert!(e(1.0, I).differentiate(1).equals(&ExpPoly::monomial_exp(I, I, 1)));
        let f = &e(1.0, I) + &e(1.0, -I);
        assert!(f.differentiate(2).equals(&-&f));
        // d/dz z e^{z^2} = (1 + 2z^2) e^{z^2}
        let g = ExpPoly::term(Poly::z(), Poly::monomial(ComplexScalar::ONE, 2));
        let expected = ExpPoly::term(
            Poly::new(vec![ComplexScalar::ONE, ComplexScalar::ZERO, c(2.0, 0.0)]),
            Poly::monomial(ComplexScalar::ONE, 2),
        );
        assert!(g.differentiate(1).equals(&expected));
    }

    #[test]
    fn shifts() {
        let f = e(1.0, I);
        let shifted = f.shift(c(2.0 * PI, 0.0));
        assert!(shifted.equals(&f));
        assert_eq!(shifted.len(), 1);
        assert_eq!(f.shift(ComplexScalar::ZERO), f);
        // e^{(z+c)^2} = e^{c^2} e^{z^2 + 2cz}
        let cc = c(0.3, -0.4);
        let g = ExpPoly::exp_of(Poly::monomial(ComplexScalar::ONE, 2));
        let expected = ExpPoly::term(
            Poly::constant((cc * cc).exp()),
            Poly::new(vec![ComplexScalar::ZERO, cc * 2.0, ComplexScalar::ONE]),
        );
        assert!(g.shift(cc).equals(&expected));
    }

    #[test]
    fn identity_test() {
        assert!((&e(1.0, I) - &e(1.0, I)).is_zero());
        assert!(!(&e(1.0, I) + &e(1.0, c(0.0, 2.0))).is_zero());
        assert!(e(1.0, I).equals(&e(1.0, I)));
        assert!(!e(1.0, I).equals(&e(2.0, I)));
        let cos = (&e(1.0, I) + &e(1.0, -I)).scale(c(0.5, 0.0));
        let raw = normalize(vec![
            (Poly::constant(c(0.25, 0.0)), lin(I)),
            (Poly::constant(c(0.25, 0.0)), lin(I)),
            (Poly::constant(c(0.5, 0.0)), lin(-I)),
        ]);
        assert!(cos.equals(&raw));
    }

    #[test]
    fn evaluation_matches_closed_form() {
        let f = &e(1.0, I) + &e(1.0, -I);
        let z = c(0.7, 0.2);
        let cos = cos(z);
        assert!((f.eval(z) - cos * 2.0).norm() < 1e-12);
        let big = e(1.0, I);
        let z = c(0.0, -800.0);
        assert!((big.log_abs(z) - 800.0).abs() < 1e-9);
    }

    fn cos(z: ComplexScalar) -> ComplexScalar {
        ComplexScalar::from(num_complex::Complex64::from(z).cos())
    }
}
