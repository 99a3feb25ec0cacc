//! Dense univariate polynomials over [`ComplexScalar`].
//!
//! Coefficients are stored in ascending order of degree and the vector never
//! ends in an approximately-zero entry, so the zero polynomial is the empty
//! vector and its degree is `None`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{principal_nth_root, roots_of_unity, tolerance, ComplexScalar};

#[derive(Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<ComplexScalar>,
}

impl Poly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(ComplexScalar::ONE)
    }

    /// The identity polynomial `z`.
    pub fn z() -> Self {
        Self::monomial(ComplexScalar::ONE, 1)
    }

    pub fn constant(c: ComplexScalar) -> Self {
        Self::new(vec![c])
    }

    /// `c * z^degree`.
    pub fn monomial(c: ComplexScalar, degree: usize) -> Self {
        let mut coeffs = vec![ComplexScalar::ZERO; degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    /// Builds a polynomial from ascending coefficients, trimming trailing
    /// entries that are approximately zero in the absolute sense.
    pub fn new(coeffs: Vec<ComplexScalar>) -> Self {
        Self::with_scale(coeffs, 0.0)
    }

    /// Builds a polynomial whose trailing entries are trimmed relative to
    /// `scale`, the magnitude of the operands that produced them.
    pub(crate) fn with_scale(mut coeffs: Vec<ComplexScalar>, scale: f64) -> Self {
        let thr = tolerance().zero_threshold(scale);
        while coeffs.last().is_some_and(|c| c.norm() <= thr) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    /// Wraps coefficients that the caller has already cleaned.
    pub(crate) fn from_clean(coeffs: Vec<ComplexScalar>) -> Self {
        debug_assert!(coeffs.last().is_none_or(|c| c.norm() > 0.0));
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ComplexScalar> {
        self.coeffs
    }

    /// Coefficient of `z^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> ComplexScalar {
        self.coeffs.get(i).copied().unwrap_or(ComplexScalar::ZERO)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<ComplexScalar> {
        self.coeffs.last().copied()
    }

    pub fn constant_term(&self) -> ComplexScalar {
        self.coeff(0)
    }

    /// Largest coefficient modulus (0 for the zero polynomial).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: ComplexScalar) -> ComplexScalar {
        self.coeffs
            .iter()
            .rev()
            .fold(ComplexScalar::ZERO, |acc, &c| acc * z + c)
    }

    pub fn scale(&self, c: ComplexScalar) -> Self {
        Self::with_scale(
            self.coeffs.iter().map(|&a| a * c).collect(),
            self.max_abs() * c.norm(),
        )
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as f64)
            .collect();
        Self::with_scale(coeffs, self.max_abs())
    }

    /// The same polynomial with its constant term set to zero.
    pub fn without_constant(&self) -> Self {
        if self.coeffs.is_empty() {
            return Self::zero();
        }
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = ComplexScalar::ZERO;
        Self::new(coeffs)
    }

    /// `p(z + c)`, expanded by Horner's scheme in the shifted variable.
    pub fn compose_shift(&self, c: ComplexScalar) -> Self {
        let mut out: Vec<ComplexScalar> = Vec::with_capacity(self.coeffs.len());
        let mut scale: f64 = 0.0;
        for &a in self.coeffs.iter().rev() {
            // out <- out * (z + c) + a
            out.push(ComplexScalar::ZERO);
            for i in (1..out.len()).rev() {
                out[i] = out[i - 1] + out[i] * c;
            }
            out[0] = out[0] * c + a;
            scale = scale.max(out.iter().map(|x| x.norm()).fold(0.0, f64::max));
        }
        Self::with_scale(out, scale)
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

    /// Whether `self` and `other` agree coefficientwise within tolerance,
    /// measured relative to the larger of the two.
    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = tolerance();
        let thr = tol.zero_threshold(self.max_abs().max(other.max_abs()));
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).all(|i| (self.coeff(i) - other.coeff(i)).norm() <= thr)
    }

    /// Every polynomial `R` with `R^n ≈ self`.
    ///
    /// Returns the empty list when `self` is not a perfect `n`-th power,
    /// otherwise exactly `n` roots: one formal root times each `n`-th root of
    /// unity, in root order of the unity factor.
    pub fn nth_root(&self, n: u32) -> Result<Vec<Poly>> {
        if n == 0 {
            return Err(Error::InvalidArgument("root index must be at least 1".into()));
        }
        let Some(deg) = self.degree() else {
            return Err(Error::ZeroFunction);
        };
        if deg % n as usize != 0 {
            return Ok(Vec::new());
        }
        let root_deg = deg / n as usize;
        // Reversed coefficients: a(w) = w^deg p(1/w), a(0) = leading coefficient.
        let a: Vec<ComplexScalar> = self.coeffs.iter().rev().copied().collect();
        let lead_root = principal_nth_root(a[0], n);
        // s(w) = a(w)^(1/n) as a power series, from n s' a = a' s.
        let nf = n as f64;
        let mut s = vec![ComplexScalar::ZERO; root_deg + 1];
        s[0] = lead_root;
        for k in 1..=root_deg {
            let mut acc = ComplexScalar::ZERO;
            for j in 1..=k {
                acc += a.get(j).copied().unwrap_or_default() * s[k - j] * j as f64;
            }
            for (j, &sj) in s.iter().enumerate().take(k).skip(1) {
                acc -= sj * a.get(k - j).copied().unwrap_or_default() * (nf * j as f64);
            }
            s[k] = acc / (a[0] * (nf * k as f64));
        }
        s.reverse();
        let candidate = Poly::new(s);
        let tol = tolerance();
        let diff = &candidate.pow(n) - self;
        if diff.max_abs() > tol.zero_threshold(self.max_abs()) {
            return Ok(Vec::new());
        }
        Ok(roots_of_unity(n)?
            .into_iter()
            .map(|zeta| candidate.scale(zeta))
            .collect())
    }
}

fn combine(p: &Poly, q: &Poly, sign: f64) -> Poly {
    let len = p.coeffs.len().max(q.coeffs.len());
    let coeffs = (0..len)
        .map(|i| p.coeff(i) + q.coeff(i) * sign)
        .collect();
    Poly::with_scale(coeffs, p.max_abs().max(q.max_abs()))
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        combine(self, rhs, -1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ComplexScalar::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::with_scale(out, self.max_abs() * rhs.max_abs())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c:?}")?,
                1 => write!(f, "{c:?}z")?,
                _ => write!(f, "{c:?}z^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn re(x: f64) -> ComplexScalar {
        ComplexScalar::real(x)
    }

    fn poly(c: &[f64]) -> Poly {
        Poly::new(c.iter().map(|&x| re(x)).collect())
    }

    #[test]
    fn difference_of_squares() {
        let p = poly(&[1.0, 1.0]);
        let q = poly(&[-1.0, 1.0]);
        assert_eq!(&p * &q, poly(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn additive_identity_and_cancellation() {
        let p = poly(&[3.0, -2.0, 5.0]);
        assert_eq!(&p + &Poly::zero(), p);
        let zz = &Poly::z() * &Poly::z();
        assert!((&zz - &Poly::monomial(re(1.0), 2)).is_zero());
        assert_eq!(Poly::zero().degree(), None);
    }

    #[test]
    fn shift_cases() {
        let p = Poly::monomial(re(1.0), 2);
        assert_eq!(p.compose_shift(re(1.0)), poly(&[1.0, 2.0, 1.0]));
        let z = Poly::z().compose_shift(re(2.0 * PI));
        assert!(z.approx_eq(&poly(&[2.0 * PI, 1.0])));
        let q = Poly::new(vec![
            ComplexScalar::new(0.5, -1.0),
            ComplexScalar::new(2.0, 0.25),
            ComplexScalar::new(-1.0, 3.0),
            ComplexScalar::new(0.0, 1.0),
        ]);
        let c = ComplexScalar::new(0.7, -1.3);
        let back = q.compose_shift(c).compose_shift(-c);
        assert!(back.approx_eq(&q));
        assert_eq!(back.degree(), Some(3));
    }

    #[test]
    fn nth_root_of_constant_gives_unity_roots() {
        let roots = Poly::one().nth_root(5).unwrap();
        assert_eq!(roots.len(), 5);
        for r in &roots {
            assert_eq!(r.degree(), Some(0));
            assert!((r.coeff(0).powi(5) - re(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn nth_root_of_square() {
        let roots = poly(&[1.0, 2.0, 1.0]).nth_root(2).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().any(|r| r.approx_eq(&poly(&[1.0, 1.0]))));
        assert!(roots.iter().any(|r| r.approx_eq(&poly(&[-1.0, -1.0]))));
    }

    #[test]
    fn nth_root_rejects_non_powers() {
        assert!(Poly::z().nth_root(2).unwrap().is_empty());
        assert!(poly(&[1.0, 3.0, 1.0]).nth_root(2).unwrap().is_empty());
        assert!(Poly::one().nth_root(0).is_err());
        assert!(matches!(Poly::zero().nth_root(2), Err(Error::ZeroFunction)));
    }

    #[test]
    fn nth_root_of_complex_cube() {
        let base = Poly::new(vec![
            ComplexScalar::new(1.0, -2.0),
            ComplexScalar::new(0.5, 0.5),
            ComplexScalar::new(0.0, 3.0),
        ]);
        let p = base.pow(3);
        let roots = p.nth_root(3).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots.iter().any(|r| r.approx_eq(&base)));
        for r in &roots {
            assert!(r.pow(3).approx_eq(&p));
        }
    }
}
