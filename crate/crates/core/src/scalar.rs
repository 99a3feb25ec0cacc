//! Complex scalars and the process-wide tolerance policy.
//!
//! Every coefficient in the engine is a [`ComplexScalar`]. Equality between
//! scalars is approximate: `a ≈ b` iff `|a - b| <= abs + rel * max(|a|, |b|)`
//! where `abs` and `rel` come from the current [`Tolerance`].

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_REL_TOL: f64 = 1e-9;

static ABS_TOL_BITS: AtomicU64 = AtomicU64::new(DEFAULT_ABS_TOL.to_bits());
static REL_TOL_BITS: AtomicU64 = AtomicU64::new(DEFAULT_REL_TOL.to_bits());

/// Absolute and relative slack used by every approximate comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: DEFAULT_ABS_TOL,
            rel: DEFAULT_REL_TOL,
        }
    }
}

impl Tolerance {
    /// Threshold below which a value is treated as zero, given the magnitude
    /// of the operands that produced it.
    pub fn zero_threshold(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

/// The tolerance currently in force.
pub fn tolerance() -> Tolerance {
    Tolerance {
        abs: f64::from_bits(ABS_TOL_BITS.load(AtomicOrdering::Relaxed)),
        rel: f64::from_bits(REL_TOL_BITS.load(AtomicOrdering::Relaxed)),
    }
}

/// Replaces the process-wide tolerance. Both components must be finite and
/// non-negative.
pub fn set_tolerance(tol: Tolerance) -> Result<()> {
    if !(tol.abs.is_finite() && tol.rel.is_finite() && tol.abs >= 0.0 && tol.rel >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be finite and non-negative, got abs={} rel={}",
            tol.abs, tol.rel
        )));
    }
    ABS_TOL_BITS.store(tol.abs.to_bits(), AtomicOrdering::Relaxed);
    REL_TOL_BITS.store(tol.rel.to_bits(), AtomicOrdering::Relaxed);
    Ok(())
}

/// A finite complex number.
#[derive(Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: f64,
    pub im: f64,
}

impl ComplexScalar {
    pub const ZERO: Self = Self { re: 0.0, im: 0.0 };
    pub const ONE: Self = Self { re: 1.0, im: 0.0 };
    pub const I: Self = Self { re: 0.0, im: 1.0 };

    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub const fn imag(im: f64) -> Self {
        Self { re: 0.0, im }
    }

    /// Builds a scalar, rejecting NaN and infinite components.
    pub fn try_new(re: f64, im: f64) -> Result<Self> {
        if re.is_finite() && im.is_finite() {
            Ok(Self { re, im })
        } else {
            Err(Error::NonFinite(format!("({re}, {im})")))
        }
    }

    pub fn from_polar(modulus: f64, arg: f64) -> Self {
        Self::from(Complex64::from_polar(modulus, arg))
    }

    pub fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    /// Principal argument in (-π, π].
    pub fn arg(self) -> f64 {
        let a = self.im.atan2(self.re);
        if a == -PI {
            PI
        } else {
            a
        }
    }

    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }

    pub fn exp(self) -> Self {
        Self::from(Complex64::from(self).exp())
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn powi(self, n: i32) -> Self {
        Self::from(Complex64::from(self).powi(n))
    }

    pub fn scale(self, t: f64) -> Self {
        Self::new(self.re * t, self.im * t)
    }

    pub fn approx_eq(self, other: Self) -> bool {
        self.approx_eq_with(other, &tolerance())
    }

    pub fn approx_eq_with(self, other: Self, tol: &Tolerance) -> bool {
        (self - other).norm() <= tol.zero_threshold(self.norm().max(other.norm()))
    }

    /// `|self| <= abs`, i.e. approx-equal to zero.
    pub fn is_approx_zero(self) -> bool {
        self.norm() <= tolerance().abs
    }

    /// Sets components that are pure rounding noise relative to the modulus
    /// (or below `abs`) to `+0.0`.
    pub(crate) fn snap_components(self, abs: f64) -> Self {
        let eps = (16.0 * f64::EPSILON * self.norm()).max(abs);
        let fix = |x: f64| if x.abs() <= eps { 0.0 } else { x };
        Self::new(fix(self.re), fix(self.im))
    }

    /// Total order used for canonical sorting: real part, then imaginary part.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.re
            .total_cmp(&other.re)
            .then_with(|| self.im.total_cmp(&other.im))
    }
}

impl From<Complex64> for ComplexScalar {
    fn from(c: Complex64) -> Self {
        Self::new(c.re, c.im)
    }
}

impl From<ComplexScalar> for Complex64 {
    fn from(c: ComplexScalar) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<f64> for ComplexScalar {
    fn from(re: f64) -> Self {
        Self::real(re)
    }
}

impl fmt::Debug for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}{:+?}i)", self.re, self.im)
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else if self.re == 0.0 {
            write!(f, "{}i", self.im)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

impl Add for ComplexScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Div for ComplexScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::from(Complex64::from(self) / Complex64::from(rhs))
    }
}

impl Neg for ComplexScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.re, -self.im)
    }
}

impl AddAssign for ComplexScalar {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for ComplexScalar {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for ComplexScalar {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl Mul<f64> for ComplexScalar {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl std::iter::Sum for ComplexScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

/// Orders roots by ascending principal argument in (-π, π], ties by modulus.
pub fn root_order(a: &ComplexScalar, b: &ComplexScalar) -> Ordering {
    a.arg()
        .total_cmp(&b.arg())
        .then_with(|| a.norm().total_cmp(&b.norm()))
}

/// The root of `x^n = w` with argument `arg(w) / n`.
pub fn principal_nth_root(w: ComplexScalar, n: u32) -> ComplexScalar {
    ComplexScalar::from_polar(w.norm().powf(1.0 / n as f64), w.arg() / n as f64)
}

/// All `n` solutions of `x^n = w`.
///
/// For `w = 0` this returns `n` zeros; callers that need a nonzero root use
/// [`nonzero_nth_roots`].
pub fn complex_nth_roots(w: ComplexScalar, n: u32) -> Result<Vec<ComplexScalar>> {
    if n == 0 {
        return Err(Error::InvalidArgument("root index must be at least 1".into()));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite(format!("{w:?}")));
    }
    if w.norm() == 0.0 {
        return Ok(vec![ComplexScalar::ZERO; n as usize]);
    }
    let modulus = w.norm().powf(1.0 / n as f64);
    let base = w.arg() / n as f64;
    let mut roots: Vec<ComplexScalar> = (0..n)
        .map(|j| {
            let theta = base + 2.0 * PI * j as f64 / n as f64;
            ComplexScalar::from_polar(modulus, theta).snap_components(0.0)
        })
        .collect();
    roots.sort_by(root_order);
    Ok(roots)
}

/// Like [`complex_nth_roots`] but rejects a radicand that is approximately zero.
pub fn nonzero_nth_roots(w: ComplexScalar, n: u32) -> Result<Vec<ComplexScalar>> {
    if w.is_approx_zero() {
        return Err(Error::ZeroRadicand);
    }
    complex_nth_roots(w, n)
}

/// The `n`-th roots of unity in root order.
pub fn roots_of_unity(n: u32) -> Result<Vec<ComplexScalar>> {
    complex_nth_roots(ComplexScalar::ONE, n)
}
