//! The equation `f^n(z) + a (f^(l)(z + c))^m = p1(z) e^{a1 z^k} + p2(z) e^{a2 z^k}`
//! and substitution-based verification of candidate solutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::growth;
use crate::poly::Poly;
use crate::scalar::{tolerance, ComplexScalar};

/// One forcing term `coeff(z) e^{rate z^k}` of the right-hand side.
#[derive(Debug, Clone, PartialEq)]
pub struct Forcing {
    pub coeff: ExpPoly,
    pub rate: ComplexScalar,
}

impl Forcing {
    pub fn new(coeff: ExpPoly, rate: ComplexScalar) -> Self {
        Self { coeff, rate }
    }

    /// Constant coefficient `p` with rate `rate`.
    pub fn constant(p: ComplexScalar, rate: ComplexScalar) -> Self {
        Self::new(ExpPoly::constant(p), rate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FermatDde {
    n: u32,
    m: u32,
    l: u32,
    a: ComplexScalar,
    c: ComplexScalar,
    p1: ExpPoly,
    a1: ComplexScalar,
    p2: ExpPoly,
    a2: ComplexScalar,
    k: u32,
}

impl FermatDde {
    /// Builds the equation. Only `n`, `m` and `k` are checked here (all must
    /// be positive); the theorem hypotheses on `a`, `a1`, `a2`, `p1`, `p2`
    /// are checked by the solvers that need them.
    pub fn new(
        (n, m): (u32, u32),
        l: u32,
        a: ComplexScalar,
        c: ComplexScalar,
        [first, second]: [Forcing; 2],
        k: u32,
    ) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidArgument(format!(
                "powers n and m must be positive, got n={n} m={m}"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("exponent degree k must be positive".into()));
        }
        for (name, v) in [("a", a), ("c", c), ("a1", first.rate), ("a2", second.rate)] {
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("{name} = {v:?}")));
            }
        }
        Ok(Self {
            n,
            m,
            l,
            a,
            c,
            p1: first.coeff,
            a1: first.rate,
            p2: second.coeff,
            a2: second.rate,
            k,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn a(&self) -> ComplexScalar {
        self.a
    }
    pub fn c(&self) -> ComplexScalar {
        self.c
    }
    pub fn p1(&self) -> &ExpPoly {
        &self.p1
    }
    pub fn p2(&self) -> &ExpPoly {
        &self.p2
    }
    pub fn a1(&self) -> ComplexScalar {
        self.a1
    }
    pub fn a2(&self) -> ComplexScalar {
        self.a2
    }
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Same equation with different forcing coefficients.
    pub fn with_coefficients(&self, p1: ExpPoly, p2: ExpPoly) -> Self {
        Self {
            p1,
            p2,
            ..self.clone()
        }
    }

    /// `p1 e^{a1 z^k} + p2 e^{a2 z^k}`, merged when `a1 = a2`.
    pub fn rhs(&self) -> ExpPoly {
        let k = self.k as usize;
        &(&self.p1 * &ExpPoly::exp_of(Poly::monomial(self.a1, k)))
            + &(&self.p2 * &ExpPoly::exp_of(Poly::monomial(self.a2, k)))
    }

    /// `f^(l)(z + c)`.
    pub fn delay_term(&self, f: &ExpPoly) -> ExpPoly {
        f.shift(self.c).differentiate(self.l)
    }

    /// Left-hand side minus right-hand side, in canonical form.
    pub fn residual(&self, f: &ExpPoly) -> ExpPoly {
        let lhs_power = f.pow(self.n);
        let delayed = self.delay_term(f).pow(self.m).scale(self.a);
        let mut raw = lhs_power.to_raw();
        raw.extend(delayed.to_raw());
        raw.extend((-&self.rhs()).to_raw());
        crate::exp_poly::normalize(raw)
    }

    /// Substitutes `f` and records the size of what is left over.
    pub fn verify(&self, f: &ExpPoly) -> Certificate {
        let residual = self.residual(f);
        let residual_max_coeff = residual.max_coeff_abs();
        let tol = tolerance();
        let verified = residual_max_coeff <= tol.zero_threshold(self.rhs().max_coeff_abs());
        Certificate {
            candidate: f.clone(),
            residual_max_coeff,
            verified,
        }
    }

    /// Whether `p1`, `p2` are nonzero with exponent degree below `k`, the
    /// "order less than k" hypothesis inside the exponential-polynomial class.
    pub fn coefficient_order_below_k(&self) -> bool {
        [&self.p1, &self.p2].iter().all(|p| {
            growth::order(p).is_ok_and(|q| q < self.k)
        })
    }
}

/// The result of substituting a candidate into an equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub candidate: ExpPoly,
    pub residual_max_coeff: f64,
    pub verified: bool,
}
