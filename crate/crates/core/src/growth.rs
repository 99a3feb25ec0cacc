//! Growth functionals of exponential polynomials.
//!
//! For an exponential polynomial whose largest exponent degree is `q`, the
//! order and lower order both equal `q` and the hyper-order is `0`; these are
//! returned exactly. The proximity function
//! `m(r, f) = (1/2π) ∫ log⁺|f(re^{iθ})| dθ` and the zero count in `|z| < r`
//! are computed numerically. For entire `f` the characteristic `T(r, f)` is
//! `m(r, f)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exp_poly::ExpPoly;
use crate::scalar::ComplexScalar;

pub const DEFAULT_SAMPLES: usize = 4096;
pub const MIN_SAMPLES: usize = 64;
const MAX_SAMPLES: usize = 1 << 21;
const RELATIVE_CHANGE: f64 = 1e-3;
/// Value substituted for `log|f|` at an exact zero on the circle.
const LOG_ZERO_CLAMP: f64 = -1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthSample {
    pub radius: f64,
    pub proximity: f64,
    pub zero_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub order: f64,
    pub lower_order: f64,
    pub hyper_order: f64,
    pub samples: Vec<GrowthSample>,
}

/// Outcome of checking `d1 r^q <= T(r, f) <= d2 r^q` on a set of radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub order: u32,
    /// `(r, T(r)/r^q)` per radius.
    pub ratios: Vec<(f64, f64)>,
    pub d1: f64,
    pub d2: f64,
    pub within_bounds: bool,
    /// Slope of `log T` against `log r` over the top decade of radii.
    pub estimated_order: f64,
    pub order_consistent: bool,
    /// `(r, m(r, 1/f)/r^q)`, present when `f` has a polynomial term.
    pub reciprocal_ratios: Option<Vec<(f64, f64)>>,
    pub reciprocal_small: Option<bool>,
}

/// Order of growth, `max deg Q_j` (0 for a polynomial).
pub fn order(f: &ExpPoly) -> Result<u32> {
    f.max_exponent_degree()
        .map(|d| d as u32)
        .ok_or(Error::ZeroFunction)
}

/// Lower order; equal to the order for every nonzero exponential polynomial.
pub fn lower_order(f: &ExpPoly) -> Result<u32> {
    order(f)
}

/// Hyper-order; exactly zero for every nonzero exponential polynomial.
pub fn hyper_order(f: &ExpPoly) -> Result<f64> {
    order(f).map(|_| 0.0)
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("radius must be positive, got {r}")))
    }
}

fn circle_point(r: f64, k: usize, n: usize) -> ComplexScalar {
    ComplexScalar::from_polar(r, 2.0 * PI * k as f64 / n as f64)
}

/// Trapezoid rule for the mean of a periodic `g` over `[0, 2π)`, doubling
/// the node count until the relative change drops below `RELATIVE_CHANGE`.
fn periodic_mean<G>(g: G, initial: usize) -> Result<f64>
where
    G: Fn(usize, usize) -> f64 + Sync,
{
    let mut n = initial;
    let mut sum: f64 = (0..n).into_par_iter().map(|k| g(k, n)).sum();
    let mut mean = sum / n as f64;
    while n < MAX_SAMPLES {
        let odd: f64 = (0..n).into_par_iter().map(|k| g(2 * k + 1, 2 * n)).sum();
        sum += odd;
        n *= 2;
        let refined = sum / n as f64;
        let change = (refined - mean).abs();
        mean = refined;
        if change <= RELATIVE_CHANGE * refined.abs() + 1e-12 {
            return Ok(mean);
        }
    }
    Err(Error::Quadrature(format!(
        "mean did not settle within {MAX_SAMPLES} samples"
    )))
}

fn log_plus(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.max(0.0)
    }
}

fn clamped_log_abs(f: &ExpPoly, z: ComplexScalar) -> f64 {
    let v = f.log_abs(z);
    if v.is_finite() {
        v
    } else {
        LOG_ZERO_CLAMP
    }
}

/// `m(r, f)` by trapezoid quadrature starting from `n_samples` nodes.
pub fn proximity(f: &ExpPoly, r: f64, n_samples: usize) -> Result<f64> {
    check_radius(r)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {n_samples}"
        )));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    periodic_mean(
        |k, n| log_plus(clamped_log_abs(f, circle_point(r, k, n))),
        n_samples,
    )
}

/// `m(r, 1/f)`, i.e. the mean of `log⁺ 1/|f|` on the circle.
pub fn reciprocal_proximity(f: &ExpPoly, r: f64, n_samples: usize) -> Result<f64> {
    check_radius(r)?;
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "at least {MIN_SAMPLES} samples required, got {n_samples}"
        )));
    }
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    periodic_mean(
        |k, n| log_plus(-f.log_abs(circle_point(r, k, n))).min(-LOG_ZERO_CLAMP),
        n_samples,
    )
}

/// Number of zeros of `f` in `|z| < r`, with multiplicity, from the
/// argument principle `(1/2πi) ∮ f'/f dz`.
pub fn zeros_in_disk(f: &ExpPoly, r: f64) -> Result<u64> {
    check_radius(r)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let df = f.differentiate(1);
    let integrand = |k: usize, n: usize| -> Option<ComplexScalar> {
        let z = circle_point(r, k, n);
        let shift = f.max_real_exponent(z).max(df.max_real_exponent(z));
        let fv = f.eval_scaled(z, shift);
        if fv.norm() == 0.0 {
            return None;
        }
        Some(df.eval_scaled(z, shift) / fv * z)
    };
    let sum_over = |ks: Vec<usize>, n: usize| -> Option<ComplexScalar> {
        ks.into_par_iter()
            .map(|k| integrand(k, n))
            .try_reduce(|| ComplexScalar::ZERO, |a, b| Some(a + b))
    };
    let too_close = |residual: f64| Error::CircleTooClose { radius: r, residual };

    let mut n = 256usize;
    let mut sum = sum_over((0..n).collect(), n).ok_or_else(|| too_close(f64::INFINITY))?;
    let mut mean = sum.scale(1.0 / n as f64);
    let mut converged = false;
    while n < MAX_SAMPLES {
        let odd = sum_over((0..n).map(|k| 2 * k + 1).collect(), 2 * n)
            .ok_or_else(|| too_close(f64::INFINITY))?;
        sum += odd;
        n *= 2;
        let refined = sum.scale(1.0 / n as f64);
        let change = (refined - mean).norm();
        mean = refined;
        if change < 1e-6 {
            converged = true;
            break;
        }
    }
    let count = mean.re.round();
    let residual = (mean.re - count).abs() + mean.im.abs();
    if residual > 0.1 || count < 0.0 {
        return Err(too_close(residual));
    }
    if !converged && residual > 1e-3 {
        return Err(Error::Quadrature(format!(
            "winding integral at r = {r} did not converge"
        )));
    }
    Ok(count as u64)
}

/// Zero count at `r`, nudging the radius off a zero on the circle.
fn zeros_near(f: &ExpPoly, r: f64) -> Result<(f64, u64)> {
    let mut last = None;
    for step in [0.0, 1e-6, -1e-6, 1e-4, -1e-4] {
        let radius = r * (1.0 + step);
        match zeros_in_disk(f, radius) {
            Ok(n) => return Ok((radius, n)),
            Err(e @ Error::CircleTooClose { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("at least one radius required".into()));
    }
    for &r in radii {
        check_radius(r)?;
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("radii must be strictly increasing".into()));
    }
    Ok(())
}

/// Exact order data plus sampled `(r, m(r), n(r))`.
pub fn growth_report(f: &ExpPoly, radii: &[f64]) -> Result<GrowthReport> {
    let q = order(f)? as f64;
    check_radii(radii)?;
    let samples = radii
        .iter()
        .map(|&r| {
            let (radius, zero_count) = zeros_near(f, r)?;
            Ok(GrowthSample {
                radius,
                proximity: proximity(f, radius, DEFAULT_SAMPLES)?,
                zero_count,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GrowthReport {
        order: q,
        lower_order: q,
        hyper_order: 0.0,
        samples,
    })
}

/// Least-squares slope of `ys` against `xs`.
fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Checks that `T(r, f)/r^q` stays within positive finite bounds over
/// `radii`, and that `m(r, 1/f)` is small against `r^q` when `f` has a
/// nonzero polynomial term.
///
/// `within_bounds` asserts only that such `d1 <= d2` exist on the sampled
/// range; it does not pin the constants. `reciprocal_small` holds when the
/// reciprocal ratio at the largest radius is below a tenth of `d1`.
pub fn check_growth_bounds(f: &ExpPoly, radii: &[f64]) -> Result<BoundsReport> {
    let q = order(f)?;
    if q == 0 {
        return Err(Error::Hypothesis(
            "growth bounds need an exponential term (order q >= 1)".into(),
        ));
    }
    check_radii(radii)?;
    let qf = q as f64;
    let ratios = radii
        .par_iter()
        .map(|&r| Ok((r, proximity(f, r, DEFAULT_SAMPLES)? / r.powf(qf))))
        .collect::<Result<Vec<_>>>()?;
    let d1 = ratios.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    let d2 = ratios.iter().map(|x| x.1).fold(0.0, f64::max);
    let within_bounds = d1 > 0.0 && d2.is_finite() && d1 <= d2;

    let r_max = radii[radii.len() - 1];
    let top: Vec<(f64, f64)> = ratios
        .iter()
        .filter(|(r, _)| *r >= r_max / 10.0)
        .map(|&(r, ratio)| (r.ln(), (ratio * r.powf(qf)).ln()))
        .collect();
    let estimated_order = if top.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = top.into_iter().unzip();
        slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let order_consistent = estimated_order.is_finite() && (estimated_order - qf).abs() <= 0.1;

    let (reciprocal_ratios, reciprocal_small) = if f.polynomial_part().is_some() {
        let rr = radii
            .par_iter()
            .map(|&r| Ok((r, reciprocal_proximity(f, r, DEFAULT_SAMPLES)? / r.powf(qf))))
            .collect::<Result<Vec<_>>>()?;
        let last = rr[rr.len() - 1].1;
        (Some(rr), Some(last < 0.1 * d1))
    } else {
        (None, None)
    };

    Ok(BoundsReport {
        order: q,
        ratios,
        d1,
        d2,
        within_bounds,
        estimated_order,
        order_consistent,
        reciprocal_ratios,
        reciprocal_small,
    })
}
