//! Finite-frequency ansatz search.
//!
//! The trial function is `f(z) = Σ_j P_j(z) e^{ω_j z}` with unknown complex
//! polynomial coefficients `P_j` of degree at most `max_poly_degree`. The
//! residual's coefficient on every reachable exponent is a polynomial map of
//! the unknowns; it is compiled once into index tables over the frequency
//! lattice and driven to zero by Gauss-Newton from seeded random starts.
//! Whatever converges is rounded to nearby simple values and then checked by
//! exact substitution, which alone decides what is reported.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::equation::{Certificate, FermatDde};
use crate::error::{Error, Result};
use crate::exp_poly::{exponents_match, ExpPoly};
use crate::poly::Poly;
use crate::scalar::ComplexScalar;

pub const DEFAULT_STARTS: u32 = 64;
const MAX_ITERATIONS: usize = 200;
const MAX_HALVINGS: usize = 20;
const POLISH_STEPS: usize = 3;
const CONVERGED_NORM: f64 = 1e-10;
const DIVERGED_NORM: f64 = 1e12;
const PRUNE_BELOW: f64 = 1e-8;
const SNAP_WITHIN: f64 = 1e-6;
const SNAP_MAX_DENOMINATOR: i64 = 16;
const SNAP_MAX_MAGNITUDE: f64 = 8.0;
const MAX_PROPOSALS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnsatzSpec {
    pub frequencies: Vec<ComplexScalar>,
    pub max_poly_degree: u32,
    pub starts: u32,
    pub seed: u64,
}

impl AnsatzSpec {
    /// Constant coefficients, 64 starts, seed 0.
    pub fn new(frequencies: Vec<ComplexScalar>) -> Self {
        Self {
            frequencies,
            max_poly_degree: 0,
            starts: DEFAULT_STARTS,
            seed: 0,
        }
    }

    pub fn with_starts(mut self, starts: u32) -> Self {
        self.starts = starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_poly_degree(mut self, degree: u32) -> Self {
        self.max_poly_degree = degree;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.frequencies.is_empty() {
            return Err(Error::InvalidArgument("at least one frequency is required".into()));
        }
        if self.starts == 0 {
            return Err(Error::InvalidArgument("starts must be positive".into()));
        }
        for (i, w) in self.frequencies.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("frequency {w:?}")));
            }
            if self.frequencies[..i].iter().any(|v| v.approx_eq(*w)) {
                return Err(Error::InvalidArgument(format!("frequency {w} is repeated")));
            }
        }
        Ok(())
    }
}

/// How a single start ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartOutcome {
    Converged,
    /// Backtracking could not reduce the residual norm.
    Stalled,
    Diverged,
    IterationLimit,
    /// The Jacobian vanished or produced a non-finite step; the start was skipped.
    Singular,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// Exactly verified solutions, deduplicated, in canonical order.
    pub found: Vec<Certificate>,
    /// Residual norm after every accepted iteration, one trace per start.
    pub residual_norm_history: Vec<Vec<f64>>,
    pub outcomes: Vec<StartOutcome>,
    /// True when every start ran to a verdict (converged or not); false when
    /// some start was skipped as singular.
    pub exhausted: bool,
    pub notes: Vec<String>,
}

/// Frequencies worth trying for `eq`, from the shapes of the known solutions:
/// `a_i / n`, `a_i / m`, `0`, `a_i`, `±(a1 - a2) / 4`, `±3 (a1 - a2) / 4` and
/// `(a1 + a2) / (n + m)`, deduplicated and capped at 12.
pub fn propose_frequencies(eq: &FermatDde) -> Result<Vec<ComplexScalar>> {
    if eq.k() != 1 {
        return Err(Error::Unsupported(format!(
            "frequency proposals need linear exponents (k = 1), got k = {}",
            eq.k()
        )));
    }
    let (a1, a2) = (eq.a1(), eq.a2());
    let n = eq.n() as f64;
    let m = eq.m() as f64;
    let quarter = (a1 - a2).scale(0.25);
    let raw = [
        a1.scale(1.0 / n),
        a2.scale(1.0 / n),
        a1.scale(1.0 / m),
        a2.scale(1.0 / m),
        ComplexScalar::ZERO,
        a1,
        a2,
        quarter,
        -quarter,
        quarter.scale(3.0),
        quarter.scale(-3.0),
        (a1 + a2).scale(1.0 / (n + m)),
    ];
    let mut out: Vec<ComplexScalar> = Vec::new();
    for w in raw {
        if !out.iter().any(|v| v.approx_eq(w)) {
            out.push(w);
        }
    }
    out.truncate(MAX_PROPOSALS);
    Ok(out)
}

/// Frequencies reachable as sums of `s` trial frequencies, with the map from
/// (level `s - 1` index, trial index) to level `s` index.
struct Level {
    freqs: Vec<ComplexScalar>,
    step: Vec<usize>,
}

/// The residual as a polynomial map on the flattened unknowns
/// `u[j * (D + 1) + d]` (coefficient of `z^d e^{ω_j z}`).
struct Compiled {
    omega: Vec<ComplexScalar>,
    width: usize,
    n: usize,
    m: usize,
    a: ComplexScalar,
    /// Per-frequency `(D+1) x (D+1)` matrix of `P ↦` coefficient of
    /// `(P e^{ωz})^(l)(z + c)`, row-major.
    delay: Vec<Vec<ComplexScalar>>,
    levels: Vec<Level>,
    key_of_n: Vec<usize>,
    key_of_m: Vec<usize>,
    rhs: Vec<(usize, Vec<ComplexScalar>)>,
    keys: usize,
    key_width: usize,
}

fn linear_exponent(w: ComplexScalar) -> Poly {
    Poly::monomial(w, 1)
}

fn find_or_insert(list: &mut Vec<ComplexScalar>, w: ComplexScalar) -> usize {
    match list.iter().position(|v| v.approx_eq(w)) {
        Some(i) => i,
        None => {
            list.push(w);
            list.len() - 1
        }
    }
}

fn key_index(keys: &mut Vec<Poly>, exponent: Poly) -> usize {
    match keys.iter().position(|k| exponents_match(k, &exponent)) {
        Some(i) => i,
        None => {
            keys.push(exponent);
            keys.len() - 1
        }
    }
}

impl Compiled {
    fn new(eq: &FermatDde, spec: &AnsatzSpec) -> Self {
        let omega = spec.frequencies.clone();
        let width = spec.max_poly_degree as usize + 1;
        let (n, m) = (eq.n() as usize, eq.m() as usize);

        let delay = omega
            .iter()
            .map(|&w| {
                let exponent = linear_exponent(w);
                let mut mat = vec![ComplexScalar::ZERO; width * width];
                for col in 0..width {
                    let basis = ExpPoly::term(Poly::monomial(ComplexScalar::ONE, col), exponent.clone());
                    let image = eq.delay_term(&basis);
                    if let Some(t) = image.terms().iter().find(|t| exponents_match(t.exponent(), &exponent)) {
                        for row in 0..width {
                            mat[row * width + col] = t.coeff().coeff(row);
                        }
                    }
                }
                mat
            })
            .collect();

        let mut levels = vec![Level {
            freqs: omega.clone(),
            step: Vec::new(),
        }];
        for _ in 2..=n.max(m) {
            let prev = &levels.last().expect("level 1 exists").freqs;
            let mut freqs = Vec::new();
            let mut step = Vec::with_capacity(prev.len() * omega.len());
            for &u in prev {
                for &w in &omega {
                    step.push(find_or_insert(&mut freqs, u + w));
                }
            }
            levels.push(Level { freqs, step });
        }

        let mut keys: Vec<Poly> = Vec::new();
        let key_of_n = levels[n - 1]
            .freqs
            .iter()
            .map(|&w| key_index(&mut keys, linear_exponent(w)))
            .collect();
        let key_of_m = levels[m - 1]
            .freqs
            .iter()
            .map(|&w| key_index(&mut keys, linear_exponent(w)))
            .collect();
        let rhs: Vec<(usize, Vec<ComplexScalar>)> = eq
            .rhs()
            .terms()
            .iter()
            .map(|t| (key_index(&mut keys, t.exponent().clone()), t.coeff().coeffs().to_vec()))
            .collect();
        let rhs_width = rhs.iter().map(|(_, c)| c.len()).max().unwrap_or(0);
        let key_width = ((width - 1) * n.max(m) + 1).max(rhs_width);

        Self {
            omega,
            width,
            n,
            m,
            a: eq.a(),
            delay,
            levels,
            key_of_n,
            key_of_m,
            rhs,
            keys: keys.len(),
            key_width,
        }
    }

    fn unknowns(&self) -> usize {
        self.omega.len() * self.width
    }

    /// Multiplies level-`t - 1` blocks (each `cur_width` wide) by `base`.
    fn step_up(&self, cur: &[ComplexScalar], cur_width: usize, base: &[ComplexScalar], t: usize) -> Vec<ComplexScalar> {
        let w = self.width;
        let level = &self.levels[t - 1];
        let next_width = cur_width + w - 1;
        let mut next = vec![ComplexScalar::ZERO; level.freqs.len() * next_width];
        let count = self.omega.len();
        for (i, block) in cur.chunks(cur_width).enumerate() {
            for j in 0..count {
                let target = level.step[i * count + j] * next_width;
                let factor = &base[j * w..(j + 1) * w];
                for (p, &x) in block.iter().enumerate() {
                    if x == ComplexScalar::ZERO {
                        continue;
                    }
                    for (q, &y) in factor.iter().enumerate() {
                        next[target + p + q] += x * y;
                    }
                }
            }
        }
        next
    }

    /// `base^s` as coefficient blocks on the level-`s` frequencies.
    fn power(&self, base: &[ComplexScalar], s: usize) -> Vec<ComplexScalar> {
        let mut cur = base.to_vec();
        for t in 2..=s {
            cur = self.step_up(&cur, (t - 2) * (self.width - 1) + self.width, base, t);
        }
        cur
    }

    fn block_width(&self, s: usize) -> usize {
        (self.width - 1) * s + 1
    }

    /// `g = f^(l)(z + c)` frequency by frequency.
    fn delayed(&self, u: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let w = self.width;
        let mut g = vec![ComplexScalar::ZERO; u.len()];
        for (j, mat) in self.delay.iter().enumerate() {
            for row in 0..w {
                g[j * w + row] = (0..w).map(|col| mat[row * w + col] * u[j * w + col]).sum();
            }
        }
        g
    }

    fn scatter(&self, out: &mut [ComplexScalar], blocks: &[ComplexScalar], s: usize, keys: &[usize], factor: ComplexScalar) {
        let kw = self.key_width;
        for (i, block) in blocks.chunks(self.block_width(s)).enumerate() {
            let base = keys[i] * kw;
            for (d, &x) in block.iter().enumerate() {
                out[base + d] += factor * x;
            }
        }
    }

    fn residual(&self, u: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let kw = self.key_width;
        let mut out = vec![ComplexScalar::ZERO; self.keys * kw];
        self.scatter(&mut out, &self.power(u, self.n), self.n, &self.key_of_n, ComplexScalar::ONE);
        let g = self.delayed(u);
        self.scatter(&mut out, &self.power(&g, self.m), self.m, &self.key_of_m, self.a);
        for (key, coeffs) in &self.rhs {
            for (d, &x) in coeffs.iter().enumerate() {
                out[key * kw + d] -= x;
            }
        }
        out
    }

    fn real_residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let r = self.residual(&to_complex(x));
        DVector::from_iterator(r.len() * 2, r.iter().flat_map(|c| [c.re, c.im]))
    }

    /// Adds `scale * d(base^s)` for the perturbation `v e^{ω_j z}` into `out`,
    /// given `prev = base^(s-1)`.
    #[allow(clippy::too_many_arguments)]
    fn power_derivative(
        &self,
        out: &mut [ComplexScalar],
        prev: &[ComplexScalar],
        s: usize,
        keys: &[usize],
        j: usize,
        v: &[ComplexScalar],
        scale: ComplexScalar,
    ) {
        let kw = self.key_width;
        if s == 1 {
            for (d, &x) in v.iter().enumerate() {
                out[keys[j] * kw + d] += scale * x;
            }
            return;
        }
        let count = self.omega.len();
        let step = &self.levels[s - 1].step;
        for (i, block) in prev.chunks(self.block_width(s - 1)).enumerate() {
            let base = keys[step[i * count + j]] * kw;
            for (p, &x) in block.iter().enumerate() {
                if x == ComplexScalar::ZERO {
                    continue;
                }
                for (q, &y) in v.iter().enumerate() {
                    out[base + p + q] += scale * x * y;
                }
            }
        }
    }

    /// Exact real Jacobian. The residual is holomorphic in the unknowns, so
    /// the imaginary-direction column is `i` times the complex derivative.
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let u = to_complex(x);
        let w = self.width;
        let g = self.delayed(&u);
        let f_prev = self.power(&u, self.n - 1);
        let g_prev = self.power(&g, self.m - 1);
        let n_scale = ComplexScalar::real(self.n as f64);
        let m_scale = self.a * self.m as f64;
        let rows = self.keys * self.key_width;
        let mut jac = DMatrix::zeros(rows * 2, u.len() * 2);
        let mut col = vec![ComplexScalar::ZERO; rows];
        let mut unit = vec![ComplexScalar::ZERO; w];
        for q in 0..u.len() {
            let (j, d) = (q / w, q % w);
            col.fill(ComplexScalar::ZERO);
            unit.fill(ComplexScalar::ZERO);
            unit[d] = ComplexScalar::ONE;
            self.power_derivative(&mut col, &f_prev, self.n, &self.key_of_n, j, &unit, n_scale);
            let mat = &self.delay[j];
            let v: Vec<ComplexScalar> = (0..w).map(|row| mat[row * w + d]).collect();
            self.power_derivative(&mut col, &g_prev, self.m, &self.key_of_m, j, &v, m_scale);
            for (r, dv) in col.iter().enumerate() {
                jac[(2 * r, 2 * q)] = dv.re;
                jac[(2 * r + 1, 2 * q)] = dv.im;
                jac[(2 * r, 2 * q + 1)] = -dv.im;
                jac[(2 * r + 1, 2 * q + 1)] = dv.re;
            }
        }
        jac
    }

    fn candidate(&self, u: &[ComplexScalar]) -> ExpPoly {
        let raw = self
            .omega
            .iter()
            .enumerate()
            .map(|(j, &w)| (Poly::new(u[j * self.width..(j + 1) * self.width].to_vec()), linear_exponent(w)))
            .collect();
        crate::exp_poly::normalize(raw)
    }
}

fn to_complex(x: &DVector<f64>) -> Vec<ComplexScalar> {
    x.as_slice()
        .chunks(2)
        .map(|p| ComplexScalar::new(p[0], p[1]))
        .collect()
}

struct Run {
    x: DVector<f64>,
    history: Vec<f64>,
    outcome: StartOutcome,
}

fn gauss_newton_step(sys: &Compiled, x: &DVector<f64>, fx: &DVector<f64>) -> Option<DVector<f64>> {
    let jac = sys.jacobian(x);
    let svd = jac.svd(true, true);
    let smax = svd.singular_values.max();
    if !(smax.is_finite() && smax > 1e-14) {
        return None;
    }
    let step = svd.solve(&(-fx), smax * 1e-12).ok()?;
    step.iter().all(|v| v.is_finite()).then_some(step)
}

/// Tries `x + t·step` for `t = 1, 1/2, ...` and returns the first strict improvement.
fn backtrack(
    sys: &Compiled,
    x: &DVector<f64>,
    step: &DVector<f64>,
    norm: f64,
) -> Option<(DVector<f64>, DVector<f64>, f64)> {
    let mut t = 1.0;
    for _ in 0..=MAX_HALVINGS {
        let trial = x + step * t;
        let ft = sys.real_residual(&trial);
        let nt = ft.norm();
        if nt.is_finite() && nt < norm {
            return Some((trial, ft, nt));
        }
        t *= 0.5;
    }
    None
}

fn run_start(sys: &Compiled, x0: DVector<f64>) -> Run {
    let mut x = x0;
    let mut fx = sys.real_residual(&x);
    let mut norm = fx.norm();
    let mut history = vec![norm];
    let mut outcome = StartOutcome::IterationLimit;
    let mut polish_left: Option<usize> = None;

    for _ in 0..MAX_ITERATIONS {
        if norm < CONVERGED_NORM {
            let left = polish_left.get_or_insert(POLISH_STEPS);
            if *left == 0 {
                break;
            }
            *left -= 1;
        }
        if !norm.is_finite() || norm > DIVERGED_NORM {
            outcome = StartOutcome::Diverged;
            break;
        }
        let Some(step) = gauss_newton_step(sys, &x, &fx) else {
            if polish_left.is_some() {
                break;
            }
            outcome = StartOutcome::Singular;
            break;
        };
        match backtrack(sys, &x, &step, norm) {
            Some((nx, nf, nn)) => {
                x = nx;
                fx = nf;
                norm = nn;
                history.push(norm);
            }
            None => {
                if polish_left.is_none() {
                    outcome = StartOutcome::Stalled;
                }
                break;
            }
        }
    }
    if norm < CONVERGED_NORM {
        outcome = StartOutcome::Converged;
    }
    Run { x, history, outcome }
}

/// Nearest `p / q` with `q <= 16` and `|p / q| <= 8`, if one lies within `1e-6`.
fn snap_real(v: f64) -> Option<f64> {
    if v.abs() > SNAP_MAX_MAGNITUDE + SNAP_WITHIN {
        return None;
    }
    (1..=SNAP_MAX_DENOMINATOR).find_map(|q| {
        let q = q as f64;
        let r = (v * q).round() / q;
        ((v - r).abs() <= SNAP_WITHIN).then_some(r)
    })
}

fn snap(c: ComplexScalar) -> Option<ComplexScalar> {
    Some(ComplexScalar::new(snap_real(c.re)?, snap_real(c.im)?))
}

fn prune(u: &[ComplexScalar]) -> Vec<ComplexScalar> {
    u.iter()
        .map(|&c| if c.norm() < PRUNE_BELOW { ComplexScalar::ZERO } else { c })
        .collect()
}

fn start_point(spec: &AnsatzSpec, index: u32, unknowns: usize, radius: f64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let mut x = DVector::zeros(unknowns * 2);
    for q in 0..unknowns {
        let r = radius * rng.random::<f64>().sqrt();
        let theta = std::f64::consts::TAU * rng.random::<f64>();
        x[2 * q] = r * theta.cos();
        x[2 * q + 1] = r * theta.sin();
    }
    x
}

/// Multistart search for exact solutions inside the span of `spec`.
pub fn search(eq: &FermatDde, spec: &AnsatzSpec) -> Result<SearchResult> {
    spec.validate()?;
    let sys = Compiled::new(eq, spec);
    let radius = 2.0 * eq.rhs().max_coeff_abs().powf(1.0 / eq.n() as f64).max(1.0);
    let unknowns = sys.unknowns();

    let runs: Vec<Run> = (0..spec.starts)
        .into_par_iter()
        .map(|s| run_start(&sys, start_point(spec, s, unknowns, radius)))
        .collect();

    let mut notes = Vec::new();
    let mut found: Vec<Certificate> = Vec::new();
    for (s, run) in runs.iter().enumerate() {
        if run.outcome != StartOutcome::Converged {
            continue;
        }
        let raw = prune(&to_complex(&run.x));
        let snapped: Option<Vec<ComplexScalar>> = raw.iter().map(|&c| snap(c)).collect();
        let cert = match snapped.map(|u| eq.verify(&sys.candidate(&u))) {
            Some(cert) if cert.verified => cert,
            _ => {
                let cert = eq.verify(&sys.candidate(&raw));
                if cert.verified {
                    notes.push(format!("start {s}: non-snapped solution, coefficients kept as computed"));
                } else {
                    notes.push(format!(
                        "start {s}: converged numerically but failed exact verification (residual {:.3e})",
                        cert.residual_max_coeff
                    ));
                    continue;
                }
                cert
            }
        };
        if !found.iter().any(|c| c.candidate.equals(&cert.candidate)) {
            found.push(cert);
        }
    }
    found.sort_by(|x, y| x.candidate.canonical_cmp(&y.candidate));

    let outcomes: Vec<StartOutcome> = runs.iter().map(|r| r.outcome).collect();
    let singular = outcomes.iter().filter(|&&o| o == StartOutcome::Singular).count();
    let converged = outcomes.iter().filter(|&&o| o == StartOutcome::Converged).count();
    notes.push(format!(
        "{converged} of {} starts converged, {singular} skipped as singular",
        spec.starts
    ));
    if found.is_empty() {
        notes.push(
            "no solution found in this frequency span; the search is non-exhaustive and proves nothing".into(),
        );
    } else {
        notes.push("results cover only the given frequency span; the search is non-exhaustive".into());
    }

    Ok(SearchResult {
        found,
        residual_norm_history: runs.into_iter().map(|r| r.history).collect(),
        outcomes,
        exhausted: singular == 0,
        notes,
    })
}
