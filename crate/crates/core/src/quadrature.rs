//! Quadrature on `[0, ∞)` for the kernel family
//!
//! ```text
//! I(λ, β, m) = ∫₀^∞ t^{β-1} e^{-λt} (1 - e^{-t})^m dt,   Re λ > 0, Re β > 0,
//! ```
//!
//! which at `m = 0` is `Γ(β) λ^{-β}` and in general equals
//! `Γ(β) Σ_k (-1)^k binom(m, k) (λ + k)^{-β}`. Three rule families are
//! provided:
//!
//! * generalized Gauss–Laguerre with weight `t^α e^{-t}`, `α = Re β - 1`,
//!   applied after rescaling `t = s / Re λ`, so the endpoint singularity is
//!   part of the weight;
//! * exp-sinh (double exponential) on `(0, ∞)`;
//! * Gauss–Jacobi on `(0, 1)` after `x = e^{-t}`, with the weight
//!   `x^{Re λ - 1} (1 - x)^{Re β - 1}`. A logarithmic factor remains at
//!   `x = 0` and `Im λ ≠ 0` oscillates there, so this family is a coarse
//!   cross-check for real `λ` only.
//!
//! Every estimate carries an error obtained by repeating the computation
//! with twice as many nodes. Nodes and weights come from Golub–Welsch
//! followed by Newton polishing on the three-term recurrence; weights are
//! Christoffel numbers so they stay positive.
//!
//! Adaptive double-exponential integrators for general integrands on
//! half-lines and finite intervals live here too; the line model uses them
//! for weighted norms and Laplace transforms.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::sync::Mutex;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    GaussLaguerre,
    TanhSinh,
    GaussJacobiTransformed,
}

/// Concrete nodes and weights approximating `∫ ω(x) f(x) dx ≈ Σ wᵢ f(xᵢ)`.
///
/// * `GaussLaguerre`: domain `(0, ∞)`, `ω(x) = x^α e^{-x}`.
/// * `TanhSinh`: exp-sinh on `(0, ∞)`, `ω = 1`.
/// * `GaussJacobiTransformed`: domain `(0, 1)`, `ω(x) = x^b (1 - x)^a`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: RuleKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn count(&self) -> usize {
        self.nodes.len()
    }

    /// `Σ wᵢ f(xᵢ)`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> Complex64) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Generalized Gauss–Laguerre rule, weight `x^α e^{-x}`, `α > -1`.
    ///
    /// Nodes whose weights underflow are dropped, so `count()` can be smaller
    /// than requested for very large rules (beyond roughly 180 nodes).
    pub fn gauss_laguerre(count: usize, alpha: f64) -> Result<Self> {
        if count == 0 || !(alpha > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Laguerre needs count > 0 and alpha > -1 (count {count}, alpha {alpha})"
            )));
        }
        let diag: Vec<f64> = (0..count).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (1..count)
            .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
            .collect();
        let mu0 = gamma(Complex64::new(alpha + 1.0, 0.0)).re;
        let (nodes, weights) = golub_welsch(&diag, &off, mu0, Some(0.0), None);
        Ok(Self {
            kind: RuleKind::GaussLaguerre,
            nodes,
            weights,
        })
    }

    /// Gauss–Jacobi rule on `(0, 1)` with weight `x^b (1 - x)^a`, `a, b > -1`.
    pub fn gauss_jacobi_unit(count: usize, a: f64, b: f64) -> Result<Self> {
        if count == 0 || !(a > -1.0) || !(b > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "Gauss-Jacobi needs count > 0 and exponents > -1 (a {a}, b {b})"
            )));
        }
        // Recurrence for (1 - u)^a (1 + u)^b on (-1, 1), then u = 2x - 1.
        let s = a + b;
        let diag: Vec<f64> = (0..count)
            .map(|k| {
                let k = k as f64;
                if k == 0.0 {
                    (b - a) / (s + 2.0)
                } else {
                    (b * b - a * a) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
                }
            })
            .collect();
        let off: Vec<f64> = (1..count)
            .map(|k| {
                let k = k as f64;
                let den = 2.0 * k + s;
                let v = if k == 1.0 {
                    4.0 * (1.0 + a) * (1.0 + b) / (den * den * (den + 1.0))
                } else {
                    4.0 * k * (k + a) * (k + b) * (k + s) / (den * den * (den + 1.0) * (den - 1.0))
                };
                v.sqrt()
            })
            .collect();
        let ln_mu0 = (s + 1.0) * std::f64::consts::LN_2
            + ln_gamma(Complex64::new(a + 1.0, 0.0)).re
            + ln_gamma(Complex64::new(b + 1.0, 0.0)).re
            - ln_gamma(Complex64::new(s + 2.0, 0.0)).re;
        let (u, w) = golub_welsch(&diag, &off, ln_mu0.exp(), Some(-1.0), Some(1.0));
        let scale = (-(s + 1.0) * std::f64::consts::LN_2).exp();
        Ok(Self {
            kind: RuleKind::GaussJacobiTransformed,
            nodes: u.iter().map(|&u| 0.5 * (1.0 + u)).collect(),
            weights: w.iter().map(|&w| w * scale).collect(),
        })
    }

    /// Exp-sinh rule on `(0, ∞)`: `x = exp(π/2 · sinh u)` sampled on a uniform
    /// `u` grid of `count` points covering `[-6.5, 4.5]`.
    pub fn exp_sinh(count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::InvalidParameter("exp-sinh needs at least 2 nodes".into()));
        }
        let (lo, hi) = (-6.5, 4.5);
        let h = (hi - lo) / (count - 1) as f64;
        let mut nodes = Vec::with_capacity(count);
        let mut weights = Vec::with_capacity(count);
        for k in 0..count {
            let u = lo + k as f64 * h;
            let x = (FRAC_PI_2 * u.sinh()).exp();
            let w = h * FRAC_PI_2 * u.cosh() * x;
            if x > 0.0 && x.is_finite() && w > 0.0 && w.is_finite() {
                nodes.push(x);
                weights.push(w);
            }
        }
        Ok(Self {
            kind: RuleKind::TanhSinh,
            nodes,
            weights,
        })
    }
}

/// Nodes and Christoffel weights of the Gauss rule for a Jacobi matrix with
/// the given diagonal and off-diagonal (orthonormal recurrence) and total
/// mass `mu0`. Nodes are clamped to `(lo, hi)` during polishing.
fn golub_welsch(
    diag: &[f64],
    off: &[f64],
    mu0: f64,
    lo: Option<f64>,
    hi: Option<f64>,
) -> (Vec<f64>, Vec<f64>) {
    let n = diag.len();
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = diag[i];
        if i + 1 < n {
            jac[(i, i + 1)] = off[i];
            jac[(i + 1, i)] = off[i];
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mut roots: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for mut x in roots {
        for _ in 0..4 {
            let (p, dp, _) = recurrence(diag, off, mu0, x);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            let next = x - step;
            let inside = lo.map_or(true, |l| next > l) && hi.map_or(true, |h| next < h);
            if !inside || !next.is_finite() {
                break;
            }
            x = next;
            if step.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, _, inv_christoffel) = recurrence(diag, off, mu0, x);
        let w = 1.0 / inv_christoffel;
        if w > 0.0 && w.is_finite() {
            nodes.push(x);
            weights.push(w);
        }
    }
    (nodes, weights)
}

/// Evaluates the degree-`n` orthogonal polynomial (up to a positive factor),
/// its derivative (same factor), and `Σ_{k<n} p̂_k(x)²` for the orthonormal
/// family, rescaling as needed so nothing overflows.
fn recurrence(diag: &[f64], off: &[f64], mu0: f64, x: f64) -> (f64, f64, f64) {
    let n = diag.len();
    let mut p_prev = 0.0;
    let mut dp_prev = 0.0;
    let mut p = 1.0 / mu0.sqrt();
    let mut dp = 0.0;
    // True values are (p, dp) · exp(log_scale).
    let mut log_scale = 0.0_f64;
    let mut sum_sq = 0.0_f64; // Σ p̂_k² · exp(-2 log_scale)
    for k in 0..n {
        sum_sq += p * p;
        let b_k = if k == 0 { 0.0 } else { off[k - 1] };
        let b_next = if k + 1 < n { off[k] } else { 1.0 };
        let p_next = ((x - diag[k]) * p - b_k * p_prev) / b_next;
        let dp_next = ((x - diag[k]) * dp + p - b_k * dp_prev) / b_next;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
        let mag = p.abs().max(dp.abs()).max(p_prev.abs());
        if mag > 1e150 {
            let f = 1e-150;
            p *= f;
            dp *= f;
            p_prev *= f;
            dp_prev *= f;
            sum_sq *= f * f;
            log_scale -= f.ln();
        }
    }
    let total = if log_scale == 0.0 {
        sum_sq
    } else {
        sum_sq * (2.0 * log_scale).exp()
    };
    (p, dp, total)
}

/// An integral value with its node-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    pub error: f64,
}

/// Which rule family to use, its base node count, and the error tolerance
/// the doubled-rule estimate must meet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelRule {
    pub kind: RuleKind,
    pub count: usize,
    pub tolerance: f64,
}

impl Default for KernelRule {
    fn default() -> Self {
        Self {
            kind: RuleKind::GaussLaguerre,
            count: 64,
            tolerance: 1e-9,
        }
    }
}

impl KernelRule {
    pub fn new(kind: RuleKind, count: usize, tolerance: f64) -> Self {
        Self {
            kind,
            count,
            tolerance,
        }
    }

    fn base_count(&self, kind: RuleKind) -> usize {
        match kind {
            // A DE rule needs more nodes than a Gauss rule for the same accuracy.
            RuleKind::TanhSinh => self.count.max(2) * 3,
            _ => self.count.max(1),
        }
    }
}

/// Integrates `t^{β-1} e^{-λt} (1 - e^{-t})^m` for fixed `β` and rule,
/// caching the generated node sets.
pub struct GammaKernel {
    beta: Complex64,
    rule: KernelRule,
    laguerre: Option<(QuadratureRule, QuadratureRule)>,
    exp_sinh: Option<(QuadratureRule, QuadratureRule)>,
    jacobi: Mutex<HashMap<u64, (QuadratureRule, QuadratureRule)>>,
}

impl GammaKernel {
    pub fn new(beta: Complex64, rule: KernelRule) -> Result<Self> {
        if !(beta.re > 0.0) {
            return Err(Error::InvalidParameter(format!("Re β must be positive, got {beta}")));
        }
        let n = rule.base_count(rule.kind);
        let (laguerre, exp_sinh) = match rule.kind {
            RuleKind::GaussLaguerre => (
                Some((
                    QuadratureRule::gauss_laguerre(n, beta.re - 1.0)?,
                    QuadratureRule::gauss_laguerre(2 * n, beta.re - 1.0)?,
                )),
                None,
            ),
            RuleKind::TanhSinh => (
                None,
                Some((QuadratureRule::exp_sinh(n)?, QuadratureRule::exp_sinh(2 * n - 1)?)),
            ),
            RuleKind::GaussJacobiTransformed => (None, None),
        };
        Ok(Self {
            beta,
            rule,
            laguerre,
            exp_sinh,
            jacobi: Mutex::new(HashMap::new()),
        })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn rule(&self) -> KernelRule {
        self.rule
    }

    /// `∫₀^∞ t^{β-1} e^{-λt} (1 - e^{-t})^m dt`, without the tolerance check.
    pub fn estimate(&self, lambda: Complex64, m: u32) -> Result<QuadratureEstimate> {
        if !(lambda.re > 0.0) {
            return Err(Error::InvalidParameter(format!("Re λ must be positive, got {lambda}")));
        }
        let (coarse, fine) = match self.rule.kind {
            RuleKind::GaussLaguerre => {
                let (r1, r2) = self.laguerre.as_ref().expect("built for this kind");
                (self.laguerre_sum(r1, lambda, m), self.laguerre_sum(r2, lambda, m))
            }
            RuleKind::TanhSinh => {
                let (r1, r2) = self.exp_sinh.as_ref().expect("built for this kind");
                (self.exp_sinh_sum(r1, lambda, m), self.exp_sinh_sum(r2, lambda, m))
            }
            RuleKind::GaussJacobiTransformed => {
                let b = lambda.re - 1.0;
                let mut cache = self.jacobi.lock().expect("cache lock");
                if !cache.contains_key(&b.to_bits()) {
                    let n = self.rule.base_count(RuleKind::GaussJacobiTransformed);
                    let a = self.beta.re - 1.0;
                    let pair = (
                        QuadratureRule::gauss_jacobi_unit(n, a, b)?,
                        QuadratureRule::gauss_jacobi_unit(2 * n, a, b)?,
                    );
                    cache.insert(b.to_bits(), pair);
                }
                let (r1, r2) = &cache[&b.to_bits()];
                (self.jacobi_sum(r1, lambda, m), self.jacobi_sum(r2, lambda, m))
            }
        };
        Ok(QuadratureEstimate {
            value: coarse,
            error: (fine - coarse).norm(),
        })
    }

    /// As [`estimate`](Self::estimate), failing when the error estimate
    /// exceeds the rule tolerance relative to `max(1, |value|)`.
    pub fn integrate(&self, lambda: Complex64, m: u32) -> Result<QuadratureEstimate> {
        let est = self.estimate(lambda, m)?;
        if est.error > self.rule.tolerance * est.value.norm().max(1.0) || !est.value.is_finite() {
            return Err(Error::QuadratureNonconvergence {
                value: est.value,
                error: est.error,
                tolerance: self.rule.tolerance,
            });
        }
        Ok(est)
    }

    fn laguerre_sum(&self, rule: &QuadratureRule, lambda: Complex64, m: u32) -> Complex64 {
        let a = lambda.re;
        let im_beta = self.beta.im;
        let im_lambda = lambda.im;
        let mi = m as i32;
        let sum = rule.apply(|s| {
            let t = s / a;
            let mut v = Complex64::new((-(-t).exp_m1()).powi(mi), 0.0);
            if im_lambda != 0.0 {
                v *= Complex64::from_polar(1.0, -im_lambda * t);
            }
            if im_beta != 0.0 {
                v *= Complex64::from_polar(1.0, im_beta * s.ln());
            }
            v
        });
        sum * Complex64::new(a, 0.0).powc(-self.beta)
    }

    fn exp_sinh_sum(&self, rule: &QuadratureRule, lambda: Complex64, m: u32) -> Complex64 {
        let a = lambda.re;
        let beta = self.beta;
        let mi = m as i32;
        let sum = rule.apply(|s| {
            let t = s / a;
            let base = (-(-t).exp_m1()).powi(mi);
            if base == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            // s^{β-1} e^{-λ s / a}
            let log = (beta - 1.0) * s.ln() - lambda * t;
            base * log.exp()
        });
        sum * Complex64::new(a, 0.0).powc(-beta)
    }

    fn jacobi_sum(&self, rule: &QuadratureRule, lambda: Complex64, m: u32) -> Complex64 {
        // x = e^{-t}: ∫₀¹ x^{λ-1} (1-x)^m (-ln x)^{β-1} dx; the weight holds
        // x^{Re λ - 1} (1-x)^{Re β - 1}, the rest is smooth away from x = 0.
        let beta = self.beta;
        let mi = m as i32;
        rule.apply(|x| {
            let one_minus = 1.0 - x;
            let neg_log = -x.ln();
            // (-ln x)/(1-x), accurate near x = 1
            let ratio = if one_minus < 1e-4 {
                let d = one_minus;
                1.0 + d / 2.0 + d * d / 3.0 + d * d * d / 4.0
            } else {
                neg_log / one_minus
            };
            let mut log = (beta - 1.0) * ratio.ln();
            if beta.im != 0.0 {
                log += Complex64::new(0.0, beta.im) * one_minus.ln();
            }
            if lambda.im != 0.0 {
                log += Complex64::new(0.0, lambda.im) * x.ln();
            }
            one_minus.powi(mi) * log.exp()
        })
    }
}

/// `∫₀^∞ t^{β-1} e^{-λt} (1 - e^{-t})^m dt`. For `m = 0` this is
/// `Γ(β) λ^{-β}` (principal branch).
pub fn integrate_gamma_kernel(
    lambda: Complex64,
    beta: Complex64,
    m: u32,
    rule: KernelRule,
) -> Result<QuadratureEstimate> {
    GammaKernel::new(beta, rule)?.integrate(lambda, m)
}

/// Closed form of the `m = 0` kernel: `Γ(β) λ^{-β}`.
pub fn gamma_kernel_reference(lambda: Complex64, beta: Complex64) -> Complex64 {
    gamma(beta) * lambda.powc(-beta)
}

/// `∫₀^∞ e^{-t} binom(n, j) e^{-jt} (1 - e^{-t})^{n-j} dt`, the `(j, n)` entry
/// of the Laplace transform `∫₀^∞ e^{-t} C_{φ_t} dt` at `λ = 1`. The exact
/// value is `1/(n + 1)` for every `j ≤ n`.
pub fn laplace_resolvent_entry(n: usize, j: usize, rule: KernelRule) -> Result<QuadratureEstimate> {
    if j > n {
        return Err(Error::InvalidParameter(format!("need j ≤ n, got j = {j}, n = {n}")));
    }
    let kernel = GammaKernel::new(Complex64::new(1.0, 0.0), rule)?;
    resolvent_entry_with(&kernel, n, j)
}

fn resolvent_entry_with(kernel: &GammaKernel, n: usize, j: usize) -> Result<QuadratureEstimate> {
    let est = kernel.integrate(Complex64::new(1.0 + j as f64, 0.0), (n - j) as u32)?;
    let b = crate::special::binomial(n, j);
    Ok(QuadratureEstimate {
        value: est.value * b,
        error: est.error * b,
    })
}

/// [`laplace_resolvent_entry`] for all `j ≤ n ≤ n_max`, row by row, sharing
/// one set of nodes.
pub fn laplace_resolvent_entries(n_max: usize, rule: KernelRule) -> Result<Vec<Vec<QuadratureEstimate>>> {
    let kernel = GammaKernel::new(Complex64::new(1.0, 0.0), rule)?;
    (0..=n_max)
        .map(|n| (0..=n).map(|j| resolvent_entry_with(&kernel, n, j)).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// Adaptive double-exponential integration for general integrands.

const DE_LEVEL_MAX: u32 = 9;

/// Options for the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveOptions {
    /// Stop when successive levels differ by at most `tolerance · max(1, |I|)`.
    pub tolerance: f64,
    pub max_level: u32,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_level: DE_LEVEL_MAX,
        }
    }
}

/// Vector-valued adaptive trapezoid sums in a double-exponential variable.
/// `map(u)` returns `(x, dx/du)`; nodes with zero or non-finite Jacobian are
/// skipped. The integrand writes `f(x)` into the provided buffer.
fn de_adaptive(
    u_range: (f64, f64),
    map: impl Fn(f64) -> Option<(f64, f64)>,
    dim: usize,
    mut f: impl FnMut(f64, &mut [Complex64]),
    opts: AdaptiveOptions,
) -> Result<(Vec<Complex64>, f64)> {
    let (lo, hi) = u_range;
    let mut h = 0.5;
    let mut buf = vec![Complex64::new(0.0, 0.0); dim];
    let mut raw = vec![Complex64::new(0.0, 0.0); dim];

    let mut accumulate = |u: f64, raw: &mut [Complex64]| {
        if let Some((x, jac)) = map(u) {
            if jac > 0.0 && jac.is_finite() {
                buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
                f(x, &mut buf);
                for (r, v) in raw.iter_mut().zip(&buf) {
                    let term = v * jac;
                    if term.is_finite() {
                        *r += term;
                    }
                }
            }
        }
    };

    let k_lo = (lo / h).ceil() as i64;
    let k_hi = (hi / h).floor() as i64;
    for k in k_lo..=k_hi {
        accumulate(k as f64 * h, &mut raw);
    }
    let mut prev: Vec<Complex64> = raw.iter().map(|z| z * h).collect();
    let mut last_err = f64::INFINITY;
    for _level in 1..=opts.max_level {
        h *= 0.5;
        let k_lo = (lo / h).ceil() as i64;
        let k_hi = (hi / h).floor() as i64;
        for k in k_lo..=k_hi {
            if k % 2 != 0 {
                accumulate(k as f64 * h, &mut raw);
            }
        }
        let cur: Vec<Complex64> = raw.iter().map(|z| z * h).collect();
        let err = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = cur.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        last_err = err;
        prev = cur;
        if err <= opts.tolerance * scale {
            return Ok((prev, err));
        }
    }
    let value = prev.first().copied().unwrap_or_default();
    Err(Error::QuadratureNonconvergence {
        value,
        error: last_err,
        tolerance: opts.tolerance,
    })
}

fn exp_sinh_map(u: f64) -> Option<(f64, f64)> {
    let x = (FRAC_PI_2 * u.sinh()).exp();
    if x == 0.0 || !x.is_finite() {
        return None;
    }
    Some((x, FRAC_PI_2 * u.cosh() * x))
}

/// `∫₀^∞ f(x) dx` for integrands decaying at least exponentially, vector valued.
pub fn integrate_half_line_vec(
    dim: usize,
    f: impl FnMut(f64, &mut [Complex64]),
    opts: AdaptiveOptions,
) -> Result<(Vec<Complex64>, f64)> {
    de_adaptive((-6.5, 4.5), exp_sinh_map, dim, f, opts)
}

/// `∫₀^∞ f(x) dx`.
pub fn integrate_half_line(
    f: impl Fn(f64) -> Complex64,
    opts: AdaptiveOptions,
) -> Result<QuadratureEstimate> {
    let (v, err) = integrate_half_line_vec(1, |x, out| out[0] = f(x), opts)?;
    Ok(QuadratureEstimate {
        value: v[0],
        error: err,
    })
}

/// `∫_a^b f(x) dx` on a finite interval by tanh-sinh. The integrand receives
/// `(x, distance to a, distance to b)` so it can resolve endpoint behaviour.
pub fn integrate_interval(
    a: f64,
    b: f64,
    f: impl Fn(f64) -> Complex64,
    opts: AdaptiveOptions,
) -> Result<QuadratureEstimate> {
    if !(a < b) {
        if a == b {
            return Ok(QuadratureEstimate {
                value: Complex64::new(0.0, 0.0),
                error: 0.0,
            });
        }
        return Err(Error::InvalidParameter(format!("interval ({a}, {b}) is reversed")));
    }
    let r = 0.5 * (b - a);
    let map = |u: f64| {
        let s = FRAC_PI_2 * u.sinh();
        let ch = s.cosh();
        let jac = r * FRAC_PI_2 * u.cosh() / (ch * ch);
        // distance from the nearer endpoint, 2r / (1 + e^{2|s|})
        let d = 2.0 * r / (1.0 + (2.0 * s.abs()).exp());
        let x = if u >= 0.0 { b - d } else { a + d };
        if d == 0.0 {
            return None;
        }
        Some((x, jac))
    };
    let (v, err) = de_adaptive((-4.0, 4.0), map, 1, |x, out| out[0] = f(x), opts)?;
    Ok(QuadratureEstimate {
        value: v[0],
        error: err,
    })
}

/// `∫_a^b f`, where either end may be infinite, splitting at the given
/// breakpoints so that no piece contains a discontinuity in its interior.
pub fn integrate_piecewise(
    a: f64,
    b: f64,
    breakpoints: &[f64],
    f: impl Fn(f64) -> Complex64,
    opts: AdaptiveOptions,
) -> Result<QuadratureEstimate> {
    if !(a < b) {
        return integrate_interval(a, b, &f, opts);
    }
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p.is_finite() && p > a && p < b)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup();
    if a == f64::NEG_INFINITY && b == f64::INFINITY && cuts.is_empty() {
        cuts.push(0.0);
    }
    let mut points = vec![a];
    points.extend(cuts);
    points.push(b);

    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let est = match (lo.is_finite(), hi.is_finite()) {
            (true, true) => integrate_interval(lo, hi, &f, opts)?,
            (true, false) => integrate_half_line(|s| f(lo + s), opts)?,
            (false, true) => integrate_half_line(|s| f(hi - s), opts)?,
            (false, false) => unreachable!("split at a finite point above"),
        };
        value += est.value;
        error += est.error;
    }
    Ok(QuadratureEstimate { value, error })
}
