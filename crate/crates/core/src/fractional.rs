//! Fractional powers `(λ - A)^{-β}` of the shifted generator and the
//! fractional Cesàro powers `C^β` (the case `λ = 1`).
//!
//! In the coefficient convention used throughout the crate the matrix is
//! lower triangular with
//!
//! ```text
//! M[i][j] = binom(i, j) Σ_{k=0}^{i-j} (-1)^k binom(i-j, k) (λ + j + k)^{-β}
//!         = binom(i, j) / Γ(β) ∫₀^∞ t^{β-1} e^{-(λ+j)t} (1 - e^{-t})^{i-j} dt,
//! ```
//!
//! which is the transpose of `∫₀^∞ C_{φ_t} dμ(t)` for the density
//! `dμ = t^{β-1} e^{-λt} dt / Γ(β)`. At `λ = β = 1` it is the Cesàro matrix.
//!
//! The alternating sum loses roughly `log₂(binom(i, j) · 2^{i-j})` bits, so
//! three evaluation routes are available: the literal sum, the positive
//! integral, and the literal sum in multiprecision arithmetic. [`Method::Auto`]
//! uses the literal sum only where its rounding bound is below tolerance.

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{matmul, OperatorMatrix, Precision, Structure};
use crate::quadrature::{integrate_half_line_vec, AdaptiveOptions};
use crate::special::pascal_rows;
use crate::sum::NeumaierComplex;

const RM: RoundingMode = RoundingMode::ToEven;

/// Direct sums with `i - j` at or above this use the integral under `Auto`.
pub const AUTO_SWITCH: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Alternating sum in double precision with compensated summation.
    DirectSum,
    /// Quadrature of the nonnegative integral form.
    Integral,
    /// Alternating sum in multiprecision with exact binomials.
    ExtendedPrecision { bits: usize },
    /// Direct sum below [`AUTO_SWITCH`] when its rounding bound allows,
    /// the integral otherwise.
    Auto,
}

impl Method {
    pub fn from_precision(p: Precision) -> Self {
        match p {
            Precision::Double => Method::Auto,
            Precision::Extended { bits } => Method::ExtendedPrecision { bits },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracPowerSpec {
    pub beta: Complex64,
    pub lambda: Complex64,
    pub order: usize,
    pub method: Method,
    /// Absolute entrywise tolerance.
    pub tolerance: f64,
    /// Convergence tolerance of the integral method.
    pub quadrature_tolerance: f64,
}

impl FracPowerSpec {
    /// `λ = 1`, automatic method, tolerance `1e-10`.
    pub fn new(beta: Complex64, order: usize) -> Self {
        Self {
            beta,
            lambda: Complex64::new(1.0, 0.0),
            order,
            method: Method::Auto,
            tolerance: 1e-10,
            quadrature_tolerance: 1e-13,
        }
    }

    pub fn real(beta: f64, order: usize) -> Self {
        Self::new(Complex64::new(beta, 0.0), order)
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_quadrature_tolerance(mut self, tolerance: f64) -> Self {
        self.quadrature_tolerance = tolerance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.re > 0.0) {
            return Err(Error::InvalidParameter(format!("Re β must be positive, got {}", self.beta)));
        }
        if !(self.lambda.re > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "Re λ must exceed 1/2 (the semigroup grows like e^(t/2)), got {}",
                self.lambda
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidParameter("tolerance must be positive".into()));
        }
        if let Method::ExtendedPrecision { bits } = self.method {
            if bits < 64 {
                return Err(Error::InvalidParameter(format!("extended precision needs ≥ 64 bits, got {bits}")));
            }
        }
        Ok(())
    }
}

/// `C^β` truncated at `spec.order`; `spec.lambda` must be 1.
pub fn frac_cesaro_matrix(spec: &FracPowerSpec) -> Result<OperatorMatrix> {
    if spec.lambda != Complex64::new(1.0, 0.0) {
        return Err(Error::InvalidParameter(format!(
            "the fractional Cesàro power has λ = 1, got {}",
            spec.lambda
        )));
    }
    resolvent_power_matrix(spec)
}

/// `(λ - A)^{-β}` in the lower-triangular coefficient convention.
pub fn resolvent_power_matrix(spec: &FracPowerSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let dim = spec.order + 1;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    match spec.method {
        Method::DirectSum => {
            let d = DirectSum::new(spec);
            for i in 0..dim {
                for j in 0..=i {
                    let (v, bound) = d.entry(i, j);
                    if bound > spec.tolerance {
                        return Err(Error::Cancellation {
                            row: i,
                            col: j,
                            bound,
                            tolerance: spec.tolerance,
                        });
                    }
                    entries[i * dim + j] = v;
                }
            }
        }
        Method::Integral => return Ok(IntegralRoute::new(spec)?.matrix),
        Method::ExtendedPrecision { bits } => {
            let e = ExtendedRoute::new(spec, bits)?;
            for i in 0..dim {
                for j in 0..=i {
                    let (v, bound) = e.entry(i, j);
                    if bound > spec.tolerance {
                        return Err(Error::Cancellation {
                            row: i,
                            col: j,
                            bound,
                            tolerance: spec.tolerance,
                        });
                    }
                    entries[i * dim + j] = v;
                }
            }
        }
        Method::Auto => {
            let d = DirectSum::new(spec);
            let mut q: Option<IntegralRoute> = None;
            for i in 0..dim {
                for j in 0..=i {
                    let direct = (i - j < AUTO_SWITCH).then(|| d.entry(i, j));
                    entries[i * dim + j] = match direct {
                        Some((v, bound)) if bound <= spec.tolerance => v,
                        _ => {
                            if q.is_none() {
                                q = Some(IntegralRoute::new(spec)?);
                            }
                            q.as_ref().expect("just built").entry(i, j)
                        }
                    };
                }
            }
        }
    }
    Ok(OperatorMatrix::from_parts_unchecked(
        spec.order,
        Structure::LowerTriangular,
        entries,
    ))
}

/// The square root `B` of `(λ - A)^{-1}`, i.e. `(λ - A)^{-1/2}` by the
/// integral method.
pub fn square_root_matrix(lambda: Complex64, order: usize, opts: AdaptiveOptions) -> Result<OperatorMatrix> {
    let spec = FracPowerSpec::real(0.5, order)
        .with_lambda(lambda)
        .with_method(Method::Integral)
        .with_quadrature_tolerance(opts.tolerance);
    resolvent_power_matrix(&spec)
}

/// Which matrix [`phillips_apply`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SemigroupSide {
    /// `∫ C_{φ_t} dμ(t)` itself: upper triangular.
    Composition,
    /// Its transpose, the convention of [`resolvent_power_matrix`]: lower
    /// triangular.
    Coefficient,
}

/// `∫₀^∞ C_{φ_t} ρ(t) dt` truncated at `order`, by adaptive quadrature of
/// all entries at once. The density must be integrable against `e^{t/2}`.
pub fn phillips_apply(
    density: impl Fn(f64) -> Complex64,
    order: usize,
    side: SemigroupSide,
    opts: AdaptiveOptions,
) -> Result<OperatorMatrix> {
    let dim = order + 1;
    let pascal = pascal_rows(order);
    let index = |i: usize, j: usize| i * (i + 1) / 2 + j;
    let count = dim * (dim + 1) / 2;
    let mut pow_p = vec![0.0; dim];
    let mut pow_q = vec![0.0; dim];
    let (values, _err) = integrate_half_line_vec(
        count,
        |t, out| {
            let rho = density(t);
            if rho == Complex64::new(0.0, 0.0) {
                return;
            }
            let (p, q) = ((-t).exp(), -(-t).exp_m1());
            pow_p[0] = 1.0;
            pow_q[0] = 1.0;
            for k in 1..dim {
                pow_p[k] = pow_p[k - 1] * p;
                pow_q[k] = pow_q[k - 1] * q;
            }
            for i in 0..dim {
                for j in 0..=i {
                    out[index(i, j)] = rho * (pascal[i][j] * pow_p[j] * pow_q[i - j]);
                }
            }
        },
        opts,
    )?;
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let v = values[index(i, j)];
            match side {
                SemigroupSide::Coefficient => entries[i * dim + j] = v,
                SemigroupSide::Composition => entries[j * dim + i] = v,
            }
        }
    }
    let structure = match side {
        SemigroupSide::Coefficient => Structure::LowerTriangular,
        SemigroupSide::Composition => Structure::UpperTriangular,
    };
    Ok(OperatorMatrix::from_parts_unchecked(order, structure, entries))
}

/// `max |M_{β₁} M_{β₂} - M_{β₁+β₂}|` at `λ = 1`, integral method.
pub fn semigroup_property_residual(beta1: Complex64, beta2: Complex64, order: usize) -> Result<f64> {
    let m = |b: Complex64| frac_cesaro_matrix(&FracPowerSpec::new(b, order).with_method(Method::Integral));
    let lhs = matmul(&m(beta1)?, &m(beta2)?)?;
    lhs.max_abs_diff(&m(beta1 + beta2)?)
}

/// Outcome of evaluating the same matrix by two methods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodComparison {
    pub max_abs_diff: f64,
    /// Entry `(i, j)` where the difference is largest.
    pub worst: (usize, usize),
    /// Entries compared (those with `i - j ≤ max_offset`).
    pub compared: usize,
}

/// Compares raw entries from two methods on the band `i - j ≤ max_offset`
/// without applying either method's own cancellation guard.
pub fn compare_methods(
    spec: &FracPowerSpec,
    a: Method,
    b: Method,
    max_offset: usize,
) -> Result<MethodComparison> {
    spec.validate()?;
    let ea = RawEntries::new(spec, a)?;
    let eb = RawEntries::new(spec, b)?;
    let mut out = MethodComparison {
        max_abs_diff: 0.0,
        worst: (0, 0),
        compared: 0,
    };
    for i in 0..=spec.order {
        for j in i.saturating_sub(max_offset)..=i {
            let d = (ea.entry(i, j)? - eb.entry(i, j)?).norm();
            out.compared += 1;
            if !(d <= out.max_abs_diff) {
                out.max_abs_diff = d;
                out.worst = (i, j);
            }
        }
    }
    Ok(out)
}

/// Like [`compare_methods`], failing with the offending entry when the
/// difference exceeds `spec.tolerance`.
pub fn check_method_agreement(spec: &FracPowerSpec, a: Method, b: Method, max_offset: usize) -> Result<MethodComparison> {
    let c = compare_methods(spec, a, b, max_offset)?;
    if !(c.max_abs_diff <= spec.tolerance) {
        return Err(Error::MethodDisagreement {
            row: c.worst.0,
            col: c.worst.1,
            diff: c.max_abs_diff,
            tolerance: spec.tolerance,
        });
    }
    Ok(c)
}

enum RawEntries {
    Direct(DirectSum),
    Integral(IntegralRoute),
    Extended(ExtendedRoute),
    Auto(Box<FracPowerSpec>, DirectSum, IntegralRoute),
}

impl RawEntries {
    fn new(spec: &FracPowerSpec, method: Method) -> Result<Self> {
        Ok(match method {
            Method::DirectSum => Self::Direct(DirectSum::new(spec)),
            Method::Integral => Self::Integral(IntegralRoute::new(spec)?),
            Method::ExtendedPrecision { bits } => Self::Extended(ExtendedRoute::new(spec, bits)?),
            Method::Auto => Self::Auto(Box::new(*spec), DirectSum::new(spec), IntegralRoute::new(spec)?),
        })
    }

    fn entry(&self, i: usize, j: usize) -> Result<Complex64> {
        match self {
            Self::Direct(d) => Ok(d.entry(i, j).0),
            Self::Integral(q) => Ok(q.entry(i, j)),
            Self::Extended(e) => Ok(e.entry(i, j).0),
            Self::Auto(spec, d, q) => {
                if i - j < AUTO_SWITCH {
                    let (v, bound) = d.entry(i, j);
                    if bound <= spec.tolerance {
                        return Ok(v);
                    }
                }
                Ok(q.entry(i, j))
            }
        }
    }
}

/// Double-precision alternating sum. Each entry comes with a rounding
/// bound `4u · binom(i, j) Σ_k binom(i-j, k) |(λ+j+k)^{-β}|`.
struct DirectSum {
    pascal: Vec<Vec<f64>>,
    powers: Vec<Complex64>,
}

impl DirectSum {
    fn new(spec: &FracPowerSpec) -> Self {
        Self {
            pascal: pascal_rows(spec.order),
            powers: (0..=spec.order)
                .map(|s| (spec.lambda + s as f64).powc(-spec.beta))
                .collect(),
        }
    }

    fn entry(&self, i: usize, j: usize) -> (Complex64, f64) {
        let m = i - j;
        let row = &self.pascal[m];
        let mut acc = NeumaierComplex::default();
        let mut magnitude = 0.0;
        for k in 0..=m {
            let term = self.powers[j + k] * row[k];
            magnitude += term.norm();
            acc.add(if k % 2 == 0 { term } else { -term });
        }
        let b = self.pascal[i][j];
        let bound = 4.0 * f64::EPSILON * b * magnitude;
        (acc.value() * b, bound)
    }
}

/// All entries at once from [`phillips_apply`] with the density
/// `t^{β-1} e^{-λt} / Γ(β)`; every integrand is nonnegative for real data.
struct IntegralRoute {
    matrix: OperatorMatrix,
}

impl IntegralRoute {
    fn new(spec: &FracPowerSpec) -> Result<Self> {
        let (beta, lambda) = (spec.beta, spec.lambda);
        let log_gamma = crate::special::ln_gamma(beta);
        let density = |t: f64| ((beta - 1.0) * t.ln() - lambda * t - log_gamma).exp();
        let opts = AdaptiveOptions {
            tolerance: spec.quadrature_tolerance,
            ..AdaptiveOptions::default()
        };
        Ok(Self {
            matrix: phillips_apply(density, spec.order, SemigroupSide::Coefficient, opts)?,
        })
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }
}

/// Alternating sum carried out in `bits`-bit binary floating point, with the
/// powers `(λ + s)^{-β}` evaluated at that precision and exact binomials.
struct ExtendedRoute {
    bits: usize,
    pascal: Vec<Vec<BigFloat>>,
    pascal_f64: Vec<Vec<f64>>,
    powers: Vec<(BigFloat, BigFloat)>,
    magnitudes: Vec<f64>,
}

impl ExtendedRoute {
    fn new(spec: &FracPowerSpec, bits: usize) -> Result<Self> {
        let p = bits;
        let mut cc = Consts::new().map_err(|e| Error::InvalidParameter(format!("multiprecision setup: {e:?}")))?;
        let mut pascal: Vec<Vec<BigFloat>> = Vec::with_capacity(spec.order + 1);
        pascal.push(vec![BigFloat::from_u8(1, p)]);
        for n in 1..=spec.order {
            let prev = &pascal[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigFloat::from_u8(1, p));
            for k in 1..n {
                row.push(prev[k - 1].add(&prev[k], p, RM));
            }
            row.push(BigFloat::from_u8(1, p));
            pascal.push(row);
        }
        let br = BigFloat::from_f64(spec.beta.re, p);
        let bi = BigFloat::from_f64(spec.beta.im, p);
        let mut powers = Vec::with_capacity(spec.order + 1);
        for s in 0..=spec.order {
            let x = BigFloat::from_f64(spec.lambda.re, p).add(&BigFloat::from_u64(s as u64, p), p, RM);
            let y = BigFloat::from_f64(spec.lambda.im, p);
            powers.push(complex_neg_power(&x, &y, &br, &bi, p, &mut cc));
        }
        let magnitudes = powers.iter().map(|(re, im)| to_f64(re).hypot(to_f64(im))).collect();
        Ok(Self {
            bits,
            pascal,
            pascal_f64: pascal_rows(spec.order),
            powers,
            magnitudes,
        })
    }

    fn entry(&self, i: usize, j: usize) -> (Complex64, f64) {
        let p = self.bits;
        let m = i - j;
        let mut re = BigFloat::from_u8(0, p);
        let mut im = BigFloat::from_u8(0, p);
        let mut magnitude = 0.0;
        for k in 0..=m {
            let c = &self.pascal[m][k];
            let (pr, pi) = &self.powers[j + k];
            let tr = c.mul(pr, p, RM);
            let ti = c.mul(pi, p, RM);
            if k % 2 == 0 {
                re = re.add(&tr, p, RM);
                im = im.add(&ti, p, RM);
            } else {
                re = re.sub(&tr, p, RM);
                im = im.sub(&ti, p, RM);
            }
            magnitude += self.pascal_f64[m][k] * self.magnitudes[j + k];
        }
        let b = &self.pascal[i][j];
        let value = Complex64::new(to_f64(&re.mul(b, p, RM)), to_f64(&im.mul(b, p, RM)));
        let ulp = (2.0f64).powi(-(p as i32 - 2));
        let bound = 4.0 * ulp * self.pascal_f64[i][j] * magnitude + f64::EPSILON * value.norm();
        (value, bound)
    }
}

/// `(x + iy)^{-(br + i·bi)}` for `x > 0`, principal branch.
fn complex_neg_power(
    x: &BigFloat,
    y: &BigFloat,
    br: &BigFloat,
    bi: &BigFloat,
    p: usize,
    cc: &mut Consts,
) -> (BigFloat, BigFloat) {
    let r2 = x.mul(x, p, RM).add(&y.mul(y, p, RM), p, RM);
    let half = BigFloat::from_f64(0.5, p);
    let log_r = r2.ln(p, RM, cc).mul(&half, p, RM);
    let theta = y.div(x, p, RM).atan(p, RM, cc);
    // -β (log r + iθ)
    let a = br.mul(&log_r, p, RM).sub(&bi.mul(&theta, p, RM), p, RM).neg();
    let b = br.mul(&theta, p, RM).add(&bi.mul(&log_r, p, RM), p, RM).neg();
    let e = a.exp(p, RM, cc);
    if b.is_zero() {
        return (e, BigFloat::from_u8(0, p));
    }
    (e.mul(&b.cos(p, RM, cc), p, RM), e.mul(&b.sin(p, RM, cc), p, RM))
}

/// Correctly rounded conversion through the decimal representation.
fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hardy::cesaro_matrix;
    use crate::special::binomial;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Exact rational `Σ (-1)^k binom(m, k) / (a + k)` for small inputs.
    fn rational_alternating(a: i128, m: usize) -> (i128, i128) {
        let mut num: i128 = 0;
        let mut den: i128 = 1;
        for k in 0..=m {
            let b = binomial(m, k) as i128;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            // num/den + sign·b/(a+k)
            let d = a + k as i128;
            num = num * d + sign * b * den;
            den *= d;
            let g = gcd(num.abs(), den);
            num /= g;
            den /= g;
        }
        (num, den)
    }

    fn gcd(mut a: i128, mut b: i128) -> i128 {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.max(1)
    }

    #[test]
    fn beta_one_telescopes_to_cesaro_by_brute_force() {
        for i in 0..=20usize {
            for j in 0..=i {
                let (num, den) = rational_alternating(j as i128 + 1, i - j);
                let exact = binomial(i, j) * num as f64 / den as f64;
                assert!((exact - 1.0 / (i as f64 + 1.0)).abs() < 1e-15, "({i},{j})");
            }
        }
        for method in [Method::DirectSum, Method::Integral, Method::Auto, Method::ExtendedPrecision { bits: 192 }] {
            // The double-precision sum is only admissible on a smaller block.
            let order = if method == Method::DirectSum { 14 } else { 20 };
            let spec = FracPowerSpec::real(1.0, order).with_method(method).with_tolerance(1e-8);
            let m = frac_cesaro_matrix(&spec).unwrap();
            let tol = if matches!(method, Method::DirectSum | Method::Auto) { spec.tolerance } else { 1e-12 };
            assert!(m.max_abs_diff(&cesaro_matrix(order)).unwrap() < tol, "{method:?}");
        }
    }

    #[test]
    fn half_power_examples() {
        let m = frac_cesaro_matrix(&FracPowerSpec::real(0.5, 4)).unwrap();
        assert_eq!(m.get(0, 0), c(1.0));
        assert!((m.get(1, 0).re - (1.0 - 2f64.powf(-0.5))).abs() < 1e-15);
        assert!((m.get(1, 0).re - 0.292_893_2).abs() < 1e-7);
    }

    #[test]
    fn lambda_two_against_beta_closed_form() {
        let spec = FracPowerSpec::real(1.0, 10).with_lambda(c(2.0)).with_method(Method::DirectSum);
        let m = resolvent_power_matrix(&spec).unwrap();
        for i in 0..=10usize {
            for j in 0..=i {
                let (num, den) = rational_alternating(j as i128 + 2, i - j);
                let brute = binomial(i, j) * num as f64 / den as f64;
                // binom(i,j) B(j+2, i-j+1) = binom(i,j) (j+1)! (i-j)! / (i+2)!
                let closed = (1..=j + 1).map(|x| x as f64).product::<f64>()
                    * (1..=i - j).map(|x| x as f64).product::<f64>()
                    / (1..=i + 2).map(|x| x as f64).product::<f64>()
                    * binomial(i, j);
                assert!((brute - closed).abs() <= 1e-15 * closed);
                assert!((m.get(i, j).re - closed).abs() <= 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn corner_entry_is_lambda_power() {
        for (lambda, beta) in [(c(1.5), c(0.3)), (Complex64::new(2.0, 1.0), Complex64::new(0.7, -0.2))] {
            for method in [Method::DirectSum, Method::Integral, Method::ExtendedPrecision { bits: 128 }] {
                let spec = FracPowerSpec::new(beta, 3).with_lambda(lambda).with_method(method);
                let m = resolvent_power_matrix(&spec).unwrap();
                let want = lambda.powc(-beta);
                assert!((m.get(0, 0) - want).norm() < 1e-13, "{method:?}: {} vs {want}", m.get(0, 0));
            }
        }
    }

    #[test]
    fn square_root_squares_to_resolvent() {
        let rule = AdaptiveOptions::default();
        let b = square_root_matrix(c(1.0), 64, rule).unwrap();
        let bb = matmul(&b, &b).unwrap();
        assert!(bb.max_abs_diff(&cesaro_matrix(64)).unwrap() <= 1e-9);
        let direct = frac_cesaro_matrix(&FracPowerSpec::real(0.5, 64)).unwrap();
        assert!(b.max_abs_diff(&direct).unwrap() <= 1e-10);
        let neg = b.scale(c(-1.0));
        assert_eq!(matmul(&neg, &neg).unwrap(), bb);

        let lambda = Complex64::new(1.5, 0.5);
        let b = square_root_matrix(lambda, 24, rule).unwrap();
        let inv = resolvent_power_matrix(&FracPowerSpec::real(1.0, 24).with_lambda(lambda)).unwrap();
        assert!(matmul(&b, &b).unwrap().max_abs_diff(&inv).unwrap() <= 1e-9);
    }

    #[test]
    fn phillips_examples() {
        let opts = AdaptiveOptions::default();
        let order = 12;
        let cstar = phillips_apply(|t| c((-t).exp()), order, SemigroupSide::Composition, opts).unwrap();
        assert_eq!(cstar.structure(), Structure::UpperTriangular);
        assert!(cstar.max_abs_diff(&crate::hardy::cesaro_adjoint_matrix(order)).unwrap() < 1e-11);

        let two = phillips_apply(|t| c((-2.0 * t).exp()), order, SemigroupSide::Coefficient, opts).unwrap();
        let want = resolvent_power_matrix(&FracPowerSpec::real(1.0, order).with_lambda(c(2.0))).unwrap();
        assert!(two.max_abs_diff(&want).unwrap() < 1e-11);

        let sqrt_pi = std::f64::consts::PI.sqrt();
        let half = phillips_apply(
            |t| c((-t).exp() / (t.sqrt() * sqrt_pi)),
            order,
            SemigroupSide::Coefficient,
            opts,
        )
        .unwrap();
        let b = square_root_matrix(c(1.0), order, opts).unwrap();
        assert!(half.max_abs_diff(&b).unwrap() < 1e-10);
    }

    #[test]
    fn semigroup_property_examples() {
        assert!(semigroup_property_residual(c(0.5), c(0.5), 64).unwrap() <= 1e-9);
        assert!(semigroup_property_residual(c(1.0 / 3.0), c(2.0 / 3.0), 64).unwrap() <= 1e-8);
        let r = semigroup_property_residual(c(1.0), c(1.0), 64).unwrap();
        assert!(r <= 1e-12, "{r:e}");
    }

    #[test]
    fn semigroup_property_on_a_grid() {
        let grid = [0.25, 0.6, 1.0, 1.4, 2.0];
        for &b1 in &grid {
            for &b2 in &grid {
                let r = semigroup_property_residual(c(b1), c(b2), 32).unwrap();
                assert!(r <= 1e-8, "({b1}, {b2}): {r:e}");
            }
        }
    }

    #[test]
    fn entries_are_positive_for_real_beta() {
        for beta in [0.25, 0.5, 1.0, 2.0] {
            let spec = FracPowerSpec::real(beta, 40).with_method(Method::Integral);
            let m = resolvent_power_matrix(&spec).unwrap();
            for i in 0..=40 {
                for j in 0..=i {
                    assert!(m.get(i, j).re > 0.0, "β {beta} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn continuity_in_beta() {
        let order = 24;
        let at = |b: f64| frac_cesaro_matrix(&FracPowerSpec::real(b, order)).unwrap();
        let beta = 0.7;
        let (eps, h) = (1e-6, 1e-3);
        let step = at(beta + eps).max_abs_diff(&at(beta)).unwrap();
        let deriv = at(beta + h).max_abs_diff(&at(beta - h)).unwrap() / (2.0 * h);
        assert!(step <= 2.0 * eps * deriv + 1e-12, "step {step:e}, derivative {deriv:e}");
    }

    #[test]
    fn methods_agree_where_double_precision_suffices() {
        let spec = FracPowerSpec::real(0.5, 14).with_tolerance(1e-8);
        let c1 = check_method_agreement(&spec, Method::DirectSum, Method::Integral, 14).unwrap();
        assert!(c1.max_abs_diff <= 1e-8);
        let spec64 = FracPowerSpec::real(0.5, 64);
        let c2 = compare_methods(&spec64, Method::ExtendedPrecision { bits: 256 }, Method::Integral, 64).unwrap();
        assert!(c2.max_abs_diff <= 1e-9, "{c2:?}");
    }

    #[test]
    fn cancellation_is_detected() {
        let spec = FracPowerSpec::real(0.5, 64).with_method(Method::DirectSum);
        assert!(matches!(resolvent_power_matrix(&spec), Err(Error::Cancellation { .. })));
        let cmp = compare_methods(&spec, Method::DirectSum, Method::ExtendedPrecision { bits: 256 }, 64).unwrap();
        let spec = spec.with_tolerance(1e-8);
        assert!(cmp.max_abs_diff > 1e-8);
        assert!(matches!(
            check_method_agreement(&spec, Method::DirectSum, Method::ExtendedPrecision { bits: 256 }, 64),
            Err(Error::MethodDisagreement { .. })
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(resolvent_power_matrix(&FracPowerSpec::real(0.0, 3)).is_err());
        assert!(resolvent_power_matrix(&FracPowerSpec::real(1.0, 3).with_lambda(c(0.5))).is_err());
        assert!(frac_cesaro_matrix(&FracPowerSpec::real(1.0, 3).with_lambda(c(2.0))).is_err());
    }
}
