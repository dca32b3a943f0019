//! The composition semigroup `C_{φ_t} f = f ∘ φ_t` with
//! `φ_t(z) = e^{-t} z + 1 - e^{-t}` on H²(𝔻), together with its generator
//! `A f = (1 - z) f'`, the resolvent `T = (A - I)^{-1} = -C*`, the
//! cogenerator `V = (A + I)(A - I)^{-1}` and the adjoint semigroup.
//!
//! All matrices here are upper triangular or bidiagonal: `φ_t(z)^m` is a
//! polynomial of degree `m`, and `A` maps degree `m` to degree `≤ m`. Their
//! compressions are therefore exact and products of them only touch indices
//! `≤ N`.
//!
//! `‖C_{φ_t}‖ = e^{t/2}` on H². On H^p the norm is `e^{t/p}`; that case is not
//! computed here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hardy::{cesaro_adjoint_matrix, matmul, norm2, OperatorMatrix, Structure};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Semigroup time `t ≥ 0` and the derived coefficients of `φ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowParams {
    t: f64,
}

impl FlowParams {
    pub fn new(t: f64) -> Result<Self> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `e^{-t}`, the slope of `φ_t`.
    pub fn slope(&self) -> f64 {
        (-self.t).exp()
    }

    /// `1 - e^{-t}`, evaluated without cancellation for small `t`.
    pub fn offset(&self) -> f64 {
        -(-self.t).exp_m1()
    }

    /// `a_t = e^{-t/2}` of the normal form `φ_t(z) = (a_t z + b_t)/a_t^{-1}`.
    pub fn a(&self) -> f64 {
        (-0.5 * self.t).exp()
    }

    /// `b_t = (1 - e^{-t}) / e^{-t/2}`.
    pub fn b(&self) -> f64 {
        self.offset() / self.a()
    }

    /// `φ_t(z)`.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        z * self.slope() + self.offset()
    }
}

/// Matrix of `C_{φ_t}`: column `m` holds the coefficients of `φ_t(z)^m`,
/// `entry(n, m) = binom(m, n) e^{-nt} (1 - e^{-t})^{m-n}`.
///
/// Columns are generated by repeated multiplication with `φ_t`, a recursion
/// with nonnegative terms, so no binomial overflows or cancellations occur
/// even for `N` in the thousands.
pub fn composition_matrix(t: f64, order: usize) -> Result<OperatorMatrix> {
    let flow = FlowParams::new(t)?;
    let (p, q) = (flow.slope(), flow.offset());
    let dim = order + 1;
    let mut entries = vec![ZERO; dim * dim];
    let mut col = vec![0.0_f64; dim];
    col[0] = 1.0;
    entries[0] = Complex64::new(1.0, 0.0);
    for m in 1..dim {
        for n in (1..=m).rev() {
            col[n] = p * col[n - 1] + q * col[n];
        }
        col[0] *= q;
        for n in 0..=m {
            entries[n * dim + m] = Complex64::new(col[n], 0.0);
        }
    }
    Ok(OperatorMatrix::from_parts_unchecked(
        order,
        Structure::UpperTriangular,
        entries,
    ))
}

/// Max-abs entry of `C_{φ_{t1}} C_{φ_{t2}} - C_{φ_{t1+t2}}` at order `N`.
pub fn semigroup_law_residual(t1: f64, t2: f64, order: usize) -> Result<f64> {
    let lhs = matmul(&composition_matrix(t1, order)?, &composition_matrix(t2, order)?)?;
    lhs.max_abs_diff(&composition_matrix(t1 + t2, order)?)
}

/// Generator `A z^n = n z^{n-1} - n z^n`.
pub fn generator_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(order, Structure::Bidiagonal, |r, c| {
        let n = c as f64;
        if r == c {
            Complex64::new(-n, 0.0)
        } else if r + 1 == c {
            Complex64::new(n, 0.0)
        } else {
            ZERO
        }
    })
}

/// `T = (A - I)^{-1}`: `T z^n = -(1 + z + … + z^n)/(n + 1)`.
pub fn resolvent_t_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(order, Structure::UpperTriangular, |_, n| {
        Complex64::new(-1.0 / (n as f64 + 1.0), 0.0)
    })
}

/// Cogenerator `V = I + 2T`.
pub fn cogenerator_matrix(order: usize) -> OperatorMatrix {
    let two_t = resolvent_t_matrix(order).scale(Complex64::new(2.0, 0.0));
    let v = OperatorMatrix::identity(order).add(&two_t).expect("same order");
    OperatorMatrix::from_parts_unchecked(order, Structure::UpperTriangular, v.entries().to_vec())
}

/// Matrix of `C*_{φ_t} f(z) = (1 - qz)^{-1} f(pz/(1 - qz))` with `p = e^{-t}`,
/// `q = 1 - e^{-t}`, assembled by power-series expansion of the weighted
/// composition (independently of [`composition_matrix`]).
///
/// Column 0 is the geometric series of `1/(1 - qz)`; column `m` is column
/// `m - 1` multiplied by `pz/(1 - qz)`, i.e. shifted, scaled by `p`, then
/// divided by `1 - qz` through the running recursion `c_n ← c_n + q c_{n-1}`.
pub fn adjoint_composition_matrix(t: f64, order: usize) -> Result<OperatorMatrix> {
    let flow = FlowParams::new(t)?;
    let (p, q) = (flow.slope(), flow.offset());
    let dim = order + 1;
    let mut entries = vec![ZERO; dim * dim];
    let mut col = vec![0.0_f64; dim];
    let mut g = 1.0;
    for c in col.iter_mut() {
        *c = g;
        g *= q;
    }
    for m in 0..dim {
        if m > 0 {
            // multiply by p z
            for n in (1..dim).rev() {
                col[n] = p * col[n - 1];
            }
            col[0] = 0.0;
            // divide by (1 - q z)
            for n in 1..dim {
                col[n] += q * col[n - 1];
            }
        }
        for n in m..dim {
            entries[n * dim + m] = Complex64::new(col[n], 0.0);
        }
    }
    Ok(OperatorMatrix::from_parts_unchecked(
        order,
        Structure::LowerTriangular,
        entries,
    ))
}

/// Power-iteration controls for [`operator_norm_truncation`].
#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    /// Stop once the relative change of the singular-value estimate between
    /// sweeps falls below this value.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self {
            tolerance: 1e-13,
            max_iterations: 50_000,
        }
    }
}

/// Result of a power iteration: the estimate and the vector that attains it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub sigma: f64,
    pub iterations: usize,
    pub vector: Vec<Complex64>,
}

/// Largest singular value of a compression, by power iteration on `MᴴM`.
///
/// The estimate is the Rayleigh quotient `‖Mx‖/‖x‖`, which for a PSD
/// iteration never decreases and never exceeds the true `σ_max`. `start`
/// is padded with zeros when shorter than the dimension.
pub fn largest_singular_value(
    m: &OperatorMatrix,
    start: Option<&[Complex64]>,
    opts: PowerIteration,
) -> Result<NormEstimate> {
    let dim = m.dim();
    let mut x: Vec<Complex64> = match start {
        Some(s) => {
            let mut v = s.to_vec();
            v.resize(dim, ZERO);
            v
        }
        None => vec![Complex64::new(1.0, 0.0); dim],
    };
    normalize(&mut x);
    let mut sigma = norm2(&m.apply_slice(&x));
    let mut change = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        let y = m.apply_slice(&x);
        let mut z = m.apply_adjoint_slice(&y);
        if norm2(&z) == 0.0 {
            return Ok(NormEstimate {
                sigma: 0.0,
                iterations: it,
                vector: x,
            });
        }
        normalize(&mut z);
        let next = norm2(&m.apply_slice(&z));
        change = (next - sigma).abs() / next.max(f64::MIN_POSITIVE);
        // Rounding can produce a last-ulp dip; keep the better vector.
        if next >= sigma {
            x = z;
            sigma = next;
        }
        if change <= opts.tolerance {
            return Ok(NormEstimate {
                sigma,
                iterations: it,
                vector: x,
            });
        }
    }
    Err(Error::PowerIterationNonconvergence {
        iterations: opts.max_iterations,
        change,
    })
}

fn normalize(v: &mut [Complex64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
}

/// `σ_max` of `composition_matrix(t, N)`; bounded above by `e^{t/2}`.
pub fn operator_norm_truncation(t: f64, order: usize) -> Result<f64> {
    operator_norm_truncation_with(t, order, PowerIteration::default())
}

pub fn operator_norm_truncation_with(t: f64, order: usize, opts: PowerIteration) -> Result<f64> {
    let m = composition_matrix(t, order)?;
    Ok(largest_singular_value(&m, None, opts)?.sigma)
}

/// `σ_max` along increasing orders, each run warm-started from the previous
/// maximizer padded with zeros. Since the padded vector reproduces the
/// previous `‖Mx‖` exactly (the matrices are nested upper-triangular
/// compressions), the reported sequence is nondecreasing by construction.
pub fn norm_convergence_curve(
    t: f64,
    orders: &[usize],
    opts: PowerIteration,
) -> Result<Vec<(usize, f64)>> {
    let mut sorted = orders.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut out = Vec::with_capacity(sorted.len());
    let mut warm: Option<Vec<Complex64>> = None;
    for order in sorted {
        let m = composition_matrix(t, order)?;
        let est = largest_singular_value(&m, warm.as_deref(), opts)?;
        out.push((order, est.sigma));
        warm = Some(est.vector);
    }
    Ok(out)
}

/// `(A - I)·T`, `T·(A - I)`, `V - (I + 2T)` and `(V - I) + 2C*` residuals at
/// order `N` (max-abs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub resolvent_left: f64,
    pub resolvent_right: f64,
    pub cogenerator_definition: f64,
    pub cogenerator_vs_cesaro_adjoint: f64,
}

pub fn identity_residuals(order: usize) -> IdentityResiduals {
    let i = OperatorMatrix::identity(order);
    let a_minus_i = generator_matrix(order).sub(&i).expect("same order");
    let t = resolvent_t_matrix(order);
    let v = cogenerator_matrix(order);
    let left = matmul(&a_minus_i, &t).expect("same order");
    let right = matmul(&t, &a_minus_i).expect("same order");
    let two = Complex64::new(2.0, 0.0);
    let v_def = i.add(&t.scale(two)).expect("same order");
    let v_minus_i = v.sub(&i).expect("same order");
    let cesaro_check = v_minus_i
        .add(&cesaro_adjoint_matrix(order).scale(two))
        .expect("same order");
    IdentityResiduals {
        resolvent_left: left.max_abs_diff(&i).expect("same order"),
        resolvent_right: right.max_abs_diff(&i).expect("same order"),
        cogenerator_definition: v.max_abs_diff(&v_def).expect("same order"),
        cogenerator_vs_cesaro_adjoint: cesaro_check.max_abs(),
    }
}
