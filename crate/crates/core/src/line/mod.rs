//! The line model: the semigroups on `L²(ℝ₊)`, `L²(ℝ)` and the weighted
//! space `L²(ℝ, w dy)`, `w(y) = e^{-2(e^y - 1)}`, and the unitary maps
//! between them.
//!
//! * `V_t g(x) = e^{-t} e^{-(1-e^{-t})x} g(e^{-t}x)` on `(0, ∞)`;
//! * `T h(x) = x^{-1/2} h(log x)`, `T^{-1} g(y) = e^{y/2} g(e^y)`;
//! * `σ_t h(y) = e^{-(1-e^{-t})e^y} h(y - t)`;
//! * `W h = h / √w`, and `S_t f(y) = f(y - t)`.
//!
//! `W σ_t W^{-1} = S_t` and `T^{-1} V_t T = e^{-t/2} σ_t`. All maps build
//! expression trees, so these identities can be checked pointwise to
//! rounding. The disc-to-half-plane link and the inverse Laplace transform
//! are not constructed numerically.

mod evaluable;
mod weight;

pub use evaluable::{ArgMap, Domain, Evaluable, Factor, Formula, LogValue};
pub use weight::{
    domar_nonstandard_indicator, domar_rigidity_check, figure1_data, muntz_ratio_table, weight_eval,
    weighted_inner, weighted_norm_sq, write_figure1_csv, DomarCondition, DomarReport, DomarRow, MuntzRow,
    WeightFn,
};

use num_complex::Complex64;

use crate::error::{Error, Result};

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

/// `V_t g` for `g` on `(0, ∞)`.
pub fn halfline_semigroup_apply(t: f64, g: &Evaluable) -> Result<Evaluable> {
    check_time(t)?;
    Ok(g.composed(ArgMap::Dilate((-t).exp()), Domain::HalfLine)
        .multiplied(Factor::HalflineDamping { t }))
}

/// `T h(x) = x^{-1/2} h(log x)`.
pub fn mellin_unitary(h: &Evaluable) -> Evaluable {
    h.composed(ArgMap::Log, Domain::HalfLine).multiplied(Factor::Power {
        p: Complex64::new(-0.5, 0.0),
    })
}

/// `T^{-1} g(y) = e^{y/2} g(e^y)`.
pub fn mellin_unitary_inv(g: &Evaluable) -> Evaluable {
    g.composed(ArgMap::Exp, Domain::Real).multiplied(Factor::ExpLinear {
        c: Complex64::new(0.5, 0.0),
    })
}

/// `σ_t h(y) = e^{-(1-e^{-t})e^y} h(y - t)`.
pub fn sigma_apply(t: f64, h: &Evaluable) -> Result<Evaluable> {
    check_time(t)?;
    Ok(h.shifted(t).multiplied(Factor::SigmaDamping { t }))
}

/// `S_t f(y) = f(y - t)`.
pub fn shift_apply(t: f64, f: &Evaluable) -> Result<Evaluable> {
    check_time(t)?;
    Ok(f.shifted(t))
}

/// `W h = h / √w`.
pub fn weight_conj(h: &Evaluable) -> Evaluable {
    h.multiplied(Factor::InvSqrtWeight)
}

/// `W^{-1} f = f √w`.
pub fn weight_conj_inv(f: &Evaluable) -> Evaluable {
    f.multiplied(Factor::SqrtWeight)
}

/// Largest pointwise discrepancy between two functions over the probes,
/// each measured relative to `max(1, |reference|)`. Probes within `guard`
/// of a breakpoint of either side are skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseResidual {
    pub max_relative: f64,
    pub max_absolute: f64,
    pub probes_used: usize,
}

pub fn pointwise_residual(candidate: &Evaluable, reference: &Evaluable, probes: &[f64], guard: f64) -> PointwiseResidual {
    let mut cuts = candidate.breakpoints();
    cuts.extend(reference.breakpoints());
    let mut out = PointwiseResidual {
        max_relative: 0.0,
        max_absolute: 0.0,
        probes_used: 0,
    };
    for &y in probes {
        if cuts.iter().any(|c| (y - c).abs() < guard) {
            continue;
        }
        let r = reference.eval(y);
        let d = (candidate.eval(y) - r).norm();
        out.max_absolute = out.max_absolute.max(d);
        out.max_relative = out.max_relative.max(d / r.norm().max(1.0));
        out.probes_used += 1;
    }
    out
}

/// Discontinuity guard used by the verification helpers.
pub const BREAKPOINT_GUARD: f64 = 1e-9;

/// `W σ_t W^{-1} f` against `S_t f`.
pub fn verify_intertwining(t: f64, f: &Evaluable, probes: &[f64]) -> Result<PointwiseResidual> {
    let lhs = weight_conj(&sigma_apply(t, &weight_conj_inv(f))?);
    let rhs = shift_apply(t, f)?;
    Ok(pointwise_residual(&lhs, &rhs, probes, BREAKPOINT_GUARD))
}

/// `T^{-1} V_t T h` against `e^{-t/2} σ_t h`.
pub fn verify_halfline_equivalence(t: f64, h: &Evaluable, probes: &[f64]) -> Result<PointwiseResidual> {
    let lhs = mellin_unitary_inv(&halfline_semigroup_apply(t, &mellin_unitary(h))?);
    let rhs = sigma_apply(t, h)?.scaled(Complex64::new((-t / 2.0).exp(), 0.0));
    Ok(pointwise_residual(&lhs, &rhs, probes, BREAKPOINT_GUARD))
}
