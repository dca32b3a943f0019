//! Shift-invariant subspaces of `L²(ℝ, w dy)` that are not of the form
//! `L²((a, ∞), w)`, the twisted Laplace transform and finite Blaschke
//! products on the right half-plane.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{least_squares, SpectralData};
use crate::error::{Error, Result};
use crate::line::{pointwise_residual, weighted_inner, Evaluable, WeightFn, BREAKPOINT_GUARD};
use crate::quadrature::{integrate_piecewise, AdaptiveOptions};
use crate::report::{Certificate, Check};

/// Right-shift-invariant subspaces with an exact membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShiftSubspace {
    /// `L²((a, ∞), w)`.
    Standard { a: f64 },
    /// `span{e^{λ̄y} χ_{(-∞,T)}} ⊕ L²((T, ∞), w)`.
    WindowPlusTail { lambda: Complex64, t: f64 },
}

impl ShiftSubspace {
    fn boundary(&self) -> f64 {
        match *self {
            ShiftSubspace::Standard { a } => a,
            ShiftSubspace::WindowPlusTail { t, .. } => t,
        }
    }

    /// Sup-norm distance, relative to `max |h|` over the probes, between the
    /// restriction of `h` to the left of the boundary and the admissible
    /// left parts. Probes next to a jump of `h` are skipped.
    pub fn membership_residual(&self, h: &Evaluable, probes: &[f64]) -> f64 {
        let cuts = h.breakpoints();
        let usable: Vec<f64> = probes
            .iter()
            .copied()
            .filter(|y| cuts.iter().all(|c| (y - c).abs() >= BREAKPOINT_GUARD))
            .collect();
        let scale = usable.iter().map(|&y| h.eval(y).norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let b = self.boundary();
        let left: Vec<f64> = usable.iter().copied().filter(|&y| y < b).collect();
        let values: Vec<Complex64> = left.iter().map(|&y| h.eval(y)).collect();
        let worst = match *self {
            ShiftSubspace::Standard { .. } => values.iter().map(|v| v.norm()).fold(0.0, f64::max),
            ShiftSubspace::WindowPlusTail { lambda, .. } => {
                let e: Vec<Complex64> = left.iter().map(|&y| (lambda.conj() * y).exp()).collect();
                let den: f64 = e.iter().map(|z| z.norm_sqr()).sum();
                let c = if den > 0.0 {
                    values.iter().zip(&e).map(|(v, z)| v * z.conj()).sum::<Complex64>() / den
                } else {
                    Complex64::new(0.0, 0.0)
                };
                values.iter().zip(&e).map(|(v, z)| (v - c * z).norm()).fold(0.0, f64::max)
            }
        };
        worst / scale
    }

    /// Functions whose shifts span the subspace.
    pub fn generators(&self) -> Vec<Evaluable> {
        match *self {
            ShiftSubspace::Standard { a } => vec![
                Evaluable::indicator(a, a + 1.0),
                Evaluable::exp_monomial(Complex64::new(-1.0, 0.0), 0).windowed(a, f64::INFINITY),
            ],
            ShiftSubspace::WindowPlusTail { lambda, t } => vec![
                Evaluable::exp_monomial(lambda.conj(), 0).windowed(f64::NEG_INFINITY, t),
                Evaluable::indicator(t, t + 1.0),
            ],
        }
    }
}

/// Probe layout for [`classify_subspace`]: unit windows `χ_{[c-1, c)}` for
/// `c` on `lo, lo + spacing, …, ≤ hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierGrid {
    pub lo: f64,
    pub hi: f64,
    pub spacing: f64,
    pub probes_per_unit: usize,
    pub tolerance: f64,
}

impl Default for ClassifierGrid {
    fn default() -> Self {
        Self {
            lo: -15.0,
            hi: 15.0,
            spacing: 0.25,
            probes_per_unit: 16,
            tolerance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Classification {
    Zero,
    /// Consistent with `L²((a, ∞), w)` for `a` within one grid step of `a_est`.
    Standard { a_est: f64 },
    /// Some generator lives to the left of every window in the subspace.
    NonStandard { a_est: f64, generator_left: f64 },
}

/// Locates the leftmost unit window inside the subspace and compares it with
/// the leftmost support point of the generators.
pub fn classify_subspace(sub: &ShiftSubspace, grid: ClassifierGrid) -> Classification {
    let step = 1.0 / grid.probes_per_unit as f64;
    let count = ((grid.hi - grid.lo + 2.0) / step) as usize;
    // Offset keeps probes off the window edges.
    let probes: Vec<f64> = (0..count).map(|i| grid.lo - 1.0 + (i as f64 + 0.37) * step).collect();
    let centers = ((grid.hi - grid.lo) / grid.spacing + 1e-9).floor() as usize + 1;
    let a_est = (0..centers)
        .map(|i| grid.lo + i as f64 * grid.spacing)
        .find(|&c| {
            let window = Evaluable::indicator(c - 1.0, c);
            let has_mass = probes.iter().any(|&y| window.eval(y).norm() > 0.0);
            has_mass && sub.membership_residual(&window, &probes) <= grid.tolerance
        })
        .map(|c| c - 1.0)
        .unwrap_or(f64::INFINITY);
    let generator_left = sub
        .generators()
        .iter()
        .filter_map(|g| probes.iter().copied().find(|&y| g.eval(y).norm() > 0.0))
        .fold(f64::INFINITY, f64::min);
    if generator_left.is_infinite() && a_est.is_infinite() {
        Classification::Zero
    } else if generator_left < a_est - grid.spacing {
        Classification::NonStandard { a_est, generator_left }
    } else {
        Classification::Standard { a_est }
    }
}

fn check_half_plane(lambda: Complex64) -> Result<()> {
    if !(lambda.re > 0.0) || !lambda.im.is_finite() {
        return Err(Error::InvalidParameter(format!("{lambda} must lie in the open right half-plane")));
    }
    Ok(())
}

/// Membership, translation and non-standardness checks for
/// `span{e^{λ̄y} χ_{(-∞,T)}} ⊕ L²((T, ∞), w)`.
pub fn nonstandard_subspace_certificate(
    lambda: Complex64,
    t_cut: f64,
    t_samples: &[f64],
    probes: &[f64],
    opts: AdaptiveOptions,
) -> Result<Certificate> {
    check_half_plane(lambda)?;
    if !t_cut.is_finite() {
        return Err(Error::InvalidParameter("the cut T must be finite".into()));
    }
    let sub = ShiftSubspace::WindowPlusTail { lambda, t: t_cut };
    let gens = sub.generators();
    let kernel = Evaluable::exp_monomial(lambda.conj(), 0);
    let mut cert = Certificate::new(format!("span{{e^(conj({lambda}) y) on (-inf,{t_cut})}} + L2(({t_cut},inf), w)"));

    for &tau in t_samples {
        let shifted = crate::line::shift_apply(tau, &gens[0])?;
        let mut worst: f64 = 0.0;
        for g in &gens {
            worst = worst.max(sub.membership_residual(&crate::line::shift_apply(tau, g)?, probes));
        }
        cert.push(Check::at_most(format!("membership(tau={tau})"), worst, 1e-12));
        let left: Vec<f64> = probes.iter().copied().filter(|&y| y < t_cut).collect();
        let expected = kernel.scaled((-lambda.conj() * tau).exp());
        let r = pointwise_residual(&shifted, &expected, &left, BREAKPOINT_GUARD);
        cert.push(Check::at_most(format!("translation_identity(tau={tau})"), r.max_relative, 1e-12));
    }

    let window = Evaluable::indicator(t_cut - 1.0, t_cut);
    let whole = (f64::NEG_INFINITY, f64::INFINITY);
    let gg = weighted_inner(&gens[0], &gens[0], WeightFn::Canonical, whole, opts)?.re;
    let ww = weighted_inner(&window, &window, WeightFn::Canonical, whole, opts)?.re;
    let wg = weighted_inner(&window, &gens[0], WeightFn::Canonical, whole, opts)?;
    let distance = (1.0 - wg.norm_sqr() / (gg * ww)).max(0.0).sqrt();
    cert.push(Check::at_least("refutation_distance", distance, 0.1));

    let witness = Evaluable::sum(vec![window, gens[0].scaled(-wg / gg)]);
    let hh = weighted_inner(&witness, &witness, WeightFn::Canonical, whole, opts)?.re;
    let hg = weighted_inner(&witness, &gens[0], WeightFn::Canonical, whole, opts)?;
    cert.push(Check::at_most("orthogonal_witness", hg.norm() / (hh * gg).sqrt(), 1e-10));
    cert.push(Check::at_least("orthogonal_witness_norm", (hh / ww).sqrt(), 0.1));

    let class = classify_subspace(&sub, ClassifierGrid::default());
    cert.note(format!("classifier: {class:?}"));
    let nonstandard = matches!(class, Classification::NonStandard { .. });
    cert.push(Check::at_most("classified_nonstandard", if nonstandard { 0.0 } else { 1.0 }, 0.0));
    Ok(cert)
}

/// `∫_{-T}^∞ e^{-su} f(-u) du` for `f` supported in `(-∞, T)`.
pub fn twisted_laplace(f: &Evaluable, t_cut: f64, s: Complex64, opts: AdaptiveOptions) -> Result<Complex64> {
    if !(s.re > 0.0) {
        return Err(Error::InvalidParameter(format!("Re s must be positive, got {s}")));
    }
    let cuts: Vec<f64> = f.breakpoints().into_iter().map(|p| -p).collect();
    let est = integrate_piecewise(-t_cut, f64::INFINITY, &cuts, |u| (-s * u).exp() * f.eval(-u), opts)?;
    Ok(est.value)
}

/// `B(s) = Π ((s - λ)/(s + λ̄))^{n_λ}` over the zeros with multiplicities,
/// for `Re s ≥ 0`.
pub fn blaschke_eval(s: Complex64, zeros: &SpectralData) -> Result<Complex64> {
    if !(s.re >= 0.0) {
        return Err(Error::InvalidParameter(format!("Re s must be nonnegative, got {s}")));
    }
    Ok(zeros
        .points()
        .iter()
        .map(|&(l, m)| ((s - l) / (s + l.conj())).powu(m))
        .product())
}

/// `s ↦ (s + λ̄)^{-power}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelFn {
    pub lambda: Complex64,
    pub power: u32,
}

impl KernelFn {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        (s + self.lambda.conj()).powu(self.power).inv()
    }
}

/// `{(s + λ̄)^{-(j+1)} : j < n_λ}`, a basis of the model space of the
/// Blaschke product with these zeros.
pub fn model_space_kernel_basis(zeros: &SpectralData) -> Vec<KernelFn> {
    zeros
        .points()
        .iter()
        .flat_map(|&(lambda, m)| (1..=m).map(move |power| KernelFn { lambda, power }))
        .collect()
}

/// Relative least-squares residual of `values` (sampled at `s_grid`) in the
/// span of `basis`.
pub fn kernel_fit_residual(values: &[Complex64], s_grid: &[Complex64], basis: &[KernelFn]) -> Result<f64> {
    if values.len() != s_grid.len() {
        return Err(Error::OrderMismatch {
            left: values.len(),
            right: s_grid.len(),
        });
    }
    let m = DMatrix::from_fn(s_grid.len(), basis.len(), |r, c| basis[c].eval(s_grid[r]));
    Ok(least_squares(&m, values).1)
}

/// `|B(iy)| = 1` on the sampled axis points and `B(λ) = 0` at every zero.
pub fn blaschke_certificate(zeros: &SpectralData, axis: &[f64]) -> Result<Certificate> {
    let mut cert = Certificate::new(format!("Blaschke product with zeros {:?}", zeros.points()));
    let mut unit: f64 = 0.0;
    for &y in axis {
        unit = unit.max((blaschke_eval(Complex64::new(0.0, y), zeros)?.norm() - 1.0).abs());
    }
    cert.push(Check::at_most("unimodular_on_axis", unit, 1e-12));
    let mut at_zero: f64 = 0.0;
    for &(l, _) in zeros.points() {
        at_zero = at_zero.max(blaschke_eval(l, zeros)?.norm());
    }
    cert.push(Check::at_most("vanishes_at_zeros", at_zero, 1e-12));
    Ok(cert)
}
