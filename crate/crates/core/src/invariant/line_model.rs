//! Exponential-monomial spans `𝒩 = span{y^k e^{λy}}` in `L²(ℝ, w dy)`.
//!
//! `S_t f_{λ,k} = Σ_j binom(k, j) (-t)^{k-j} e^{-λt} f_{λ,j}`, so `𝒩` is
//! invariant under the left shifts `S_t*` and `𝒩^⊥` is invariant under the
//! right shifts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{relative_determinant, BasisVectors, Model, SpectralData, SubspaceBasis, GRAM_TOLERANCE};
use crate::error::{Error, Result};
use crate::line::{weighted_inner, Evaluable, WeightFn};
use crate::quadrature::AdaptiveOptions;
use crate::report::{Certificate, Check};
use crate::special::binomial;

/// Pointwise tolerance for the shift reconstruction.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-12;

/// Coefficients `c_j = binom(k, j) (-t)^{k-j} e^{-λt}`, `j = 0..=k`, with
/// `S_t f_{λ,k} = Σ c_j f_{λ,j}`.
pub fn exp_monomial_shift_expansion(lambda: Complex64, k: u32, t: f64) -> Result<Vec<Complex64>> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    let decay = (-lambda * t).exp();
    Ok((0..=k)
        .map(|j| decay * binomial(k as usize, j as usize) * (-t).powi((k - j) as i32))
        .collect())
}

/// `max_y |S_t f_{λ,k}(y) - Σ c_j f_{λ,j}(y)| / max(1, Σ |c_j f_{λ,j}(y)|)`.
pub fn shift_reconstruction_residual(lambda: Complex64, k: u32, t: f64, probes: &[f64]) -> Result<f64> {
    let coeffs = exp_monomial_shift_expansion(lambda, k, t)?;
    let shifted = Evaluable::exp_monomial(lambda, k).shifted(t);
    let parts: Vec<Evaluable> = (0..=k).map(|j| Evaluable::exp_monomial(lambda, j)).collect();
    let mut worst: f64 = 0.0;
    for &y in probes {
        let terms: Vec<Complex64> = coeffs.iter().zip(&parts).map(|(c, f)| c * f.eval(y)).collect();
        let sum: Complex64 = terms.iter().sum();
        let scale = terms.iter().map(|z| z.norm()).sum::<f64>().max(1.0);
        worst = worst.max((shifted.eval(y) - sum).norm() / scale);
    }
    Ok(worst)
}

/// `span{y^k e^{λy} : (λ, n_λ) ∈ Λ, k < n_λ}` with its weighted Gram matrix.
#[derive(Debug, Clone)]
pub struct LineSubspace {
    pub spectral: SpectralData,
    pub basis: SubspaceBasis,
}

/// Basis functions of `Λ` and their Gram matrix under the canonical weight.
pub fn build_line_subspace(spectral: &SpectralData, opts: AdaptiveOptions) -> Result<LineSubspace> {
    let labels = spectral.labels();
    let funcs: Vec<Evaluable> = labels.iter().map(|&(l, k)| Evaluable::exp_monomial(l, k)).collect();
    let d = funcs.len();
    let mut gram = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for i in 0..d {
        for j in i..d {
            let v = weighted_inner(&funcs[i], &funcs[j], WeightFn::Canonical, (f64::NEG_INFINITY, f64::INFINITY), opts)?;
            gram[(i, j)] = v;
            gram[(j, i)] = v.conj();
        }
        gram[(i, i)].im = 0.0;
    }
    Ok(LineSubspace {
        spectral: spectral.clone(),
        basis: SubspaceBasis {
            vectors: BasisVectors::Functions(funcs),
            gram,
            model: Model::Line,
        },
    })
}

impl LineSubspace {
    pub fn functions(&self) -> &[Evaluable] {
        match &self.basis.vectors {
            BasisVectors::Functions(f) => f,
            BasisVectors::Coefficients(_) => unreachable!("line subspaces hold functions"),
        }
    }

    /// Gram sanity checks and the shift reconstruction residual for every
    /// basis function and every `t`.
    pub fn certificate(&self, t_samples: &[f64], probes: &[f64]) -> Result<Certificate> {
        let mut cert = Certificate::new(format!("line span {:?}", self.spectral.points()));
        cert.push(Check::at_most("gram_hermitian", self.basis.hermitian_defect(), 1e-12));
        cert.push(Check::at_most("gram_psd", self.basis.negativity(), 1e-12));
        cert.push(Check::at_least(
            "gram_relative_determinant",
            self.basis.relative_determinant(),
            GRAM_TOLERANCE,
        ));
        for &t in t_samples {
            let mut worst: f64 = 0.0;
            for (lambda, k) in self.spectral.labels() {
                worst = worst.max(shift_reconstruction_residual(lambda, k, t, probes)?);
            }
            cert.push(Check::at_most(format!("shift_reconstruction(t={t})"), worst, RECONSTRUCTION_TOLERANCE));
        }
        Ok(cert)
    }
}

/// Seeded probes on `[lo, hi)`.
pub(crate) fn seeded_probes(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Two shift-invariant subspaces `span{e^{λ_1 y}}^⊥` and `span{e^{λ_2 y}}^⊥`
/// with neither containing the other.
pub fn non_unicellularity_certificate(
    lambda1: Complex64,
    lambda2: Complex64,
    opts: AdaptiveOptions,
    seed: u64,
) -> Result<Certificate> {
    if lambda1 == lambda2 {
        return Err(Error::InvalidParameter("the two spectral points must differ".into()));
    }
    let pair = SpectralData::new(vec![(lambda1, 1), (lambda2, 1)])?;
    let sub = build_line_subspace(&pair, opts)?;
    let det = relative_determinant(&sub.basis.gram);
    if !(det > GRAM_TOLERANCE) {
        return Err(Error::SingularGram {
            det,
            tolerance: GRAM_TOLERANCE,
        });
    }
    let probes = seeded_probes(200, -10.0, 5.0, seed);
    let mut cert = Certificate::new(format!("N1 = span{{e^({lambda1})y}}, N2 = span{{e^({lambda2})y}}")).with_seed(seed);
    for (name, lambda) in [("N1", lambda1), ("N2", lambda2)] {
        for t in [0.1, 1.0, 3.0] {
            let r = shift_reconstruction_residual(lambda, 0, t, &probes)?;
            cert.push(Check::at_most(format!("{name}_invariance(t={t})"), r, 1e-10));
        }
    }
    cert.push(Check::at_least("gram_relative_determinant", det, GRAM_TOLERANCE));
    cert.push(Check::at_most("gram_hermitian", sub.basis.hermitian_defect(), 1e-12));
    Ok(cert)
}
