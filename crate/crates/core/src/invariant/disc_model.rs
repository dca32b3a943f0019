//! Generalized eigenvectors of the generator on the disc side.
//!
//! `g_k(z) = (1 - z)^{-γ} log^k(1/(1 - z))` satisfies
//! `(A - γ) g_k = k g_{k-1}` for `A f = (1 - z) f'`, so spans of chains
//! `g_0, …, g_{m-1}` are invariant under `A`, hence under `C* = (I - A)^{-1}`,
//! and their orthocomplements are invariant under `C`.
//!
//! Truncation at order `N` discards the tail `Σ_{m>N} g_m/(m+1)`, which is
//! present in every coefficient of `C* g` and decays only like `N^{Re γ - 1}`.
//! `C* g` is therefore evaluated as `∫_0^1 g - Σ_{m<n} g_m/(m+1)` using
//! `∫_0^1 g_k = k!/(1 - γ)^{k+1}`, which is exact on every coefficient.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{least_squares, relative_determinant, BasisVectors, Model, SubspaceBasis, GRAM_TOLERANCE};
use crate::error::{Error, Result};
use crate::hardy::{apply_cesaro, CoeffVector};
use crate::report::{Certificate, Check};
use crate::semigroup::{generator_matrix, resolvent_t_matrix};
use crate::sum::NeumaierComplex;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn check_gamma(gamma: Complex64) -> Result<()> {
    if !(gamma.re < 0.5) || !gamma.im.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "γ = {gamma} must satisfy Re γ < 1/2 for (1 - z)^(-γ) to lie in H²"
        )));
    }
    Ok(())
}

/// `g_0, …, g_k` through degree `order`, from
/// `(n + 1) g_{k,n+1} = (n + γ) g_{k,n} + k g_{k-1,n}`.
pub fn gen_eigenvector_chain(gamma: Complex64, k: u32, order: usize) -> Result<Vec<CoeffVector>> {
    check_gamma(gamma)?;
    let mut chain: Vec<Vec<Complex64>> = Vec::with_capacity(k as usize + 1);
    for level in 0..=k as usize {
        let mut g = vec![ZERO; order + 1];
        g[0] = if level == 0 { ONE } else { ZERO };
        for n in 0..order {
            let lower = if level == 0 { ZERO } else { chain[level - 1][n] * level as f64 };
            g[n + 1] = ((n as f64 + gamma) * g[n] + lower) / (n as f64 + 1.0);
        }
        chain.push(g);
    }
    chain.into_iter().map(CoeffVector::new).collect()
}

/// Taylor coefficients of `(1 - z)^{-γ} log^k(1/(1 - z))` through `order`.
pub fn gen_eigenvector_coeffs(gamma: Complex64, k: u32, order: usize) -> Result<CoeffVector> {
    Ok(gen_eigenvector_chain(gamma, k, order)?.pop().expect("k + 1 levels"))
}

/// `∫_0^1 g_k = Σ_n g_{k,n}/(n + 1) = k!/(1 - γ)^{k+1}`.
pub fn eigen_integral(gamma: Complex64, k: u32) -> Complex64 {
    let fact: f64 = (1..=k).map(|i| i as f64).product();
    fact / (ONE - gamma).powu(k + 1)
}

/// Largest coefficientwise relative defect of `(A - γ) g_k = k g_{k-1}` over
/// `n ≤ order - 1`, each row scaled by the magnitudes of its terms.
pub fn chain_residual(gamma: Complex64, k: u32, order: usize) -> Result<f64> {
    let chain = gen_eigenvector_chain(gamma, k, order)?;
    let gk = &chain[k as usize];
    let ag = generator_matrix(order).apply(gk)?;
    let mut worst: f64 = 0.0;
    for n in 0..order {
        let lower = if k == 0 { ZERO } else { chain[k as usize - 1].get(n) * k as f64 };
        let lhs = ag.get(n) - gamma * gk.get(n);
        let scale = (n as f64 + 1.0) * gk.get(n + 1).norm() + (n as f64 + gamma).norm() * gk.get(n).norm() + lower.norm();
        let diff = (lhs - lower).norm();
        if diff > 0.0 {
            worst = worst.max(diff / scale);
        }
    }
    Ok(worst)
}

/// `span{g_k(γ) : (γ, m) in the list, k < m}` truncated at `order`.
#[derive(Debug, Clone)]
pub struct DiscSubspace {
    labels: Vec<(Complex64, u32)>,
    order: usize,
    pub basis: SubspaceBasis,
}

impl DiscSubspace {
    pub fn new(points: &[(Complex64, u32)], order: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("need at least one eigenvalue".into()));
        }
        let mut labels = Vec::new();
        let mut vectors = Vec::new();
        for (i, &(gamma, mult)) in points.iter().enumerate() {
            if mult == 0 {
                return Err(Error::InvalidParameter(format!("multiplicity of {gamma} must be at least 1")));
            }
            if points[..i].iter().any(|&(g, _)| g == gamma) {
                return Err(Error::InvalidParameter(format!("eigenvalue {gamma} repeated")));
            }
            let chain = gen_eigenvector_chain(gamma, mult - 1, order)?;
            for (k, v) in chain.into_iter().enumerate() {
                labels.push((gamma, k as u32));
                vectors.push(v);
            }
        }
        let d = vectors.len();
        let gram = DMatrix::from_fn(d, d, |i, j| {
            crate::hardy::inner(&vectors[i], &vectors[j]).expect("same order")
        });
        Ok(Self {
            labels,
            order,
            basis: SubspaceBasis {
                vectors: BasisVectors::Coefficients(vectors),
                gram,
                model: Model::Disc,
            },
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn labels(&self) -> &[(Complex64, u32)] {
        &self.labels
    }

    pub fn vectors(&self) -> &[CoeffVector] {
        match &self.basis.vectors {
            BasisVectors::Coefficients(v) => v,
            BasisVectors::Functions(_) => unreachable!("disc subspaces hold coefficient vectors"),
        }
    }

    /// `C* g_i` on coefficients `0..=order`, tail corrected.
    pub fn adjoint_image(&self, i: usize) -> Vec<Complex64> {
        let (gamma, k) = self.labels[i];
        let g = self.vectors()[i].coeffs();
        let total = eigen_integral(gamma, k);
        let mut partial = NeumaierComplex::default();
        g.iter()
            .enumerate()
            .map(|(n, &gn)| {
                let v = total - partial.value();
                partial.add(gn / (n as f64 + 1.0));
                v
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinvarianceOptions {
    /// Width `K` of the excluded top band; residuals use indices `0..=N-K`.
    pub band: usize,
    /// Random elements of the complement tested against `C`.
    pub samples: usize,
    pub seed: u64,
    pub eigen_tolerance: f64,
    pub complement_tolerance: f64,
}

impl Default for CoinvarianceOptions {
    fn default() -> Self {
        Self {
            band: 16,
            samples: 100,
            seed: 0x00C0_FFEE,
            eigen_tolerance: 1e-10,
            complement_tolerance: 1e-8,
        }
    }
}

/// Certifies `C* 𝒩 ⊂ 𝒩` and `C 𝒩^⊥ ⊂ 𝒩^⊥` on the coefficient window.
pub fn verify_cesaro_coinvariance(sub: &DiscSubspace, opts: CoinvarianceOptions) -> Result<Certificate> {
    let n = sub.order();
    if opts.band >= n {
        return Err(Error::InvalidParameter(format!(
            "band {} leaves no window at order {n}",
            opts.band
        )));
    }
    let window = n - opts.band;
    let d = sub.labels().len();
    let basis = DMatrix::from_fn(window + 1, d, |r, c| sub.vectors()[c].get(r));
    let gram_w = basis.adjoint() * &basis;
    let det = relative_determinant(&gram_w);
    if !(det > GRAM_TOLERANCE) {
        return Err(Error::SingularGram {
            det,
            tolerance: GRAM_TOLERANCE,
        });
    }

    let mut cert = Certificate::new(format!("disc span {:?}, N = {n}", sub.labels())).with_seed(opts.seed);
    cert.note(format!("window 0..={window}, excluded band {}..={n}", window + 1));
    cert.push(Check::at_least("gram_relative_determinant", det, GRAM_TOLERANCE));

    let mut eigen: f64 = 0.0;
    let mut coinv: f64 = 0.0;
    let mut truncated: f64 = 0.0;
    let t = resolvent_t_matrix(n);
    for i in 0..d {
        let (gamma, k) = sub.labels()[i];
        let image = &sub.adjoint_image(i)[..=window];
        coinv = coinv.max(least_squares(&basis, image).1);
        let g = sub.vectors()[i].coeffs();
        if k == 0 {
            let lam = ONE / (ONE - gamma);
            let diff: f64 = image.iter().zip(g).map(|(y, x)| (y - lam * x).norm_sqr()).sum();
            let norm: f64 = g[..=window].iter().map(|x| x.norm_sqr()).sum();
            eigen = eigen.max((diff / norm).sqrt());
        }
        let naive: Vec<Complex64> = t.apply(&sub.vectors()[i])?.coeffs()[..=window].iter().map(|z| -z).collect();
        truncated = truncated.max(least_squares(&basis, &naive).1);
    }
    if sub.labels().iter().any(|&(_, k)| k == 0) {
        cert.push(Check::at_most("eigen_relation", eigen, opts.eigen_tolerance));
    }
    cert.push(Check::at_most("adjoint_coinvariance", coinv, opts.eigen_tolerance));
    cert.note(format!("without tail correction the -T g residual is {truncated:.3e}"));

    // ⟨Cf, g⟩ over all of ℓ² for f supported on the window: the part of Cf
    // beyond the window is (Σ f)/(n + 1).
    let tails: Vec<Complex64> = (0..d)
        .map(|i| {
            let (gamma, k) = sub.labels()[i];
            let g = sub.vectors()[i].coeffs();
            let mut head = NeumaierComplex::default();
            for (m, &gm) in g[..=window].iter().enumerate() {
                head.add(gm / (m as f64 + 1.0));
            }
            eigen_integral(gamma, k) - head.value()
        })
        .collect();
    let gram_lu = gram_w.clone().lu();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..opts.samples {
        let raw: Vec<Complex64> = (0..=window)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let (x, _) = least_squares(&basis, &raw);
        let fit = &basis * DVector::from_vec(x);
        let f: Vec<Complex64> = raw.iter().zip(fit.iter()).map(|(a, b)| a - b).collect();
        let f_norm = f.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let total: Complex64 = f.iter().sum();
        let cf = apply_cesaro(&CoeffVector::new(f)?);
        let b = DVector::from_fn(d, |i, _| {
            let g = sub.vectors()[i].coeffs();
            let head: Complex64 = cf.coeffs().iter().zip(g).map(|(a, gm)| a * gm.conj()).sum();
            head + total * tails[i].conj()
        });
        let coords = gram_lu.solve(&b).ok_or(Error::SingularGram {
            det,
            tolerance: GRAM_TOLERANCE,
        })?;
        let proj = b.dotc(&coords).re.max(0.0).sqrt();
        worst = worst.max(proj / f_norm);
    }
    cert.push(Check::at_most("complement_invariance", worst, opts.complement_tolerance));
    Ok(cert)
}
