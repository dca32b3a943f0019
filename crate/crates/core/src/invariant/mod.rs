//! Invariant subspaces and their residual certificates.
//!
//! * [`line_model`]: spans of `y^k e^{λy}` in `L²(ℝ, w dy)`, whose
//!   orthocomplements are shift invariant, and the non-unicellularity
//!   certificate built from two of them.
//! * [`disc_model`]: spans of generalized eigenvectors
//!   `(1 - z)^{-γ} log^k(1/(1 - z))` of the generator, invariant under `C*`.
//! * [`nonstandard`]: the window-plus-tail subspace, the twisted Laplace
//!   transform and finite Blaschke products.
//!
//! The two models are certified separately. No parameter dictionary between
//! `λ` on the line and `γ` on the disc is assumed.

pub mod disc_model;
pub mod line_model;
pub mod nonstandard;

pub use disc_model::{
    chain_residual, eigen_integral, gen_eigenvector_coeffs, verify_cesaro_coinvariance, CoinvarianceOptions,
    DiscSubspace,
};
pub use line_model::{
    build_line_subspace, exp_monomial_shift_expansion, non_unicellularity_certificate, shift_reconstruction_residual,
    LineSubspace,
};
pub use nonstandard::{
    blaschke_certificate, blaschke_eval, classify_subspace, kernel_fit_residual, model_space_kernel_basis,
    nonstandard_subspace_certificate, twisted_laplace, Classification, ClassifierGrid, KernelFn, ShiftSubspace,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::CoeffVector;
use crate::line::Evaluable;

/// Independence threshold on `det(G) / Π G_ii`.
pub const GRAM_TOLERANCE: f64 = 1e-6;

/// Distinct points of the open right half-plane with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    points: Vec<(Complex64, u32)>,
}

impl SpectralData {
    pub fn new(points: Vec<(Complex64, u32)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("spectral data needs at least one point".into()));
        }
        for (i, &(lambda, mult)) in points.iter().enumerate() {
            if !(lambda.re > 0.0) || !lambda.im.is_finite() || !lambda.re.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "spectral point {lambda} must lie in the open right half-plane"
                )));
            }
            if mult == 0 {
                return Err(Error::InvalidParameter(format!("multiplicity of {lambda} must be at least 1")));
            }
            if points[..i].iter().any(|&(mu, _)| mu == lambda) {
                return Err(Error::InvalidParameter(format!("spectral point {lambda} repeated")));
            }
        }
        Ok(Self { points })
    }

    pub fn single(lambda: Complex64, multiplicity: u32) -> Result<Self> {
        Self::new(vec![(lambda, multiplicity)])
    }

    pub fn points(&self) -> &[(Complex64, u32)] {
        &self.points
    }

    /// Total multiplicity.
    pub fn dimension(&self) -> usize {
        self.points.iter().map(|&(_, m)| m as usize).sum()
    }

    /// `(λ, k)` for every basis function, in order.
    pub fn labels(&self) -> Vec<(Complex64, u32)> {
        self.points
            .iter()
            .flat_map(|&(lambda, m)| (0..m).map(move |k| (lambda, k)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Model {
    Disc,
    Line,
    HalflineWindow { t: f64 },
}

#[derive(Debug, Clone)]
pub enum BasisVectors {
    Coefficients(Vec<CoeffVector>),
    Functions(Vec<Evaluable>),
}

/// Basis vectors together with their Gram matrix `G[i][j] = ⟨v_i, v_j⟩`.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub vectors: BasisVectors,
    pub gram: DMatrix<Complex64>,
    pub model: Model,
}

impl SubspaceBasis {
    pub fn len(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `det(G) / Π G_ii`, which lies in `[0, 1]` for a Gram matrix.
    pub fn relative_determinant(&self) -> f64 {
        relative_determinant(&self.gram)
    }

    /// `max |G - Gᴴ| / max |G|`.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.gram.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (&self.gram - self.gram.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale
    }

    /// Most negative eigenvalue of the Hermitian part, relative to the
    /// largest; zero for a positive semidefinite Gram matrix.
    pub fn negativity(&self) -> f64 {
        let h = (&self.gram + self.gram.adjoint()).scale(0.5);
        let eig = h.symmetric_eigenvalues();
        let top = eig.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        (-eig.iter().cloned().fold(f64::INFINITY, f64::min)).max(0.0) / top
    }

    pub fn is_independent(&self) -> bool {
        self.relative_determinant() > GRAM_TOLERANCE
    }
}

pub(crate) fn relative_determinant(gram: &DMatrix<Complex64>) -> f64 {
    let diag: f64 = gram.diagonal().iter().map(|z| z.re).product();
    if !(diag > 0.0) {
        return 0.0;
    }
    gram.clone().determinant().re / diag
}

/// Principal-angle data for a pair of subspaces of `ℂⁿ`.
///
/// In finite dimension the sum of two subspaces is always closed; the
/// smallest angle only quantifies how far from that degenerating the pair is.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSumDemo {
    pub dim_first: usize,
    pub dim_second: usize,
    pub dim_sum: usize,
    pub dim_intersection: usize,
    /// Cosines of the principal angles, descending.
    pub cosines: Vec<f64>,
}

impl SubspaceSumDemo {
    /// `sin` of the smallest angle outside the intersection.
    pub fn min_gap(&self) -> f64 {
        self.cosines
            .iter()
            .skip(self.dim_intersection)
            .map(|c| (1.0 - c * c).max(0.0).sqrt())
            .fold(1.0, f64::min)
    }
}

/// Dimensions and principal angles of `span(a) + span(b)` for column sets
/// `a`, `b`. Ranks use the relative threshold `rank_tol`.
pub fn subspace_sum_demo(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, rank_tol: f64) -> Result<SubspaceSumDemo> {
    if a.nrows() != b.nrows() {
        return Err(Error::OrderMismatch {
            left: a.nrows(),
            right: b.nrows(),
        });
    }
    let qa = orthonormal_columns(a, rank_tol);
    let qb = orthonormal_columns(b, rank_tol);
    let joint = DMatrix::from_fn(a.nrows(), a.ncols() + b.ncols(), |r, c| {
        if c < a.ncols() {
            a[(r, c)]
        } else {
            b[(r, c - a.ncols())]
        }
    });
    let dim_sum = orthonormal_columns(&joint, rank_tol).ncols();
    let mut cosines: Vec<f64> = if qa.ncols() == 0 || qb.ncols() == 0 {
        Vec::new()
    } else {
        (qa.adjoint() * &qb).singular_values().iter().map(|s| s.min(1.0)).collect()
    };
    cosines.sort_by(|x, y| y.total_cmp(x));
    Ok(SubspaceSumDemo {
        dim_first: qa.ncols(),
        dim_second: qb.ncols(),
        dim_sum,
        dim_intersection: qa.ncols() + qb.ncols() - dim_sum,
        cosines,
    })
}

fn orthonormal_columns(m: &DMatrix<Complex64>, rank_tol: f64) -> DMatrix<Complex64> {
    if m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > rank_tol * top && top > 0.0)
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Least-squares fit of `target` by the columns of `basis`; returns the
/// coefficients and `‖target - basis·x‖ / ‖target‖`.
pub(crate) fn least_squares(basis: &DMatrix<Complex64>, target: &[Complex64]) -> (Vec<Complex64>, f64) {
    let rhs = nalgebra::DVector::from_column_slice(target);
    let norm = rhs.norm();
    if basis.ncols() == 0 || norm == 0.0 {
        return (vec![Complex64::new(0.0, 0.0); basis.ncols()], if norm == 0.0 { 0.0 } else { 1.0 });
    }
    let svd = basis.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-14 * svd.singular_values.max()).expect("both factors computed");
    let resid = (&rhs - basis * &x).norm() / norm;
    (x.iter().cloned().collect(), resid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn spectral_data_validation() {
        let s = SpectralData::new(vec![(c(1.0, 0.0), 2), (c(2.0, 1.0), 1)]).unwrap();
        assert_eq!(s.dimension(), 3);
        assert_eq!(s.labels()[1], (c(1.0, 0.0), 1));
        assert!(SpectralData::single(c(0.0, 1.0), 1).is_err());
        assert!(SpectralData::single(c(1.0, 0.0), 0).is_err());
        assert!(SpectralData::new(vec![(c(1.0, 0.0), 1), (c(1.0, 0.0), 2)]).is_err());
        assert!(SpectralData::new(vec![]).is_err());
    }

    #[test]
    fn relative_determinant_of_known_gram() {
        let g = DMatrix::from_row_slice(2, 2, &[c(4.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
        assert!((relative_determinant(&g) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn finite_dimensional_sum_is_closed() {
        let a = DMatrix::from_fn(4, 2, |r, col| c((r == col) as u8 as f64, 0.0));
        let b = DMatrix::from_fn(4, 2, |r, col| c((r == col + 1) as u8 as f64, 0.0));
        let d = subspace_sum_demo(&a, &b, 1e-12).unwrap();
        assert_eq!((d.dim_first, d.dim_second, d.dim_sum, d.dim_intersection), (2, 2, 3, 1));
        assert!((d.cosines[0] - 1.0).abs() < 1e-12);
        assert!(d.min_gap() > 0.99);
        let tilt = DMatrix::from_fn(4, 1, |r, _| c([1.0, 1e-3, 0.0, 0.0][r], 0.0));
        let e1 = DMatrix::from_fn(4, 1, |r, _| c((r == 0) as u8 as f64, 0.0));
        let d = subspace_sum_demo(&e1, &tilt, 1e-12).unwrap();
        assert_eq!(d.dim_sum, 2);
        assert!((d.min_gap() - 1e-3).abs() < 1e-8);
    }

    #[test]
    fn least_squares_recovers_combination() {
        let basis = DMatrix::from_fn(5, 2, |r, col| c((r + 1) as f64, col as f64 * r as f64));
        let x = [c(0.5, -1.0), c(2.0, 0.25)];
        let target: Vec<Complex64> = (0..5).map(|r| basis[(r, 0)] * x[0] + basis[(r, 1)] * x[1]).collect();
        let (fit, resid) = least_squares(&basis, &target);
        assert!(resid < 1e-14);
        assert!((fit[0] - x[0]).norm() < 1e-13 && (fit[1] - x[1]).norm() < 1e-13);
    }
}
