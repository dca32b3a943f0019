//! Truncated coefficient model of H²(𝔻).
//!
//! A function `f(z) = Σ a_k z^k` is stored by its Taylor coefficients up to a
//! fixed order `N`, and operators by their `(N+1)×(N+1)` compressions. Every
//! matrix in this crate uses one convention:
//!
//! ```text
//! entry(n, m) = coefficient of z^n in the image of z^m
//! ```
//!
//! so lower-triangular matrices are operators that never lower degree (the
//! Cesàro operator) and upper-triangular ones never raise it (its adjoint,
//! composition with `φ_t`).
//!
//! Products of two lower-triangular (or two upper-triangular) compressions
//! only touch indices `≤ N`, so they coincide with the compression of the
//! infinite product. `matmul` relies on this and the tests check it.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Working precision for matrix builders that evaluate cancelling sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Precision {
    #[default]
    Double,
    /// Multiprecision evaluation with the given mantissa width in bits;
    /// results are rounded back to `f64`.
    Extended { bits: usize },
}

/// Truncated Taylor-coefficient vector `(a_0, …, a_N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffVector {
    coeffs: Vec<Complex64>,
}

impl CoeffVector {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter(
                "a coefficient vector needs at least one entry".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Self {
            coeffs: vec![ZERO; order + 1],
        }
    }

    /// The monomial `z^k` truncated at `order`.
    pub fn monomial(order: usize, k: usize) -> Self {
        let mut v = Self::zeros(order);
        if k <= order {
            v.coeffs[k] = ONE;
        }
        v
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, k: usize) -> Complex64 {
        self.coeffs[k]
    }

    /// Coefficients `0..=order` (zero padded when extending is not allowed,
    /// so `order` must not exceed the current order).
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(Error::OrderMismatch {
                left: order,
                right: self.order(),
            });
        }
        Ok(Self {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn axpy(&self, c: Complex64, other: &Self) -> Result<Self> {
        check_orders(self.order(), other.order())?;
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| a + c * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-ONE, other)
    }
}

fn check_orders(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::OrderMismatch { left, right });
    }
    Ok(())
}

/// `⟨f, g⟩ = Σ f_k conj(g_k)`, linear in the first slot.
pub fn inner(f: &CoeffVector, g: &CoeffVector) -> Result<Complex64> {
    check_orders(f.order(), g.order())?;
    Ok(f.coeffs
        .iter()
        .zip(&g.coeffs)
        .map(|(&a, &b)| a * b.conj())
        .sum())
}

/// `‖f‖₂`, computed with scaling so large or tiny coefficients do not
/// overflow.
pub fn h2_norm(f: &CoeffVector) -> f64 {
    norm2(&f.coeffs)
}

pub(crate) fn norm2(v: &[Complex64]) -> f64 {
    let scale = v.iter().map(|a| a.norm()).fold(0.0_f64, f64::max);
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = v.iter().map(|a| (a / scale).norm_sqr()).sum();
    scale * s.sqrt()
}

/// Zero-pattern metadata of an [`OperatorMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    LowerTriangular,
    UpperTriangular,
    /// Nonzeros confined to the diagonal and one neighbouring diagonal.
    Bidiagonal,
    Dense,
}

impl Structure {
    /// Whether `(row, col)` may hold a nonzero entry.
    fn admits(self, row: usize, col: usize) -> bool {
        match self {
            Structure::LowerTriangular => row >= col,
            Structure::UpperTriangular => row <= col,
            Structure::Bidiagonal => row.abs_diff(col) <= 1,
            Structure::Dense => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Structure::LowerTriangular => "lower-triangular",
            Structure::UpperTriangular => "upper-triangular",
            Structure::Bidiagonal => "bidiagonal",
            Structure::Dense => "dense",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lower-triangular" => Ok(Structure::LowerTriangular),
            "upper-triangular" => Ok(Structure::UpperTriangular),
            "bidiagonal" => Ok(Structure::Bidiagonal),
            "dense" => Ok(Structure::Dense),
            other => Err(Error::Parse(format!("unknown structure {other:?}"))),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense complex compression of an operator on H²(𝔻), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    order: usize,
    structure: Structure,
    entries: Vec<Complex64>,
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries, rejecting data that violates
    /// the declared zero pattern.
    pub fn new(order: usize, structure: Structure, entries: Vec<Complex64>) -> Result<Self> {
        let dim = order + 1;
        if entries.len() != dim * dim {
            return Err(Error::Parse(format!(
                "expected {} entries for order {order}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if structure == Structure::Bidiagonal {
            let upper = (0..dim).any(|r| r + 1 < dim && entries[r * dim + r + 1] != ZERO);
            let lower = (1..dim).any(|r| entries[r * dim + r - 1] != ZERO);
            if upper && lower {
                return Err(Error::StructureViolation {
                    row: 1,
                    col: 0,
                    structure,
                });
            }
        }
        for row in 0..dim {
            for col in 0..dim {
                if entries[row * dim + col] != ZERO && !structure.admits(row, col) {
                    return Err(Error::StructureViolation { row, col, structure });
                }
            }
        }
        Ok(Self {
            order,
            structure,
            entries,
        })
    }

    /// Fills admissible positions from `f(row, col)`; positions outside the
    /// pattern are left at zero and `f` is not called for them.
    pub fn from_fn(
        order: usize,
        structure: Structure,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let dim = order + 1;
        let mut entries = vec![ZERO; dim * dim];
        for row in 0..dim {
            for col in 0..dim {
                if structure.admits(row, col) {
                    entries[row * dim + col] = f(row, col);
                }
            }
        }
        Self {
            order,
            structure,
            entries,
        }
    }

    pub(crate) fn from_parts_unchecked(
        order: usize,
        structure: Structure,
        entries: Vec<Complex64>,
    ) -> Self {
        debug_assert_eq!(entries.len(), (order + 1) * (order + 1));
        Self {
            order,
            structure,
            entries,
        }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, Structure::Bidiagonal, |r, c| {
            if r == c {
                ONE
            } else {
                ZERO
            }
        })
    }

    pub fn zeros(order: usize, structure: Structure) -> Self {
        Self::from_fn(order, structure, |_, _| ZERO)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.order + 1
    }

    pub fn structure(&self) -> Structure {
        self.structure
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        let dim = self.dim();
        &self.entries[row * dim..(row + 1) * dim]
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|r| self.get(r, col)).collect()
    }

    /// Conjugate transpose; triangular structure flips.
    pub fn adjoint(&self) -> Self {
        let structure = match self.structure {
            Structure::LowerTriangular => Structure::UpperTriangular,
            Structure::UpperTriangular => Structure::LowerTriangular,
            s => s,
        };
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[c * dim + r] = self.entries[r * dim + c].conj();
            }
        }
        Self::from_parts_unchecked(self.order, structure, entries)
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> Self {
        let mut t = self.adjoint();
        t.entries.iter_mut().for_each(|z| *z = z.conj());
        t
    }

    /// Leading `(order+1)`-block.
    pub fn leading_block(&self, order: usize) -> Result<Self> {
        if order > self.order {
            return Err(Error::OrderMismatch {
                left: order,
                right: self.order,
            });
        }
        let dim = order + 1;
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            entries.extend_from_slice(&self.row(r)[..dim]);
        }
        Ok(Self::from_parts_unchecked(order, self.structure, entries))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_parts_unchecked(
            self.order,
            self.structure,
            self.entries.iter().map(|&z| z * c).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        check_orders(self.order, other.order)?;
        let structure = if self.structure == other.structure {
            self.structure
        } else {
            match (self.structure, other.structure) {
                (Structure::Bidiagonal, s) | (s, Structure::Bidiagonal) => {
                    self.detect_combined_structure(other, s)
                }
                _ => Structure::Dense,
            }
        };
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(Self::from_parts_unchecked(self.order, structure, entries))
    }

    fn detect_combined_structure(&self, other: &Self, candidate: Structure) -> Structure {
        let ok = |m: &Self| {
            (0..m.dim()).all(|r| {
                (0..m.dim()).all(|c| m.get(r, c) == ZERO || candidate.admits(r, c))
            })
        };
        if candidate != Structure::Bidiagonal && ok(self) && ok(other) {
            candidate
        } else {
            Structure::Dense
        }
    }

    /// Largest `|entry|`.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-abs entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_orders(self.order, other.order)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Column range that can be nonzero in `row`.
    fn row_span(&self, row: usize) -> (usize, usize) {
        let last = self.order;
        match self.structure {
            Structure::LowerTriangular => (0, row),
            Structure::UpperTriangular => (row, last),
            Structure::Bidiagonal => (row.saturating_sub(1), (row + 1).min(last)),
            Structure::Dense => (0, last),
        }
    }

    /// `M f`.
    pub fn apply(&self, f: &CoeffVector) -> Result<CoeffVector> {
        check_orders(self.order, f.order())?;
        Ok(CoeffVector {
            coeffs: self.apply_slice(f.coeffs()),
        })
    }

    pub(crate) fn apply_slice(&self, x: &[Complex64]) -> Vec<Complex64> {
        (0..self.dim())
            .map(|r| {
                let (lo, hi) = self.row_span(r);
                let row = self.row(r);
                (lo..=hi).map(|c| row[c] * x[c]).sum()
            })
            .collect()
    }

    /// `Mᴴ y`.
    pub(crate) fn apply_adjoint_slice(&self, y: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim()];
        for r in 0..self.dim() {
            let (lo, hi) = self.row_span(r);
            let row = self.row(r);
            let yr = y[r];
            for c in lo..=hi {
                out[c] += row[c].conj() * yr;
            }
        }
        out
    }
}

/// `A·B`. Structure is preserved when both operands share a triangular
/// pattern; in that case the result is the compression of the infinite
/// product, with no truncation error.
pub fn matmul(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    check_orders(a.order, b.order)?;
    use Structure::*;
    let structure = match (a.structure, b.structure) {
        (LowerTriangular, LowerTriangular)
        | (LowerTriangular, Bidiagonal)
        | (Bidiagonal, LowerTriangular) => LowerTriangular,
        (UpperTriangular, UpperTriangular)
        | (UpperTriangular, Bidiagonal)
        | (Bidiagonal, UpperTriangular) => UpperTriangular,
        _ => Dense,
    };
    let dim = a.dim();
    let mut entries = vec![ZERO; dim * dim];
    for r in 0..dim {
        let (lo, hi) = a.row_span(r);
        let arow = a.row(r);
        let out = &mut entries[r * dim..(r + 1) * dim];
        for k in lo..=hi {
            let aik = arow[k];
            if aik == ZERO {
                continue;
            }
            let (blo, bhi) = b.row_span(k);
            let brow = b.row(k);
            for c in blo..=bhi {
                out[c] += aik * brow[c];
            }
        }
    }
    // Bidiagonal·bidiagonal can spread to a tridiagonal pattern.
    let structure = if structure == Dense {
        detect_structure(dim, &entries)
    } else {
        structure
    };
    Ok(OperatorMatrix::from_parts_unchecked(a.order, structure, entries))
}

fn detect_structure(dim: usize, entries: &[Complex64]) -> Structure {
    let nz = |r: usize, c: usize| entries[r * dim + c] != ZERO;
    let lower = (0..dim).all(|r| (r + 1..dim).all(|c| !nz(r, c)));
    let upper = (0..dim).all(|r| (0..r).all(|c| !nz(r, c)));
    match (lower, upper) {
        (true, _) => Structure::LowerTriangular,
        (false, true) => Structure::UpperTriangular,
        _ => Structure::Dense,
    }
}

/// Matrix of the Cesàro operator: `entry(n, m) = 1/(n+1)` for `n ≥ m`.
pub fn cesaro_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(order, Structure::LowerTriangular, |n, _| {
        Complex64::new(1.0 / (n as f64 + 1.0), 0.0)
    })
}

/// Matrix of `C*`: `entry(n, m) = 1/(m+1)` for `n ≤ m`.
pub fn cesaro_adjoint_matrix(order: usize) -> OperatorMatrix {
    OperatorMatrix::from_fn(order, Structure::UpperTriangular, |_, m| {
        Complex64::new(1.0 / (m as f64 + 1.0), 0.0)
    })
}

/// `(C f)_n = (1/(n+1)) Σ_{k≤n} a_k` in O(N), with compensated prefix sums.
pub fn apply_cesaro(f: &CoeffVector) -> CoeffVector {
    let mut acc = crate::sum::NeumaierComplex::default();
    let coeffs = f
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &a)| {
            acc.add(a);
            acc.value() / (n as f64 + 1.0)
        })
        .collect();
    CoeffVector { coeffs }
}

/// `(C* f)_n = Σ_{m≥n} a_m/(m+1)` over the stored coefficients, in O(N).
///
/// This is the compression of `C*` applied to the truncation; for functions
/// with an infinite coefficient tail the true value differs by the constant
/// `Σ_{m>N} a_m/(m+1)` in every slot.
pub fn apply_cesaro_adjoint(f: &CoeffVector) -> CoeffVector {
    let mut acc = crate::sum::NeumaierComplex::default();
    let mut coeffs = vec![ZERO; f.coeffs.len()];
    for m in (0..f.coeffs.len()).rev() {
        acc.add(f.coeffs[m] / (m as f64 + 1.0));
        coeffs[m] = acc.value();
    }
    CoeffVector { coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_vector(rng: &mut ChaCha8Rng, order: usize) -> CoeffVector {
        CoeffVector::new(
            (0..=order)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn cesaro_order_zero_is_one() {
        assert_eq!(cesaro_matrix(0).entries(), &[c(1.0)]);
        assert_eq!(cesaro_adjoint_matrix(0).entries(), &[c(1.0)]);
    }

    #[test]
    fn cesaro_fixes_all_ones() {
        let f = CoeffVector::from_real(&[1.0; 4]).unwrap();
        let g = cesaro_matrix(3).apply(&f).unwrap();
        for k in 0..4 {
            assert!((g.get(k) - c(1.0)).norm() < 1e-15);
        }
        assert_eq!(apply_cesaro(&f), f);
    }

    #[test]
    fn cesaro_first_column_is_harmonic() {
        let e0 = CoeffVector::monomial(5, 0);
        let g = apply_cesaro(&e0);
        for n in 0..=5 {
            assert_eq!(g.get(n), c(1.0 / (n as f64 + 1.0)));
        }
        let zero = CoeffVector::zeros(7);
        assert_eq!(apply_cesaro(&zero), zero);
    }

    #[test]
    fn adjoint_column_three() {
        let m = cesaro_adjoint_matrix(3);
        assert_eq!(m.column(3), vec![c(0.25); 4]);
    }

    #[test]
    fn adjoint_is_exact_conjugate_transpose() {
        for order in [0, 1, 5, 64] {
            assert_eq!(cesaro_matrix(order).adjoint(), cesaro_adjoint_matrix(order));
        }
    }

    #[test]
    fn fast_cesaro_matches_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let order = [0, 1, 3, 32, 100, 256][trial % 6];
            let f = random_vector(&mut rng, order);
            let fast = apply_cesaro(&f);
            let slow = cesaro_matrix(order).apply(&f).unwrap();
            let diff = h2_norm(&fast.sub(&slow).unwrap());
            assert!(diff <= 1e-14 * h2_norm(&slow).max(1e-300), "order {order}: {diff}");

            let fast_adj = apply_cesaro_adjoint(&f);
            let slow_adj = cesaro_adjoint_matrix(order).apply(&f).unwrap();
            let diff = h2_norm(&fast_adj.sub(&slow_adj).unwrap());
            assert!(diff <= 1e-14 * h2_norm(&slow_adj).max(1e-300));
        }
    }

    #[test]
    fn identity_is_neutral() {
        let a = cesaro_matrix(6);
        let i = OperatorMatrix::identity(6);
        assert_eq!(matmul(&i, &a).unwrap(), a);
        assert_eq!(matmul(&a, &i).unwrap(), a);
    }

    #[test]
    fn triangular_products_are_truncation_exact() {
        let small = matmul(&cesaro_matrix(16), &cesaro_matrix(16)).unwrap();
        let big = matmul(&cesaro_matrix(64), &cesaro_matrix(64)).unwrap();
        assert_eq!(big.leading_block(16).unwrap(), small);
        assert_eq!(small.structure(), Structure::LowerTriangular);

        let small = matmul(&cesaro_adjoint_matrix(16), &cesaro_adjoint_matrix(16)).unwrap();
        let big = matmul(&cesaro_adjoint_matrix(64), &cesaro_adjoint_matrix(64)).unwrap();
        assert_eq!(big.leading_block(16).unwrap(), small);
    }

    #[test]
    fn basic_inner_products() {
        let e0 = CoeffVector::monomial(4, 0);
        assert_eq!(inner(&e0, &e0).unwrap(), c(1.0));
        let f = CoeffVector::new(vec![Complex64::new(0.0, 1.0), c(2.0)]).unwrap();
        assert_eq!(inner(&f, &f).unwrap(), c(5.0));
        assert!((h2_norm(&f) - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn order_mismatch_is_an_error() {
        let a = cesaro_matrix(3);
        let b = cesaro_matrix(4);
        assert!(matches!(matmul(&a, &b), Err(Error::OrderMismatch { .. })));
        let f = CoeffVector::zeros(2);
        assert!(a.apply(&f).is_err());
        assert!(inner(&f, &CoeffVector::zeros(3)).is_err());
    }

    #[test]
    fn structure_is_verified_on_construction() {
        let mut entries = vec![c(0.0); 4];
        entries[1] = c(1.0); // row 0, col 1
        assert!(OperatorMatrix::new(1, Structure::UpperTriangular, entries.clone()).is_ok());
        assert!(matches!(
            OperatorMatrix::new(1, Structure::LowerTriangular, entries),
            Err(Error::StructureViolation { row: 0, col: 1, .. })
        ));
        let full = vec![c(1.0); 4];
        assert!(OperatorMatrix::new(1, Structure::Bidiagonal, full).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn lower(order: usize, seed: u64) -> OperatorMatrix {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            OperatorMatrix::from_fn(order, Structure::LowerTriangular, |_, _| {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
        }

        proptest! {
            #[test]
            fn lower_products_truncate_consistently(order in 1usize..24, cut in 0usize..24, seed: u64) {
                let cut = cut.min(order);
                let a = lower(order, seed);
                let b = lower(order, seed.wrapping_add(1));
                let full = matmul(&a, &b).unwrap().leading_block(cut).unwrap();
                let trunc = matmul(&a.leading_block(cut).unwrap(), &b.leading_block(cut).unwrap()).unwrap();
                prop_assert_eq!(full, trunc);
            }
        }
    }
}
