//! Numerical toolkit for the Cesàro operator on the Hardy space H²(𝔻).
//!
//! * [`hardy`]: truncated coefficient vectors and operator matrices, the
//!   Cesàro operator and its adjoint.
//! * [`semigroup`]: the composition semigroup `C_{φ_t}`, its generator,
//!   resolvent, cogenerator and adjoint, and compressed-norm estimates.
//! * [`quadrature`]: half-line rules for the kernels
//!   `t^{β-1} e^{-λt} (1 - e^{-t})^m`.
//! * [`fractional`]: fractional powers `C^β` and `(λ - A)^{-β}` via the
//!   Phillips functional calculus.
//! * [`line`]: the transform chain onto `L²(ℝ, e^{-2(e^y-1)} dy)`, exact
//!   evaluation trees, weights and Domar/Müntz diagnostics.
//! * [`invariant`]: construction and certification of invariant subspaces.

pub mod error;
pub mod fractional;
pub mod hardy;
pub mod invariant;
pub mod line;
pub mod matrix_io;
pub mod quadrature;
pub mod report;
pub mod semigroup;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use hardy::{CoeffVector, OperatorMatrix, Precision, Structure};
pub use num_complex::Complex64;
