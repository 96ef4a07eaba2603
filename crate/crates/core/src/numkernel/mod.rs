//! Complex numerical kernels shared by every other module.
//!
//! Scalar polynomials ([`CPoly`]), polynomials with matrix coefficients
//! ([`OpPoly`]), dense linear-algebra helpers on top of `nalgebra`, and
//! simultaneous diagonalization of commuting families.

mod diag;
mod linalg;
mod oppoly;
mod poly;
mod svd;
mod tol;

pub use diag::{commuting_diag, joint_spectrum, JointCluster, JointEigen};
pub use linalg::{
    determinant, eigen_decomposition, frob, kron, lstsq, matrix_rank, nullspace, rank1_split,
    singular_values, Rank1Split,
};
pub use oppoly::OpPoly;
pub use poly::CPoly;
pub use svd::{svd, svd_full_v, Svd};
pub use tol::ToleranceProfile;

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64 as C64;

pub type Mat = DMatrix<C64>;
pub type Vector = DVector<C64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NumError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("not a commuting family (relative commutator {0:.3e})")]
    NotCommuting(f64),
    #[error("degenerate spectrum after {0} random combinations")]
    DegenerateSpectrum(usize),
    #[error("defective eigenvalue cluster (residual {0:.3e})")]
    Defective(f64),
}

/// Shorthand for a complex number.
#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex identity matrix.
pub fn eye(n: usize) -> Mat {
    Mat::identity(n, n)
}
