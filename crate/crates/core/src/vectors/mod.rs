//! Bethe vectors: two independent constructions and the checks built on
//! them (eigenvectors, pairings and norms, bases, singular vectors, and the
//! intertwiner between reordered tensor products).

mod build;
mod verify;

pub use build::{bethe_vector_product, bethe_vector_sum, vacuum, BetheVector, Construction};
pub use verify::{
    basis_rank, dual_pairing, eigen_residual, norm_determinant, pair_with, permutation_intertwiner, permuted_spec,
    sample_points, singular_basis_rank, singular_check, Intertwiner,
};

use crate::repr::SpecError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VecError {
    #[error("coordinates are not pairwise distinct")]
    Diagonal,
    #[error("trivial vector (norm {0:.3e})")]
    Trivial(f64),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sample set has rank {rank}, need {needed}")]
    RankDeficient { rank: usize, needed: usize },
    #[error("not a permutation of the tensor factors")]
    NotAPermutation,
    #[error("no diagonal sl2 action for this variant or level")]
    NoDiagonalAction,
    #[error(transparent)]
    Spec(#[from] SpecError),
}
