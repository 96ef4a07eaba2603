//! The difference-equation side: lattices of singular points, the local and
//! global problems, and the separated-variable transfer family with its
//! `sl2` structure at unit twist.

mod baxter;
mod lattice;
mod operators;
mod sl2;
mod spectrum;

pub use baxter::{
    baxter_residual, baxter_twist, degree_cap, delta_minus, delta_plus, global_from_bethe, is_unit_twist, local_matrix,
    local_solve_linear, tau_at_zero, PairSource, QProfile, TauQPair,
};
pub use lattice::{build_lattice, SeparationLattice};
pub use operators::{sov_operators, txk_defect, SovFamily};
pub use sl2::{raising_c, raising_defect, sl2_on_f, weight_multiplicities, weight_projectors, weights, Sl2Triple};
pub use spectrum::{
    count_local_solutions, distinct_taus, match_spectra, sov_spectrum, unit_twist_spectrum, SovEigen, SpectrumMatch,
};

use crate::bethe::TauError;
use crate::numkernel::NumError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SovError {
    #[error("lattices need integral weights")]
    NonIntegral,
    #[error("solution is not admissible")]
    NotAdmissible,
    #[error("{0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Tau(#[from] TauError),
    #[error(transparent)]
    Num(#[from] NumError),
}
