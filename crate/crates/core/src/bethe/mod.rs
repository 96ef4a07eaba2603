//! Bethe equations, their exact untwisted solutions, continuation in the
//! twist, and classification of the endpoints.

mod classify;
mod seeds;
mod solve;
mod system;
mod tau;
mod track;

pub use classify::{classify, degeneration_margin, detect_string, orbit_dedup, orbit_key, same_orbit, BetheSolution, Orbit, SolutionFlags};
pub use seeds::{compositions, seeds_kappa0, Seed};
pub use solve::{finalize, jacobian_condition, level_seeds, path_seed, solve_level, solve_seed, SolveOptions};
pub use system::{bae_jacobian, bae_kappa_derivative, bae_residual, bae_sides, level_kappa, relative_residual};
pub use tau::{eigenvalue_tau, tau_interpolated, tau_rational, tau_residues, TauError};
pub use track::{newton, track_path, PathOutcome, PathStatus, TrackOptions};
