use super::classify::{classify, orbit_key, BetheSolution};
use super::seeds::{seeds_kappa0, Seed};
use super::system::{bae_jacobian, level_kappa, relative_residual};
use super::track::{track_path, PathStatus, TrackOptions};
use crate::numkernel::{singular_values, C64};
use crate::repr::ModelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub track: TrackOptions,
    /// Also track seeds with `ν_m ≥ dim_m`.
    pub include_out_of_range: bool,
    /// Extra attempts along detoured paths after a failed straight segment.
    pub retries: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { track: TrackOptions::default(), include_out_of_range: false, retries: 3 }
    }
}

/// Seed for the per-path generator, independent of scheduling.
pub fn path_seed(rng_seed: u64, ell: usize, nu: &[usize]) -> u64 {
    let mut h = rng_seed ^ 0x9e37_79b9_7f4a_7c15;
    for x in std::iter::once(ell).chain(nu.iter().copied()) {
        h = h.wrapping_add(x as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    h
}

pub fn jacobian_condition(spec: &ModelSpec, kappa: C64, t: &[C64]) -> f64 {
    if t.is_empty() {
        return 1.0;
    }
    let s = singular_values(&bae_jacobian(spec, kappa, t));
    let lo = *s.last().expect("nonempty");
    if lo == 0.0 { f64::INFINITY } else { s[0] / lo }
}

/// Package an endpoint with its diagnostics.
#[allow(clippy::too_many_arguments)]
pub fn finalize(spec: &ModelSpec, ell: usize, kappa: C64, t: Vec<C64>, seed_nu: Vec<usize>, status: PathStatus, steps: usize, phase: f64) -> BetheSolution {
    let finite = t.iter().all(|x| x.is_finite());
    BetheSolution {
        residual: if finite { relative_residual(spec, kappa, &t) } else { f64::INFINITY },
        jacobian_condition: if finite { jacobian_condition(spec, kappa, &t) } else { f64::INFINITY },
        flags: classify(spec, &t),
        orbit_key: orbit_key(&t, spec.tol.dedup_tol * spec.scale()),
        t,
        kappa,
        ell,
        seed_nu,
        path_status: status,
        steps,
        detour_phase: phase,
    }
}

/// Track one seed to the level twist, retrying along detours when the
/// straight segment fails.
pub fn solve_seed(spec: &ModelSpec, ell: usize, seed: &Seed, opts: &SolveOptions) -> BetheSolution {
    let kappa = level_kappa(spec, ell);
    let mut rng = ChaCha8Rng::seed_from_u64(path_seed(spec.rng_seed, ell, &seed.nu));
    let mut phase = opts.track.detour_phase;
    let mut total_steps = 0;
    let mut last = None;
    for attempt in 0..=opts.retries {
        if attempt > 0 {
            let mag: f64 = rng.gen_range(0.2..1.0);
            phase = if rng.gen_bool(0.5) { mag } else { -mag };
        }
        let out = track_path(spec, &seed.t, kappa, &TrackOptions { detour_phase: phase, ..opts.track });
        total_steps += out.steps;
        let done = out.status == PathStatus::Converged;
        last = Some(out);
        if done {
            break;
        }
    }
    let out = last.expect("at least one attempt");
    finalize(spec, ell, kappa, out.t, seed.nu.clone(), out.status, total_steps, phase)
}

/// Seeds that the default sweep tracks at level `ell`.
pub fn level_seeds(spec: &ModelSpec, ell: usize, opts: &SolveOptions) -> Vec<Seed> {
    seeds_kappa0(spec, ell).into_iter().filter(|s| s.in_range || opts.include_out_of_range).collect()
}

/// Sequential sweep of one level.
pub fn solve_level(spec: &ModelSpec, ell: usize, opts: &SolveOptions) -> Vec<BetheSolution> {
    level_seeds(spec, ell, opts).iter().map(|s| solve_seed(spec, ell, s, opts)).collect()
}
