//! The experiment pipeline: solve every level in parallel, verify, and
//! collect report rows.

use crate::config::{Experiment, ExperimentConfig};
use crate::generate::{generate_spec, Draw, GenerateError};
use bethe_core::bethe::{eigenvalue_tau, level_kappa, level_seeds, orbit_dedup, solve_seed, BetheSolution, PathStatus, SolveOptions};
use bethe_core::numkernel::{CPoly, C64};
use bethe_core::repr::{ModelSpec, MonodromyBundle, SpecError, TensorSpace, Variant};
use bethe_core::sov::{
    baxter_residual, build_lattice, count_local_solutions, degree_cap, global_from_bethe, is_unit_twist, match_spectra, sov_operators,
    sov_spectrum, unit_twist_spectrum, SovError,
};
use bethe_core::vectors::{basis_rank, bethe_vector_product, eigen_residual, norm_determinant, pair_with, singular_basis_rank, BetheVector};
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// One report row per tracked path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionRecord {
    pub experiment: Experiment,
    pub ell: usize,
    pub seed_nu: Vec<usize>,
    pub t: Vec<[f64; 2]>,
    pub residual: f64,
    pub admissible: bool,
    pub offdiagonal: bool,
    pub string_detected: Option<usize>,
    /// Index of the orbit among the regular, nontrivial solutions of this
    /// level; absent for every other endpoint.
    pub orbit_id: Option<usize>,
    pub path_status: PathStatus,
    pub jacobian_condition: f64,
    pub tau_coeffs: Option<Vec<[f64; 2]>>,
    pub eigen_residual: Option<f64>,
    pub norm_lhs: Option<[f64; 2]>,
    pub norm_rhs: Option<[f64; 2]>,
    pub det_rel_err: Option<f64>,
    pub offorbit_pairing_max: Option<f64>,
    pub w_norm: Option<f64>,
    pub baxter_residual: Option<f64>,
    pub deg_q: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub ell: usize,
    pub expected_dim: usize,
    pub found_orbits: usize,
    pub max_residual: f64,
    pub max_eigen_residual: f64,
    pub max_det_rel_err: f64,
    pub basis_rank: usize,
    pub basis_condition: f64,
}

/// Separated-variables cross-check.
#[derive(Debug, Clone, Serialize)]
pub struct SovReport {
    pub lattice_dim: usize,
    /// Distinct `τ` in the separated spectrum.
    pub distinct_tau: usize,
    pub local_solution_count: usize,
    pub expected: usize,
    pub matched: usize,
    pub bijective: bool,
    pub max_match_distance: f64,
    pub max_factor_residual: f64,
    pub all_nonvanishing: bool,
    pub max_baxter_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub solve_s: f64,
    pub verify_s: f64,
    pub sov_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub spec: ModelSpec,
    pub draw: Draw,
    pub records: Vec<SolutionRecord>,
    pub summary: Vec<SummaryRow>,
    pub sov: Option<SovReport>,
    pub path_failure_fraction: f64,
    /// Human-readable list of failed gates.
    pub failures: Vec<String>,
    pub exit_code: i32,
    pub timings: Timings,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Generate(#[from] GenerateError),
    #[error("invalid model: {0}")]
    Spec(#[from] SpecError),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error("separated variables: {0}")]
    Sov(#[from] SovError),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_PATHS: i32 = 3;

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|x| pair(*x)).collect()
}

fn max_of(xs: impl Iterator<Item = f64>) -> f64 {
    xs.fold(0.0, f64::max)
}

/// Per-solution verification data, kept alongside the record for the
/// cross-orbit checks.
struct Verified {
    record: SolutionRecord,
    vector: Option<BetheVector>,
    /// `τ` normalized for the difference equation.
    baxter_tau: Option<CPoly>,
    regular: bool,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    spec: &'a ModelSpec,
    space: &'a TensorSpace,
    bundle: &'a MonodromyBundle,
}

impl Context<'_> {
    fn verify(&self, sol: &BetheSolution) -> Verified {
        let spec = self.spec;
        let kappa = level_kappa(spec, sol.ell);
        let mut record = SolutionRecord {
            experiment: self.cfg.experiment,
            ell: sol.ell,
            seed_nu: sol.seed_nu.clone(),
            t: pairs(&sol.t),
            residual: sol.residual,
            admissible: sol.flags.admissible,
            offdiagonal: sol.flags.offdiagonal,
            string_detected: sol.flags.string_detected,
            orbit_id: None,
            path_status: sol.path_status,
            jacobian_condition: sol.jacobian_condition,
            tau_coeffs: None,
            eigen_residual: None,
            norm_lhs: None,
            norm_rhs: None,
            det_rel_err: None,
            offorbit_pairing_max: None,
            w_norm: None,
            baxter_residual: None,
            deg_q: None,
        };
        if sol.path_status != PathStatus::Converged || !sol.flags.offdiagonal {
            return Verified { record, vector: None, baxter_tau: None, regular: false };
        }
        let w = bethe_vector_product(self.bundle, self.space, &sol.t);
        let w_norm = w.norm();
        record.w_norm = Some(w_norm);
        let nontrivial = w_norm >= spec.tol.residual_tol * spec.scale();
        let tau = eigenvalue_tau(spec, kappa, &sol.t).ok();
        record.tau_coeffs = tau.as_ref().map(|p| pairs(p.coeffs()));
        if let Some(tau) = &tau {
            let transfer = self.bundle.transfer(kappa);
            record.eigen_residual = eigen_residual(spec, &transfer, self.space, &w, tau, 2 * spec.n() + 2).ok();
        }
        if nontrivial {
            let lhs = pair_with(self.bundle, self.space, &w, &sol.t);
            record.norm_lhs = Some(pair(lhs));
            if let Ok(rhs) = norm_determinant(spec, kappa, &sol.t) {
                record.norm_rhs = Some(pair(rhs));
                record.det_rel_err = Some((lhs - rhs).norm() / rhs.norm());
            }
        }
        let mut baxter_tau = None;
        if sol.flags.admissible {
            record.deg_q = Some(sol.t.len());
            if let Ok(lattice) = build_lattice(spec) {
                if let Ok(p) = global_from_bethe(spec, &lattice, &sol.t) {
                    record.baxter_residual = Some(baxter_residual(spec, &lattice, &p));
                    baxter_tau = Some(p.tau);
                }
            }
        }
        Verified { regular: sol.is_regular() && nontrivial, record, vector: Some(w), baxter_tau }
    }
}

/// Expected number of regular orbits at level `ell`.
fn expected_dim(spec: &ModelSpec, space: &TensorSpace, ell: usize) -> usize {
    if is_unit_twist(spec) {
        space.singular_dim(ell, &spec.tol)
    } else {
        space.block_dim(ell)
    }
}

fn sov_report(
    spec: &ModelSpec,
    bethe_taus: &[CPoly],
    expected: usize,
    all_levels: bool,
    match_tol: f64,
) -> Result<SovReport, RunError> {
    let lattice = build_lattice(spec)?;
    let family = sov_operators(spec, &lattice);
    let (taus, max_factor_residual, all_nonvanishing, max_baxter) = if is_unit_twist(spec) {
        let spectrum = unit_twist_spectrum(spec, &lattice, &family)?;
        (spectrum.into_iter().map(|(t, _)| t).collect::<Vec<_>>(), 0.0, true, 0.0)
    } else {
        let eig = sov_spectrum(spec, &lattice, &family)?;
        (
            eig.iter().map(|e| e.pair.tau.clone()).collect(),
            max_of(eig.iter().map(|e| e.factor_residual)),
            eig.iter().all(|e| e.pair.q.nonvanishing(spec.tol.margin_tol)),
            max_of(eig.iter().map(|e| baxter_residual(spec, &lattice, &e.pair))),
        )
    };
    let distinct = bethe_core::sov::distinct_taus(&taus, spec.tol.dedup_tol);
    let m = match_spectra(&distinct, bethe_taus, match_tol);
    Ok(SovReport {
        lattice_dim: lattice.dim(),
        distinct_tau: distinct.len(),
        local_solution_count: count_local_solutions(spec)?,
        expected,
        matched: m.pairs.len(),
        bijective: if all_levels { m.is_bijection() } else { m.unmatched_right.is_empty() },
        max_match_distance: m.max_distance(),
        max_factor_residual,
        all_nonvanishing,
        max_baxter_residual: max_baxter,
    })
}

/// Run an experiment without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<RunReport, RunError> {
    let (spec, draw) = generate_spec(cfg)?;
    let max_level = spec.max_level();
    spec.validate(max_level)?;
    let mut levels = cfg.levels();
    levels.sort_unstable();
    levels.dedup();
    let space = TensorSpace::build(&spec, max_level)?;
    let bundle = MonodromyBundle::build(&spec, &space);
    let opts = SolveOptions { include_out_of_range: cfg.include_out_of_range, retries: cfg.retries, ..SolveOptions::default() };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;

    let start = Instant::now();
    let tasks: Vec<(usize, bethe_core::bethe::Seed)> =
        levels.iter().flat_map(|&ell| level_seeds(&spec, ell, &opts).into_iter().map(move |s| (ell, s))).collect();
    let solutions: Vec<BetheSolution> = pool.install(|| tasks.par_iter().map(|(ell, s)| solve_seed(&spec, *ell, s, &opts)).collect());
    let solve_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let ctx = Context { cfg, spec: &spec, space: &space, bundle: &bundle };
    let mut verified: Vec<Verified> = pool.install(|| solutions.par_iter().map(|s| ctx.verify(s)).collect());

    let th = &cfg.thresholds;
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    let mut bethe_taus = Vec::new();
    let (mut excess_failures, mut tracked) = (0usize, 0usize);
    for &ell in &levels {
        let idx: Vec<usize> = (0..solutions.len()).filter(|&i| solutions[i].ell == ell).collect();
        let regular: Vec<usize> = idx.iter().copied().filter(|&i| verified[i].regular).collect();
        let regular_sols: Vec<BetheSolution> = regular.iter().map(|&i| solutions[i].clone()).collect();
        let orbits = orbit_dedup(&regular_sols, spec.tol.dedup_tol * spec.scale());
        let reps: Vec<usize> = orbits.iter().map(|o| regular[o.representative]).collect();
        for (k, o) in orbits.iter().enumerate() {
            for &mi in &o.members {
                verified[regular[mi]].record.orbit_id = Some(k);
            }
        }
        // cross pairings between distinct orbits of this level
        for (k, &i) in reps.iter().enumerate() {
            let w = verified[i].vector.clone().expect("regular solutions carry vectors");
            let own = verified[i].record.norm_lhs.map_or(0.0, |p| p[0].hypot(p[1]));
            let mut worst = 0.0f64;
            for (k2, &j) in reps.iter().enumerate() {
                if k2 != k {
                    let other = verified[j].record.norm_lhs.map_or(0.0, |p| p[0].hypot(p[1]));
                    let p = pair_with(&bundle, &space, &w, &solutions[j].t);
                    worst = worst.max(p.norm() / own.max(other).max(f64::MIN_POSITIVE));
                }
            }
            for &mi in &orbits[k].members {
                verified[regular[mi]].record.offorbit_pairing_max = Some(worst);
            }
        }
        bethe_taus.extend(reps.iter().filter_map(|&i| verified[i].baxter_tau.clone()));

        let expected = expected_dim(&spec, &space, ell);
        let vectors: Vec<BetheVector> = reps.iter().filter_map(|&i| verified[i].vector.clone()).collect();
        let (rank, cond) = if is_unit_twist(&spec) && spec.variant == Variant::Additive {
            singular_basis_rank(&space, &vectors, ell, &spec.tol).map(|(r, c, _)| (r, c)).unwrap_or((0, f64::INFINITY))
        } else {
            basis_rank(&vectors, &spec.tol)
        };
        let reg = || reps.iter().map(|&i| &verified[i].record);
        let row = SummaryRow {
            ell,
            expected_dim: expected,
            found_orbits: orbits.len(),
            max_residual: max_of(reg().map(|r| r.residual)),
            max_eigen_residual: max_of(reg().map(|r| r.eigen_residual.unwrap_or(f64::INFINITY))),
            max_det_rel_err: max_of(reg().map(|r| r.det_rel_err.unwrap_or(f64::INFINITY))),
            basis_rank: rank,
            basis_condition: cond,
        };

        let in_range: Vec<usize> = idx.iter().copied().filter(|&i| level_seed_in_range(&spec, &solutions[i])).collect();
        let failed = in_range.iter().filter(|&&i| solutions[i].path_status != PathStatus::Converged).count();
        excess_failures += failed.saturating_sub(in_range.len().saturating_sub(expected));
        tracked += in_range.len();

        let e = cfg.experiment;
        let gate = |cond: bool, msg: String, failures: &mut Vec<String>| {
            if !cond {
                failures.push(msg);
            }
        };
        gate(row.found_orbits == expected, format!("ell {ell}: found {} orbits, expected {expected}", row.found_orbits), &mut failures);
        gate(
            row.max_residual <= spec.tol.residual_tol,
            format!("ell {ell}: residual {:.3e} above {:.1e}", row.max_residual, spec.tol.residual_tol),
            &mut failures,
        );
        let worst_cond = max_of(reg().map(|r| r.jacobian_condition));
        gate(worst_cond < th.jacobian_condition, format!("ell {ell}: Jacobian condition {worst_cond:.3e}"), &mut failures);
        if matches!(e, Experiment::Bethe | Experiment::Ortho | Experiment::Sweep) {
            gate(row.max_eigen_residual < th.eigen_residual, format!("ell {ell}: eigen residual {:.3e}", row.max_eigen_residual), &mut failures);
        }
        if matches!(e, Experiment::Basis | Experiment::Sweep) {
            gate(
                row.basis_rank == expected && row.basis_condition < th.basis_condition,
                format!("ell {ell}: basis rank {} (condition {:.3e}), expected {expected}", row.basis_rank, row.basis_condition),
                &mut failures,
            );
        }
        if matches!(e, Experiment::Ortho | Experiment::Sweep) {
            gate(row.max_det_rel_err < th.det_rel_err, format!("ell {ell}: norm formula error {:.3e}", row.max_det_rel_err), &mut failures);
            let off = max_of(reg().map(|r| r.offorbit_pairing_max.unwrap_or(0.0)));
            gate(off < th.offorbit_pairing, format!("ell {ell}: off-orbit pairing {off:.3e}"), &mut failures);
        }
        if matches!(e, Experiment::Baxter | Experiment::Qbaxter | Experiment::Sweep) {
            let bax = max_of(reg().map(|r| r.baxter_residual.unwrap_or(f64::INFINITY)));
            gate(bax < th.baxter_residual, format!("ell {ell}: difference equation residual {bax:.3e}"), &mut failures);
            let cap = degree_cap(&spec);
            let over = reg().filter(|r| r.deg_q.is_some_and(|d| d > cap)).count();
            gate(over == 0, format!("ell {ell}: {over} solutions exceed the degree cap {cap}"), &mut failures);
        }
        summary.push(row);
    }
    let verify_s = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let all_levels = levels == (0..=max_level).collect::<Vec<_>>();
    let sov = if matches!(cfg.experiment, Experiment::Baxter | Experiment::Qbaxter | Experiment::Sovcheck | Experiment::Sweep) {
        let expected = (0..=max_level).map(|l| expected_dim(&spec, &space, l)).sum();
        let rep = sov_report(&spec, &bethe_taus, expected, all_levels, th.spectrum_match)?;
        let mut gate = |cond: bool, msg: String| {
            if !cond {
                failures.push(msg);
            }
        };
        gate(rep.distinct_tau == rep.expected, format!("separated spectrum has {} distinct tau, expected {}", rep.distinct_tau, rep.expected));
        gate(rep.local_solution_count == rep.expected, format!("local problem has {} solutions, expected {}", rep.local_solution_count, rep.expected));
        gate(rep.bijective, format!("separated and Bethe spectra do not match ({} pairs)", rep.matched));
        gate(rep.max_factor_residual < th.spectrum_match, format!("eigenvector factorization residual {:.3e}", rep.max_factor_residual));
        gate(rep.all_nonvanishing, "some projection of Q vanishes on its lattice".to_string());
        gate(rep.max_baxter_residual < th.baxter_residual, format!("separated pairs violate the difference equation ({:.3e})", rep.max_baxter_residual));
        Some(rep)
    } else {
        None
    };
    let sov_s = start.elapsed().as_secs_f64();

    let path_failure_fraction = if tracked == 0 { 0.0 } else { excess_failures as f64 / tracked as f64 };
    let exit_code = if path_failure_fraction > cfg.max_path_failure_fraction {
        EXIT_PATHS
    } else if !failures.is_empty() {
        EXIT_VERIFY
    } else {
        EXIT_OK
    };
    Ok(RunReport {
        config: cfg.clone(),
        spec,
        draw,
        records: verified.into_iter().map(|v| v.record).collect(),
        summary,
        sov,
        path_failure_fraction,
        failures,
        exit_code,
        timings: Timings { solve_s, verify_s, sov_s },
    })
}

fn level_seed_in_range(spec: &ModelSpec, sol: &BetheSolution) -> bool {
    sol.seed_nu.iter().zip(spec.dims()).all(|(a, d)| *a < d)
}
