//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Counting oracles are computed here from combinatorics
//! and never taken from the library.

use bethe_cli::{execute, write_outputs, Experiment, ExperimentConfig, RunReport, SolutionRecord, TwistPolicy};
use bethe_core::numkernel::{c, CPoly, Mat, C64};
use bethe_core::repr::{ModelSpec, MonodromyBundle, TensorSpace, Variant};
use bethe_core::sov::{
    build_lattice, global_from_bethe, raising_c, raising_defect, sl2_on_f, sov_operators, sov_spectrum, weight_multiplicities, weights,
};
use bethe_core::vectors::{bethe_vector_product, bethe_vector_sum, singular_check};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

const SEED: u64 = 20_241;

/// `dim V[ℓ]`: number of `ν` with `Σν = ℓ` and `0 ≤ ν_m ≤ d_m`.
fn weight_dim(d: &[u32], ell: usize) -> usize {
    fn go(d: &[u32], ell: usize) -> usize {
        match d.split_first() {
            None => usize::from(ell == 0),
            Some((first, rest)) => (0..=(*first as usize).min(ell)).map(|k| go(rest, ell - k)).sum(),
        }
    }
    go(d, ell)
}

/// `dim Sing V[ℓ] = dim V[ℓ] − dim V[ℓ−1]` below the middle level, zero above.
fn singular_dim(d: &[u32], ell: usize) -> usize {
    let total: usize = d.iter().map(|x| *x as usize).sum();
    if 2 * ell > total {
        return 0;
    }
    weight_dim(d, ell) - if ell == 0 { 0 } else { weight_dim(d, ell - 1) }
}

fn c1_config() -> ExperimentConfig {
    ExperimentConfig { experiment: Experiment::Sweep, weights: vec![1, 2], twist: TwistPolicy::Generic, seed: SEED, ..Default::default() }
}

fn c5_config() -> ExperimentConfig {
    ExperimentConfig { experiment: Experiment::Sweep, weights: vec![1, 1, 1], twist: TwistPolicy::One, seed: SEED, ..Default::default() }
}

fn c8_config() -> ExperimentConfig {
    ExperimentConfig {
        experiment: Experiment::Sweep,
        variant: Variant::Multiplicative,
        weights: vec![1, 2],
        z: Some(vec![c(1.0, 0.0), c(3.7, 0.0)]),
        q: Some(c(1.21, 0.0)),
        twist: TwistPolicy::Generic,
        seed: SEED,
        ..Default::default()
    }
}

fn cached(cell: &'static OnceLock<RunReport>, cfg: fn() -> ExperimentConfig) -> &'static RunReport {
    cell.get_or_init(|| execute(&cfg()).expect("run completes"))
}

fn c1() -> &'static RunReport {
    static R: OnceLock<RunReport> = OnceLock::new();
    cached(&R, c1_config)
}

fn c5() -> &'static RunReport {
    static R: OnceLock<RunReport> = OnceLock::new();
    cached(&R, c5_config)
}

fn c8() -> &'static RunReport {
    static R: OnceLock<RunReport> = OnceLock::new();
    cached(&R, c8_config)
}

fn regular(r: &RunReport) -> impl Iterator<Item = &SolutionRecord> {
    r.records.iter().filter(|x| x.orbit_id.is_some())
}

fn coords(t: &[[f64; 2]]) -> Vec<C64> {
    t.iter().map(|p| c(p[0], p[1])).collect()
}

fn mag(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

/// Distinct orbits with their representative's coordinates, per level.
fn orbit_reps(r: &RunReport) -> Vec<&SolutionRecord> {
    let mut seen = std::collections::BTreeSet::new();
    regular(r).filter(|x| seen.insert((x.ell, x.orbit_id))).collect()
}

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, ok: String, fail: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn criterion_1() -> Outcome {
    let r = c1();
    let d = [1u32, 2];
    let want: Vec<usize> = (0..=3).map(|l| weight_dim(&d, l)).collect();
    let found: Vec<usize> = r.summary.iter().map(|s| s.found_orbits).collect();
    let worst_res = regular(r).map(|x| x.residual).fold(0.0, f64::max);
    let worst_cond = regular(r).map(|x| x.jacobian_condition).fold(0.0, f64::max);
    let sep = r.spec.separation().ok;
    let msg = format!("orbits {found:?} vs {want:?}, total {}, max residual {worst_res:.2e}, max Jacobian condition {worst_cond:.2e}, separated {sep}", found.iter().sum::<usize>());
    check(found == want && found.iter().sum::<usize>() == 6 && worst_res < 1e-9 && worst_cond < 1e8 && sep, msg.clone(), msg)
}

fn criterion_2() -> Outcome {
    let r = c1();
    let d = [1u32, 2];
    let rows: Vec<(usize, f64)> = r.summary.iter().map(|s| (s.basis_rank, s.basis_condition)).collect();
    let ok = r.summary.iter().all(|s| s.basis_rank == weight_dim(&d, s.ell) && s.basis_condition < 1e6);
    let msg = format!("(rank, condition) per level {rows:.3?}");
    check(ok && r.summary.len() == 4, msg.clone(), msg)
}

fn eigen_worst(r: &RunReport) -> (f64, usize) {
    let mut worst = 0.0f64;
    let mut n = 0;
    for x in regular(r) {
        worst = worst.max(x.eigen_residual.unwrap_or(f64::INFINITY));
        n += 1;
    }
    (worst, n)
}

fn criterion_3() -> Outcome {
    let (a, na) = eigen_worst(c1());
    let (m, nm) = eigen_worst(c8());
    let msg = format!("max eigen residual additive {a:.2e} over {na}, multiplicative {m:.2e} over {nm}, {} sample points", 2 * 2 + 2);
    check(a < 1e-8 && m < 1e-8 && na == 6 && nm == 6, msg.clone(), msg)
}

fn criterion_4() -> Outcome {
    let r = c1();
    let spec = &r.spec;
    let space = TensorSpace::build(spec, spec.max_level()).expect("valid model");
    let bundle = MonodromyBundle::build(spec, &space);
    let reps = orbit_reps(r);
    let mut worst_off = 0.0f64;
    for ell in 0..=spec.max_level() {
        let level: Vec<&&SolutionRecord> = reps.iter().filter(|x| x.ell == ell).collect();
        let diag = level.iter().map(|x| mag(x.norm_lhs.expect("regular records carry norms"))).fold(0.0, f64::max);
        for a in &level {
            for b in &level {
                if a.orbit_id != b.orbit_id {
                    let p = bethe_core::vectors::dual_pairing(&bundle, &space, &coords(&a.t), &coords(&b.t)).expect("same level");
                    worst_off = worst_off.max(p.norm() / diag);
                }
            }
        }
    }
    let worst_det = regular(r).map(|x| x.det_rel_err.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    let msg = format!("max off-orbit pairing / max diagonal {worst_off:.2e}, max norm formula error {worst_det:.2e}");
    check(worst_off < 1e-8 && worst_det < 1e-6, msg.clone(), msg)
}

fn criterion_5() -> Outcome {
    let r = c5();
    let d = [1u32, 1, 1];
    let want: Vec<usize> = (0..=3).map(|l| singular_dim(&d, l)).collect();
    let found: Vec<usize> = r.summary.iter().map(|s| s.found_orbits).collect();
    let spec = &r.spec;
    let space = TensorSpace::build(spec, spec.max_level()).expect("valid model");
    let bundle = MonodromyBundle::build(spec, &space);
    let mut worst = 0.0f64;
    for x in regular(r) {
        let w = bethe_vector_product(&bundle, &space, &coords(&x.t));
        worst = worst.max(singular_check(spec, &space, &w).unwrap_or(f64::INFINITY));
    }
    let full = r.summary.iter().all(|s| s.basis_rank == want[s.ell]);
    let msg = format!("nontrivial orbits {found:?} vs {want:?}, max |e w|/|w| {worst:.2e}, full singular rank {full}");
    check(found == want && worst < 1e-8 && full && want == vec![1, 2, 0, 0], msg.clone(), msg)
}

/// Bethe-sourced `τ` for the difference equation from every regular orbit.
fn bethe_taus(r: &RunReport) -> Vec<CPoly> {
    let lattice = build_lattice(&r.spec).expect("integral weights");
    orbit_reps(r).iter().map(|x| global_from_bethe(&r.spec, &lattice, &coords(&x.t)).expect("admissible").tau).collect()
}

/// Nearest-neighbour assignment of `left` into `right`; returns the largest
/// coefficient distance and whether every right entry was hit exactly once.
fn bijective_match(left: &[CPoly], right: &[CPoly]) -> (f64, bool) {
    let mut hits = vec![0usize; right.len()];
    let mut worst = 0.0f64;
    for p in left {
        let (j, d) = right.iter().enumerate().map(|(j, q)| (j, p.distance(q))).min_by(|a, b| a.1.total_cmp(&b.1)).unwrap_or((0, f64::INFINITY));
        if j < hits.len() {
            hits[j] += 1;
        }
        worst = worst.max(d);
    }
    (worst, left.len() == right.len() && hits.iter().all(|h| *h == 1))
}

fn sov_check(r: &RunReport, expected: usize) -> (bool, String) {
    let spec = &r.spec;
    let lattice = build_lattice(spec).expect("integral weights");
    let family = sov_operators(spec, &lattice);
    let eig = sov_spectrum(spec, &lattice, &family).expect("diagonalizable");
    let taus: Vec<CPoly> = eig.iter().map(|e| e.pair.tau.clone()).collect();
    let distinct = bethe_core::sov::distinct_taus(&taus, 1e-7);
    let (worst, bij) = bijective_match(&distinct, &bethe_taus(r));
    let fr = eig.iter().map(|e| e.factor_residual).fold(0.0, f64::max);
    let nonvanishing = eig.iter().all(|e| e.pair.q.nonvanishing(spec.tol.margin_tol));
    let ok = distinct.len() == expected && bij && worst < 1e-6 && fr < 1e-6 && nonvanishing;
    (ok, format!("{} distinct tau (expected {expected}), bijective {bij}, max coefficient distance {worst:.2e}, max factorization residual {fr:.2e}, nonvanishing {nonvanishing}", distinct.len()))
}

fn criterion_6() -> Outcome {
    let (ok, msg) = sov_check(c1(), 6);
    check(ok, msg.clone(), msg)
}

fn criterion_7() -> Outcome {
    let r = c5();
    let spec = &r.spec;
    let lattice = build_lattice(spec).expect("integral weights");
    let family = sov_operators(spec, &lattice);
    let t = sl2_on_f(spec, &lattice, &family).map_err(|e| e.to_string())?;
    let br = |a: &Mat, b: &Mat| a * b - b * a;
    let two = C64::new(2.0, 0.0);
    let he = (br(&t.h, &t.e) - &t.e).norm() / (t.h.norm() * t.e.norm());
    let hf = (br(&t.h, &t.f) + &t.f).norm() / (t.h.norm() * t.f.norm());
    let ef = (br(&t.e, &t.f) - &t.h * two).norm() / (t.e.norm() * t.f.norm());
    let mult = weight_multiplicities(&t.h, &weights(spec), spec.tol.rank_tol);
    let want: Vec<usize> = (0..=3).map(|l| weight_dim(&[1, 1, 1], l)).collect();
    let cu = raising_c(spec, &lattice, &family).map_err(|e| e.to_string())?;
    let total = family.transfer.add(&cu);
    let (mut comm, mut raise, mut to_c, mut to_h) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for u in [c(0.3, 0.2), c(1.7, 0.0), c(-0.8, 1.1)] {
        let tc = total.eval(u);
        for x in [&t.e, &t.f, &t.h] {
            comm = comm.max(br(&tc, x).norm());
        }
        let cm = cu.eval(u);
        raise = raise.max(raising_defect(&t.h, &cm, &weights(spec)));
        let hc = br(&t.h, &cm);
        to_c = to_c.max((&hc - &cm).norm() / cm.norm());
        to_h = to_h.max((&hc - &t.h).norm() / hc.norm().max(t.h.norm()));
    }
    let msg = format!(
        "relation defects {he:.1e}/{hf:.1e}/{ef:.1e}, weight multiplicities {mult:?} vs {want:?}, max |[T+C, X]| {comm:.2e}, raising defect {raise:.1e}; bracket residuals [H,C]-C {to_c:.1e}, [H,C]-H {to_h:.1e} (reported only)"
    );
    check(he < 1e-10 && hf < 1e-10 && ef < 1e-10 && mult == want && comm < 1e-8 && raise < 1e-8, msg.clone(), msg)
}

fn criterion_8() -> Outcome {
    let r = c8();
    let (sov_ok, sov_msg) = sov_check(r, 6);
    let spec = &r.spec;
    let want = C64::new(if spec.n().is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
        * (C64::new(1.0, 0.0) + spec.q.powf(2.0 * 1.5) * spec.theta)
        * spec.z[0]
        * spec.z[1];
    let taus = bethe_taus(r);
    let worst_zero = taus.iter().map(|t| (t.eval(C64::default()) - want).norm() / want.norm()).fold(0.0, f64::max);
    let max_deg = orbit_reps(r).iter().map(|x| x.t.len()).max().unwrap_or(0);
    let msg = format!("{sov_msg}; max relative tau(0) error {worst_zero:.2e}; max deg Q {max_deg}; Bethe orbits {}", taus.len());
    check(sov_ok && taus.len() == 6 && worst_zero < 1e-10 && max_deg <= 3, msg.clone(), msg)
}

fn criterion_9() -> Outcome {
    let cfg = ExperimentConfig { include_out_of_range: true, ..c1_config() };
    let r = execute(&cfg).map_err(|e| e.to_string())?;
    let mut norms: Vec<f64> = regular(&r).filter_map(|x| x.w_norm).collect();
    norms.sort_by(f64::total_cmp);
    let median = norms[norms.len() / 2];
    let bad: Vec<&SolutionRecord> = r
        .records
        .iter()
        .filter(|x| x.path_status == bethe_core::bethe::PathStatus::Converged && x.offdiagonal && !x.admissible)
        .collect();
    let violations = bad.iter().filter(|x| x.string_detected.is_none() || x.w_norm.unwrap_or(f64::INFINITY) >= 1e-6 * median).count();
    let worst = bad.iter().filter_map(|x| x.w_norm).fold(0.0, f64::max);
    let msg = format!("{} unadmissible endpoints, {violations} violations, max |w| {worst:.2e} vs median admissible {median:.2e}", bad.len());
    check(violations == 0 && !bad.is_empty(), msg.clone(), msg)
}

fn random_offdiagonal(rng: &mut ChaCha8Rng, ell: usize, spec: &ModelSpec) -> Vec<C64> {
    let s = spec.scale();
    loop {
        let t: Vec<C64> = (0..ell).map(|_| c(rng.gen_range(-s..s), rng.gen_range(-s..s))).collect();
        let distinct = (0..ell).all(|a| (a + 1..ell).all(|b| (t[a] - t[b]).norm() > 1e-3));
        if distinct {
            return t;
        }
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_formula, mut worst_sym) = (0.0f64, 0.0f64);
    for r in [c1(), c8()] {
        let spec = &r.spec;
        let space = TensorSpace::build(spec, spec.max_level()).expect("valid model");
        let bundle = MonodromyBundle::build(spec, &space);
        for _ in 0..50 {
            let ell = rng.gen_range(1..=spec.max_level());
            let t = random_offdiagonal(&mut rng, ell, spec);
            let a = bethe_vector_product(&bundle, &space, &t);
            let b = bethe_vector_sum(spec, &space, &t).map_err(|e| e.to_string())?;
            let nrm = a.norm().max(b.norm());
            worst_formula = worst_formula.max((&a.coords - &b.coords).norm() / nrm);
            for _ in 0..5 {
                let mut s = t.clone();
                s.shuffle(&mut rng);
                let w = bethe_vector_product(&bundle, &space, &s);
                worst_sym = worst_sym.max((&w.coords - &a.coords).norm() / nrm);
            }
        }
    }
    let msg = format!("max product/sum disagreement {worst_formula:.2e}, max permutation defect {worst_sym:.2e}");
    check(worst_formula < 1e-9 && worst_sym < 1e-9, msg.clone(), msg)
}

fn criterion_11() -> Outcome {
    let caps = [(c1(), 4usize), (c5(), 1), (c8(), 3)];
    let mut violations = 0;
    let mut pairs = 0;
    let mut max_deg = Vec::new();
    for (r, cap) in caps {
        let mut top = 0;
        let lattice = build_lattice(&r.spec).expect("integral weights");
        for x in orbit_reps(r) {
            let p = global_from_bethe(&r.spec, &lattice, &coords(&x.t)).map_err(|e| e.to_string())?;
            let deg = p.q.poly.as_ref().and_then(CPoly::degree).unwrap_or(0);
            pairs += 1;
            top = top.max(deg);
            if deg > cap {
                violations += 1;
            }
        }
        max_deg.push(top);
    }
    let tight = bethe_core::sov::degree_cap(&c1().spec);
    let msg = format!(
        "{pairs} admissible pairs, {violations} degree violations (caps 4 / 1 / 3), max degrees {max_deg:?}, generic cap from weights {tight} (first run within it: {})",
        max_deg[0] <= tight
    );
    check(violations == 0 && pairs > 0, msg.clone(), msg)
}

fn criterion_12() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut bodies = Vec::new();
    for workers in [1usize, 8] {
        let cfg = ExperimentConfig { workers, output: dir.path().join(format!("w{workers}")), ..c1_config() };
        let r = execute(&cfg).map_err(|e| e.to_string())?;
        write_outputs(&r, &cfg.output).map_err(|e| e.to_string())?;
        bodies.push(std::fs::read(dir.path().join(format!("w{workers}.jsonl"))).map_err(|e| e.to_string())?);
    }
    let same = bodies[0] == bodies[1];
    let msg = format!("workers=1 vs workers=8: {} vs {} bytes, identical {same}", bodies[0].len(), bodies[1].len());
    check(same && !bodies[0].is_empty(), msg.clone(), msg)
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("C1", criterion_1),
        ("C2", criterion_2),
        ("C3", criterion_3),
        ("C4", criterion_4),
        ("C5", criterion_5),
        ("C6", criterion_6),
        ("C7", criterion_7),
        ("C8", criterion_8),
        ("C9", criterion_9),
        ("C10", criterion_10),
        ("C11", criterion_11),
        ("C12", criterion_12),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let text = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", text.unwrap_or_default()))
        });
        match outcome {
            Ok(m) => println!("{name:>4} PASS  {m}"),
            Err(m) => {
                failed += 1;
                println!("{name:>4} FAIL  {m}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
