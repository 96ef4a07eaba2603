use super::system::{bae_jacobian, bae_kappa_derivative, bae_residual, relative_residual};
use crate::numkernel::{Mat, Vector, C64};
use crate::repr::ModelSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PathStatus {
    Converged,
    Escaped,
    Collided,
    MaxSteps,
}

/// Continuation controls. The twist follows
/// `κ(s) = κ_target · s · exp(iφ(1 − s))`, a straight segment when the detour
/// phase `φ` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions {
    /// `|κ|` at which the seed is first corrected.
    pub start_modulus: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_corrector: usize,
    /// Coordinates beyond `escape_factor × scale` end the path.
    pub escape_factor: f64,
    pub max_steps: usize,
    pub detour_phase: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            start_modulus: 1e-3,
            initial_step: 0.01,
            max_step: 0.05,
            min_step: 1e-8,
            max_corrector: 6,
            escape_factor: 1e8,
            max_steps: 50_000,
            detour_phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub t: Vec<C64>,
    pub status: PathStatus,
    pub steps: usize,
    /// Path parameter reached, `1` on success.
    pub s_reached: f64,
}

fn kappa_at(target: C64, phase: f64, s: f64) -> C64 {
    target * s * C64::from_polar(1.0, phase * (1.0 - s))
}

fn dkappa_ds(target: C64, phase: f64, s: f64) -> C64 {
    target * C64::from_polar(1.0, phase * (1.0 - s)) * C64::new(1.0, -phase * s)
}

fn vnorm(t: &[C64]) -> f64 {
    t.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn solve(j: Mat, rhs: Vec<C64>) -> Option<Vec<C64>> {
    let x = j.lu().solve(&Vector::from_vec(rhs))?;
    x.iter().all(|v| v.is_finite()).then(|| x.iter().copied().collect())
}

/// Newton iterations at fixed twist. Succeeds once a step is below
/// `step_tol × (1 + ‖t‖)`.
pub fn newton(spec: &ModelSpec, kappa: C64, t: &[C64], max_iter: usize, step_tol: f64) -> Option<Vec<C64>> {
    let mut t = t.to_vec();
    for _ in 0..max_iter {
        let r: Vec<C64> = bae_residual(spec, kappa, &t).into_iter().map(|x| -x).collect();
        let dt = solve(bae_jacobian(spec, kappa, &t), r)?;
        for (a, d) in t.iter_mut().zip(&dt) {
            *a += d;
        }
        if vnorm(&dt) <= step_tol * (1.0 + vnorm(&t)) {
            return Some(t);
        }
    }
    None
}

fn min_pair_distance(t: &[C64]) -> f64 {
    let mut d = f64::INFINITY;
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            d = d.min((t[a] - t[b]).norm());
        }
    }
    d
}

/// Track an exact solution of the untwisted system to `kappa_target`.
///
/// Euler predictor and Newton corrector; the step halves when the corrector
/// fails or moves the point further than the predictor did, and doubles
/// after three consecutive successes.
pub fn track_path(spec: &ModelSpec, seed: &[C64], kappa_target: C64, opts: &TrackOptions) -> PathOutcome {
    let scale = spec.scale();
    let tol = &spec.tol;
    let finish = |t: Vec<C64>, steps: usize| -> PathOutcome {
        let polished = newton(spec, kappa_target, &t, 12, 1e-14).unwrap_or(t);
        let status = if polished.iter().any(|x| !x.is_finite()) || relative_residual(spec, kappa_target, &polished) > tol.residual_tol {
            PathStatus::MaxSteps
        } else if min_pair_distance(&polished) < tol.dedup_tol * scale {
            PathStatus::Collided
        } else {
            PathStatus::Converged
        };
        PathOutcome { t: polished, status, steps, s_reached: 1.0 }
    };
    if seed.is_empty() {
        return PathOutcome { t: Vec::new(), status: PathStatus::Converged, steps: 0, s_reached: 1.0 };
    }
    let modulus = kappa_target.norm();
    if modulus <= opts.start_modulus {
        return finish(seed.to_vec(), 0);
    }
    let phase = opts.detour_phase;
    let mut s = opts.start_modulus / modulus;
    let fail = |t: Vec<C64>, status, steps, s| PathOutcome { t, status, steps, s_reached: s };
    let Some(mut t) = newton(spec, kappa_at(kappa_target, phase, s), seed, 20, 1e-13) else {
        return fail(seed.to_vec(), PathStatus::MaxSteps, 0, s);
    };
    let mut h = opts.initial_step;
    let mut streak = 0;
    let mut steps = 0;
    while s < 1.0 {
        steps += 1;
        if steps > opts.max_steps {
            return fail(t, PathStatus::MaxSteps, steps, s);
        }
        h = h.min(opts.max_step).min(1.0 - s);
        let kappa = kappa_at(kappa_target, phase, s);
        let dk = dkappa_ds(kappa_target, phase, s);
        // dt/ds = −J⁻¹ ∂r/∂κ · dκ/ds
        let rhs: Vec<C64> = bae_kappa_derivative(spec, &t).into_iter().map(|x| -x * dk).collect();
        let accepted = solve(bae_jacobian(spec, kappa, &t), rhs).and_then(|v| {
            let pred: Vec<C64> = t.iter().zip(&v).map(|(a, d)| a + d * h).collect();
            let corr = newton(spec, kappa_at(kappa_target, phase, s + h), &pred, opts.max_corrector, 1e-10)?;
            let moved = vnorm(&pred.iter().zip(&t).map(|(a, b)| a - b).collect::<Vec<_>>());
            let fixed = vnorm(&corr.iter().zip(&pred).map(|(a, b)| a - b).collect::<Vec<_>>());
            (fixed <= 0.5 * moved + 1e-8 * (1.0 + vnorm(&pred))).then_some(corr)
        });
        match accepted {
            Some(next) => {
                t = next;
                s = if 1.0 - s - h < 1e-15 { 1.0 } else { s + h };
                if t.iter().any(|x| x.norm() > opts.escape_factor * scale) {
                    return fail(t, PathStatus::Escaped, steps, s);
                }
                streak += 1;
                if streak >= 3 {
                    h *= 2.0;
                    streak = 0;
                }
            }
            None => {
                h /= 2.0;
                streak = 0;
                if h < opts.min_step {
                    let status = if t.iter().any(|x| x.norm() > 1e4 * scale) { PathStatus::Escaped } else { PathStatus::MaxSteps };
                    return fail(t, status, steps, s);
                }
            }
        }
    }
    finish(t, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::seeds_kappa0;
    use crate::numkernel::c;

    #[test]
    fn empty_path() {
        let s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(2.0, 0.0));
        let out = track_path(&s, &[], c(2.0, 0.0), &TrackOptions::default());
        assert_eq!(out.status, PathStatus::Converged);
    }

    #[test]
    fn closed_form_with_complex_twist() {
        let s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(0.0, 0.0));
        let kappa = c(1.3, 0.8);
        let seed = &seeds_kappa0(&s, 1)[0];
        let out = track_path(&s, &seed.t, kappa, &TrackOptions::default());
        let closed = -0.5 * (1.0 + kappa) / (1.0 - kappa);
        assert_eq!(out.status, PathStatus::Converged);
        assert!((out.t[0] - closed).norm() < 1e-12);
    }

    #[test]
    fn straight_segment_through_exceptional_twist_escapes() {
        // κ(s) = 2s passes κ = 1, where the single root runs off to infinity.
        let s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(2.0, 0.0));
        let seed = &seeds_kappa0(&s, 1)[0];
        let out = track_path(&s, &seed.t, c(2.0, 0.0), &TrackOptions::default());
        assert_ne!(out.status, PathStatus::Converged);
        let detour = TrackOptions { detour_phase: 0.5, ..Default::default() };
        let out = track_path(&s, &seed.t, c(2.0, 0.0), &detour);
        assert_eq!(out.status, PathStatus::Converged);
        assert!((out.t[0] - c(1.5, 0.0)).norm() < 1e-12);
    }
}
