use super::system::relative_residual;
use crate::numkernel::{CPoly, C64};
use crate::repr::{ModelSpec, Variant};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TauError {
    #[error("coordinates are not pairwise distinct")]
    Diagonal,
    #[error("nonvanishing residue (relative {0:.3e})")]
    NonvanishingResidue(f64),
}

/// The rational expression whose polynomiality is equivalent to the Bethe
/// equations, evaluated at `u`.
pub fn tau_rational(spec: &ModelSpec, kappa: C64, t: &[C64], u: C64) -> C64 {
    let n = spec.n();
    match spec.variant {
        Variant::Additive => {
            let p: C64 = (0..n).map(|m| u - spec.z[m] + spec.lambda(m)).product();
            let mm: C64 = (0..n).map(|m| u - spec.z[m] - spec.lambda(m)).product();
            let first: C64 = t.iter().map(|ta| (u - ta - 1.0) / (u - ta)).product();
            let second: C64 = t.iter().map(|ta| (u - ta + 1.0) / (u - ta)).product();
            p * first + kappa * mm * second
        }
        Variant::Multiplicative => {
            let q2 = spec.q * spec.q;
            let q2l = |m: usize| spec.qpow(spec.lambda(m) * 2.0);
            let p: C64 = (0..n).map(|m| q2l(m) * u - spec.z[m]).product();
            let mm: C64 = (0..n).map(|m| u - q2l(m) * spec.z[m]).product();
            let first: C64 = t.iter().map(|ta| (u - q2 * ta) / (u - ta)).product();
            let second: C64 = t.iter().map(|ta| (q2 * u - ta) / (u - ta)).product();
            let pref = (spec.q_lambda_total() * spec.q.powu(t.len() as u32)).inv();
            pref * (p * first + kappa * mm * second)
        }
    }
}

/// Degree-`n` polynomial obtained by interpolating [`tau_rational`] on a
/// circle enclosing all coordinates. Polynomiality is checked through the
/// residues at the coordinates, which vanish exactly when `t` solves the
/// Bethe equations.
pub fn eigenvalue_tau(spec: &ModelSpec, kappa: C64, t: &[C64]) -> Result<CPoly, TauError> {
    let scale = spec.scale();
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            if (t[a] - t[b]).norm() < spec.tol.dedup_tol * scale {
                return Err(TauError::Diagonal);
            }
        }
    }
    let res = relative_residual(spec, kappa, t);
    if res > spec.tol.residual_tol {
        return Err(TauError::NonvanishingResidue(res));
    }
    Ok(tau_interpolated(spec, kappa, t))
}

/// Interpolation without the residue check.
pub fn tau_interpolated(spec: &ModelSpec, kappa: C64, t: &[C64]) -> CPoly {
    let tmax = t.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let radius = 2.0 * spec.scale().max(tmax) + 1.0;
    CPoly::interpolate_circle(|u| tau_rational(spec, kappa, t, u), spec.n(), radius)
}

/// Residue of [`tau_rational`] at each coordinate.
pub fn tau_residues(spec: &ModelSpec, kappa: C64, t: &[C64]) -> Vec<C64> {
    let r = super::bae_residual(spec, kappa, t);
    (0..t.len())
        .map(|a| {
            let denom: C64 = (0..t.len()).filter(|b| *b != a).map(|b| t[a] - t[b]).product();
            match spec.variant {
                Variant::Additive => -r[a] / denom,
                Variant::Multiplicative => {
                    let pref = (spec.q_lambda_total() * spec.q.powu(t.len() as u32)).inv();
                    pref * (1.0 - spec.q * spec.q) * t[a] * r[a] / denom
                }
            }
        })
        .collect()
}
