//! Drawing model instances: well-separated inhomogeneities and generic twists.

use crate::config::{ExperimentConfig, TwistPolicy};
use bethe_core::numkernel::C64;
use bethe_core::repr::{ModelSpec, Variant};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

const MAX_DRAWS: usize = 100;
/// Twists closer than this to an exceptional value are redrawn.
const EXCEPTIONAL_GAP: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("no well-separated inhomogeneities after {0} draws")]
    Separation(usize),
    #[error("no admissible twist after {0} draws")]
    Twist(usize),
    #[error("given inhomogeneities are not well separated (gap {gap:.3e}, need {need:.3e})")]
    GivenNotSeparated { gap: f64, need: f64 },
}

/// What was drawn rather than given, for the run metadata.
#[derive(Debug, Clone, Serialize)]
pub struct Draw {
    pub z_drawn: bool,
    pub z_attempts: usize,
    pub twist_drawn: bool,
    pub twist_attempts: usize,
    pub q_drawn: bool,
    /// Smallest distance between lattice points, absolute.
    pub min_gap: f64,
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ 0x6e65_7261_7465)
}

fn base_spec(cfg: &ExperimentConfig, z: &[C64], q: C64, twist: C64) -> ModelSpec {
    let mut spec = match cfg.variant {
        Variant::Additive => ModelSpec::additive(&cfg.weights, z, twist),
        Variant::Multiplicative => ModelSpec::multiplicative(&cfg.weights, z, q, twist),
    };
    spec.tol = cfg.tol;
    spec.rng_seed = cfg.seed;
    spec
}

/// Required absolute gap between lattice points.
fn needed_gap(cfg: &ExperimentConfig, spec: &ModelSpec) -> f64 {
    (10.0 * cfg.tol.margin_tol * spec.scale()).max(cfg.min_gap)
}

fn draw_z(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let r = cfg.z_radius;
    (0..cfg.weights.len())
        .map(|_| match cfg.variant {
            Variant::Additive => C64::new(rng.gen_range(-r..r), rng.gen_range(-r..r)),
            Variant::Multiplicative => C64::from_polar(rng.gen_range(0.5..r.max(1.0)), rng.gen_range(-PI..PI)),
        })
        .collect()
}

/// Whether the twist drawn for `spec` sits near an exceptional value:
/// `κ = 1` additively, `q^{2ℓ} θ = q^{2(s − ℓ + Λ)}` multiplicatively.
pub fn near_exceptional(spec: &ModelSpec, twist: C64) -> bool {
    match spec.variant {
        Variant::Additive => (twist - 1.0).norm() < EXCEPTIONAL_GAP,
        Variant::Multiplicative => {
            let top = spec.max_level();
            let lam: C64 = (0..spec.n()).map(|m| spec.lambda(m)).sum();
            (0..=top).any(|ell| {
                let kappa = spec.q.powu(2 * ell as u32) * twist;
                (0..=top).any(|s| {
                    let e = spec.qpow((lam + s as f64 - ell as f64) * 2.0);
                    (kappa - e).norm() < EXCEPTIONAL_GAP
                })
            })
        }
    }
}

/// Resolve a config into a model instance, drawing whatever it leaves open.
/// Deterministic in the config seed.
pub fn generate_spec(cfg: &ExperimentConfig) -> Result<(ModelSpec, Draw), GenerateError> {
    let mut rng = rng_for(cfg.seed);
    let q_drawn = cfg.variant == Variant::Multiplicative && cfg.q.is_none();
    let q = match (cfg.variant, cfg.q) {
        (Variant::Additive, _) => C64::new(1.0, 0.0),
        (Variant::Multiplicative, Some(q)) => q,
        (Variant::Multiplicative, None) => C64::new(rng.gen_range(1.1..1.5), 0.0),
    };
    let one = C64::new(1.0, 0.0);

    let (z, z_attempts, min_gap) = match &cfg.z {
        Some(z) => {
            let spec = base_spec(cfg, z, q, one);
            let gap = spec.separation().min_gap * spec.scale();
            let need = 10.0 * cfg.tol.margin_tol * spec.scale();
            if gap < need {
                return Err(GenerateError::GivenNotSeparated { gap, need });
            }
            (z.clone(), 0, gap)
        }
        None => {
            let mut found = None;
            for attempt in 1..=MAX_DRAWS {
                let z = draw_z(cfg, &mut rng);
                let spec = base_spec(cfg, &z, q, one);
                let gap = spec.separation().min_gap * spec.scale();
                if gap >= needed_gap(cfg, &spec) {
                    found = Some((z, attempt, gap));
                    break;
                }
            }
            found.ok_or(GenerateError::Separation(MAX_DRAWS))?
        }
    };

    let probe = base_spec(cfg, &z, q, one);
    let (twist, twist_attempts) = match cfg.twist {
        TwistPolicy::Explicit(k) => (k, 0),
        TwistPolicy::One => (one, 0),
        TwistPolicy::Generic => {
            let mut found = None;
            for attempt in 1..=MAX_DRAWS {
                let k = C64::from_polar(rng.gen_range(0.3..3.0), rng.gen_range(-PI..PI));
                if !near_exceptional(&probe, k) {
                    found = Some((k, attempt));
                    break;
                }
            }
            found.ok_or(GenerateError::Twist(MAX_DRAWS))?
        }
    };
    let draw = Draw {
        z_drawn: cfg.z.is_none(),
        z_attempts,
        twist_drawn: cfg.twist == TwistPolicy::Generic,
        twist_attempts,
        q_drawn,
        min_gap,
    };
    Ok((base_spec(cfg, &z, q, twist), draw))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(variant: Variant, weights: Vec<u32>, twist: TwistPolicy) -> ExperimentConfig {
        ExperimentConfig { variant, weights, twist, seed: 11, ..Default::default() }
    }

    #[test]
    fn drawn_additive_spec_is_separated_and_generic() {
        let c = cfg(Variant::Additive, vec![1, 2], TwistPolicy::Generic);
        let (spec, draw) = generate_spec(&c).unwrap();
        assert!(spec.separation().ok);
        assert!(draw.min_gap >= c.min_gap);
        assert!((spec.kappa - 1.0).norm() >= 0.05);
        assert!((0.3..=3.0).contains(&spec.kappa.norm()));
        let (again, _) = generate_spec(&c).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn unit_policy_is_exact() {
        let (spec, _) = generate_spec(&cfg(Variant::Additive, vec![1, 1, 1], TwistPolicy::One)).unwrap();
        assert_eq!(spec.kappa, C64::new(1.0, 0.0));
    }

    #[test]
    fn multiplicative_q_is_real_and_large() {
        for seed in 0..20 {
            let c = ExperimentConfig { seed, ..cfg(Variant::Multiplicative, vec![1, 2], TwistPolicy::Generic) };
            let (spec, draw) = generate_spec(&c).unwrap();
            assert!(draw.q_drawn);
            assert_eq!(spec.q.im, 0.0);
            assert!((1.1..1.5).contains(&spec.q.re));
            assert!(!near_exceptional(&spec, spec.theta));
            assert!(spec.validate(spec.max_level()).is_ok());
        }
    }

    #[test]
    fn given_colliding_z_is_rejected() {
        let c = ExperimentConfig { z: Some(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]), ..cfg(Variant::Additive, vec![2, 2], TwistPolicy::Generic) };
        assert!(matches!(generate_spec(&c), Err(GenerateError::GivenNotSeparated { .. })));
    }
}
