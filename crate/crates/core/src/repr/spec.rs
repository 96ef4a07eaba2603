use crate::numkernel::{ToleranceProfile, C64};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Yangian-type monodromy with rational dependence on `u`.
    Additive,
    /// Trigonometric monodromy built from `U_q(sl2)` modules.
    Multiplicative,
}

/// Highest weight of one tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weight {
    /// `2Λ = d`; the irreducible module has dimension `d + 1`.
    Integral(u32),
    /// Arbitrary complex `Λ`, realized as a Verma module cut at `depth`.
    Generic { lambda: C64, depth: usize },
}

impl Weight {
    pub fn lambda(&self) -> C64 {
        match *self {
            Weight::Integral(d) => C64::new(d as f64 / 2.0, 0.0),
            Weight::Generic { lambda, .. } => lambda,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Weight::Integral(d) => d as usize + 1,
            Weight::Generic { depth, .. } => depth,
        }
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, Weight::Integral(_))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("model needs at least one factor")]
    Empty,
    #[error("expected {expected} inhomogeneities, got {got}")]
    Length { expected: usize, got: usize },
    #[error("factor {0} has nonpositive dimension")]
    ZeroDim(usize),
    #[error("factor {factor}: truncation depth {depth} is below the {needed} levels requested")]
    Truncation { factor: usize, depth: usize, needed: usize },
    #[error("multiplicative model needs nonzero inhomogeneities (factor {0})")]
    ZeroZ(usize),
    #[error("q is too close to a root of unity: |q^{order} - 1| = {gap:.3e}")]
    RootOfUnity { order: usize, gap: f64 },
    #[error("invalid tolerances: {0}")]
    Tolerance(String),
    #[error("level {ell} outside 0..={max}")]
    EllOutOfRange { ell: usize, max: usize },
    #[error("operation requires integral weights")]
    NonIntegral,
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub variant: Variant,
    pub weights: Vec<Weight>,
    pub z: Vec<C64>,
    /// Twist of the transfer matrix `A + κ D`.
    pub kappa: C64,
    /// Twist of the multiplicative difference equation; `κ = q^{2ℓ} θ`.
    pub theta: C64,
    /// Deformation parameter, used only by the multiplicative variant.
    pub q: C64,
    pub tol: ToleranceProfile,
    pub rng_seed: u64,
}

/// Outcome of the well-separation test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub ok: bool,
    /// Smallest distance between points of different factors, or between
    /// distinct points of one factor, in units of [`ModelSpec::scale`].
    pub min_gap: f64,
}

impl ModelSpec {
    pub fn additive(two_lambda: &[u32], z: &[C64], kappa: C64) -> Self {
        Self {
            variant: Variant::Additive,
            weights: two_lambda.iter().map(|d| Weight::Integral(*d)).collect(),
            z: z.to_vec(),
            kappa,
            theta: kappa,
            q: C64::new(1.0, 0.0),
            tol: ToleranceProfile::default(),
            rng_seed: 0,
        }
    }

    /// Multiplicative instance; `kappa` is left equal to `theta` and is
    /// replaced by `q^{2ℓ} θ` per level by the callers that sweep ℓ.
    pub fn multiplicative(d: &[u32], z: &[C64], q: C64, theta: C64) -> Self {
        Self {
            variant: Variant::Multiplicative,
            weights: d.iter().map(|x| Weight::Integral(*x)).collect(),
            z: z.to_vec(),
            kappa: theta,
            theta,
            q,
            tol: ToleranceProfile::default(),
            rng_seed: 0,
        }
    }

    pub fn with_kappa(&self, kappa: C64) -> Self {
        Self { kappa, ..self.clone() }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn lambda(&self, m: usize) -> C64 {
        self.weights[m].lambda()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.weights.iter().map(Weight::dim).collect()
    }

    pub fn all_integral(&self) -> bool {
        self.weights.iter().all(Weight::is_integral)
    }

    /// Largest level with a nonzero weight space, `Σ (dim_m − 1)`.
    pub fn max_level(&self) -> usize {
        self.dims().iter().map(|d| d - 1).sum()
    }

    /// Natural magnitude used to make tolerances dimensionless.
    pub fn scale(&self) -> f64 {
        let zmax = self.z.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lmax = (0..self.n()).map(|m| self.lambda(m).norm()).fold(0.0, f64::max);
        1f64.max(zmax).max(lmax)
    }

    /// `q^x` on the principal branch.
    pub fn qpow(&self, x: C64) -> C64 {
        (self.q.ln() * x).exp()
    }

    /// `q^{Λ_m}`.
    pub fn q_lambda(&self, m: usize) -> C64 {
        self.qpow(self.lambda(m))
    }

    /// `q^{Λ}` with `Λ = Σ Λ_m`.
    pub fn q_lambda_total(&self) -> C64 {
        (0..self.n()).map(|m| self.q_lambda(m)).product()
    }

    /// Lattice points attached to factor `m`: `z − Λ + s` (additive) or
    /// `z q^{2(s − Λ)}` (multiplicative) for `s = 0..dim_m − 1`, plus the
    /// upper endpoint `z + Λ` (resp. `z q^{2Λ}`).
    pub fn singular_points(&self, m: usize) -> Vec<C64> {
        let lam = self.lambda(m);
        let z = self.z[m];
        let mut pts: Vec<C64> = (0..self.weights[m].dim())
            .map(|s| match self.variant {
                Variant::Additive => z - lam + s as f64,
                Variant::Multiplicative => z * self.qpow((C64::new(s as f64, 0.0) - lam) * 2.0),
            })
            .collect();
        let top = match self.variant {
            Variant::Additive => z + lam,
            Variant::Multiplicative => z * self.qpow(lam * 2.0),
        };
        if pts.iter().all(|p| (p - top).norm() > 1e-14 * self.scale()) {
            pts.push(top);
        }
        pts
    }

    pub fn separation(&self) -> Separation {
        let pts: Vec<C64> = (0..self.n()).flat_map(|m| self.singular_points(m)).collect();
        let mut gap = f64::INFINITY;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                gap = gap.min((pts[i] - pts[j]).norm());
            }
        }
        let min_gap = gap / self.scale();
        Separation { ok: min_gap > self.tol.margin_tol, min_gap }
    }

    /// Structural validation. Well-separation is reported by
    /// [`ModelSpec::separation`] and never rejected here.
    pub fn validate(&self, ell_max: usize) -> Result<(), SpecError> {
        self.tol.validate().map_err(SpecError::Tolerance)?;
        if self.weights.is_empty() {
            return Err(SpecError::Empty);
        }
        if self.z.len() != self.n() {
            return Err(SpecError::Length { expected: self.n(), got: self.z.len() });
        }
        for (m, w) in self.weights.iter().enumerate() {
            if w.dim() == 0 {
                return Err(SpecError::ZeroDim(m));
            }
            if let Weight::Generic { depth, .. } = w {
                if *depth < ell_max + 1 {
                    return Err(SpecError::Truncation { factor: m, depth: *depth, needed: ell_max + 1 });
                }
            }
        }
        if self.variant == Variant::Multiplicative {
            if let Some(m) = self.z.iter().position(|z| z.norm() == 0.0) {
                return Err(SpecError::ZeroZ(m));
            }
            let orders = self.dims().iter().sum::<usize>() + ell_max + 1;
            for k in 1..=orders {
                let gap = (self.q.powu(2 * k as u32) - 1.0).norm();
                if gap <= self.tol.margin_tol {
                    return Err(SpecError::RootOfUnity { order: 2 * k, gap });
                }
            }
        }
        Ok(())
    }
}
