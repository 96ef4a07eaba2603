use super::{SeparationLattice, SovError};
use crate::bethe::{classify, eigenvalue_tau, level_kappa};
use crate::numkernel::{svd_full_v, CPoly, Mat, Vector, C64};
use crate::repr::{ModelSpec, Variant};

/// Twist entering the difference equation: `κ` (additive) or `θ`
/// (multiplicative).
pub fn baxter_twist(spec: &ModelSpec) -> C64 {
    match spec.variant {
        Variant::Additive => spec.kappa,
        Variant::Multiplicative => spec.theta,
    }
}

/// Whether the additive twist is exactly one, where the symmetric sector
/// takes over.
pub fn is_unit_twist(spec: &ModelSpec) -> bool {
    spec.variant == Variant::Additive && (spec.kappa - 1.0).norm() <= spec.tol.residual_tol
}

/// Coefficient of the backward shift: `∏(u − z_m + Λ_m)` or
/// `∏(q^{2Λ_m} u − z_m)`.
pub fn delta_plus(spec: &ModelSpec, u: C64) -> C64 {
    (0..spec.n())
        .map(|m| match spec.variant {
            Variant::Additive => u - spec.z[m] + spec.lambda(m),
            Variant::Multiplicative => spec.qpow(spec.lambda(m) * 2.0) * u - spec.z[m],
        })
        .product()
}

/// Coefficient of the forward shift, twist included: `κ ∏(u − z_m − Λ_m)`
/// or `θ ∏(u − q^{2Λ_m} z_m)`.
pub fn delta_minus(spec: &ModelSpec, u: C64) -> C64 {
    let p: C64 = (0..spec.n())
        .map(|m| match spec.variant {
            Variant::Additive => u - spec.z[m] - spec.lambda(m),
            Variant::Multiplicative => u - spec.qpow(spec.lambda(m) * 2.0) * spec.z[m],
        })
        .product();
    baxter_twist(spec) * p
}

/// Values of `Q` on each `S_m`, optionally backed by a polynomial.
#[derive(Debug, Clone)]
pub struct QProfile {
    pub values: Vec<Vec<C64>>,
    pub poly: Option<CPoly>,
}

impl QProfile {
    pub fn from_poly(lattice: &SeparationLattice, p: &CPoly) -> Self {
        let values = lattice.sets.iter().map(|s| s.iter().map(|u| p.eval(*u)).collect()).collect();
        Self { values, poly: Some(p.clone()) }
    }

    /// Largest magnitude of each projection `π_m Q`.
    pub fn projection_sizes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.iter().map(|x| x.norm()).fold(0.0, f64::max)).collect()
    }

    /// Every projection is nonzero relative to the largest one.
    pub fn nonvanishing(&self, rel: f64) -> bool {
        let sizes = self.projection_sizes();
        let top = sizes.iter().copied().fold(0.0, f64::max);
        top > 0.0 && sizes.iter().all(|s| *s > rel * top)
    }

    /// Gauge-fixed copy: on each `S_m` the first value above
    /// `rel × max |π_m Q|` is scaled to one. The polynomial is dropped since
    /// the rescaling is only piecewise constant.
    pub fn gauged(&self, rel: f64) -> Self {
        let values = self
            .values
            .iter()
            .map(|v| {
                let top = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
                match v.iter().find(|x| x.norm() > rel * top) {
                    Some(&pivot) => v.iter().map(|x| x / pivot).collect(),
                    None => v.clone(),
                }
            })
            .collect();
        Self { values, poly: None }
    }

    /// Largest entrywise difference of the gauge-fixed profiles.
    pub fn gauge_distance(&self, other: &Self, rel: f64) -> f64 {
        let (a, b) = (self.gauged(rel), other.gauged(rel));
        a.values
            .iter()
            .zip(&b.values)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }

    /// The separated function `π_1 Q ⊗ … ⊗ π_n Q`.
    pub fn tensor(&self) -> Vector {
        let mut out = Vector::from_element(1, C64::new(1.0, 0.0));
        for v in &self.values {
            out = out.kronecker(&Vector::from_column_slice(v));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSource {
    Bethe,
    SovSpectrum,
    LocalLinear,
}

/// An eigenvalue polynomial with a solution of the difference equation.
#[derive(Debug, Clone)]
pub struct TauQPair {
    pub tau: CPoly,
    pub q: QProfile,
    pub source: PairSource,
}

/// Largest relative defect of the difference equation over all lattice
/// points. Shifts leaving a set carry a vanishing coefficient and are
/// dropped.
pub fn baxter_residual(spec: &ModelSpec, lattice: &SeparationLattice, pair: &TauQPair) -> f64 {
    let mut worst = 0.0f64;
    for (set, vals) in lattice.sets.iter().zip(&pair.q.values) {
        for (s, &u) in set.iter().enumerate() {
            let lhs = pair.tau.eval(u) * vals[s];
            let back = if s > 0 { delta_plus(spec, u) * vals[s - 1] } else { C64::default() };
            let fwd = if s + 1 < set.len() { delta_minus(spec, u) * vals[s + 1] } else { C64::default() };
            let size = lhs.norm() + back.norm() + fwd.norm();
            if size > 0.0 {
                worst = worst.max((lhs - back - fwd).norm() / size);
            }
        }
    }
    worst
}

/// Three-term system for `π_m Q` on `S_m`: row `s` reads
/// `τ(u_s) Q_s − Δ⁺(u_s) Q_{s−1} − Δ⁻(u_s) Q_{s+1} = 0`.
pub fn local_matrix(spec: &ModelSpec, lattice: &SeparationLattice, tau: &CPoly, m: usize) -> Mat {
    let set = &lattice.sets[m];
    let d = set.len();
    let mut a = Mat::zeros(d, d);
    for (s, &u) in set.iter().enumerate() {
        a[(s, s)] = tau.eval(u);
        if s > 0 {
            a[(s, s - 1)] = -delta_plus(spec, u);
        }
        if s + 1 < d {
            a[(s, s + 1)] = -delta_minus(spec, u);
        }
    }
    a
}

/// Solve the local problem for a given `τ`: every set must carry a kernel
/// vector (smallest singular value at most `rank_tol` relative to the
/// block's largest). Returns the gauge-fixed profile, or `None`.
pub fn local_solve_linear(spec: &ModelSpec, lattice: &SeparationLattice, tau: &CPoly) -> Option<QProfile> {
    let mut values = Vec::with_capacity(lattice.n());
    for m in 0..lattice.n() {
        let a = local_matrix(spec, lattice, tau, m);
        let (sv, v) = svd_full_v(&a);
        let (top, bottom) = (sv[0], sv[sv.len() - 1]);
        if top > 0.0 && bottom > spec.tol.rank_tol * top {
            return None;
        }
        let col: Vec<C64> = v.column(v.ncols() - 1).iter().copied().collect();
        values.push(col);
    }
    Some(QProfile { values, poly: None }.gauged(spec.tol.margin_tol))
}

/// Pair built from a Bethe solution: `Q(u) = ∏(u − t_a)` and `τ` from the
/// eigenvalue formula. In the multiplicative case the solution must be taken
/// at `κ = q^{2ℓ} θ` and `τ` is rescaled by `q^{Λ−ℓ}`.
pub fn global_from_bethe(spec: &ModelSpec, lattice: &SeparationLattice, t: &[C64]) -> Result<TauQPair, SovError> {
    let ell = t.len();
    if !classify(spec, t).admissible {
        return Err(SovError::NotAdmissible);
    }
    let kappa = level_kappa(spec, ell);
    let tau = eigenvalue_tau(spec, kappa, t)?;
    let tau = match spec.variant {
        Variant::Additive => tau,
        Variant::Multiplicative => {
            let lam: C64 = (0..spec.n()).map(|m| spec.lambda(m)).sum();
            tau.scale(spec.qpow(lam - ell as f64))
        }
    };
    let q = CPoly::from_roots(t);
    Ok(TauQPair { q: QProfile::from_poly(lattice, &q), tau, source: PairSource::Bethe })
}

/// Degree cap on `Q` for admissible global solutions: `Σ 2Λ_m` for a
/// generic twist, `⌊Σ Λ_m⌋` at unit twist, `Σ d_m` multiplicatively.
pub fn degree_cap(spec: &ModelSpec) -> usize {
    let total = spec.max_level();
    if is_unit_twist(spec) {
        total / 2
    } else {
        total
    }
}

/// `(−1)^n (1 + q^{2Λ} θ) ∏ z_m`, the value every multiplicative `τ` takes
/// at zero.
pub fn tau_at_zero(spec: &ModelSpec) -> C64 {
    let q2l = spec.q_lambda_total() * spec.q_lambda_total();
    let sign = if spec.n().is_multiple_of(2) { 1.0 } else { -1.0 };
    (C64::new(1.0, 0.0) + q2l * spec.theta) * spec.z.iter().product::<C64>() * sign
}
