use super::build::{bethe_vector_product, check_offdiagonal, BetheVector};
use super::VecError;
use crate::bethe::bae_jacobian;
use crate::numkernel::{determinant, lstsq, matrix_rank, nullspace, CPoly, Mat, OpPoly, ToleranceProfile, Vector, C64};
use crate::repr::{ModelSpec, MonodromyBundle, TensorSpace, Variant};

/// Sample points for operator identities in `u`: spread on a circle of
/// radius `2·scale + 1` at incommensurate angles.
pub fn sample_points(scale: f64, count: usize) -> Vec<C64> {
    let radius = 2.0 * scale + 1.0;
    (0..count).map(|k| C64::from_polar(radius, 0.7 + 2.399_963 * k as f64)).collect()
}

/// Largest relative defect `‖𝒯(u)w − τ(u)w‖ / (‖𝒯(u)‖ ‖w‖)` over the
/// sample points.
pub fn eigen_residual(
    spec: &ModelSpec,
    transfer: &OpPoly,
    space: &TensorSpace,
    w: &BetheVector,
    tau: &CPoly,
    sample_count: usize,
) -> Result<f64, VecError> {
    let nw = w.norm();
    if nw < spec.tol.residual_tol * spec.scale() {
        return Err(VecError::Trivial(nw));
    }
    let full = w.to_full(space);
    let mut worst = 0.0f64;
    for u in sample_points(spec.scale(), sample_count) {
        let tu = transfer.eval(u);
        let defect = &tu * &full - &full * tau.eval(u);
        worst = worst.max(defect.norm() / (tu.norm() * nw));
    }
    Ok(worst)
}

/// `⟨v*, C(s_1) … C(s_ℓ) w(t)⟩`, the vacuum coefficient after applying the
/// `C` factors at the coordinates of `s`, rightmost first.
pub fn dual_pairing(bundle: &MonodromyBundle, space: &TensorSpace, t: &[C64], s: &[C64]) -> Result<C64, VecError> {
    if t.len() != s.len() {
        return Err(VecError::LengthMismatch { expected: t.len(), got: s.len() });
    }
    let w = bethe_vector_product(bundle, space, t);
    Ok(pair_with(bundle, space, &w, s))
}

/// Pairing of an already built vector with `C(s_1) … C(s_ℓ)`.
pub fn pair_with(bundle: &MonodromyBundle, space: &TensorSpace, w: &BetheVector, s: &[C64]) -> C64 {
    let mut v = w.to_full(space);
    for &sa in s.iter().rev() {
        v = bundle.c.apply(sa, &v).expect("bundle and space share one dimension");
    }
    v[0]
}

/// Closed-form value of `⟨v*, C(t_1) … C(t_ℓ) w(t)⟩` at a solution `t`:
/// a product prefactor times the determinant of the Bethe Jacobian.
///
/// Additive: `(−1)^ℓ ∏_{a,m}(t_a − z_m − Λ_m) ∏_{a≠b}(t_a − t_b)^{−1} det J`.
/// Multiplicative: `(−1)^ℓ q^{−2Λℓ − ℓ(ℓ−1)} (q − q^{−1})^ℓ
/// ∏_{a,m}(t_a − q^{2Λ_m} z_m) ∏_{a≠b}(t_a − t_b)^{−1} det[t_a ∂_a E_b]`.
pub fn norm_determinant(spec: &ModelSpec, kappa: C64, t: &[C64]) -> Result<C64, VecError> {
    check_offdiagonal(spec, t)?;
    let ell = t.len();
    let sign = if ell.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut pref = C64::new(sign, 0.0);
    for a in 0..ell {
        for b in 0..ell {
            if a != b {
                pref /= t[a] - t[b];
            }
        }
    }
    // the Jacobian here is indexed (equation, variable); the closed form uses
    // its transpose, which has the same determinant
    let jac = bae_jacobian(spec, kappa, t);
    match spec.variant {
        Variant::Additive => {
            for ta in t {
                for m in 0..spec.n() {
                    pref *= ta - spec.z[m] - spec.lambda(m);
                }
            }
            Ok(pref * determinant(&jac))
        }
        Variant::Multiplicative => {
            let q = spec.q;
            let lam: C64 = (0..spec.n()).map(|m| spec.lambda(m)).sum();
            let l = ell as f64;
            pref *= spec.qpow(-lam * 2.0 * l - l * (l - 1.0)) * (q - q.inv()).powu(ell as u32);
            for ta in t {
                for m in 0..spec.n() {
                    pref *= ta - spec.qpow(spec.lambda(m) * 2.0) * spec.z[m];
                }
                pref *= ta;
            }
            Ok(pref * determinant(&jac))
        }
    }
}

/// Rank and condition of the vectors stacked as columns.
pub fn basis_rank(vectors: &[BetheVector], tol: &ToleranceProfile) -> (usize, f64) {
    if vectors.is_empty() {
        return (0, 1.0);
    }
    matrix_rank(&stack(vectors.iter().map(|w| &w.coords)), tol)
}

fn stack<'a>(cols: impl Iterator<Item = &'a Vector>) -> Mat {
    let cols: Vec<&Vector> = cols.collect();
    let rows = cols.first().map_or(0, |v| v.len());
    Mat::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

/// `‖δ(e) w‖ / ‖w‖`.
pub fn singular_check(spec: &ModelSpec, space: &TensorSpace, w: &BetheVector) -> Result<f64, VecError> {
    let delta = space.delta.as_ref().ok_or(VecError::NoDiagonalAction)?;
    let nw = w.norm();
    if nw < spec.tol.residual_tol * spec.scale() {
        return Err(VecError::Trivial(nw));
    }
    Ok((&delta.e * w.to_full(space)).norm() / nw)
}

/// Rank of the vectors after projecting onto an orthonormal basis of the
/// singular subspace of `V[ℓ]`, together with that subspace's dimension.
pub fn singular_basis_rank(
    space: &TensorSpace,
    vectors: &[BetheVector],
    ell: usize,
    tol: &ToleranceProfile,
) -> Result<(usize, f64, usize), VecError> {
    let basis = if ell == 0 {
        Mat::identity(1, 1)
    } else {
        let p = space.singular_projector(ell).map_err(|_| VecError::NoDiagonalAction)?;
        nullspace(&p, tol.rank_tol)
    };
    let projected: Vec<Vector> = vectors.iter().map(|w| basis.adjoint() * &w.coords).collect();
    let (rank, cond) = if projected.is_empty() { (0, 1.0) } else { matrix_rank(&stack(projected.iter()), tol) };
    Ok((rank, cond, basis.ncols()))
}

/// Least-squares fit of a `t`-independent map `M: V[ℓ] → V^σ[ℓ]` with
/// `M w(t) = w^σ(t)`, where `V^σ` has its factors (and inhomogeneities)
/// reordered by `σ`.
#[derive(Debug, Clone)]
pub struct Intertwiner {
    pub matrix: Mat,
    /// Relative misfit on the fitting samples.
    pub fit_residual: f64,
    /// Relative misfit on fresh samples not used in the fit.
    pub validation_residual: f64,
}

/// `spec` with factor `m` of the result taken from factor `sigma[m]`.
pub fn permuted_spec(spec: &ModelSpec, sigma: &[usize]) -> ModelSpec {
    let mut out = spec.clone();
    out.weights = sigma.iter().map(|&i| spec.weights[i]).collect();
    out.z = sigma.iter().map(|&i| spec.z[i]).collect();
    out
}

pub fn permutation_intertwiner(
    spec: &ModelSpec,
    sigma: &[usize],
    samples: &[Vec<C64>],
    validation: &[Vec<C64>],
) -> Result<Intertwiner, VecError> {
    let mut seen = vec![false; spec.n()];
    if sigma.len() != spec.n() || sigma.iter().any(|&i| i >= spec.n() || std::mem::replace(&mut seen[i], true)) {
        return Err(VecError::NotAPermutation);
    }
    let ell = samples.first().map_or(0, |t| t.len());
    if samples.iter().chain(validation).any(|t| t.len() != ell) {
        return Err(VecError::LengthMismatch { expected: ell, got: samples.iter().chain(validation).map(|t| t.len()).find(|&l| l != ell).unwrap_or(ell) });
    }
    let other = permuted_spec(spec, sigma);
    let build = |s: &ModelSpec| -> Result<(TensorSpace, MonodromyBundle), VecError> {
        let space = TensorSpace::build(s, s.max_level()).map_err(VecError::Spec)?;
        let bundle = MonodromyBundle::build(s, &space);
        Ok((space, bundle))
    };
    let (space, bundle) = build(spec)?;
    let (space_s, bundle_s) = build(&other)?;
    let sample_mats = |ts: &[Vec<C64>]| {
        let w: Vec<Vector> = ts.iter().map(|t| bethe_vector_product(&bundle, &space, t).coords).collect();
        let ws: Vec<Vector> = ts.iter().map(|t| bethe_vector_product(&bundle_s, &space_s, t).coords).collect();
        (stack(w.iter()), stack(ws.iter()))
    };
    let (w, ws) = sample_mats(samples);
    let needed = space.block_dim(ell);
    let (rank, _) = matrix_rank(&w, &spec.tol);
    if rank < needed {
        return Err(VecError::RankDeficient { rank, needed });
    }
    // M W = W^σ  ⇔  Wᵀ Mᵀ = (W^σ)ᵀ
    let matrix = lstsq(&w.transpose(), &ws.transpose()).transpose();
    let misfit = |a: &Mat, b: &Mat| (&matrix * a - b).norm() / b.norm().max(f64::MIN_POSITIVE);
    let fit_residual = misfit(&w, &ws);
    let validation_residual = if validation.is_empty() {
        0.0
    } else {
        let (wv, wsv) = sample_mats(validation);
        misfit(&wv, &wsv)
    };
    Ok(Intertwiner { matrix, fit_residual, validation_residual })
}
