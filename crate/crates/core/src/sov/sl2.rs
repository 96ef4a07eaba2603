use super::operators::{add_row, lagrange, SovFamily};
use super::{SeparationLattice, SovError};
use crate::numkernel::{singular_values, CPoly, Mat, OpPoly, C64};
use crate::repr::{ModelSpec, Variant};

/// The `sl2` action on separated functions at unit twist.
#[derive(Debug, Clone)]
pub struct Sl2Triple {
    pub e: Mat,
    pub f: Mat,
    pub h: Mat,
}

fn require_additive(spec: &ModelSpec) -> Result<(), SovError> {
    match spec.variant {
        Variant::Additive => Ok(()),
        Variant::Multiplicative => Err(SovError::Unsupported("sl2 structure exists for the additive model only")),
    }
}

/// `diag ∏_{k≠m}(x_m − x_k)^{-1}`.
fn inv_spread(lattice: &SeparationLattice, m: usize) -> Mat {
    let dim = lattice.dim();
    Mat::from_diagonal(&crate::numkernel::Vector::from_fn(dim, |i, _| {
        let pt = lattice.point(i);
        pt.iter().enumerate().filter(|(k, _)| *k != m).map(|(_, xk)| pt[m] - xk).product::<C64>().inv()
    }))
}

pub fn sl2_on_f(spec: &ModelSpec, lattice: &SeparationLattice, family: &SovFamily) -> Result<Sl2Triple, SovError> {
    require_additive(spec)?;
    let dim = lattice.dim();
    let id = Mat::identity(dim, dim);
    let mut e = Mat::zeros(dim, dim);
    let mut f = Mat::zeros(dim, dim);
    let mut h = Mat::zeros(dim, dim);
    for m in 0..lattice.n() {
        let d = inv_spread(lattice, m);
        let shifted = &family.x[m] - &id * spec.z[m];
        let dm = &d * &family.y_minus[m];
        h += &shifted - &dm;
        f += &dm;
        e += shifted * C64::new(2.0, 0.0) - &d * (&family.y_plus[m] + &family.y_minus[m]);
    }
    Ok(Sl2Triple { e, f, h })
}

/// `Δ(u) = ∏(u − z_m + Λ_m)(u − z_m − Λ_m − 1)`.
fn big_delta(spec: &ModelSpec, u: C64) -> C64 {
    (0..spec.n()).map(|m| (u - spec.z[m] + spec.lambda(m)) * (u - spec.z[m] - spec.lambda(m) - 1.0)).product()
}

/// The raising polynomial `𝒞(u)`, of degree at most `n − 1`, whose sum with
/// the separated transfer polynomial commutes with the `sl2` action.
pub fn raising_c(spec: &ModelSpec, lattice: &SeparationLattice, family: &SovFamily) -> Result<OpPoly, SovError> {
    require_additive(spec)?;
    let n = lattice.n();
    let dim = lattice.dim();
    let mut coeffs = vec![Mat::zeros(dim, dim); n.max(1)];
    let cross: Vec<Vec<Mat>> = (0..n).map(|m| (0..n).map(|l| &family.y_plus[m] * &family.y_minus[l]).collect()).collect();
    for i in 0..dim {
        let x = lattice.point(i);
        for m in 0..n {
            let lag = lagrange(&x, m);
            let up: C64 = x.iter().map(|xk| x[m] - xk + 1.0).product();
            let down: C64 = x.iter().map(|xk| x[m] - xk - 1.0).product();
            let diag = big_delta(spec, x[m] + 1.0) / up + big_delta(spec, x[m]) / down;
            for (k, c) in lag.coeffs().iter().enumerate() {
                coeffs[k][(i, i)] += c * diag;
            }
            let shifts = -(&family.y_plus[m] + &family.y_minus[m]);
            add_row(&mut coeffs, i, &lag, &shifts);
            for l in (0..n).filter(|l| *l != m) {
                let others: Vec<C64> = (0..n).filter(|k| *k != l && *k != m).map(|k| x[k]).collect();
                let denom: C64 = (0..n).filter(|k| *k != l && *k != m).map(|k| (x[m] - x[k]) * (x[l] - x[k])).product();
                let scale = ((x[m] - x[l]) * (x[m] - x[l] - 1.0) * denom).inv();
                add_row(&mut coeffs, i, &CPoly::from_roots(&others).scale(scale), &cross[m][l]);
            }
        }
    }
    Ok(OpPoly::new(coeffs, dim).expect("coefficients share the lattice dimension"))
}

/// Weights `Λ − ℓ`, `ℓ = 0..=max_level`, with `Λ = Σ Λ_m`.
pub fn weights(spec: &ModelSpec) -> Vec<C64> {
    let lam: C64 = (0..spec.n()).map(|m| spec.lambda(m)).sum();
    (0..=spec.max_level()).map(|l| lam - l as f64).collect()
}

/// Geometric multiplicity of each weight as an eigenvalue of `h`.
pub fn weight_multiplicities(h: &Mat, weights: &[C64], rank_tol: f64) -> Vec<usize> {
    let n = h.nrows();
    let scale = h.norm().max(1.0);
    weights
        .iter()
        .map(|w| {
            let sv = singular_values(&(h - Mat::identity(n, n) * *w));
            sv.iter().filter(|s| **s <= rank_tol * scale).count()
        })
        .collect()
}

/// Spectral projectors of a diagonalizable `h` with the given eigenvalues.
pub fn weight_projectors(h: &Mat, weights: &[C64]) -> Vec<Mat> {
    let n = h.nrows();
    weights
        .iter()
        .map(|w| {
            let mut p = Mat::identity(n, n);
            for v in weights.iter().filter(|v| *v != w) {
                p = p * (h - Mat::identity(n, n) * *v) / (w - v);
            }
            p
        })
        .collect()
}

/// Relative size of the part of `c` that does not raise the weight by one,
/// measured through the spectral projectors of `h`.
pub fn raising_defect(h: &Mat, c: &Mat, weights: &[C64]) -> f64 {
    let proj = weight_projectors(h, weights);
    let mut raised = Mat::zeros(c.nrows(), c.ncols());
    for (j, wj) in weights.iter().enumerate() {
        if let Some(i) = weights.iter().position(|wi| (wi - wj - 1.0).norm() < 1e-9) {
            raised += &proj[i] * c * &proj[j];
        }
    }
    (c - raised).norm() / c.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;
    use crate::sov::{build_lattice, sov_operators};

    fn br(a: &Mat, b: &Mat) -> Mat {
        a * b - b * a
    }

    fn unit(two_lambda: &[u32], z: &[C64]) -> (ModelSpec, SeparationLattice, SovFamily) {
        let s = ModelSpec::additive(two_lambda, z, c(1.0, 0.0));
        let l = build_lattice(&s).unwrap();
        let f = sov_operators(&s, &l);
        (s, l, f)
    }

    #[test]
    fn triple_satisfies_relations_and_character() {
        for (d, z) in [
            (vec![1], vec![c(0.0, 0.0)]),
            (vec![1, 1, 1], vec![c(0.2, 0.0), c(1.9, 0.3), c(-1.3, 0.7)]),
            (vec![1, 2], vec![c(0.3, 0.1), c(3.1, -0.4)]),
        ] {
            let (s, l, f) = unit(&d, &z);
            let t = sl2_on_f(&s, &l, &f).unwrap();
            let scale = t.h.norm().max(t.e.norm()).max(t.f.norm());
            assert!((br(&t.h, &t.e) - &t.e).norm() < 1e-12 * scale * scale);
            assert!((br(&t.h, &t.f) + &t.f).norm() < 1e-12 * scale * scale);
            assert!((br(&t.e, &t.f) - &t.h * C64::new(2.0, 0.0)).norm() < 1e-12 * scale * scale);
            let space = crate::repr::TensorSpace::build(&s, s.max_level()).unwrap();
            let want: Vec<usize> = (0..=s.max_level()).map(|l| space.block_dim(l)).collect();
            assert_eq!(weight_multiplicities(&t.h, &weights(&s), s.tol.rank_tol), want);
        }
    }

    #[test]
    fn spin_half_triple_is_traceless() {
        let (s, l, f) = unit(&[1], &[c(0.4, 0.0)]);
        let t = sl2_on_f(&s, &l, &f).unwrap();
        assert!(t.h.trace().norm() < 1e-14);
        // Casimir EF + FE + 2H² acts as 2Λ(Λ + 1) = 3/2
        let cas = &t.e * &t.f + &t.f * &t.e + &t.h * &t.h * C64::new(2.0, 0.0);
        assert!((cas - Mat::identity(2, 2) * C64::new(1.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn raising_polynomial_properties() {
        let (s, l, f) = unit(&[1, 1, 1], &[c(0.2, 0.0), c(1.9, 0.3), c(-1.3, 0.7)]);
        let t = sl2_on_f(&s, &l, &f).unwrap();
        let cu = raising_c(&s, &l, &f).unwrap();
        let total = f.transfer.add(&cu);
        let cs = total.coeffs();
        for a in cs {
            for b in cs {
                assert!(br(a, b).norm() < 1e-10 * a.norm() * b.norm());
            }
        }
        let w = weights(&s);
        for u in [c(0.3, 0.2), c(1.7, 0.0), c(-0.8, 1.1)] {
            let tc = total.eval(u);
            for x in [&t.e, &t.f, &t.h] {
                assert!(br(&tc, x).norm() < 1e-10 * tc.norm() * x.norm());
            }
            let cm = cu.eval(u);
            assert!(raising_defect(&t.h, &cm, &w) < 1e-10);
            assert!((br(&t.h, &cm) - &cm).norm() < 1e-10 * cm.norm());
        }
    }

    #[test]
    fn multiplicative_has_no_triple() {
        let s = ModelSpec::multiplicative(&[1], &[c(1.0, 0.0)], c(1.2, 0.0), c(0.5, 0.0));
        let l = build_lattice(&s).unwrap();
        let f = sov_operators(&s, &l);
        assert!(sl2_on_f(&s, &l, &f).is_err());
    }
}
