use super::{ModelSpec, SpecError, Variant};
use crate::numkernel::{kron, Mat, C64};

/// Generators of one tensor factor in the basis `f^k v`, `k = 0..dim − 1`.
#[derive(Debug, Clone)]
pub struct FactorGens {
    pub e: Mat,
    pub f: Mat,
    /// `h` (additive) or `q^h` (multiplicative).
    pub h: Mat,
}

/// `V = V_1 ⊗ … ⊗ V_n` with its monomial basis and weight decomposition.
///
/// Basis vectors `F^ν = f^{ν_1} v_1 ⊗ … ⊗ f^{ν_n} v_n` are ordered
/// lexicographically in `ν`, which is also the Kronecker-product order.
#[derive(Debug, Clone)]
pub struct TensorSpace {
    pub variant: Variant,
    pub dims: Vec<usize>,
    basis: Vec<Vec<usize>>,
    weight_blocks: Vec<Vec<usize>>,
    pub local: Vec<FactorGens>,
    /// Generators of factor `m` acting on the whole space.
    pub embedded: Vec<FactorGens>,
    /// Diagonal action `δ(x) = Σ_m x_m` (additive only).
    pub delta: Option<FactorGens>,
}

fn q_integer(spec: &ModelSpec, x: C64) -> C64 {
    let q = spec.q;
    (spec.qpow(x) - spec.qpow(-x)) / (q - q.inv())
}

fn factor_gens(spec: &ModelSpec, m: usize) -> FactorGens {
    let d = spec.weights[m].dim();
    let lam = spec.lambda(m);
    let mut e = Mat::zeros(d, d);
    let mut f = Mat::zeros(d, d);
    let mut h = Mat::zeros(d, d);
    for k in 0..d {
        let kc = C64::new(k as f64, 0.0);
        if k + 1 < d {
            f[(k + 1, k)] = C64::new(1.0, 0.0);
        }
        match spec.variant {
            Variant::Additive => {
                h[(k, k)] = lam - kc;
                if k >= 1 {
                    e[(k - 1, k)] = kc * (lam * 2.0 - kc + 1.0);
                }
            }
            Variant::Multiplicative => {
                h[(k, k)] = spec.qpow(lam - kc);
                if k >= 1 {
                    e[(k - 1, k)] = q_integer(spec, kc) * q_integer(spec, lam * 2.0 - kc + 1.0);
                }
            }
        }
    }
    FactorGens { e, f, h }
}

fn embed(op: &Mat, m: usize, dims: &[usize]) -> Mat {
    let left: usize = dims[..m].iter().product();
    let right: usize = dims[m + 1..].iter().product();
    kron(&kron(&Mat::identity(left, left), op), &Mat::identity(right, right))
}

impl TensorSpace {
    /// Build the module for `spec`; generic weights must be truncated at a
    /// depth of at least `ell_max + 1`.
    pub fn build(spec: &ModelSpec, ell_max: usize) -> Result<Self, SpecError> {
        spec.validate(ell_max)?;
        let dims = spec.dims();
        let total: usize = dims.iter().product();
        let basis: Vec<Vec<usize>> = (0..total).map(|i| multi_index(i, &dims)).collect();
        let mut weight_blocks = vec![Vec::new(); spec.max_level() + 1];
        for (i, nu) in basis.iter().enumerate() {
            weight_blocks[nu.iter().sum::<usize>()].push(i);
        }
        let local: Vec<FactorGens> = (0..spec.n()).map(|m| factor_gens(spec, m)).collect();
        let embedded: Vec<FactorGens> = local
            .iter()
            .enumerate()
            .map(|(m, g)| FactorGens { e: embed(&g.e, m, &dims), f: embed(&g.f, m, &dims), h: embed(&g.h, m, &dims) })
            .collect();
        let delta = (spec.variant == Variant::Additive).then(|| {
            let sum = |pick: fn(&FactorGens) -> &Mat| {
                embedded.iter().fold(Mat::zeros(total, total), |acc, g| acc + pick(g))
            };
            FactorGens { e: sum(|g| &g.e), f: sum(|g| &g.f), h: sum(|g| &g.h) }
        });
        Ok(Self { variant: spec.variant, dims, basis, weight_blocks, local, embedded, delta })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn max_level(&self) -> usize {
        self.weight_blocks.len() - 1
    }

    pub fn multi_index(&self, i: usize) -> &[usize] {
        &self.basis[i]
    }

    pub fn index(&self, nu: &[usize]) -> Option<usize> {
        if nu.len() != self.dims.len() || nu.iter().zip(&self.dims).any(|(a, d)| a >= d) {
            return None;
        }
        Some(nu.iter().zip(&self.dims).fold(0, |acc, (a, d)| acc * d + a))
    }

    /// Basis indices spanning `V[ℓ]`, in lexicographic order of `ν`.
    pub fn block(&self, ell: usize) -> &[usize] {
        self.weight_blocks.get(ell).map_or(&[], |b| b.as_slice())
    }

    pub fn block_dim(&self, ell: usize) -> usize {
        self.block(ell).len()
    }

    /// Rows `rows` and columns `cols` of `m`.
    pub fn submatrix(m: &Mat, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
    }

    /// `δ(e)` restricted to `V[ℓ] → V[ℓ−1]`.
    pub fn singular_projector(&self, ell: usize) -> Result<Mat, SpecError> {
        let max = self.max_level();
        if ell == 0 || ell > max {
            return Err(SpecError::EllOutOfRange { ell, max });
        }
        let delta = self.delta.as_ref().ok_or(SpecError::EllOutOfRange { ell, max })?;
        Ok(Self::submatrix(&delta.e, self.block(ell - 1), self.block(ell)))
    }

    /// `dim Sing V[ℓ]`, the kernel dimension of `δ(e)` on `V[ℓ]`.
    pub fn singular_dim(&self, ell: usize, tol: &crate::numkernel::ToleranceProfile) -> usize {
        if ell == 0 {
            return self.block_dim(0);
        }
        match self.singular_projector(ell) {
            Ok(p) => self.block_dim(ell) - crate::numkernel::matrix_rank(&p, tol).0,
            Err(_) => 0,
        }
    }
}

/// Mixed-radix digits of `i`, first factor most significant.
pub fn multi_index(mut i: usize, dims: &[usize]) -> Vec<usize> {
    let mut nu = vec![0; dims.len()];
    for m in (0..dims.len()).rev() {
        nu[m] = i % dims[m];
        i /= dims[m];
    }
    nu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{c, ToleranceProfile};
    use crate::repr::Weight;

    fn comm(a: &Mat, b: &Mat) -> Mat {
        a * b - b * a
    }

    #[test]
    fn spin_half_generators() {
        let s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(2.0, 0.0));
        let v = TensorSpace::build(&s, 1).unwrap();
        assert_eq!(v.dim(), 2);
        let g = &v.local[0];
        assert_eq!(g.h[(0, 0)], c(0.5, 0.0));
        assert_eq!(g.h[(1, 1)], c(-0.5, 0.0));
        assert_eq!(g.e[(0, 1)], c(1.0, 0.0));
        assert_eq!(g.f[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn weight_space_dims() {
        let s = ModelSpec::additive(&[1, 1], &[c(0.0, 0.0), c(3.0, 0.0)], c(2.0, 0.0));
        let v = TensorSpace::build(&s, 2).unwrap();
        assert_eq!((0..=2).map(|l| v.block_dim(l)).collect::<Vec<_>>(), vec![1, 2, 1]);
    }

    #[test]
    fn generic_weight_recursion() {
        let mut s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(2.0, 0.0));
        let lam = 0.37;
        s.weights[0] = Weight::Generic { lambda: c(lam, 0.0), depth: 4 };
        let v = TensorSpace::build(&s, 3).unwrap();
        // e f^3 v = 3 (2Λ − 2) f^2 v
        let expected = 3.0 * (2.0 * lam - 3.0 + 1.0);
        assert!((v.local[0].e[(2, 3)] - c(expected, 0.0)).norm() < 1e-14);
        assert!((expected - 3.0 * -1.26).abs() < 1e-14);
    }

    #[test]
    fn sl2_relations_per_factor() {
        let s = ModelSpec::additive(&[1, 2, 3], &[c(0.0, 0.0), c(5.0, 0.0), c(11.0, 0.0)], c(2.0, 0.0));
        let v = TensorSpace::build(&s, 6).unwrap();
        for g in &v.embedded {
            assert!((comm(&g.h, &g.e) - &g.e).norm() < 1e-12);
            assert!((comm(&g.h, &g.f) + &g.f).norm() < 1e-12);
            assert!((comm(&g.e, &g.f) - &g.h * c(2.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn uq_relations_per_factor() {
        let q = c(1.21, 0.1);
        let s = ModelSpec::multiplicative(&[1, 2], &[c(1.0, 0.0), c(3.7, 0.0)], q, c(0.8, 0.5));
        let v = TensorSpace::build(&s, 3).unwrap();
        for g in &v.local {
            let kinv = g.h.clone().try_inverse().unwrap();
            assert!((&g.h * &g.e * &kinv - &g.e * q).norm() < 1e-12);
            assert!((&g.h * &g.f * &kinv - &g.f / q).norm() < 1e-12);
            let rhs = (&g.h * &g.h - &kinv * &kinv) / (q - q.inv());
            assert!((comm(&g.e, &g.f) - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_dims() {
        let tol = ToleranceProfile::default();
        let s = ModelSpec::additive(&[1, 1], &[c(0.0, 0.0), c(3.0, 0.0)], c(1.0, 0.0));
        let v = TensorSpace::build(&s, 2).unwrap();
        assert_eq!(v.singular_projector(1).map(|p| crate::numkernel::matrix_rank(&p, &tol).0), Ok(1));
        assert_eq!(v.singular_dim(1, &tol), 1);
        let s3 = ModelSpec::additive(&[1, 1, 1], &[c(0.0, 0.0), c(3.0, 0.0), c(7.0, 0.0)], c(1.0, 0.0));
        let v3 = TensorSpace::build(&s3, 3).unwrap();
        assert_eq!((0..=3).map(|l| v3.singular_dim(l, &tol)).collect::<Vec<_>>(), vec![1, 2, 0, 0]);
        assert!(v3.singular_projector(0).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            let nu = multi_index(i, &dims);
            let s = ModelSpec::additive(&[1, 2, 3], &[c(0.0, 0.0), c(5.0, 0.0), c(11.0, 0.0)], c(2.0, 0.0));
            let v = TensorSpace::build(&s, 6).unwrap();
            assert_eq!(v.index(&nu), Some(i));
        }
    }
}
