use super::svd::{svd, svd_full_v};
use super::{Mat, ToleranceProfile, Vector, C64};

/// Frobenius norm.
pub fn frob(m: &Mat) -> f64 {
    m.norm()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Singular values in descending order.
pub fn singular_values(m: &Mat) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).s
}

/// Numerical rank and the condition number of the retained part.
///
/// Singular values above `rank_tol × σ_max` count toward the rank. An empty
/// matrix has rank 0 and condition 1; a zero matrix has condition ∞.
pub fn matrix_rank(m: &Mat, tol: &ToleranceProfile) -> (usize, f64) {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return (0, 1.0) };
    if top == 0.0 {
        return (0, f64::INFINITY);
    }
    let kept: Vec<f64> = s.into_iter().filter(|x| *x > tol.rank_tol * top).collect();
    (kept.len(), top / kept.last().copied().unwrap_or(top))
}

/// Orthonormal basis (as columns) of the approximate kernel of `m`: right
/// singular vectors whose singular value is at most `rel × σ_max`.
pub fn nullspace(m: &Mat, rel: f64) -> Mat {
    let n = m.ncols();
    let (sv, v) = svd_full_v(m);
    let top = sv.first().copied().unwrap_or(0.0);
    let idx: Vec<usize> = (0..n).filter(|&i| i >= sv.len() || sv[i] <= rel * top || top == 0.0).collect();
    Mat::from_fn(n, idx.len(), |r, col| v[(r, idx[col])])
}

/// Least-squares solution of `a · x = b` through the SVD pseudo-inverse.
pub fn lstsq(a: &Mat, b: &Mat) -> Mat {
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    let cut = 1e-14 * top.max(f64::MIN_POSITIVE);
    let mut proj = d.u.adjoint() * b;
    for (i, s) in d.s.iter().enumerate() {
        let inv = if *s > cut { s.recip() } else { 0.0 };
        let mut row = proj.row_mut(i);
        row *= C64::new(inv, 0.0);
    }
    &d.v * proj
}

pub fn determinant(m: &Mat) -> C64 {
    if m.is_empty() {
        return C64::new(1.0, 0.0);
    }
    m.clone().determinant()
}

/// Eigenvalues from the complex Schur form, and optionally unit eigenvectors
/// by back substitution in the triangular factor.
///
/// Eigenvectors are only reliable for well-separated eigenvalues; near
/// coincidences the usual `ε‖T‖` floor on the pivots is applied.
pub fn eigen_decomposition(m: &Mat, vectors: bool) -> (Vec<C64>, Option<Mat>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), vectors.then(|| Mat::zeros(0, 0)));
    }
    let (q, t) = m.clone().schur().unpack();
    let vals: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    if !vectors {
        return (vals, None);
    }
    let floor = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = Mat::zeros(n, n);
    for k in 0..n {
        let lam = vals[k];
        y[(k, k)] = C64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let s: C64 = (j + 1..=k).map(|i| t[(j, i)] * y[(i, k)]).sum();
            let mut piv = t[(j, j)] - lam;
            if piv.norm() < floor {
                piv = C64::new(floor, 0.0);
            }
            y[(j, k)] = -s / piv;
        }
    }
    let mut x = q * y;
    for mut col in x.column_iter_mut() {
        let nrm = col.norm();
        col /= C64::new(nrm, 0.0);
    }
    (vals, Some(x))
}

/// Best rank-1 tensor factorization of a vector laid out in mixed radix
/// (first axis most significant).
#[derive(Debug, Clone)]
pub struct Rank1Split {
    pub factors: Vec<Vector>,
    /// `‖x − ⊗ factors‖ / ‖x‖`.
    pub residual: f64,
}

pub fn rank1_split(x: &Vector, shape: &[usize]) -> Rank1Split {
    assert_eq!(shape.iter().product::<usize>(), x.len(), "shape does not match vector length");
    let mut factors = Vec::with_capacity(shape.len());
    let mut cur = x.clone();
    for (k, &d) in shape.iter().enumerate() {
        if k + 1 == shape.len() {
            factors.push(cur.clone());
            break;
        }
        let rest = cur.len() / d;
        let m = Mat::from_fn(d, rest, |i, j| cur[i * rest + j]);
        let d = svd(&m);
        factors.push(d.u.column(0).into_owned());
        cur = d.v.column(0).map(|x| x.conj()) * C64::new(d.s[0], 0.0);
    }
    let mut recon = Vector::from_element(1, C64::new(1.0, 0.0));
    for f in &factors {
        recon = recon.kronecker(f);
    }
    let nx = x.norm();
    let residual = if nx == 0.0 { 0.0 } else { (x - recon).norm() / nx };
    Rank1Split { factors, residual }
}
