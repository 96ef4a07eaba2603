//! Singular value decompositions, delegated to `faer`.
//!
//! nalgebra 0.33 returns inconsistent singular vectors for some nearly real
//! complex matrices, so every SVD in the crate goes through here.

use super::{Mat, C64};

/// Thin SVD `m = u · diag(s) · vᴴ`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Mat,
    pub s: Vec<f64>,
    pub v: Mat,
}

fn to_faer(m: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> Mat {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn diag(s: faer::diag::DiagRef<'_, C64>) -> Vec<f64> {
    s.column_vector().iter().map(|x| x.re).collect()
}

pub fn svd(m: &Mat) -> Svd {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Svd { u: Mat::zeros(m.nrows(), 0), s: Vec::new(), v: Mat::zeros(m.ncols(), 0) };
    }
    let f = to_faer(m).thin_svd().expect("SVD converges for finite input");
    Svd { u: from_faer(f.U()), s: diag(f.S()), v: from_faer(f.V()) }
}

/// Singular values (descending) with the full `n × n` right factor, so that
/// columns past `min(rows, cols)` span the structural kernel.
pub fn svd_full_v(m: &Mat) -> (Vec<f64>, Mat) {
    if m.nrows() == 0 || m.ncols() == 0 {
        return (Vec::new(), Mat::identity(m.ncols(), m.ncols()));
    }
    let f = to_faer(m).svd().expect("SVD converges for finite input");
    (diag(f.S()), from_faer(f.V()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;

    #[test]
    fn nearly_real_rank_one_reconstructs() {
        let im = [0.0, 1.062e-15, 8.826e-16, 8.464e-16, 2.789e-15, 1.971e-15];
        let m = Mat::from_fn(2, 3, |i, j| c(-0.408, im[i * 3 + j]));
        let d = svd(&m);
        let s = Mat::from_diagonal(&nalgebra::DVector::from_iterator(2, d.s.iter().map(|x| c(*x, 0.0))));
        assert!((&d.u * s * d.v.adjoint() - &m).norm() < 1e-14);
        assert!(d.s[0] >= d.s[1]);
    }

    #[test]
    fn full_right_factor_is_square() {
        let m = Mat::from_fn(1, 3, |_, j| c(j as f64, 1.0));
        let (s, v) = svd_full_v(&m);
        assert_eq!(s.len(), 1);
        assert_eq!(v.shape(), (3, 3));
        assert!((&m * v.columns(1, 2)).norm() < 1e-14);
    }
}
