use super::{ModelSpec, TensorSpace, Variant};
use crate::numkernel::{Mat, OpPoly, C64};

/// Entries of the monodromy matrix `[[A, B], [C, D]]` as operator polynomials.
#[derive(Debug, Clone)]
pub struct MonodromyBundle {
    pub a: OpPoly,
    pub b: OpPoly,
    pub c: OpPoly,
    pub d: OpPoly,
    /// `A + κ D` at the model's `κ`.
    pub transfer: OpPoly,
}

type Entry = [[OpPoly; 2]; 2];

fn factor_matrix(spec: &ModelSpec, space: &TensorSpace, m: usize) -> Entry {
    let dim = space.dim();
    let g = &space.embedded[m];
    let id = Mat::identity(dim, dim);
    let z = spec.z[m];
    let poly = |v: Vec<Mat>| OpPoly::new(v, dim).expect("embedded generators share the space dimension");
    match spec.variant {
        // T_m(u − z_m) = [[u − z_m + h, f], [e, u − z_m − h]]
        Variant::Additive => [
            [poly(vec![&g.h - &id * z, id.clone()]), poly(vec![g.f.clone()])],
            [poly(vec![g.e.clone()]), poly(vec![-&g.h - &id * z, id])],
        ],
        // z_m T_m(u / z_m) with q^{±h} and a (q − q⁻¹) normalization of e, f
        Variant::Multiplicative => {
            let q = spec.q;
            let dq = q - q.inv();
            let k = &g.h;
            let kinv = k.clone().try_inverse().expect("q^h is diagonal with nonzero entries");
            [
                [poly(vec![&kinv * -z, k.clone()]), poly(vec![Mat::zeros(dim, dim), &g.f * dq])],
                [poly(vec![&g.e * (z * dq)]), poly(vec![k * -z, kinv])],
            ]
        }
    }
}

impl MonodromyBundle {
    /// Ordered product `T_1 … T_n` of the per-factor matrices.
    pub fn build(spec: &ModelSpec, space: &TensorSpace) -> Self {
        let mut t = factor_matrix(spec, space, 0);
        for m in 1..spec.n() {
            let f = factor_matrix(spec, space, m);
            let entry = |i: usize, j: usize| t[i][0].mul(&f[0][j]).add(&t[i][1].mul(&f[1][j]));
            t = [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]];
        }
        let [[a, b], [c, d]] = t;
        let transfer = a.add(&d.scale(spec.kappa));
        Self { a, b, c, d, transfer }
    }

    /// `A + κ D` for an arbitrary twist.
    pub fn transfer(&self, kappa: C64) -> OpPoly {
        self.a.add(&self.d.scale(kappa))
    }
}
