use super::baxter::{baxter_twist, delta_minus, delta_plus};
use super::SeparationLattice;
use crate::numkernel::{CPoly, Mat, OpPoly, Vector, C64};
use crate::repr::{ModelSpec, Variant};

/// Shift operators and the separated transfer polynomial on functions over
/// `S_1 × … × S_n`.
#[derive(Debug, Clone)]
pub struct SovFamily {
    pub twist: C64,
    /// Multiplication by the coordinate `x_k`.
    pub x: Vec<Mat>,
    /// `y_k^+ f(x) = f(x_k ↦ previous point) Δ⁺(x_k)`, zero when the previous
    /// point is outside `S_k`.
    pub y_plus: Vec<Mat>,
    /// `y_k^- f(x) = f(x_k ↦ next point) Δ⁻(x_k) / twist`.
    pub y_minus: Vec<Mat>,
    pub transfer: OpPoly,
}

impl SovFamily {
    pub fn dim(&self) -> usize {
        self.transfer.dim()
    }
}

/// `∏_{k≠m}(u − x_k)/(x_m − x_k)`.
pub(super) fn lagrange(x: &[C64], m: usize) -> CPoly {
    let others: Vec<C64> = x.iter().enumerate().filter(|(k, _)| *k != m).map(|(_, v)| *v).collect();
    let denom: C64 = others.iter().map(|xk| x[m] - xk).product();
    CPoly::from_roots(&others).scale(denom.inv())
}

pub(super) fn add_row(target: &mut [Mat], i: usize, p: &CPoly, row: &Mat) {
    for (k, c) in p.coeffs().iter().enumerate() {
        let mut r = target[k].row_mut(i);
        r += row.row(i) * *c;
    }
}

pub fn sov_operators(spec: &ModelSpec, lattice: &SeparationLattice) -> SovFamily {
    let n = lattice.n();
    let dim = lattice.dim();
    let twist = baxter_twist(spec);
    let mut x = vec![Mat::zeros(dim, dim); n];
    let mut y_plus = vec![Mat::zeros(dim, dim); n];
    let mut y_minus = vec![Mat::zeros(dim, dim); n];
    // the forward coefficient without the twist
    let bare_minus = |u: C64| delta_minus(&ModelSpec { kappa: C64::new(1.0, 0.0), theta: C64::new(1.0, 0.0), ..spec.clone() }, u);
    for i in 0..dim {
        let pos = lattice.multi_index(i);
        for k in 0..n {
            let xk = lattice.sets[k][pos[k]];
            x[k][(i, i)] = xk;
            if pos[k] > 0 {
                let mut p = pos.clone();
                p[k] -= 1;
                y_plus[k][(i, lattice.index(&p))] = delta_plus(spec, xk);
            }
            if pos[k] + 1 < lattice.sets[k].len() {
                let mut p = pos.clone();
                p[k] += 1;
                y_minus[k][(i, lattice.index(&p))] = bare_minus(xk);
            }
        }
    }
    let mut coeffs = vec![Mat::zeros(dim, dim); n + 1];
    for i in 0..dim {
        let pt = lattice.point(i);
        let base = CPoly::from_roots(&pt);
        let lead = match spec.variant {
            Variant::Additive => base.scale(C64::new(1.0, 0.0) + twist),
            Variant::Multiplicative => {
                let q2l = spec.q_lambda_total() * spec.q_lambda_total();
                let zprod: C64 = spec.z.iter().product();
                let xprod: C64 = pt.iter().product();
                base.scale((C64::new(1.0, 0.0) + q2l * twist) * zprod / xprod)
            }
        };
        for (k, c) in lead.coeffs().iter().enumerate() {
            coeffs[k][(i, i)] += c;
        }
        for m in 0..n {
            let mut lag = lagrange(&pt, m);
            if spec.variant == Variant::Multiplicative {
                lag = &lag * &CPoly::linear(C64::default(), pt[m].inv());
            }
            let shift = &y_plus[m] + &y_minus[m] * twist;
            add_row(&mut coeffs, i, &lag, &shift);
        }
    }
    let transfer = OpPoly::new(coeffs, dim).expect("coefficients share the lattice dimension");
    SovFamily { twist, x, y_plus, y_minus, transfer }
}

/// Largest relative defect of `𝒯(x_k) f = (y_k^+ + twist·y_k^-) f`, checked
/// row by row with `u` set to the row's own `x_k`.
pub fn txk_defect(lattice: &SeparationLattice, family: &SovFamily, f: &Vector) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..lattice.dim() {
        let pt = lattice.point(i);
        for (k, &xk) in pt.iter().enumerate() {
            let lhs = (family.transfer.eval(xk).row(i) * f)[(0, 0)];
            let shift = &family.y_plus[k] + &family.y_minus[k] * family.twist;
            let rhs = (shift.row(i) * f)[(0, 0)];
            let size = lhs.norm().max(rhs.norm()).max(f.norm() * f64::EPSILON);
            worst = worst.max((lhs - rhs).norm() / size);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;
    use crate::sov::build_lattice;

    fn comm(a: &Mat, b: &Mat) -> f64 {
        (a * b - b * a).norm() / (a.norm() * b.norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn single_spin_shift_entries() {
        let s = ModelSpec::additive(&[1], &[c(0.3, 0.0)], c(2.0, 0.0));
        let l = build_lattice(&s).unwrap();
        let f = sov_operators(&s, &l);
        // S = {z − ½, z + ½}; y⁺ reads the lower point from the upper one
        // with coefficient (x − z + ½) at x = z + ½
        assert_eq!(f.y_plus[0][(1, 0)], c(1.0, 0.0));
        assert_eq!(f.y_plus[0][(0, 1)], c(0.0, 0.0));
        // y⁻ reads the upper point from the lower one with (x − z − ½) at x = z − ½
        assert_eq!(f.y_minus[0][(0, 1)], c(-1.0, 0.0));
    }

    #[test]
    fn transfer_coefficients_commute() {
        let specs = [
            ModelSpec::additive(&[1, 2], &[c(0.31, 0.17), c(3.4, -0.6)], C64::from_polar(1.7, 2.1)),
            ModelSpec::additive(&[1, 1, 1], &[c(0.31, 0.17), c(3.4, -0.6), c(-2.2, 0.9)], c(1.0, 0.0)),
            ModelSpec::multiplicative(&[1, 2], &[c(1.0, 0.0), c(3.7, 0.0)], c(1.21, 0.0), C64::from_polar(1.3, 0.9)),
        ];
        for s in specs {
            let l = build_lattice(&s).unwrap();
            let f = sov_operators(&s, &l);
            let cs = f.transfer.coeffs();
            for a in cs {
                for b in cs {
                    assert!(comm(a, b) < 1e-12);
                }
            }
            let v = Vector::from_fn(f.dim(), |i, _| c(0.3 + i as f64, 1.0 - 0.2 * i as f64));
            assert!(txk_defect(&l, &f, &v) < 1e-12);
        }
    }
}
