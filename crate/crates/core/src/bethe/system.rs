use crate::numkernel::{Mat, C64};
use crate::repr::{ModelSpec, Variant};

/// A linear factor `value(t)` with its partial derivatives in `t_a` and,
/// when it couples two coordinates, in `t_b`.
#[derive(Clone, Copy)]
struct Factor {
    value: C64,
    d_self: C64,
    other: Option<(usize, C64)>,
}

fn lin(value: C64, d_self: C64) -> Factor {
    Factor { value, d_self, other: None }
}

fn pair(value: C64, d_self: C64, b: usize, d_b: C64) -> Factor {
    Factor { value, d_self, other: Some((b, d_b)) }
}

/// Factors of the two sides of equation `a`, without the twist:
/// the equation reads `∏ left − κ ∏ right = 0`.
fn sides(spec: &ModelSpec, t: &[C64], a: usize) -> (Vec<Factor>, Vec<Factor>) {
    let one = C64::new(1.0, 0.0);
    let ta = t[a];
    let mut left = Vec::with_capacity(spec.n() + t.len());
    let mut right = Vec::with_capacity(spec.n() + t.len());
    match spec.variant {
        Variant::Additive => {
            for m in 0..spec.n() {
                let (z, lam) = (spec.z[m], spec.lambda(m));
                left.push(lin(ta - z + lam, one));
                right.push(lin(ta - z - lam, one));
            }
            for (b, tb) in t.iter().enumerate().filter(|(b, _)| *b != a) {
                left.push(pair(ta - tb - 1.0, one, b, -one));
                right.push(pair(ta - tb + 1.0, one, b, -one));
            }
        }
        Variant::Multiplicative => {
            let q2 = spec.q * spec.q;
            for m in 0..spec.n() {
                let (z, q2l) = (spec.z[m], spec.qpow(spec.lambda(m) * 2.0));
                left.push(lin(q2l * ta - z, q2l));
                right.push(lin(ta - q2l * z, one));
            }
            for (b, tb) in t.iter().enumerate().filter(|(b, _)| *b != a) {
                left.push(pair(ta - q2 * tb, one, b, -q2));
                right.push(pair(q2 * ta - tb, q2, b, -one));
            }
        }
    }
    (left, right)
}

fn product(f: &[Factor]) -> C64 {
    f.iter().map(|x| x.value).product()
}

/// Gradient of `∏ f` with respect to all `ℓ` coordinates.
fn product_gradient(f: &[Factor], a: usize, ell: usize) -> Vec<C64> {
    let mut g = vec![C64::default(); ell];
    for (i, fi) in f.iter().enumerate() {
        let rest: C64 = f.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| x.value).product();
        g[a] += fi.d_self * rest;
        if let Some((b, db)) = fi.other {
            g[b] += db * rest;
        }
    }
    g
}

/// Natural magnitude of the terms in equation `a`, used to make residuals
/// relative.
fn magnitude(spec: &ModelSpec, t: &[C64], a: usize, kappa: C64) -> f64 {
    let (left, right) = sides(spec, t, a);
    let size = |f: &[Factor]| -> f64 {
        f.iter().map(|x| x.value.norm() + x.d_self.norm() * t[a].norm() + x.other.map_or(0.0, |(b, d)| d.norm() * t[b].norm())).product()
    };
    size(&left) + kappa.norm() * size(&right)
}

/// Componentwise `∏ left_a − κ ∏ right_a`.
pub fn bae_residual(spec: &ModelSpec, kappa: C64, t: &[C64]) -> Vec<C64> {
    (0..t.len())
        .map(|a| {
            let (l, r) = sides(spec, t, a);
            product(&l) - kappa * product(&r)
        })
        .collect()
}

/// The two twist-free sides `(∏ left_a, ∏ right_a)` of every equation.
pub fn bae_sides(spec: &ModelSpec, t: &[C64]) -> Vec<(C64, C64)> {
    (0..t.len())
        .map(|a| {
            let (l, r) = sides(spec, t, a);
            (product(&l), product(&r))
        })
        .collect()
}

/// Largest residual component, each divided by the magnitude of its terms.
pub fn relative_residual(spec: &ModelSpec, kappa: C64, t: &[C64]) -> f64 {
    bae_residual(spec, kappa, t)
        .iter()
        .enumerate()
        .map(|(a, r)| {
            let mag = magnitude(spec, t, a, kappa);
            if mag > 0.0 { r.norm() / mag } else { r.norm() }
        })
        .fold(0.0, f64::max)
}

/// `J[a][c] = ∂ residual_a / ∂ t_c`.
pub fn bae_jacobian(spec: &ModelSpec, kappa: C64, t: &[C64]) -> Mat {
    let ell = t.len();
    let mut j = Mat::zeros(ell, ell);
    for a in 0..ell {
        let (l, r) = sides(spec, t, a);
        let gl = product_gradient(&l, a, ell);
        let gr = product_gradient(&r, a, ell);
        for c in 0..ell {
            j[(a, c)] = gl[c] - kappa * gr[c];
        }
    }
    j
}

/// `∂ residual_a / ∂κ = −∏ right_a`.
pub fn bae_kappa_derivative(spec: &ModelSpec, t: &[C64]) -> Vec<C64> {
    bae_sides(spec, t).into_iter().map(|(_, r)| -r).collect()
}

/// Twist used at level `ℓ`: `κ` itself (additive) or `q^{2ℓ} θ`.
pub fn level_kappa(spec: &ModelSpec, ell: usize) -> C64 {
    match spec.variant {
        Variant::Additive => spec.kappa,
        Variant::Multiplicative => spec.q.powu(2 * ell as u32) * spec.theta,
    }
}
