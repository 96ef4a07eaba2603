use super::VecError;
use crate::numkernel::{Vector, C64};
use crate::repr::{ModelSpec, MonodromyBundle, TensorSpace, Variant};

/// How a Bethe vector was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    OperatorProduct,
    PartitionSum,
}

/// `w(t)` expressed in the basis `{F^ν : ν ∈ V[ℓ]}` of its weight space.
#[derive(Debug, Clone)]
pub struct BetheVector {
    pub coords: Vector,
    pub t: Vec<C64>,
    pub construction: Construction,
}

impl BetheVector {
    pub fn ell(&self) -> usize {
        self.t.len()
    }

    pub fn norm(&self) -> f64 {
        self.coords.norm()
    }

    /// Embed the weight-space coordinates into the whole tensor space.
    pub fn to_full(&self, space: &TensorSpace) -> Vector {
        let mut v = Vector::zeros(space.dim());
        for (k, &i) in space.block(self.ell()).iter().enumerate() {
            v[i] = self.coords[k];
        }
        v
    }
}

/// Highest-weight vector `v_1 ⊗ … ⊗ v_n`.
pub fn vacuum(space: &TensorSpace) -> Vector {
    let mut v = Vector::zeros(space.dim());
    v[0] = C64::new(1.0, 0.0);
    v
}

fn restrict(space: &TensorSpace, full: &Vector, ell: usize) -> Vector {
    Vector::from_iterator(space.block_dim(ell), space.block(ell).iter().map(|&i| full[i]))
}

/// `B(t_1) … B(t_ℓ)` applied to the vacuum, rightmost factor first.
pub fn bethe_vector_product(bundle: &MonodromyBundle, space: &TensorSpace, t: &[C64]) -> BetheVector {
    let mut v = vacuum(space);
    for &ta in t.iter().rev() {
        v = bundle.b.apply(ta, &v).expect("bundle and space share one dimension");
    }
    BetheVector { coords: restrict(space, &v, t.len()), t: t.to_vec(), construction: Construction::OperatorProduct }
}

/// The same vector as a sum over assignments of coordinates to tensor
/// factors, without touching any operator.
pub fn bethe_vector_sum(spec: &ModelSpec, space: &TensorSpace, t: &[C64]) -> Result<BetheVector, VecError> {
    check_offdiagonal(spec, t)?;
    let n = spec.n();
    let ell = t.len();
    let mut coords = Vector::zeros(space.block_dim(ell));
    let block = space.block(ell);
    let pos = |nu: &[usize]| space.index(nu).and_then(|i| block.iter().position(|&j| j == i));
    let mut owner = vec![0usize; ell];
    loop {
        let mut nu = vec![0usize; n];
        for &g in &owner {
            nu[g] += 1;
        }
        if let Some(k) = pos(&nu) {
            coords[k] += assignment_weight(spec, t, &owner);
        }
        // next assignment in base-n counting
        let mut a = 0;
        while a < ell {
            owner[a] += 1;
            if owner[a] < n {
                break;
            }
            owner[a] = 0;
            a += 1;
        }
        if a == ell {
            break;
        }
    }
    Ok(BetheVector { coords, t: t.to_vec(), construction: Construction::PartitionSum })
}

/// Product weight of one assignment `a ↦ owner[a]` in the partition sum.
fn assignment_weight(spec: &ModelSpec, t: &[C64], owner: &[usize]) -> C64 {
    let n = spec.n();
    let mut w = C64::new(1.0, 0.0);
    for l in 1..n {
        for m in 0..l {
            for (a, &ga) in owner.iter().enumerate() {
                if ga == l {
                    for (b, &gb) in owner.iter().enumerate() {
                        if gb == m {
                            w *= pair_weight(spec, t[a], t[b]);
                        }
                    }
                    w *= upper_factor(spec, t[a], m);
                }
                if ga == m {
                    w *= lower_factor(spec, t[a], l);
                }
            }
        }
    }
    if spec.variant == Variant::Multiplicative {
        let dq = spec.q - spec.q.inv();
        w *= t.iter().map(|ta| dq * ta).product::<C64>();
    }
    w
}

fn pair_weight(spec: &ModelSpec, ta: C64, tb: C64) -> C64 {
    match spec.variant {
        Variant::Additive => (ta - tb - 1.0) / (ta - tb),
        Variant::Multiplicative => (ta / spec.q - spec.q * tb) / (ta - tb),
    }
}

/// Factor for a coordinate owned by a later factor, seen from factor `m`.
fn upper_factor(spec: &ModelSpec, ta: C64, m: usize) -> C64 {
    match spec.variant {
        Variant::Additive => ta - spec.z[m] + spec.lambda(m),
        Variant::Multiplicative => {
            let ql = spec.q_lambda(m);
            ql * ta - spec.z[m] / ql
        }
    }
}

/// Factor for a coordinate owned by factor `m`, seen from a later factor `l`.
fn lower_factor(spec: &ModelSpec, ta: C64, l: usize) -> C64 {
    match spec.variant {
        Variant::Additive => ta - spec.z[l] - spec.lambda(l),
        Variant::Multiplicative => {
            let ql = spec.q_lambda(l);
            ta / ql - ql * spec.z[l]
        }
    }
}

pub(super) fn check_offdiagonal(spec: &ModelSpec, t: &[C64]) -> Result<(), VecError> {
    let floor = spec.tol.dedup_tol * spec.scale();
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            if (t[a] - t[b]).norm() < floor {
                return Err(VecError::Diagonal);
            }
        }
    }
    Ok(())
}
