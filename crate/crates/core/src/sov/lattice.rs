use super::SovError;
use crate::numkernel::C64;
use crate::repr::{multi_index, ModelSpec, Variant};

/// Finite point sets `S_m` on which the difference equation closes:
/// `z_m − Λ_m + s` (additive) or `z_m q^{2(s − Λ_m)}` (multiplicative),
/// `s = 0..dim V_m − 1`.
#[derive(Debug, Clone)]
pub struct SeparationLattice {
    pub sets: Vec<Vec<C64>>,
    /// Whether all points are pairwise farther apart than `margin_tol · scale`.
    pub disjoint: bool,
    pub min_gap: f64,
}

pub fn build_lattice(spec: &ModelSpec) -> Result<SeparationLattice, SovError> {
    if !spec.all_integral() {
        return Err(SovError::NonIntegral);
    }
    let sets: Vec<Vec<C64>> = (0..spec.n())
        .map(|m| {
            let lam = spec.lambda(m);
            (0..spec.weights[m].dim())
                .map(|s| match spec.variant {
                    Variant::Additive => spec.z[m] - lam + s as f64,
                    Variant::Multiplicative => spec.z[m] * spec.qpow((C64::new(s as f64, 0.0) - lam) * 2.0),
                })
                .collect()
        })
        .collect();
    let all: Vec<C64> = sets.iter().flatten().copied().collect();
    let mut min_gap = f64::INFINITY;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            min_gap = min_gap.min((a - b).norm());
        }
    }
    let disjoint = min_gap > spec.tol.margin_tol * spec.scale();
    Ok(SeparationLattice { sets, disjoint, min_gap })
}

impl SeparationLattice {
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    /// Dimension of the function space on `S_1 × … × S_n`.
    pub fn dim(&self) -> usize {
        self.sets.iter().map(Vec::len).product()
    }

    /// Lattice position of basis function `i` (mixed radix, first axis
    /// most significant).
    pub fn multi_index(&self, i: usize) -> Vec<usize> {
        multi_index(i, &self.dims())
    }

    pub fn index(&self, pos: &[usize]) -> usize {
        pos.iter().zip(self.sets.iter()).fold(0, |acc, (p, s)| acc * s.len() + p)
    }

    /// Coordinates `(x_1, …, x_n)` of basis function `i`.
    pub fn point(&self, i: usize) -> Vec<C64> {
        self.multi_index(i).iter().enumerate().map(|(m, &s)| self.sets[m][s]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::c;

    #[test]
    fn single_spin_half() {
        let s = ModelSpec::additive(&[1], &[c(0.0, 0.0)], c(2.0, 0.0));
        let l = build_lattice(&s).unwrap();
        assert_eq!(l.sets, vec![vec![c(-0.5, 0.0), c(0.5, 0.0)]]);
    }

    #[test]
    fn sizes_and_disjointness() {
        let s = ModelSpec::additive(&[1, 2], &[c(0.0, 0.0), c(3.1, 0.0)], c(2.0, 0.0));
        let l = build_lattice(&s).unwrap();
        assert_eq!(l.dims(), vec![2, 3]);
        assert!(l.disjoint);
        assert_eq!(l.dim(), 6);
        assert_eq!(l.point(4), vec![c(0.5, 0.0), c(3.1, 0.0)]);
        assert_eq!(l.index(&[1, 1]), 4);
    }

    #[test]
    fn overlapping_sets_are_flagged() {
        let s = ModelSpec::additive(&[1, 1], &[c(0.0, 0.0), c(1.0, 0.0)], c(2.0, 0.0));
        assert!(!build_lattice(&s).unwrap().disjoint);
    }

    #[test]
    fn multiplicative_points() {
        let q = c(1.2, 0.0);
        let s = ModelSpec::multiplicative(&[1], &[c(1.0, 0.0)], q, c(0.7, 0.0));
        let l = build_lattice(&s).unwrap();
        assert!((l.sets[0][0] - q.inv()).norm() < 1e-14);
        assert!((l.sets[0][1] - q).norm() < 1e-14);
    }
}
