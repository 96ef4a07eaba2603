use crate::numkernel::C64;
use crate::repr::{ModelSpec, Variant};
use serde::{Deserialize, Serialize};

/// A composition `ν` of `ℓ` into `n` parts and its exact solution of the
/// untwisted system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    pub nu: Vec<usize>,
    /// `ν_m < dim_m` for every factor.
    pub in_range: bool,
    pub t: Vec<C64>,
}

/// All compositions of `ell` into `n` nonnegative parts, lexicographic.
pub fn compositions(ell: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return if ell == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if n == 1 {
        return vec![vec![ell]];
    }
    let mut out = Vec::new();
    for first in 0..=ell {
        for mut rest in compositions(ell - first, n - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Seeds for level `ell`: for each `ν`, factor `m` contributes the string
/// `z_m − Λ_m, z_m − Λ_m + 1, …` of length `ν_m` (additive), or
/// `z_m q^{−2Λ_m}, z_m q^{2 − 2Λ_m}, …` (multiplicative).
pub fn seeds_kappa0(spec: &ModelSpec, ell: usize) -> Vec<Seed> {
    let dims = spec.dims();
    compositions(ell, spec.n())
        .into_iter()
        .map(|nu| {
            let mut t = Vec::with_capacity(ell);
            for (m, &k) in nu.iter().enumerate() {
                let lam = spec.lambda(m);
                for s in 0..k {
                    t.push(match spec.variant {
                        Variant::Additive => spec.z[m] - lam + s as f64,
                        Variant::Multiplicative => spec.z[m] * spec.qpow((C64::new(s as f64, 0.0) - lam) * 2.0),
                    });
                }
            }
            let in_range = nu.iter().zip(&dims).all(|(a, d)| a < d);
            Seed { nu, in_range, t }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::bae_residual;
    use crate::numkernel::c;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(compositions(3, 3).len(), 10);
    }

    #[test]
    fn two_factor_level_one() {
        let s = ModelSpec::additive(&[1, 1], &[c(0.0, 0.0), c(5.0, 0.0)], c(2.0, 0.0));
        let seeds = seeds_kappa0(&s, 1);
        let hit = seeds.iter().find(|x| x.nu == vec![1, 0]).unwrap();
        assert_eq!(hit.t, vec![c(-0.5, 0.0)]);
    }

    #[test]
    fn string_for_spin_one() {
        let s = ModelSpec::additive(&[2], &[c(0.0, 0.0)], c(2.0, 0.0));
        let seeds = seeds_kappa0(&s, 2);
        assert_eq!(seeds.len(), 1);
        assert_eq!(seeds[0].t, vec![c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(seeds[0].in_range);
    }

    #[test]
    fn multiplicative_seed() {
        let s = ModelSpec::multiplicative(&[1], &[c(1.0, 0.0)], c(1.2, 0.0), c(0.5, 0.0));
        let seeds = seeds_kappa0(&s, 1);
        assert!((seeds[0].t[0] - c(1.0 / 1.2, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn seeds_solve_untwisted_system() {
        let add = ModelSpec::additive(&[1, 2], &[c(0.2, 0.1), c(3.1, -0.4)], c(0.7, 0.9));
        let mul = ModelSpec::multiplicative(&[1, 2], &[c(1.0, 0.0), c(3.7, 0.0)], c(1.21, 0.0), c(0.8, 0.5));
        for s in [&add, &mul] {
            for ell in 0..=4 {
                for seed in seeds_kappa0(s, ell) {
                    let r = bae_residual(s, c(0.0, 0.0), &seed.t);
                    assert!(r.iter().all(|x| x.norm() < 1e-12), "{:?}", seed.nu);
                }
            }
        }
    }

    #[test]
    fn range_flag() {
        let s = ModelSpec::additive(&[1, 2], &[c(0.0, 0.0), c(3.1, 0.0)], c(0.7, 0.9));
        let seeds = seeds_kappa0(&s, 2);
        let flags: Vec<bool> = seeds.iter().map(|x| x.in_range).collect();
        // ν = (0,2), (1,1), (2,0)
        assert_eq!(flags, vec![true, true, false]);
    }
}
