use super::baxter::{is_unit_twist, PairSource, QProfile, TauQPair};
use super::operators::{sov_operators, SovFamily};
use super::sl2::raising_c;
use super::{build_lattice, SeparationLattice, SovError};
use crate::numkernel::{commuting_diag, svd_full_v, joint_spectrum, rank1_split, CPoly, Mat, Vector};
use crate::repr::ModelSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One joint eigenvector of the separated transfer family.
#[derive(Debug, Clone)]
pub struct SovEigen {
    pub pair: TauQPair,
    pub vector: Vector,
    /// Relative distance of the eigenvector from the nearest pure tensor.
    pub factor_residual: f64,
}

pub(super) fn rng_for(spec: &ModelSpec) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(spec.rng_seed ^ 0x05EE_D0F5_E9A0)
}

/// Common kernel of `𝒯_k − τ_k`, through the smallest right singular vector
/// of the stacked system. More accurate than the diagonalizer's columns
/// when the family is far from normal.
fn refine(family: &SovFamily, tau: &CPoly) -> Vector {
    let dim = family.dim();
    let cs = family.transfer.coeffs();
    let mut stacked = Mat::zeros(dim * cs.len(), dim);
    for (k, ck) in cs.iter().enumerate() {
        let block = ck - Mat::identity(dim, dim) * tau.coeff(k);
        stacked.view_mut((k * dim, 0), (dim, dim)).copy_from(&block);
    }
    let (_, v) = svd_full_v(&stacked);
    v.column(dim - 1).into_owned()
}

/// Diagonalize the separated transfer family and read off `τ` (coefficient
/// by coefficient) and the factors `π_m Q` of each eigenvector.
pub fn sov_spectrum(spec: &ModelSpec, lattice: &SeparationLattice, family: &SovFamily) -> Result<Vec<SovEigen>, SovError> {
    let mut rng = rng_for(spec);
    let joint = commuting_diag(family.transfer.coeffs(), &spec.tol, &mut rng)?;
    let dims = lattice.dims();
    let mut out = Vec::with_capacity(joint.vectors.ncols());
    for k in 0..joint.vectors.ncols() {
        let tau = CPoly::new(joint.values.iter().map(|v| v[k]).collect());
        let vector = refine(family, &tau);
        let split = rank1_split(&vector, &dims);
        let values = split.factors.iter().map(|f| f.iter().copied().collect()).collect();
        let q = QProfile { values, poly: None }.gauged(spec.tol.margin_tol);
        out.push(SovEigen { pair: TauQPair { tau, q, source: PairSource::SovSpectrum }, vector, factor_residual: split.residual });
    }
    Ok(out)
}

/// Distinct eigenvalue polynomials at unit twist, read from the joint
/// spectrum of `𝒯(u) + 𝒞(u)` together with their multiplicities. The
/// raising part does not change eigenvalues, and the sum is diagonalizable
/// while `𝒯(u)` alone is not.
pub fn unit_twist_spectrum(
    spec: &ModelSpec,
    lattice: &SeparationLattice,
    family: &SovFamily,
) -> Result<Vec<(CPoly, usize)>, SovError> {
    let total = family.transfer.add(&raising_c(spec, lattice, family)?);
    let mut rng = rng_for(spec);
    let clusters = joint_spectrum(total.coeffs(), &spec.tol, &mut rng)?;
    Ok(clusters.into_iter().map(|c| (CPoly::new(c.values), c.basis.ncols())).collect())
}

/// Collapse polynomials whose coefficients agree within `rel` of the
/// largest coefficient.
pub fn distinct_taus(taus: &[CPoly], rel: f64) -> Vec<CPoly> {
    let mut out: Vec<CPoly> = Vec::new();
    for t in taus {
        let scale = t.max_abs_coeff().max(f64::MIN_POSITIVE);
        if !out.iter().any(|o| o.distance(t) <= rel * scale) {
            out.push(t.clone());
        }
    }
    out
}

/// Number of solutions of the local problem, counted as distinct `τ` in the
/// separated spectrum.
pub fn count_local_solutions(spec: &ModelSpec) -> Result<usize, SovError> {
    let lattice = build_lattice(spec)?;
    let family = sov_operators(spec, &lattice);
    let taus: Vec<CPoly> = if is_unit_twist(spec) {
        unit_twist_spectrum(spec, &lattice, &family)?.into_iter().map(|(t, _)| t).collect()
    } else {
        sov_spectrum(spec, &lattice, &family)?.into_iter().map(|e| e.pair.tau).collect()
    };
    Ok(distinct_taus(&taus, spec.tol.dedup_tol).len())
}

/// Nearest-neighbour matching of two lists of polynomials.
#[derive(Debug, Clone, Default)]
pub struct SpectrumMatch {
    /// `(left index, right index, relative coefficient distance)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_left: Vec<usize>,
    pub unmatched_right: Vec<usize>,
}

impl SpectrumMatch {
    pub fn is_bijection(&self) -> bool {
        self.unmatched_left.is_empty() && self.unmatched_right.is_empty()
    }

    pub fn max_distance(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }
}

/// Match each left polynomial to its nearest right one (coefficient
/// distance relative to the larger coefficient scale), accepting a pair only
/// when it is mutually nearest and within `tol`.
pub fn match_spectra(left: &[CPoly], right: &[CPoly], tol: f64) -> SpectrumMatch {
    let dist = |a: &CPoly, b: &CPoly| a.distance(b) / a.max_abs_coeff().max(b.max_abs_coeff()).max(f64::MIN_POSITIVE);
    let d = Mat::from_fn(left.len(), right.len(), |i, j| crate::numkernel::C64::new(dist(&left[i], &right[j]), 0.0));
    let nearest_right = |i: usize| (0..right.len()).min_by(|a, b| d[(i, *a)].re.total_cmp(&d[(i, *b)].re));
    let nearest_left = |j: usize| (0..left.len()).min_by(|a, b| d[(*a, j)].re.total_cmp(&d[(*b, j)].re));
    let mut out = SpectrumMatch::default();
    let mut used = vec![false; right.len()];
    for i in 0..left.len() {
        match nearest_right(i) {
            Some(j) if nearest_left(j) == Some(i) && d[(i, j)].re <= tol => {
                used[j] = true;
                out.pairs.push((i, j, d[(i, j)].re));
            }
            _ => out.unmatched_left.push(i),
        }
    }
    out.unmatched_right = (0..right.len()).filter(|j| !used[*j]).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bethe::{orbit_dedup, solve_level, SolveOptions};
    use crate::numkernel::{c, C64};
    use crate::sov::{baxter_residual, global_from_bethe, tau_at_zero};

    fn bethe_taus(spec: &ModelSpec, lattice: &SeparationLattice, max_ell: usize) -> Vec<CPoly> {
        let mut out = Vec::new();
        for ell in 0..=max_ell {
            let sols: Vec<_> = solve_level(spec, ell, &SolveOptions::default()).into_iter().filter(|s| s.is_regular()).collect();
            for o in orbit_dedup(&sols, spec.tol.dedup_tol * spec.scale()) {
                out.push(global_from_bethe(spec, lattice, &sols[o.representative].t).unwrap().tau);
            }
        }
        out
    }

    #[test]
    fn single_spin_has_two_pairs() {
        let s = ModelSpec::additive(&[1], &[c(0.4, 0.0)], c(2.0, 0.3));
        let l = build_lattice(&s).unwrap();
        let f = sov_operators(&s, &l);
        let spec = sov_spectrum(&s, &l, &f).unwrap();
        assert_eq!(spec.len(), 2);
        for e in &spec {
            // τ(z − ½) τ(z + ½) = −κ
            let z = s.z[0];
            assert!((e.pair.tau.eval(z - 0.5) * e.pair.tau.eval(z + 0.5) + s.kappa).norm() < 1e-12);
        }
    }

    #[test]
    fn spectra_match_bethe_sweeps() {
        let specs = [
            ModelSpec::additive(&[1, 2], &[c(0.31, 0.17), c(3.4, -0.6)], C64::from_polar(1.7, 2.1)),
            ModelSpec::additive(&[1, 1], &[c(0.0, 0.0), c(3.1, 0.4)], C64::from_polar(0.8, -1.2)),
            ModelSpec::multiplicative(&[1, 2], &[c(1.0, 0.0), c(3.7, 0.0)], c(1.21, 0.0), C64::from_polar(1.3, 0.9)),
        ];
        for s in specs {
            let l = build_lattice(&s).unwrap();
            let f = sov_operators(&s, &l);
            let sov = sov_spectrum(&s, &l, &f).unwrap();
            assert_eq!(sov.len(), l.dim());
            for e in &sov {
                assert!(e.factor_residual < 1e-8, "{:?} {}", s.variant, e.factor_residual);
                assert!(e.pair.q.nonvanishing(s.tol.margin_tol));
                assert!(baxter_residual(&s, &l, &e.pair) < 1e-9);
                if s.variant == crate::repr::Variant::Multiplicative {
                    let want = tau_at_zero(&s);
                    assert!((e.pair.tau.eval(C64::default()) - want).norm() < 1e-9 * want.norm());
                }
            }
            let left: Vec<CPoly> = sov.iter().map(|e| e.pair.tau.clone()).collect();
            let right = bethe_taus(&s, &l, s.max_level());
            let m = match_spectra(&left, &right, 1e-6);
            assert!(m.is_bijection(), "{:?}: {m:?}", s.variant);
            assert_eq!(count_local_solutions(&s).unwrap(), l.dim());
        }
    }

    #[test]
    fn unit_twist_counts_singular_vectors() {
        let s = ModelSpec::additive(&[1, 1, 1], &[c(0.31, 0.17), c(3.4, -0.6), c(-2.2, 0.9)], c(1.0, 0.0));
        let l = build_lattice(&s).unwrap();
        let f = sov_operators(&s, &l);
        let spec = unit_twist_spectrum(&s, &l, &f).unwrap();
        let mut mult: Vec<usize> = spec.iter().map(|p| p.1).collect();
        mult.sort();
        assert_eq!(mult, vec![2, 2, 4]);
        assert_eq!(count_local_solutions(&s).unwrap(), 3);
        let left: Vec<CPoly> = spec.into_iter().map(|p| p.0).collect();
        let m = match_spectra(&left, &bethe_taus(&s, &l, 1), 1e-6);
        assert!(m.is_bijection(), "{m:?}");
    }

    #[test]
    fn matching_reports_leftovers() {
        let a = vec![CPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0)]), CPoly::new(vec![c(5.0, 0.0)])];
        let b = vec![CPoly::new(vec![c(1.0, 0.0), c(2.0, 0.0)])];
        let m = match_spectra(&a, &b, 1e-9);
        assert_eq!(m.pairs.len(), 1);
        assert_eq!(m.unmatched_left, vec![1]);
        assert!(!m.is_bijection());
    }
}
