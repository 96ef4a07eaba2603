use super::{eigen_decomposition, singular_values, Mat, NumError, ToleranceProfile, C64};
use rand::Rng;

const MAX_TRIES: usize = 8;

/// Common eigenbasis of a commuting family with simple joint spectrum.
#[derive(Debug, Clone)]
pub struct JointEigen {
    /// `values[j][k]`: eigenvalue of family member `j` on eigenvector `k`.
    pub values: Vec<Vec<C64>>,
    /// Unit eigenvectors as columns.
    pub vectors: Mat,
}

/// One joint eigenvalue of a commuting family together with an orthonormal
/// basis of its eigenspace.
#[derive(Debug, Clone)]
pub struct JointCluster {
    /// Eigenvalue of each family member on the eigenspace.
    pub values: Vec<C64>,
    pub basis: Mat,
}

fn check_commuting(family: &[Mat], tol: &ToleranceProfile) -> Result<(), NumError> {
    let mut worst = 0.0f64;
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            let scale = (a.norm() * b.norm()).max(f64::MIN_POSITIVE);
            worst = worst.max((a * b - b * a).norm() / scale);
        }
    }
    if worst > tol.residual_tol {
        return Err(NumError::NotCommuting(worst));
    }
    Ok(())
}

fn random_combination(family: &[Mat], rng: &mut impl Rng) -> Mat {
    let n = family.first().map_or(0, |m| m.nrows());
    let mut r = Mat::zeros(n, n);
    for m in family {
        let nrm = m.norm();
        if nrm > 0.0 {
            r += m * C64::new(rng.gen_range(0.5..1.5) / nrm, 0.0);
        }
    }
    r
}

/// Diagonalize a commuting family through a random real combination.
///
/// The combination is redrawn when two of its eigenvalues come closer than
/// `dedup_tol` relative to its norm; after eight draws the spectrum is
/// declared degenerate.
pub fn commuting_diag(
    family: &[Mat],
    tol: &ToleranceProfile,
    rng: &mut impl Rng,
) -> Result<JointEigen, NumError> {
    check_commuting(family, tol)?;
    for _ in 0..MAX_TRIES {
        let r = random_combination(family, rng);
        let gap_floor = tol.dedup_tol * r.norm().max(f64::MIN_POSITIVE);
        let (vals, vecs) = eigen_decomposition(&r, true);
        let collide = vals
            .iter()
            .enumerate()
            .any(|(i, a)| vals[i + 1..].iter().any(|b| (a - b).norm() < gap_floor));
        if collide {
            continue;
        }
        let vectors = vecs.expect("requested eigenvectors");
        let values = family
            .iter()
            .map(|m| {
                vectors
                    .column_iter()
                    .map(|x| (x.adjoint() * m * x)[(0, 0)] / x.norm_squared())
                    .collect()
            })
            .collect();
        return Ok(JointEigen { values, vectors });
    }
    Err(NumError::DegenerateSpectrum(MAX_TRIES))
}

/// Joint spectrum of a commuting family that may have repeated joint
/// eigenvalues, provided it is diagonalizable.
///
/// Eigenvalues of a random combination are grouped at `dedup_tol`; each group
/// must span an eigenspace of matching dimension (`rank_tol`), otherwise the
/// family is reported defective. A draw whose groups mix different joint
/// eigenvalues is discarded and redrawn.
pub fn joint_spectrum(
    family: &[Mat],
    tol: &ToleranceProfile,
    rng: &mut impl Rng,
) -> Result<Vec<JointCluster>, NumError> {
    check_commuting(family, tol)?;
    let n = family.first().map_or(0, |m| m.nrows());
    'draw: for _ in 0..MAX_TRIES {
        let r = random_combination(family, rng);
        let rn = r.norm().max(f64::MIN_POSITIVE);
        let (vals, _) = eigen_decomposition(&r, false);
        let mut groups: Vec<Vec<C64>> = Vec::new();
        for v in vals {
            match groups.iter_mut().find(|g| (g[0] - v).norm() < tol.dedup_tol * rn) {
                Some(g) => g.push(v),
                None => groups.push(vec![v]),
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for g in groups {
            let size = g.len();
            let mean = g.iter().sum::<C64>() / size as f64;
            let shifted = &r - Mat::identity(n, n) * mean;
            let sv = singular_values(&shifted);
            let worst = sv[n - size];
            if worst > tol.rank_tol * rn {
                return Err(NumError::Defective(worst / rn));
            }
            let basis = super::nullspace(&shifted, (worst / sv[0].max(f64::MIN_POSITIVE)) * (1.0 + 1e-9));
            let basis = basis.columns(basis.ncols() - size.min(basis.ncols()), size.min(basis.ncols())).into_owned();
            let mut values = Vec::with_capacity(family.len());
            for m in family {
                let b = basis.adjoint() * m * &basis;
                let mu = b.trace() / size as f64;
                let spread = (&b - Mat::identity(size, size) * mu).norm();
                if spread > tol.dedup_tol * m.norm().max(f64::MIN_POSITIVE) {
                    continue 'draw;
                }
                values.push(mu);
            }
            out.push(JointCluster { values, basis });
        }
        return Ok(out);
    }
    Err(NumError::DegenerateSpectrum(MAX_TRIES))
}
