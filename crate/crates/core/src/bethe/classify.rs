use super::track::PathStatus;
use crate::numkernel::C64;
use crate::repr::{ModelSpec, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionFlags {
    pub offdiagonal: bool,
    pub admissible: bool,
    /// Factor whose complete lattice string appears among the coordinates.
    pub string_detected: Option<usize>,
    /// Distance to the degeneration locus in units of the model scale.
    pub margin: f64,
}

/// Converged or failed endpoint of one tracked seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub t: Vec<C64>,
    pub kappa: C64,
    pub ell: usize,
    pub residual: f64,
    pub jacobian_condition: f64,
    pub flags: SolutionFlags,
    pub orbit_key: Vec<C64>,
    pub seed_nu: Vec<usize>,
    pub path_status: PathStatus,
    pub steps: usize,
    pub detour_phase: f64,
}

impl BetheSolution {
    /// Converged, offdiagonal and admissible.
    pub fn is_regular(&self) -> bool {
        self.path_status == PathStatus::Converged && self.flags.offdiagonal && self.flags.admissible
    }
}

/// Distance from `t` to the locus where some coordinate hits an endpoint of a
/// lattice string or two coordinates differ by one shift.
pub fn degeneration_margin(spec: &ModelSpec, t: &[C64]) -> f64 {
    let mut d = f64::INFINITY;
    let q2 = spec.q * spec.q;
    for (a, ta) in t.iter().enumerate() {
        for m in 0..spec.n() {
            let (z, lam) = (spec.z[m], spec.lambda(m));
            let (lo, hi) = match spec.variant {
                Variant::Additive => (z - lam, z + lam),
                Variant::Multiplicative => (z * spec.qpow(-lam * 2.0), z * spec.qpow(lam * 2.0)),
            };
            d = d.min((ta - lo).norm()).min((ta - hi).norm());
        }
        for (b, tb) in t.iter().enumerate() {
            if a != b {
                let gap = match spec.variant {
                    Variant::Additive => ta - tb - 1.0,
                    Variant::Multiplicative => ta - q2 * tb,
                };
                d = d.min(gap.norm());
            }
        }
    }
    d / spec.scale()
}

/// First factor `m` whose whole lattice `S_m` is contained in `t`.
pub fn detect_string(spec: &ModelSpec, t: &[C64]) -> Option<usize> {
    let close = spec.tol.dedup_tol * spec.scale();
    (0..spec.n()).find(|&m| {
        spec.weights[m].is_integral()
            && (0..spec.weights[m].dim()).all(|s| {
                let p = match spec.variant {
                    Variant::Additive => spec.z[m] - spec.lambda(m) + s as f64,
                    Variant::Multiplicative => spec.z[m] * spec.qpow((C64::new(s as f64, 0.0) - spec.lambda(m)) * 2.0),
                };
                t.iter().any(|x| (x - p).norm() < close)
            })
    })
}

pub fn classify(spec: &ModelSpec, t: &[C64]) -> SolutionFlags {
    let scale = spec.scale();
    let mut min_pair = f64::INFINITY;
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            min_pair = min_pair.min((t[a] - t[b]).norm());
        }
    }
    let margin = degeneration_margin(spec, t);
    SolutionFlags {
        offdiagonal: min_pair > spec.tol.dedup_tol * scale,
        admissible: margin > spec.tol.margin_tol,
        string_detected: detect_string(spec, t),
        margin,
    }
}

fn lex(a: &C64, b: &C64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Coordinates rounded to a grid of spacing `grid` and sorted by real then
/// imaginary part; invariant under permutations of `t`.
pub fn orbit_key(t: &[C64], grid: f64) -> Vec<C64> {
    let mut k: Vec<C64> = t.iter().map(|x| C64::new((x.re / grid).round() * grid, (x.im / grid).round() * grid)).collect();
    k.sort_by(lex);
    k
}

/// Whether `a` is a permutation of `b` up to `tol` per coordinate.
pub fn same_orbit(a: &[C64], b: &[C64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let best = (0..b.len()).filter(|j| !used[*j]).min_by(|i, j| (x - b[*i]).norm().total_cmp(&(x - b[*j]).norm()));
        match best {
            Some(j) if (x - b[j]).norm() <= tol => used[j] = true,
            _ => return false,
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    /// Member with the lexicographically smallest orbit key.
    pub representative: usize,
    pub members: Vec<usize>,
}

impl Orbit {
    /// More than one seed landed here, a sign of nongeneric parameters.
    pub fn is_collision(&self) -> bool {
        self.members.len() > 1
    }
}

/// Group converged solutions into permutation orbits, in order of first
/// appearance.
pub fn orbit_dedup(solutions: &[BetheSolution], tol: f64) -> Vec<Orbit> {
    let mut orbits: Vec<Orbit> = Vec::new();
    for (i, s) in solutions.iter().enumerate() {
        if s.path_status != PathStatus::Converged {
            continue;
        }
        match orbits.iter_mut().find(|o| same_orbit(&solutions[o.members[0]].t, &s.t, tol)) {
            Some(o) => o.members.push(i),
            None => orbits.push(Orbit { representative: i, members: vec![i] }),
        }
    }
    for o in &mut orbits {
        o.representative = *o
            .members
            .iter()
            .min_by(|a, b| {
                let (ka, kb) = (&solutions[**a].orbit_key, &solutions[**b].orbit_key);
                ka.iter().zip(kb).map(|(x, y)| lex(x, y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("orbits are nonempty");
    }
    orbits
}
