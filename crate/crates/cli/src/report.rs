//! Writing run artifacts and comparing two reports.

use crate::run::{RunReport, SolutionRecord};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Paths of the three artifacts for an output prefix.
pub fn artifact_paths(prefix: &Path) -> [PathBuf; 3] {
    [with_suffix(prefix, ".jsonl"), with_suffix(prefix, ".summary.csv"), with_suffix(prefix, ".meta.json")]
}

/// One JSON object per line, in record order.
pub fn jsonl(records: &[SolutionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn summary_csv(report: &RunReport) -> String {
    let mut out = String::from("ell,expected_dim,found_orbits,max_residual,max_eigen_residual,max_det_rel_err,basis_rank,basis_condition\n");
    for r in &report.summary {
        out.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{},{:e}\n",
            r.ell, r.expected_dim, r.found_orbits, r.max_residual, r.max_eigen_residual, r.max_det_rel_err, r.basis_rank, r.basis_condition
        ));
    }
    out
}

#[derive(Serialize)]
struct Meta<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a crate::config::ExperimentConfig,
    spec: &'a bethe_core::repr::ModelSpec,
    draw: &'a crate::generate::Draw,
    sov: &'a Option<crate::run::SovReport>,
    path_failure_fraction: f64,
    failures: &'a [String],
    exit_code: i32,
    timings: &'a crate::run::Timings,
}

pub fn meta_json(report: &RunReport) -> String {
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: &report.config,
        spec: &report.spec,
        draw: &report.draw,
        sov: &report.sov,
        path_failure_fraction: report.path_failure_fraction,
        failures: &report.failures,
        exit_code: report.exit_code,
        timings: &report.timings,
    };
    serde_json::to_string_pretty(&meta).expect("metadata serializes")
}

pub fn write_outputs(report: &RunReport, prefix: &Path) -> io::Result<()> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let [a, b, c] = artifact_paths(prefix);
    for (path, body) in [(a, jsonl(&report.records)), (b, summary_csv(report)), (c, meta_json(report))] {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(body.as_bytes())?;
        w.flush()?;
    }
    Ok(())
}

/// Minimal view of a JSON-lines row used for comparisons.
#[derive(Debug, Clone, serde::Deserialize)]
pub struct RecordView {
    pub ell: usize,
    pub orbit_id: Option<usize>,
    pub t: Vec<[f64; 2]>,
    pub residual: f64,
    pub eigen_residual: Option<f64>,
}

pub fn read_jsonl(path: &Path) -> io::Result<Vec<RecordView>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
        .collect()
}

/// Orbits present in one report only, and the largest drift between matched
/// orbits.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiffSummary {
    /// `(ell, orbit_id)` found only in the first report.
    pub only_in_a: Vec<(usize, usize)>,
    pub only_in_b: Vec<(usize, usize)>,
    pub matched: usize,
    /// Largest coordinate drift over matched orbits (permutation invariant).
    pub max_t_drift: f64,
    pub max_residual_drift: f64,
}

impl DiffSummary {
    pub fn is_empty(&self, tol: f64) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty() && self.max_t_drift <= tol
    }
}

/// Largest coordinate distance after sorting both tuples, or infinity when
/// lengths differ.
fn t_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let key = |v: &[[f64; 2]]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| x[0].total_cmp(&y[0]).then(x[1].total_cmp(&y[1])));
        v
    };
    let (a, b) = (key(a), key(b));
    a.iter().zip(&b).map(|(x, y)| (x[0] - y[0]).hypot(x[1] - y[1])).fold(0.0, f64::max)
}

fn orbit_reps(rs: &[RecordView]) -> Vec<&RecordView> {
    let mut seen = std::collections::BTreeSet::new();
    rs.iter().filter(|r| r.orbit_id.is_some_and(|id| seen.insert((r.ell, id)))).collect()
}

/// Match orbits by `(ell, orbit_id)` first and fall back to the nearest
/// coordinates within `tol`.
pub fn compare_reports(a: &[RecordView], b: &[RecordView], tol: f64) -> DiffSummary {
    let (ra, rb) = (orbit_reps(a), orbit_reps(b));
    let mut used = vec![false; rb.len()];
    let mut diff = DiffSummary::default();
    for x in &ra {
        let by_id = rb.iter().position(|y| y.ell == x.ell && y.orbit_id == x.orbit_id).filter(|&j| !used[j] && t_distance(&x.t, &rb[j].t) <= tol);
        let nearest = || {
            (0..rb.len())
                .filter(|&j| !used[j] && rb[j].ell == x.ell)
                .map(|j| (j, t_distance(&x.t, &rb[j].t)))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .filter(|p| p.1 <= tol)
                .map(|p| p.0)
        };
        match by_id.or_else(nearest) {
            Some(j) => {
                used[j] = true;
                diff.matched += 1;
                diff.max_t_drift = diff.max_t_drift.max(t_distance(&x.t, &rb[j].t));
                diff.max_residual_drift = diff.max_residual_drift.max((x.residual - rb[j].residual).abs());
            }
            None => diff.only_in_a.push((x.ell, x.orbit_id.expect("representatives have ids"))),
        }
    }
    diff.only_in_b = rb.iter().zip(&used).filter(|(_, u)| !**u).map(|(y, _)| (y.ell, y.orbit_id.expect("representatives have ids"))).collect();
    diff
}
