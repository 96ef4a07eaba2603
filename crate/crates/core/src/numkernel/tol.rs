use serde::{Deserialize, Serialize};

/// Relative tolerances used across the solver and verification layers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceProfile {
    pub residual_tol: f64,
    pub dedup_tol: f64,
    pub rank_tol: f64,
    pub margin_tol: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        Self { residual_tol: 1e-10, dedup_tol: 1e-7, rank_tol: 1e-8, margin_tol: 1e-6 }
    }
}

impl ToleranceProfile {
    pub fn validate(&self) -> Result<(), String> {
        let all = [self.residual_tol, self.dedup_tol, self.rank_tol, self.margin_tol];
        if all.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err("tolerances must be finite and positive".into());
        }
        if self.dedup_tol <= self.residual_tol {
            return Err("dedup_tol must exceed residual_tol".into());
        }
        Ok(())
    }
}
