use crate::error::{GinvError, Result};

/// Default relative Frobenius threshold for matrix comparisons.
pub const DEFAULT_CMP_REL_TOL: f64 = 1e-8;

/// Tolerances governing every floating-point decision in the crate.
///
/// `rank_rel_tol` is relative to the largest singular value. When it is
/// `None` the threshold depends on the matrix shape:
/// `16 * max(rows, cols) * f64::EPSILON`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    pub rank_rel_tol: Option<f64>,
    pub cmp_rel_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel_tol: None,
            cmp_rel_tol: DEFAULT_CMP_REL_TOL,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rel_tol: Option<f64>, cmp_rel_tol: f64) -> Result<Self> {
        let cfg = Self {
            rank_rel_tol,
            cmp_rel_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_cmp(cmp_rel_tol: f64) -> Result<Self> {
        Self::new(None, cmp_rel_tol)
    }

    pub fn validate(&self) -> Result<()> {
        let in_range = |v: f64| v.is_finite() && v > 0.0 && v < 1.0;
        if let Some(r) = self.rank_rel_tol {
            if !in_range(r) {
                return Err(GinvError::Parameter(format!(
                    "rank_rel_tol must lie in (0, 1), got {r}"
                )));
            }
        }
        if !in_range(self.cmp_rel_tol) {
            return Err(GinvError::Parameter(format!(
                "cmp_rel_tol must lie in (0, 1), got {}",
                self.cmp_rel_tol
            )));
        }
        Ok(())
    }

    /// Relative rank threshold for a matrix of the given shape.
    pub fn rank_rel(&self, rows: usize, cols: usize) -> f64 {
        self.rank_rel_tol
            .unwrap_or_else(|| 16.0 * rows.max(cols).max(1) as f64 * f64::EPSILON)
    }
}
