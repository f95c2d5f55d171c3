//! Sweeps α → 0⁺, turns the resolvent limit into a verdict, and checks the
//! verdict against a direct finite-dimensional reachability oracle.

mod decide;
mod oracle;
mod q_alpha;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use decide::{decide, extract_witness, witness_correlation, witness_correlation_with, Decision, DecisionDiagnostics, Verdict, Witness};
pub use oracle::{range_oracle, ConstrainedVerdict, DecomposedVerdict, OracleDecision};
pub use q_alpha::{q_alpha_invertibility, InvertibilityReport};
pub use sweep::{alpha_sweep, alpha_sweep_with, SweepRecord, SweepReport};

/// Geometric schedule α_k = alpha0 · ratioᵏ, k = 0..count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSchedule {
    alpha0: f64,
    ratio: f64,
    count: usize,
}

impl AlphaSchedule {
    pub fn new(alpha0: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(alpha0.is_finite() && alpha0 > 0.0) {
            return Err(Error::InvalidSchedule(format!("alpha0 must be positive, got {alpha0}")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidSchedule(format!("ratio must lie in (0, 1), got {ratio}")));
        }
        if count == 0 {
            return Err(Error::InvalidSchedule("count must be positive".into()));
        }
        let s = Self { alpha0, ratio, count };
        if s.values().last().is_some_and(|&a| a <= 0.0) {
            return Err(Error::InvalidSchedule("schedule underflows to zero".into()));
        }
        Ok(s)
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.alpha0 * self.ratio.powi(k as i32)).collect()
    }
}

impl Default for AlphaSchedule {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            ratio: 0.1,
            count: 8,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_schedule_spans_eight_decades() {
        let v = AlphaSchedule::default().values();
        assert_eq!(v.len(), 8);
        assert_eq!(v[0], 1.0);
        assert!((v[7] - 1e-7).abs() < 1e-20);
        assert!(v.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn invalid_schedules_rejected() {
        assert!(AlphaSchedule::new(0.0, 0.1, 3).is_err());
        assert!(AlphaSchedule::new(1.0, 1.0, 3).is_err());
        assert!(AlphaSchedule::new(1.0, 0.5, 0).is_err());
        assert!(AlphaSchedule::new(1.0, 1e-200, 5).is_err());
    }
}
