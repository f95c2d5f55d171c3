use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every analysis.
///
/// Where a natural scale exists (a matrix norm, ‖h‖, the largest singular
/// value) the tolerance is applied relative to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ortho: f64,
    pub proj: f64,
    pub sym: f64,
    pub psd: f64,
    pub gram: f64,
    /// Relative singular-value cutoff for rank decisions.
    pub rank: f64,
    /// Relative singular-value cutoff below which T_α counts as singular.
    pub singular: f64,
    /// Relative bound on the algebraic identity defects.
    pub identity: f64,
    pub decision: f64,
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ortho: 1e-10,
            proj: 1e-10,
            sym: 1e-10,
            psd: 1e-10,
            gram: 1e-10,
            rank: 1e-10,
            singular: 1e-12,
            identity: 1e-9,
            decision: 1e-6,
            oracle: 1e-8,
        }
    }
}
