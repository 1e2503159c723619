use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::schedule::EpochSchedule;

/// Smallest accepted regret scale `ψ`; strictly above `6.4 · 8 · √2 ≈ 72.41`.
pub const MIN_PSI: f64 = 72.5;

/// Default regret scale `ψ`.
pub const DEFAULT_PSI: f64 = 100.0;

/// Absolute tolerance used by feasibility checks.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Configuration of the epoch-scheduled learner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlgoConfig {
    pub num_actions: usize,
    /// Failure probability `δ ∈ (0, 1)`.
    pub delta: f64,
    /// Regret scale `ψ` dividing estimated regrets in `b_π = RegHat(π) / (ψ μ)`.
    pub psi: f64,
    pub schedule: EpochSchedule,
    pub warm_start: bool,
    pub seed: u64,
    /// Record the potential trace and assert feasibility at every epoch boundary.
    pub verify: bool,
}

impl AlgoConfig {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            delta: 0.1,
            psi: DEFAULT_PSI,
            schedule: EpochSchedule::Doubling,
            warm_start: false,
            seed: 0,
            verify: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_actions < 2 {
            return domain(format!("need at least 2 actions, got {}", self.num_actions));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return domain(format!("delta {} is outside (0, 1)", self.delta));
        }
        if !(self.psi >= MIN_PSI) || !self.psi.is_finite() {
            return domain(format!("psi {} is below the minimum {MIN_PSI}", self.psi));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_floor_clears_proof_constant() {
        assert!(MIN_PSI > 6.4 * 8.0 * 2f64.sqrt());
    }

    #[test]
    fn validation() {
        let mut c = AlgoConfig::new(3);
        assert!(c.validate().is_ok());
        c.psi = 72.4;
        assert!(c.validate().is_err());
        c.psi = 100.0;
        c.delta = 1.0;
        assert!(c.validate().is_err());
        c.delta = 0.1;
        c.num_actions = 1;
        assert!(c.validate().is_err());
    }
}
