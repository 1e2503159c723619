//! Epoch schedules and the exploration-floor formulas.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Rounds `τ_1 < τ_2 < …` at which the distribution over policies is re-solved.
///
/// All variants satisfy `τ_0 = 0` and `τ_{m+1} ≤ 2 τ_m` for `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpochSchedule {
    /// `τ_m = 2^{m-1}`.
    Doubling,
    /// `(3, 5, 9, 16, 25, …)`: `τ_1 = 3`, `τ_2 = 5`, `τ_m = m²` for `m ≥ 3`.
    Squares,
    /// `τ_m = m`: re-solve every round.
    Unit,
}

impl EpochSchedule {
    /// End round of epoch `m`. Saturates at `u64::MAX` for doubling epochs past 64.
    pub fn tau(self, m: u64) -> u64 {
        if m == 0 {
            return 0;
        }
        match self {
            EpochSchedule::Doubling => {
                if m > 64 {
                    u64::MAX
                } else {
                    1u64 << (m - 1)
                }
            }
            EpochSchedule::Squares => match m {
                1 => 3,
                2 => 5,
                _ => m.saturating_mul(m),
            },
            EpochSchedule::Unit => m,
        }
    }

    /// `m(t) = min { m : t ≤ τ_m }` for `t ≥ 1` (returns 0 for `t = 0`).
    pub fn epoch_of(self, t: u64) -> u64 {
        if t == 0 {
            return 0;
        }
        match self {
            EpochSchedule::Unit => t,
            EpochSchedule::Doubling => {
                if t == 1 {
                    1
                } else {
                    1 + u64::from(64 - (t - 1).leading_zeros())
                }
            }
            EpochSchedule::Squares => {
                if t <= 3 {
                    1
                } else if t <= 5 {
                    2
                } else {
                    let r = t.isqrt();
                    if r * r == t {
                        r
                    } else {
                        r + 1
                    }
                }
            }
        }
    }

    /// `Some(m)` when `t = τ_m`.
    pub fn boundary(self, t: u64) -> Option<u64> {
        let m = self.epoch_of(t);
        (m > 0 && self.tau(m) == t).then_some(m)
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "doubling" => Some(Self::Doubling),
            "squares" => Some(Self::Squares),
            "unit" => Some(Self::Unit),
            _ => None,
        }
    }
}

/// Confidence width `d_t = ln(16 t² |Π| / δ)`.
pub fn d_t(t: u64, n_pi: usize, delta: f64) -> Result<f64> {
    if t == 0 {
        return domain("d_t requires t >= 1");
    }
    if n_pi == 0 {
        return domain("d_t requires a nonempty policy class");
    }
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("delta {delta} is outside (0, 1)"));
    }
    let t = t as f64;
    Ok((16.0 * t * t * n_pi as f64 / delta).ln())
}

/// Minimum action probability `μ_m = min{1/(2K), sqrt(d_{τ_m} / (K τ_m))}`.
pub fn mu_m(tau_m: u64, num_actions: usize, n_pi: usize, delta: f64) -> Result<f64> {
    if num_actions == 0 {
        return domain("K must be at least 1");
    }
    if tau_m == 0 {
        return domain("mu_m requires tau_m >= 1");
    }
    let k = num_actions as f64;
    let d = d_t(tau_m, n_pi, delta)?;
    Ok((0.5 / k).min((d / (k * tau_m as f64)).sqrt()))
}

/// Floor used before the first epoch boundary (`τ_0 = 0` makes the formula degenerate).
pub fn initial_mu(num_actions: usize) -> f64 {
    0.5 / num_actions as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d_t_values() {
        let v = d_t(10, 4, 0.1).unwrap();
        assert!((v - 64000f64.ln()).abs() < 1e-12);
        assert!((v - 11.0666).abs() < 1e-4);
        let v = d_t(1, 1, 0.5).unwrap();
        assert!((v - 3.4657).abs() < 1e-4);
        assert!(d_t(0, 1, 0.5).is_err());
        assert!(d_t(1, 0, 0.5).is_err());
        assert!(d_t(1, 1, 1.0).is_err());
        assert!(d_t(1, 1, 0.0).is_err());
    }

    #[test]
    fn d_t_increases_with_t() {
        for t in 1..200u64 {
            assert!(d_t(2 * t, 7, 0.05).unwrap() / d_t(t, 7, 0.05).unwrap() > 1.0);
        }
    }

    #[test]
    fn mu_m_values() {
        assert_eq!(mu_m(4, 2, 4, 0.1).unwrap(), 0.25);
        let v = mu_m(1024, 2, 4, 0.1).unwrap();
        let expect = ((16.0 * 1024.0f64 * 1024.0 * 4.0 / 0.1).ln() / 2048.0).sqrt();
        assert!((v - expect).abs() < 1e-15);
        assert!((v - 0.0996).abs() < 1e-4);
        assert!(mu_m(4, 0, 4, 0.1).is_err());
        assert!(mu_m(4, 2, 4, 1.5).is_err());
    }

    #[test]
    fn mu_m_monotone_and_capped() {
        let mut prev = f64::INFINITY;
        for tau in 1..5000 {
            let v = mu_m(tau, 3, 20, 0.1).unwrap();
            assert!(v <= prev);
            assert!(v > 0.0 && v <= 1.0 / 6.0);
            prev = v;
        }
    }

    #[test]
    fn epoch_of_examples() {
        assert_eq!(EpochSchedule::Doubling.epoch_of(1), 1);
        assert_eq!(EpochSchedule::Doubling.epoch_of(3), 3);
        assert_eq!(EpochSchedule::Squares.epoch_of(7), 3);
        assert_eq!(EpochSchedule::Unit.epoch_of(7), 7);
    }

    #[test]
    fn schedules_shapes() {
        let sq: Vec<u64> = (1..=6).map(|m| EpochSchedule::Squares.tau(m)).collect();
        assert_eq!(sq, vec![3, 5, 9, 16, 25, 36]);
        for m in 1..=40 {
            assert_eq!(EpochSchedule::Doubling.tau(m), 1u64 << (m - 1));
        }
        for s in [EpochSchedule::Doubling, EpochSchedule::Squares, EpochSchedule::Unit] {
            assert_eq!(s.tau(0), 0);
        }
    }

    #[test]
    fn squares_growth_bound_exhaustive() {
        let s = EpochSchedule::Squares;
        for m in 1..=10_000u64 {
            let (a, b) = (s.tau(m), s.tau(m + 1));
            assert!(a < b && b <= 2 * a, "m={m}");
        }
    }

    #[test]
    fn epoch_of_brackets_t() {
        for s in [EpochSchedule::Doubling, EpochSchedule::Squares, EpochSchedule::Unit] {
            for t in 1..5000u64 {
                let m = s.epoch_of(t);
                assert!(s.tau(m - 1) < t && t <= s.tau(m), "{s:?} t={t}");
                assert_eq!(s.boundary(t).is_some(), s.tau(m) == t);
            }
        }
    }
}
