//! Sparse policy weights, their projection onto actions, smoothing and
//! action sampling.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{domain, Result};
use crate::types::{ActionId, Context, PolicyClass, PolicyId};

/// Entries below this are dropped from the support after rescaling.
pub const PRUNE_BELOW: f64 = 1e-15;

/// Nonnegative sub-distribution `Q` over a policy class, stored sparsely.
///
/// Stored weights are strictly positive. A distribution handed out by the
/// solver sums to at most one; intermediate iterates may briefly exceed it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseWeights {
    entries: BTreeMap<PolicyId, f64>,
    total: f64,
}

impl SparseWeights {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds weights from `(policy, weight)` pairs, merging duplicates.
    pub fn from_entries<I: IntoIterator<Item = (PolicyId, f64)>>(entries: I) -> Result<Self> {
        let mut q = Self::new();
        for (p, w) in entries {
            if !(w >= 0.0) || !w.is_finite() {
                return domain(format!("weight {w} for policy {} is not a finite nonnegative value", p.0));
            }
            if w > 0.0 {
                q.increment(p, w);
            }
        }
        if q.total > 1.0 + 1e-12 {
            return domain(format!("weights sum to {} > 1", q.total));
        }
        Ok(q)
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.total
    }

    #[inline]
    pub fn get(&self, policy: PolicyId) -> f64 {
        self.entries.get(&policy).copied().unwrap_or(0.0)
    }

    #[inline]
    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (PolicyId, f64)> + '_ {
        self.entries.iter().map(|(p, w)| (*p, *w))
    }

    /// Adds `amount > 0` to `Q(policy)`.
    pub fn increment(&mut self, policy: PolicyId, amount: f64) {
        debug_assert!(amount > 0.0);
        *self.entries.entry(policy).or_insert(0.0) += amount;
        self.total += amount;
    }

    /// Multiplies every weight by `c > 0`, pruning entries that become negligible.
    pub fn scale(&mut self, c: f64) {
        debug_assert!(c > 0.0);
        self.entries.retain(|_, w| {
            *w *= c;
            *w >= PRUNE_BELOW
        });
        self.total = self.entries.values().sum();
    }

    /// Sets `Q(policy) = 0`.
    pub fn remove(&mut self, policy: PolicyId) -> f64 {
        let w = self.entries.remove(&policy).unwrap_or(0.0);
        self.total = self.entries.values().sum();
        w
    }
}

/// A length-`K` action distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDistribution {
    probs: Vec<f64>,
}

impl ActionDistribution {
    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, a: ActionId) -> f64 {
        self.probs[a.index()]
    }

    /// Inverse-CDF draw. Returns the action and its exact mass.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (ActionId, f64) {
        let u: f64 = rng.random::<f64>() * self.probs.iter().sum::<f64>();
        let mut acc = 0.0;
        let mut last_positive = 0;
        for (a, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                last_positive = a;
                acc += p;
                if u < acc {
                    return (ActionId(a), p);
                }
            }
        }
        (ActionId(last_positive), self.probs[last_positive])
    }
}

/// `Q̃ = Q + (1 − Σ Q) 1_{default}`.
pub fn mix_default(q: &SparseWeights, default_policy: PolicyId) -> SparseWeights {
    let mut out = q.clone();
    let rest = 1.0 - q.total();
    if rest > 0.0 {
        out.increment(default_policy, rest);
    }
    out
}

/// `Q(a|x) = Σ_{π : π(x) = a} Q(π)`; touches only the support of `q`.
pub fn conditional_weights<P: PolicyClass + ?Sized>(q: &SparseWeights, x: &Context, class: &P) -> Vec<f64> {
    let mut out = vec![0.0; class.num_actions()];
    for (p, w) in q.iter() {
        out[class.evaluate(p, x).index()] += w;
    }
    out
}

/// `Q^μ(a|x) = (1 − Kμ) Q(a|x) + μ`.
pub fn smooth(qx: &[f64], mu: f64) -> Result<ActionDistribution> {
    let k = qx.len() as f64;
    if !(0.0..=1.0 / k).contains(&mu) {
        return domain(format!("mu {mu} is outside [0, 1/K]"));
    }
    let scale = 1.0 - k * mu;
    Ok(ActionDistribution {
        probs: qx.iter().map(|v| scale * v + mu).collect(),
    })
}

/// The action distribution `Q̃^μ(·|x)` used for acting.
pub fn action_distribution<P: PolicyClass + ?Sized>(
    x: &Context,
    q: &SparseWeights,
    default_policy: PolicyId,
    mu: f64,
    class: &P,
) -> Result<ActionDistribution> {
    let full = mix_default(q, default_policy);
    smooth(&conditional_weights(&full, x, class), mu)
}

/// Draws an action from `Q̃^μ(·|x)`; the returned probability is at least `μ`.
pub fn sample<P: PolicyClass + ?Sized, R: Rng + ?Sized>(
    x: &Context,
    q: &SparseWeights,
    default_policy: PolicyId,
    mu: f64,
    class: &P,
    rng: &mut R,
) -> Result<(ActionId, f64)> {
    Ok(action_distribution(x, q, default_policy, mu, class)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::TabularPolicies;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(entries: &[(usize, f64)]) -> SparseWeights {
        SparseWeights::from_entries(entries.iter().map(|&(p, v)| (PolicyId(p), v))).unwrap()
    }

    #[test]
    fn mix_default_examples() {
        let m = mix_default(&SparseWeights::new(), PolicyId(7));
        assert_eq!(m.get(PolicyId(7)), 1.0);
        assert_eq!(m.support_len(), 1);

        let m = mix_default(&w(&[(3, 0.4)]), PolicyId(3));
        assert!((m.get(PolicyId(3)) - 1.0).abs() < 1e-12);
        assert_eq!(m.support_len(), 1);

        let m = mix_default(&w(&[(1, 0.25), (2, 0.25)]), PolicyId(0));
        assert_eq!(m.get(PolicyId(0)), 0.5);
        assert_eq!(m.get(PolicyId(1)), 0.25);
        assert_eq!(m.get(PolicyId(2)), 0.25);
        assert!((m.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_weights_examples() {
        let class = TabularPolicies::new(
            3,
            vec![vec![ActionId(2)], vec![ActionId(2)], vec![ActionId(0)]],
        )
        .unwrap();
        let x = Context::from_id(0);
        assert_eq!(conditional_weights(&SparseWeights::new(), &x, &class), vec![0.0; 3]);
        assert_eq!(conditional_weights(&w(&[(0, 0.6)]), &x, &class), vec![0.0, 0.0, 0.6]);
        let pooled = conditional_weights(&w(&[(0, 0.3), (1, 0.2)]), &x, &class);
        assert!((pooled[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn smooth_examples() {
        let d = smooth(&[1.0, 0.0], 0.1).unwrap();
        assert!((d.probs()[0] - 0.9).abs() < 1e-15);
        assert!((d.probs()[1] - 0.1).abs() < 1e-15);
        assert_eq!(smooth(&[0.3, 0.7], 0.0).unwrap().probs(), &[0.3, 0.7]);
        let u = smooth(&[0.0, 1.0, 0.0], 1.0 / 3.0).unwrap();
        for p in u.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(smooth(&[1.0, 0.0], 0.6).is_err());
    }

    #[test]
    fn degenerate_and_uniform_sampling() {
        let class = TabularPolicies::new(2, vec![vec![ActionId(1)]]).unwrap();
        let x = Context::from_id(0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, p) = sample(&x, &SparseWeights::new(), PolicyId(0), 0.0, &class, &mut rng).unwrap();
            assert_eq!((a, p), (ActionId(1), 1.0));
        }
        let mut seen = [0usize; 2];
        for _ in 0..1000 {
            let (a, p) = sample(&x, &SparseWeights::new(), PolicyId(0), 0.5, &class, &mut rng).unwrap();
            assert_eq!(p, 0.5);
            seen[a.index()] += 1;
        }
        assert!(seen[0] > 400 && seen[1] > 400);
    }

    #[test]
    fn monte_carlo_frequency() {
        let d = smooth(&[1.0, 0.0], 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let zeros = (0..n).filter(|_| d.draw(&mut rng).0 == ActionId(0)).count();
        let freq = zeros as f64 / n as f64;
        assert!((freq - 0.9).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn scale_prunes_tiny_weights() {
        let mut q = w(&[(0, 0.5), (1, 1e-14)]);
        q.scale(0.05);
        assert_eq!(q.support_len(), 1);
        assert!((q.total() - 0.025).abs() < 1e-15);
    }

    #[test]
    fn from_entries_validation() {
        assert!(SparseWeights::from_entries([(PolicyId(0), -0.1)]).is_err());
        assert!(SparseWeights::from_entries([(PolicyId(0), 0.7), (PolicyId(1), 0.4)]).is_err());
        let q = SparseWeights::from_entries([(PolicyId(0), 0.0), (PolicyId(1), 0.4)]).unwrap();
        assert_eq!(q.support_len(), 1);
    }
}
