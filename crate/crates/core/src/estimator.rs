//! Inverse-propensity reward estimates, the empirical best policy and
//! estimated regret.

use crate::error::{Error, Result};
use crate::oracle::ArgmaxOracle;
use crate::types::{Context, History, PolicyClass, PolicyId};

/// A sequence of `(context, reward vector)` pairs handed to an argmax oracle.
///
/// Rewards are stored row-major; every row has `num_actions` finite entries.
/// Entries may be negative (cost-derived datasets).
#[derive(Debug, Clone)]
pub struct CscDataset<'a> {
    num_actions: usize,
    contexts: Vec<&'a Context>,
    rewards: Vec<f64>,
}

impl<'a> CscDataset<'a> {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            contexts: Vec::new(),
            rewards: Vec::new(),
        }
    }

    pub fn with_capacity(num_actions: usize, capacity: usize) -> Self {
        Self {
            num_actions,
            contexts: Vec::with_capacity(capacity),
            rewards: Vec::with_capacity(capacity * num_actions),
        }
    }

    pub fn push(&mut self, x: &'a Context, rewards: &[f64]) -> Result<()> {
        if rewards.len() != self.num_actions {
            return Err(Error::Domain(format!(
                "reward vector has length {}, expected {}",
                rewards.len(),
                self.num_actions
            )));
        }
        if rewards.iter().any(|r| !r.is_finite()) {
            return Err(Error::Domain("reward vector has a non-finite entry".into()));
        }
        self.contexts.push(x);
        self.rewards.extend_from_slice(rewards);
        Ok(())
    }

    #[inline]
    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    #[inline]
    pub fn context(&self, i: usize) -> &'a Context {
        self.contexts[i]
    }

    #[inline]
    pub fn rewards(&self, i: usize) -> &[f64] {
        let k = self.num_actions;
        &self.rewards[i * k..(i + 1) * k]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'a Context, &[f64])> + '_ {
        self.contexts
            .iter()
            .copied()
            .zip(self.rewards.chunks_exact(self.num_actions.max(1)))
    }

    /// Total reward collected by `policy` over the dataset.
    pub fn policy_total<P: PolicyClass + ?Sized>(&self, class: &P, policy: PolicyId) -> f64 {
        self.iter()
            .map(|(x, r)| r[class.evaluate(policy, x).index()])
            .sum()
    }
}

/// Maps each interaction record `(x, a, r, p)` to `(x, r̂)` with `r̂(a) = r/p`
/// and zeros elsewhere.
pub fn ips_transform(history: &History) -> Result<CscDataset<'_>> {
    let mut out = CscDataset::with_capacity(history.num_actions(), history.len());
    for (i, rec) in history.records().iter().enumerate() {
        if !(rec.probability > 0.0) {
            return Err(Error::Domain(format!("record {i} has zero probability")));
        }
        out.push(&rec.context, history.fictitious(i))?;
    }
    Ok(out)
}

/// IPS estimate `R̂_t(π) = (1/t) Σ_i r̂_i(π(x_i))`.
pub fn reward_estimate<P: PolicyClass + ?Sized>(
    policy: PolicyId,
    history: &History,
    class: &P,
) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let total: f64 = history
        .contexts()
        .enumerate()
        .map(|(i, x)| history.fictitious(i)[class.evaluate(policy, x).index()])
        .sum();
    Ok(total / history.len() as f64)
}

/// The empirical best policy `π_t`, found with exactly one oracle call.
pub fn best_estimated_policy<O: ArgmaxOracle + ?Sized>(
    history: &History,
    oracle: &mut O,
) -> Result<PolicyId> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let data = ips_transform(history)?;
    oracle.argmax(&data)
}

/// Estimated regret `R̂_t(best) − R̂_t(policy)`.
pub fn estimated_regret<P: PolicyClass + ?Sized>(
    policy: PolicyId,
    history: &History,
    class: &P,
    best: PolicyId,
) -> Result<f64> {
    if policy == best {
        return Ok(0.0);
    }
    Ok(reward_estimate(best, history, class)? - reward_estimate(policy, history, class)?)
}
