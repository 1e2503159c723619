//! Domain types shared by every learner: actions, contexts, policy classes and
//! the interaction history.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// An action index in `[0, K)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionId(pub usize);

impl ActionId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// A policy index in `[0, N)` for some policy class of size `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolicyId(pub usize);

impl PolicyId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// An observed context: an identifier plus a sparse feature list.
///
/// Feature indices are strictly increasing and every value is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Context {
    id: u64,
    features: Vec<(u32, f64)>,
}

impl Context {
    pub fn new(id: u64, features: Vec<(u32, f64)>) -> Result<Self> {
        for w in features.windows(2) {
            if w[0].0 >= w[1].0 {
                return domain(format!(
                    "feature indices must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                ));
            }
        }
        if let Some((i, v)) = features.iter().find(|(_, v)| !v.is_finite()) {
            return domain(format!("feature {i} has non-finite value {v}"));
        }
        Ok(Self { id, features })
    }

    /// A context with no features, identified only by `id`.
    pub fn from_id(id: u64) -> Self {
        Self {
            id,
            features: Vec::new(),
        }
    }

    /// Builds a context from a dense vector, dropping exact zeros.
    pub fn from_dense(id: u64, dense: &[f64]) -> Result<Self> {
        let features = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| (i as u32, *v))
            .collect();
        Self::new(id, features)
    }

    #[inline]
    pub fn id(&self) -> u64 {
        self.id
    }

    #[inline]
    pub fn features(&self) -> &[(u32, f64)] {
        &self.features
    }

    /// Dot product with a dense weight vector; indices past its end contribute zero.
    pub fn dot(&self, weights: &[f64]) -> f64 {
        self.features
            .iter()
            .filter_map(|&(i, v)| weights.get(i as usize).map(|w| w * v))
            .sum()
    }
}

/// A finite class of deterministic policies mapping contexts to actions.
///
/// `evaluate` must be deterministic and return an action `< num_actions()`
/// for every policy index `< len()`.
pub trait PolicyClass {
    fn len(&self) -> usize;

    fn num_actions(&self) -> usize;

    fn evaluate(&self, policy: PolicyId, x: &Context) -> ActionId;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<P: PolicyClass + ?Sized> PolicyClass for &P {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn evaluate(&self, policy: PolicyId, x: &Context) -> ActionId {
        (**self).evaluate(policy, x)
    }
}

/// The observable record of one round: `(x, a, r(a), p(a))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    pub context: Context,
    pub action: ActionId,
    pub reward: f64,
    pub probability: f64,
}

impl InteractionRecord {
    pub fn new(context: Context, action: ActionId, reward: f64, probability: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::RewardOutOfRange(reward));
        }
        if !(probability > 0.0 && probability <= 1.0) {
            return domain(format!("probability {probability} is outside (0, 1]"));
        }
        Ok(Self {
            context,
            action,
            reward,
            probability,
        })
    }
}

/// Append-only interaction history with cached fictitious reward vectors.
///
/// `fictitious(i)` is the inverse-propensity transform of `records()[i]`:
/// `r / p` at the logged action and zero elsewhere.
#[derive(Debug, Clone)]
pub struct History {
    num_actions: usize,
    records: Vec<InteractionRecord>,
    // row-major, len = records.len() * num_actions
    fictitious: Vec<f64>,
}

impl History {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            records: Vec::new(),
            fictitious: Vec::new(),
        }
    }

    pub fn with_capacity(num_actions: usize, capacity: usize) -> Self {
        Self {
            num_actions,
            records: Vec::with_capacity(capacity),
            fictitious: Vec::with_capacity(capacity * num_actions),
        }
    }

    pub fn push(&mut self, record: InteractionRecord) -> Result<()> {
        let a = record.action.index();
        if a >= self.num_actions {
            return Err(Error::IndexOutOfRange {
                index: a,
                len: self.num_actions,
            });
        }
        if !(record.probability > 0.0) {
            return domain("cannot importance-weight a record with zero probability");
        }
        let start = self.fictitious.len();
        self.fictitious
            .resize(start + self.num_actions, 0.0);
        self.fictitious[start + a] = record.reward / record.probability;
        self.records.push(record);
        Ok(())
    }

    #[inline]
    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.records.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    #[inline]
    pub fn records(&self) -> &[InteractionRecord] {
        &self.records
    }

    pub fn contexts(&self) -> impl ExactSizeIterator<Item = &Context> + '_ {
        self.records.iter().map(|r| &r.context)
    }

    /// Fictitious reward vector of record `i`.
    #[inline]
    pub fn fictitious(&self, i: usize) -> &[f64] {
        let k = self.num_actions;
        &self.fictitious[i * k..(i + 1) * k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_rejects_unsorted_features() {
        assert!(Context::new(0, vec![(2, 1.0), (1, 1.0)]).is_err());
        assert!(Context::new(0, vec![(1, 1.0), (1, 2.0)]).is_err());
        assert!(Context::new(0, vec![(1, f64::NAN)]).is_err());
        assert!(Context::new(0, vec![(1, 1.0), (4, -2.0)]).is_ok());
    }

    #[test]
    fn dot_ignores_features_past_weights() {
        let x = Context::new(0, vec![(0, 2.0), (3, 1.0), (9, 5.0)]).unwrap();
        assert_eq!(x.dot(&[1.0, 0.0, 0.0, 0.5]), 2.5);
    }

    #[test]
    fn record_validation() {
        let x = Context::from_id(0);
        assert!(InteractionRecord::new(x.clone(), ActionId(0), 1.5, 0.5).is_err());
        assert!(InteractionRecord::new(x.clone(), ActionId(0), 0.5, 0.0).is_err());
        assert!(InteractionRecord::new(x, ActionId(0), 0.5, 1.0).is_ok());
    }

    #[test]
    fn history_caches_fictitious_rewards() {
        let mut h = History::new(3);
        let rec = InteractionRecord::new(Context::from_id(1), ActionId(2), 0.6, 0.3).unwrap();
        h.push(rec).unwrap();
        assert_eq!(h.len(), 1);
        let f = h.fictitious(0);
        assert_eq!(f[0], 0.0);
        assert_eq!(f[1], 0.0);
        assert!((f[2] - 2.0).abs() < 1e-12);

        let bad = InteractionRecord::new(Context::from_id(1), ActionId(3), 0.6, 0.3).unwrap();
        assert!(h.push(bad).is_err());
        assert_eq!(h.len(), 1);
    }
}
