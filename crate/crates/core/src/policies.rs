//! Concrete policy classes.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Result};
use crate::types::{ActionId, Context, PolicyClass, PolicyId};

/// Policies given by a lookup table indexed by context id.
///
/// Context ids outside the table map to action 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPolicies {
    num_actions: usize,
    table: Vec<Vec<ActionId>>,
}

impl TabularPolicies {
    pub fn new(num_actions: usize, table: Vec<Vec<ActionId>>) -> Result<Self> {
        if table.is_empty() {
            return domain("policy class must contain at least one policy");
        }
        for (p, row) in table.iter().enumerate() {
            if let Some(a) = row.iter().find(|a| a.index() >= num_actions) {
                return domain(format!("policy {p} maps to action {} >= K={num_actions}", a.0));
            }
        }
        Ok(Self { num_actions, table })
    }

    pub fn table(&self) -> &[Vec<ActionId>] {
        &self.table
    }
}

impl PolicyClass for TabularPolicies {
    fn len(&self) -> usize {
        self.table.len()
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    #[inline]
    fn evaluate(&self, policy: PolicyId, x: &Context) -> ActionId {
        self.table[policy.index()]
            .get(x.id() as usize)
            .copied()
            .unwrap_or(ActionId(0))
    }
}

/// Linear argmax policies: `π(x) = argmax_a w_{π,a} · x`, ties to the lowest action.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPolicies {
    num_actions: usize,
    // [policy][action] -> dense weights
    weights: Vec<Vec<Vec<f64>>>,
}

impl LinearPolicies {
    pub fn new(num_actions: usize, weights: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if weights.is_empty() {
            return domain("policy class must contain at least one policy");
        }
        if weights.iter().any(|w| w.len() != num_actions) {
            return domain("every linear policy needs one weight vector per action");
        }
        Ok(Self {
            num_actions,
            weights,
        })
    }

    /// `n` policies with i.i.d. standard-normal-ish weights over `dim` features.
    pub fn random<R: Rng + ?Sized>(n: usize, num_actions: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let weights = (0..n)
            .map(|_| {
                (0..num_actions)
                    .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
                    .collect()
            })
            .collect();
        Self::new(num_actions, weights)
    }
}

impl PolicyClass for LinearPolicies {
    fn len(&self) -> usize {
        self.weights.len()
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn evaluate(&self, policy: PolicyId, x: &Context) -> ActionId {
        let mut best = (0, f64::NEG_INFINITY);
        for (a, w) in self.weights[policy.index()].iter().enumerate() {
            let s = x.dot(w);
            if s > best.1 {
                best = (a, s);
            }
        }
        ActionId(best.0)
    }
}

pub(crate) fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
