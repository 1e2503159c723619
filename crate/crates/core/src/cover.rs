//! Online Cover: `n` online cost-sensitive learners, played uniformly with
//! a decaying exploration floor, each trained against the mixture of the
//! learners before it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::harness::env::Environment;
use crate::harness::metrics::{RunOutput, Tracker};
use crate::sampler::{smooth, ActionDistribution};
use crate::types::{ActionId, Context};

/// An online cost-sensitive learner: sees one cost vector at a time and
/// predicts the action with the lowest estimated cost.
pub trait OnlineCscOracle {
    fn num_actions(&self) -> usize;

    /// Costs may be any finite reals, including negative ones.
    fn update(&mut self, x: &Context, costs: &[f64]);

    fn predict(&self, x: &Context) -> ActionId;
}

/// Per-action online least squares on the cost, predicting the argmin.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsCsc {
    eta: f64,
    // [action] -> dense weights, grown on demand
    weights: Vec<Vec<f64>>,
}

impl OlsCsc {
    pub fn new(num_actions: usize, eta: f64) -> Result<Self> {
        if num_actions == 0 {
            return domain("need at least one action");
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return domain(format!("learning rate {eta} must be positive"));
        }
        Ok(Self {
            eta,
            weights: vec![Vec::new(); num_actions],
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Predicted cost of every action on `x`.
    pub fn scores(&self, x: &Context) -> Vec<f64> {
        self.weights.iter().map(|w| x.dot(w)).collect()
    }
}

impl OnlineCscOracle for OlsCsc {
    fn num_actions(&self) -> usize {
        self.weights.len()
    }

    fn update(&mut self, x: &Context, costs: &[f64]) {
        debug_assert_eq!(costs.len(), self.weights.len());
        let needed = x.features().last().map_or(0, |&(i, _)| i as usize + 1);
        for (w, &c) in self.weights.iter_mut().zip(costs) {
            if w.len() < needed {
                w.resize(needed, 0.0);
            }
            let g = self.eta * (c - x.dot(w));
            for &(i, v) in x.features() {
                w[i as usize] += g * v;
            }
        }
    }

    fn predict(&self, x: &Context) -> ActionId {
        let mut best = (0, f64::INFINITY);
        for (a, w) in self.weights.iter().enumerate() {
            let s = x.dot(w);
            if s < best.1 {
                best = (a, s);
            }
        }
        ActionId(best.0)
    }
}

/// `μ_t = 0.05 · min(1/K, 1/√(tK))`.
pub fn cover_mu(t: u64, num_actions: usize) -> f64 {
    let k = num_actions as f64;
    0.05 * (1.0 / k).min(1.0 / (t as f64 * k).sqrt())
}

/// The cost vector handed to learner `i`:
/// `c(a) = 1 − (r / p_t(a_t)) 1{a = a_t} − μ / p_i(a)`.
pub fn cover_costs(p_i: &[f64], action: ActionId, reward: f64, prob: f64, mu: f64) -> Vec<f64> {
    p_i.iter()
        .enumerate()
        .map(|(a, &pa)| {
            let ips = if a == action.index() { reward / prob } else { 0.0 };
            1.0 - ips - mu / pa
        })
        .collect()
}

/// One round of Online Cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverRecord {
    pub t: u64,
    pub mu: f64,
    pub action: ActionId,
    pub prob: f64,
    pub reward: f64,
}

pub struct CoverLearner<L> {
    num_actions: usize,
    learners: Vec<L>,
    t: u64,
    updates: u64,
    rng: ChaCha8Rng,
}

impl<L: OnlineCscOracle> CoverLearner<L> {
    pub fn new(learners: Vec<L>, seed: u64) -> Result<Self> {
        let Some(first) = learners.first() else {
            return domain("cover size must be at least 1");
        };
        let k = first.num_actions();
        if k < 2 || learners.iter().any(|l| l.num_actions() != k) {
            return domain("every learner needs the same K >= 2");
        }
        Ok(Self {
            num_actions: k,
            learners,
            t: 0,
            updates: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    pub fn learners(&self) -> &[L] {
        &self.learners
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    /// Total learner updates so far (`n` per round).
    pub fn updates(&self) -> u64 {
        self.updates
    }

    /// Fraction of the first `i` learners choosing each action on `x`.
    fn mixture(&self, i: usize, x: &Context) -> Vec<f64> {
        let mut q = vec![0.0; self.num_actions];
        if i == 0 {
            return q;
        }
        for l in &self.learners[..i] {
            q[l.predict(x).index()] += 1.0;
        }
        q.iter_mut().for_each(|v| *v /= i as f64);
        q
    }

    /// The distribution round `t + 1` would sample from on `x`.
    pub fn action_distribution(&self, x: &Context) -> Result<ActionDistribution> {
        let mu = cover_mu(self.t + 1, self.num_actions);
        smooth(&self.mixture(self.learners.len(), x), mu)
    }

    pub fn step(&mut self, x: &Context, reveal: impl FnOnce(ActionId) -> f64) -> Result<CoverRecord> {
        let dist = self.action_distribution(x)?;
        let (a, p) = dist.draw(&mut self.rng);
        let r = reveal(a);
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RewardOutOfRange(r));
        }
        self.t += 1;
        let mu = cover_mu(self.t, self.num_actions);
        // Learner i trains against the mixture of learners 0..i, each
        // already updated this round.
        for i in 0..self.learners.len() {
            let p_i = smooth(&self.mixture(i, x), mu)?;
            let costs = cover_costs(p_i.probs(), a, r, p, mu);
            self.learners[i].update(x, &costs);
            self.updates += 1;
        }
        Ok(CoverRecord {
            t: self.t,
            mu,
            action: a,
            prob: p,
            reward: r,
        })
    }
}

/// Runs Online Cover with `n` OLS learners for `rounds` rounds.
pub fn run<E: Environment>(n: usize, eta: f64, mut env: E, rounds: u64, seed: u64) -> Result<RunOutput> {
    let k = env.num_actions();
    let learners = (0..n).map(|_| OlsCsc::new(k, eta)).collect::<Result<Vec<_>>>()?;
    let mut cover = CoverLearner::new(learners, seed)?;
    let mut tracker = Tracker::new(rounds.min(1 << 24) as usize);
    for t in 1..=rounds {
        let Some(round) = env.next_round() else { break };
        let rec = cover.step(&round.context, |a| round.reward(a))?;
        tracker.push(
            t,
            0,
            rec.mu,
            rec.action.index(),
            rec.prob,
            rec.reward,
            round.optimal_reward,
            0,
        );
    }
    Ok(tracker.finish("cover", seed, 0, 0, 0))
}
