//! ε-greedy and explore-first.
//!
//! Both exploit a greedy policy supplied by a [`GreedyEngine`]: either the
//! empirical IPS argmax over a finite class, recomputed on request, or an
//! online least-squares cost learner updated every observed round.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{OlsCsc, OnlineCscOracle};
use crate::error::{domain, Error, Result};
use crate::estimator::best_estimated_policy;
use crate::harness::env::Environment;
use crate::harness::metrics::{RunOutput, Tracker};
use crate::oracle::{ArgmaxOracle, EnumerationOracle};
use crate::schedule::EpochSchedule;
use crate::types::{ActionId, Context, History, InteractionRecord, PolicyClass, PolicyId};

/// Source of the exploit action.
pub trait GreedyEngine {
    fn num_actions(&self) -> usize;

    fn predict(&self, x: &Context) -> ActionId;

    /// Consumes one logged round.
    fn observe(&mut self, record: &InteractionRecord) -> Result<()>;

    /// Recomputes the greedy policy from everything observed so far.
    fn refresh(&mut self) -> Result<()>;

    fn oracle_calls(&self) -> u64 {
        0
    }
}

/// Greedy over a finite class: the argmax of the IPS reward estimates.
pub struct ClassGreedy<P> {
    oracle: EnumerationOracle<P>,
    history: History,
    current: PolicyId,
}

impl<P: PolicyClass> ClassGreedy<P> {
    /// Starts from policy 0.
    pub fn new(class: P) -> Self {
        let k = class.num_actions();
        Self {
            oracle: EnumerationOracle::new(class),
            history: History::new(k),
            current: PolicyId(0),
        }
    }

    pub fn current(&self) -> PolicyId {
        self.current
    }
}

impl<P: PolicyClass> GreedyEngine for ClassGreedy<P> {
    fn num_actions(&self) -> usize {
        self.oracle.class().num_actions()
    }

    fn predict(&self, x: &Context) -> ActionId {
        self.oracle.class().evaluate(self.current, x)
    }

    fn observe(&mut self, record: &InteractionRecord) -> Result<()> {
        self.history.push(record.clone())
    }

    fn refresh(&mut self) -> Result<()> {
        if !self.history.is_empty() {
            self.current = best_estimated_policy(&self.history, &mut self.oracle)?;
        }
        Ok(())
    }

    fn oracle_calls(&self) -> u64 {
        self.oracle.calls()
    }
}

/// Online greedy: an [`OlsCsc`] trained on IPS costs `1 − (r/p) 1{a = a_t}`.
pub struct OlsGreedy {
    learner: OlsCsc,
}

impl OlsGreedy {
    pub fn new(num_actions: usize, eta: f64) -> Result<Self> {
        Ok(Self {
            learner: OlsCsc::new(num_actions, eta)?,
        })
    }
}

impl GreedyEngine for OlsGreedy {
    fn num_actions(&self) -> usize {
        self.learner.num_actions()
    }

    fn predict(&self, x: &Context) -> ActionId {
        self.learner.predict(x)
    }

    fn observe(&mut self, rec: &InteractionRecord) -> Result<()> {
        let mut costs = vec![1.0; self.learner.num_actions()];
        costs[rec.action.index()] -= rec.reward / rec.probability;
        self.learner.update(&rec.context, &costs);
        Ok(())
    }

    fn refresh(&mut self) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BaselineKind {
    /// Uniform with probability ε, greedy otherwise; the greedy policy is
    /// refreshed at the boundaries of the given schedule.
    EpsilonGreedy { epsilon: f64, schedule: EpochSchedule },
    /// Uniform for the first `n0` rounds, then the greedy policy frozen.
    ExploreFirst { n0: u64 },
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::EpsilonGreedy { .. } => "egreedy",
            Self::ExploreFirst { .. } => "explore-first",
        }
    }
}

/// Runs a baseline for `rounds` rounds; `seed` drives only its own coin flips.
pub fn run_baseline<G: GreedyEngine, E: Environment>(
    kind: BaselineKind,
    mut engine: G,
    mut env: E,
    rounds: u64,
    seed: u64,
) -> Result<RunOutput> {
    let k = engine.num_actions();
    if env.num_actions() != k {
        return domain("environment and greedy engine disagree on K");
    }
    match kind {
        BaselineKind::EpsilonGreedy { epsilon, .. } if !(0.0..=1.0).contains(&epsilon) => {
            return domain(format!("epsilon {epsilon} is outside [0, 1]"));
        }
        BaselineKind::ExploreFirst { n0 } if n0 > rounds => {
            return domain(format!("exploration length {n0} exceeds T = {rounds}"));
        }
        _ => {}
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker::new(rounds.min(1 << 24) as usize);
    let uniform = 1.0 / k as f64;
    let mut refreshes = 0;
    for t in 1..=rounds {
        let Some(round) = env.next_round() else { break };
        let x = &round.context;
        let (explore_p, exploring) = match kind {
            BaselineKind::EpsilonGreedy { epsilon, .. } => (epsilon, true),
            BaselineKind::ExploreFirst { n0 } => (if t <= n0 { 1.0 } else { 0.0 }, t <= n0),
        };
        let greedy = engine.predict(x);
        let a = if explore_p > 0.0 && rng.random::<f64>() < explore_p {
            ActionId(rng.random_range(0..k))
        } else {
            greedy
        };
        let mut p = explore_p * uniform;
        if a == greedy {
            p += 1.0 - explore_p;
        }
        let r = round.reward(a);
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RewardOutOfRange(r));
        }
        let rec = InteractionRecord::new(x.clone(), a, r, p)?;
        if exploring {
            engine.observe(&rec)?;
        }
        let epoch = match kind {
            BaselineKind::EpsilonGreedy { schedule, .. } => {
                if t < rounds && schedule.boundary(t).is_some() {
                    engine.refresh()?;
                    refreshes += 1;
                }
                schedule.epoch_of(t)
            }
            BaselineKind::ExploreFirst { n0 } => {
                if t == n0 {
                    engine.refresh()?;
                    refreshes += 1;
                }
                u64::from(t > n0) + 1
            }
        };
        tracker.push(t, epoch, explore_p * uniform, a.index(), p, r, round.optimal_reward, engine.oracle_calls());
    }
    Ok(tracker.finish(kind.name(), seed, engine.oracle_calls(), refreshes, 0))
}
