use crate::types::{ActionId, Context};

/// One draw `(x_t, r_t)` from the environment.
///
/// The learner only ever sees `rewards[a_t]`; the full vector and the
/// optimal policy's reward are for regret accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub context: Context,
    pub rewards: Vec<f64>,
    /// `r_t(π*(x_t))` when the environment knows the optimal policy.
    pub optimal_reward: Option<f64>,
}

impl Round {
    #[inline]
    pub fn reward(&self, a: ActionId) -> f64 {
        self.rewards[a.index()]
    }
}

/// A stream of rounds. Returns `None` when exhausted.
pub trait Environment {
    fn num_actions(&self) -> usize;

    fn next_round(&mut self) -> Option<Round>;
}

impl<E: Environment + ?Sized> Environment for &mut E {
    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn next_round(&mut self) -> Option<Round> {
        (**self).next_round()
    }
}

impl<E: Environment + ?Sized> Environment for Box<E> {
    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn next_round(&mut self) -> Option<Round> {
        (**self).next_round()
    }
}

/// Replays a fixed list of rounds.
#[derive(Debug, Clone)]
pub struct ReplayEnvironment {
    num_actions: usize,
    rounds: std::vec::IntoIter<Round>,
}

impl ReplayEnvironment {
    pub fn new(num_actions: usize, rounds: Vec<Round>) -> Self {
        Self {
            num_actions,
            rounds: rounds.into_iter(),
        }
    }
}

impl Environment for ReplayEnvironment {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn next_round(&mut self) -> Option<Round> {
        self.rounds.next()
    }
}
