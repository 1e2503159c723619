//! The epoch-scheduled learner.
//!
//! Each round samples from the weights frozen at the previous epoch
//! boundary; at each boundary `t = τ_m` the feasibility problem is solved
//! again with the current history and floor `μ_m`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{AlgoConfig, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::harness::env::Environment;
use crate::harness::metrics::{RunOutput, Tracker};
use crate::optimizer::{
    check_feasibility, solve_op_with_table, Feasibility, OpInstance, SolveOptions, StepKind, TraceStep,
};
use crate::oracle::{ArgmaxOracle, EnumerationOracle, ProbTable};
use crate::sampler::{action_distribution, ActionDistribution, SparseWeights};
use crate::schedule::{initial_mu, mu_m};
use crate::types::{ActionId, Context, History, InteractionRecord, PolicyClass, PolicyId};

/// Running totals across the whole run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub rounds: u64,
    pub oracle_calls: u64,
    pub ascent_steps: u64,
    pub solves: u64,
}

/// The state frozen for the current epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochState {
    /// Current epoch `m` (1-based).
    pub epoch: u64,
    /// `Q_{m−1}`
    pub q_frozen: SparseWeights,
    /// Best empirical policy at the previous boundary, or policy 0 before the first.
    pub default_policy: PolicyId,
    /// `μ_{m−1}`
    pub mu_prev: f64,
    pub counters: Counters,
}

/// What happened at one epoch boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochReport {
    pub epoch: u64,
    pub tau: u64,
    pub mu: f64,
    pub best: PolicyId,
    pub ascent_steps: usize,
    pub rescales: usize,
    /// `1 + loop passes`: the call for `π_t` plus one per descent pass.
    pub oracle_calls: u64,
    pub support: usize,
    pub total_weight: f64,
    pub feasibility: Option<Feasibility>,
    pub trace: Vec<TraceStep>,
}

pub struct Learner<P> {
    config: AlgoConfig,
    class: P,
    state: EpochState,
    history: History,
    table: ProbTable,
    rng: ChaCha8Rng,
    epochs: Vec<EpochReport>,
}

impl<P: PolicyClass> Learner<P> {
    pub fn new(config: AlgoConfig, class: P) -> Result<Self> {
        config.validate()?;
        if class.num_actions() != config.num_actions {
            return Err(Error::Domain(format!(
                "config has K = {} but the policy class has K = {}",
                config.num_actions,
                class.num_actions()
            )));
        }
        if class.is_empty() {
            return Err(Error::Domain("empty policy class".into()));
        }
        let k = config.num_actions;
        Ok(Self {
            state: EpochState {
                epoch: 1,
                q_frozen: SparseWeights::new(),
                default_policy: PolicyId(0),
                mu_prev: initial_mu(k),
                counters: Counters::default(),
            },
            history: History::new(k),
            table: ProbTable::new(k),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            epochs: Vec::new(),
            config,
            class,
        })
    }

    pub fn config(&self) -> &AlgoConfig {
        &self.config
    }

    pub fn class(&self) -> &P {
        &self.class
    }

    pub fn state(&self) -> &EpochState {
        &self.state
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn epochs(&self) -> &[EpochReport] {
        &self.epochs
    }

    /// Rounds played so far.
    pub fn t(&self) -> u64 {
        self.state.counters.rounds
    }

    /// The distribution the next round would sample from on `x`.
    pub fn action_distribution(&self, x: &Context) -> Result<ActionDistribution> {
        action_distribution(
            x,
            &self.state.q_frozen,
            self.state.default_policy,
            self.state.mu_prev,
            &self.class,
        )
    }

    /// Plays one round: samples an action, observes its reward, logs it.
    pub fn step(&mut self, x: Context, reveal: impl FnOnce(ActionId) -> f64) -> Result<InteractionRecord> {
        let (a, p) = self.action_distribution(&x)?.draw(&mut self.rng);
        let r = reveal(a);
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::RewardOutOfRange(r));
        }
        self.table.append_context(&self.state.q_frozen, &x, &self.class);
        let record = InteractionRecord::new(x, a, r, p)?;
        self.history.push(record.clone())?;
        self.state.counters.rounds += 1;
        Ok(record)
    }

    /// Solves for the next epoch's weights if the current round is a boundary.
    pub fn end_epoch_if_due<O: ArgmaxOracle + ?Sized>(&mut self, oracle: &mut O) -> Result<Option<&EpochReport>> {
        let t = self.t();
        let Some(m) = self.config.schedule.boundary(t) else {
            return Ok(None);
        };
        let k = self.config.num_actions;
        let mu = mu_m(t, k, self.class.len(), self.config.delta)?;
        let inst = OpInstance::new(&self.history, &self.class, mu, self.config.psi, oracle)?;

        let q_init = if self.config.warm_start {
            self.state.q_frozen.clone()
        } else {
            self.table.reset_to_zero();
            SparseWeights::new()
        };
        let opts = SolveOptions {
            verify: self.config.verify,
        };
        let solved = solve_op_with_table(&inst, q_init, oracle, &mut self.table, opts)?;

        let feasibility = if self.config.verify {
            let f = check_feasibility(&solved.q, &inst);
            if !f.holds(FEASIBILITY_TOL) {
                return Err(Error::ConstraintViolation(format!(
                    "epoch {m}: regret slack {:e}, variance slack {:e} at {:?}",
                    f.regret_slack, f.variance_slack, f.worst_policy
                )));
            }
            check_trace(&solved.trace, t, k, mu, m)?;
            Some(f)
        } else {
            None
        };

        let report = EpochReport {
            epoch: m,
            tau: t,
            mu,
            best: inst.best(),
            ascent_steps: solved.ascent_steps,
            rescales: solved.rescales,
            oracle_calls: 1 + solved.oracle_calls,
            support: solved.q.support_len(),
            total_weight: solved.q.total(),
            feasibility,
            trace: solved.trace,
        };
        let best = inst.best();
        drop(inst);

        let c = &mut self.state.counters;
        c.oracle_calls += report.oracle_calls;
        c.ascent_steps += report.ascent_steps as u64;
        c.solves += 1;
        self.state.q_frozen = solved.q;
        self.state.default_policy = best;
        self.state.mu_prev = mu;
        self.state.epoch = m + 1;
        self.epochs.push(report);
        Ok(self.epochs.last())
    }
}

/// Checks every step of a potential trace against its guaranteed decrease.
///
/// The tolerance grows with `|Φ|`, since long histories push the potential
/// well past the range where an absolute 1e−9 is meaningful.
fn check_trace(trace: &[TraceStep], t: u64, k: usize, mu: f64, m: u64) -> Result<()> {
    let drop = t as f64 * mu * mu / (4.0 * (1.0 - k as f64 * mu));
    for (i, s) in trace.iter().enumerate() {
        let tol = 1e-9 * s.before.abs().max(1.0);
        let bound = match s.kind {
            StepKind::Rescale => tol,
            StepKind::Ascent => -drop + tol,
        };
        if s.delta() > bound {
            return Err(Error::ConstraintViolation(format!(
                "epoch {m}, step {i} ({:?}): potential changed by {:e}, bound {:e}",
                s.kind,
                s.delta(),
                bound
            )));
        }
    }
    Ok(())
}

/// Result of a full run of the learner.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerRun {
    pub output: RunOutput,
    pub epochs: Vec<EpochReport>,
}

/// Runs `T` rounds with the enumeration oracle over `class`.
pub fn run<P, E>(config: AlgoConfig, class: &P, env: E, rounds: u64) -> Result<LearnerRun>
where
    P: PolicyClass + ?Sized,
    E: Environment,
{
    let mut oracle = EnumerationOracle::new(class);
    run_with_oracle(config, class, env, rounds, &mut oracle)
}

/// Runs `T` rounds with a caller-supplied oracle.
///
/// No solve happens after the final round, since its weights would never
/// be used. Stops early if the environment runs out.
pub fn run_with_oracle<P, E, O>(
    config: AlgoConfig,
    class: &P,
    mut env: E,
    rounds: u64,
    oracle: &mut O,
) -> Result<LearnerRun>
where
    P: PolicyClass + ?Sized,
    E: Environment,
    O: ArgmaxOracle + ?Sized,
{
    if env.num_actions() != config.num_actions {
        return Err(Error::Domain(format!(
            "environment has K = {} but config has K = {}",
            env.num_actions(),
            config.num_actions
        )));
    }
    let calls_at_start = oracle.calls();
    let mut learner = Learner::new(config, class)?;
    let mut tracker = Tracker::new(rounds.min(1 << 24) as usize);
    for t in 1..=rounds {
        let Some(round) = env.next_round() else { break };
        let epoch = learner.state.epoch;
        let mu = learner.state.mu_prev;
        let rec = learner.step(round.context.clone(), |a| round.reward(a))?;
        if t < rounds {
            learner.end_epoch_if_due(oracle)?;
        }
        tracker.push(
            t,
            epoch,
            mu,
            rec.action.index(),
            rec.probability,
            rec.reward,
            round.optimal_reward,
            learner.state.counters.oracle_calls,
        );
    }
    let c = learner.state.counters;
    if oracle.calls() - calls_at_start != c.oracle_calls {
        return Err(Error::Contract(format!(
            "oracle reports {} calls, epoch accounting has {}",
            oracle.calls() - calls_at_start,
            c.oracle_calls
        )));
    }
    Ok(LearnerRun {
        output: tracker.finish("iltcb", config.seed, c.oracle_calls, c.solves, c.ascent_steps),
        epochs: learner.epochs,
    })
}
