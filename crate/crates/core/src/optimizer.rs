//! Coordinate descent for the low-regret / low-variance feasibility problem.
//!
//! Given a history of length `t`, a floor `μ` and per-policy prices
//! `b_π = RegHat_t(π) / (ψ μ)`, the solver finds sparse weights `Q` with
//!
//! ```text
//!   Σ_π Q(π) b_π ≤ 2K                                  (low regret)
//!   Ê_x[1 / Q^μ(π(x)|x)] ≤ 2K + b_π   for every π      (low variance)
//!   Σ_π Q(π) ≤ 1
//! ```
//!
//! Each pass rescales `Q` onto the regret budget, asks the oracle for the
//! policy with the largest variance violation, and raises that policy's
//! weight by the step that maximizes a quadratic lower bound on the decrease
//! of the potential
//!
//! ```text
//!   Φ(Q) = t μ ( Ê_x[RE(U ‖ Q^μ(·|x))] / (1 − Kμ) + Σ_π Q(π) b_π / (2K) ).
//! ```
//!
//! The potential never increases on a rescale and drops by at least
//! `t μ² / (4 (1 − Kμ))` per ascent step, which caps the number of steps at
//! `4 ln(1/(Kμ)) / μ` from a cold start.

use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::estimator::reward_estimate;
use crate::oracle::{find_violating_policy, ArgmaxOracle, ProbTable};
use crate::sampler::{conditional_weights, SparseWeights};
use crate::types::{History, PolicyClass, PolicyId};

/// One solve of the feasibility problem: history, floor and regret prices.
///
/// Prices `b_π` are computed on first use and cached, so only policies the
/// oracle returns (or that sit in the support of `Q`) are ever evaluated.
pub struct OpInstance<'a, P: ?Sized> {
    history: &'a History,
    class: &'a P,
    mu: f64,
    psi: f64,
    best: PolicyId,
    best_reward: f64,
    prices: RefCell<HashMap<PolicyId, f64>>,
}

impl<'a, P: PolicyClass + ?Sized> OpInstance<'a, P> {
    /// Computes `π_t` with one oracle call.
    pub fn new<O: ArgmaxOracle + ?Sized>(
        history: &'a History,
        class: &'a P,
        mu: f64,
        psi: f64,
        oracle: &mut O,
    ) -> Result<Self> {
        let best = crate::estimator::best_estimated_policy(history, oracle)?;
        Self::with_best(history, class, mu, psi, best)
    }

    /// Uses a precomputed empirical best policy.
    pub fn with_best(history: &'a History, class: &'a P, mu: f64, psi: f64, best: PolicyId) -> Result<Self> {
        let k = class.num_actions();
        if history.is_empty() {
            return Err(Error::EmptyHistory);
        }
        if history.num_actions() != k {
            return domain("history and policy class disagree on K");
        }
        if !(mu >= 0.0 && mu <= 0.5 / k as f64) {
            return domain(format!("mu {mu} is outside [0, 1/(2K)]"));
        }
        if !(psi > 0.0) {
            return domain("psi must be positive");
        }
        let best_reward = reward_estimate(best, history, class)?;
        let mut prices = HashMap::new();
        prices.insert(best, 0.0);
        Ok(Self {
            history,
            class,
            mu,
            psi,
            best,
            best_reward,
            prices: RefCell::new(prices),
        })
    }

    #[inline]
    pub fn history(&self) -> &'a History {
        self.history
    }

    #[inline]
    pub fn class(&self) -> &'a P {
        self.class
    }

    #[inline]
    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn psi(&self) -> f64 {
        self.psi
    }

    #[inline]
    pub fn num_actions(&self) -> usize {
        self.class.num_actions()
    }

    #[inline]
    pub fn best(&self) -> PolicyId {
        self.best
    }

    #[inline]
    pub fn best_reward(&self) -> f64 {
        self.best_reward
    }

    fn t(&self) -> f64 {
        self.history.len() as f64
    }

    /// `b_π = (R̂(π_t) − R̂(π)) / (ψ μ)`.
    pub fn price(&self, policy: PolicyId) -> f64 {
        if let Some(b) = self.prices.borrow().get(&policy) {
            return *b;
        }
        // history is nonempty, so the estimate cannot fail
        let r = reward_estimate(policy, self.history, self.class).unwrap_or(0.0);
        let b = (self.best_reward - r) / (self.psi * self.mu);
        self.prices.borrow_mut().insert(policy, b);
        b
    }

    /// Number of prices materialized so far.
    pub fn prices_materialized(&self) -> usize {
        self.prices.borrow().len()
    }

    /// `Σ_π Q(π) (2K + b_π)`.
    pub fn budget_load(&self, q: &SparseWeights) -> f64 {
        let two_k = 2.0 * self.num_actions() as f64;
        q.iter().map(|(p, w)| w * (two_k + self.price(p))).sum()
    }

    /// `V_π`, `S_π` and `D_π` computed directly from `q` (no table).
    pub fn variance_stats(&self, q: &SparseWeights, policy: PolicyId) -> VarianceStats {
        let keep = 1.0 - self.num_actions() as f64 * self.mu;
        let (mut v, mut s) = (Sum::default(), Sum::default());
        for x in self.history.contexts() {
            let a = self.class.evaluate(policy, x).index();
            let qx = conditional_weights(q, x, self.class);
            let inv = 1.0 / (keep * qx[a] + self.mu);
            v.add(inv);
            s.add(inv * inv);
        }
        self.finish_stats(policy, v.value(), s.value())
    }

    pub(crate) fn variance_stats_from_table(&self, policy: PolicyId, table: &ProbTable) -> Result<VarianceStats> {
        if table.len() != self.history.len() {
            return Err(Error::Contract("probability table does not match history".into()));
        }
        let keep = 1.0 - self.num_actions() as f64 * self.mu;
        let (mut v, mut s) = (Sum::default(), Sum::default());
        for (i, x) in self.history.contexts().enumerate() {
            let a = self.class.evaluate(policy, x).index();
            let inv = 1.0 / (keep * table.get(a, i) + self.mu);
            v.add(inv);
            s.add(inv * inv);
        }
        Ok(self.finish_stats(policy, v.value(), s.value()))
    }

    fn finish_stats(&self, policy: PolicyId, v_sum: f64, s_sum: f64) -> VarianceStats {
        let t = self.t();
        let v = v_sum / t;
        let s = s_sum / t;
        let two_k = 2.0 * self.num_actions() as f64;
        VarianceStats {
            v,
            s,
            d: v - (two_k + self.price(policy)),
        }
    }

    /// Smoothed `Q^μ(a|x_i)` for every history context, row-major.
    pub fn smoothed_matrix(&self, q: &SparseWeights) -> Vec<f64> {
        let k = self.num_actions();
        let keep = 1.0 - k as f64 * self.mu;
        let mut out = Vec::with_capacity(self.history.len() * k);
        for x in self.history.contexts() {
            out.extend(conditional_weights(q, x, self.class).into_iter().map(|v| keep * v + self.mu));
        }
        out
    }

    fn potential_with(&self, q: &SparseWeights, smoothed: impl Fn(usize, usize) -> f64) -> Result<f64> {
        let k = self.num_actions();
        let u = 1.0 / k as f64;
        let mut re = Sum::default();
        for i in 0..self.history.len() {
            for a in 0..k {
                let qa = smoothed(i, a);
                if !(qa > 0.0) {
                    return domain("smoothed probability is zero; relative entropy undefined");
                }
                re.add(u * (u / qa).ln() + qa - u);
            }
        }
        let mut price_term = Sum::default();
        for (p, w) in q.iter() {
            price_term.add(w * self.price(p));
        }
        let t = self.t();
        let kmu = k as f64 * self.mu;
        Ok(t * self.mu * (re.value() / t / (1.0 - kmu) + price_term.value() / (2.0 * k as f64)))
    }

    pub(crate) fn potential_from_table(&self, q: &SparseWeights, table: &ProbTable) -> Result<f64> {
        let keep = 1.0 - self.num_actions() as f64 * self.mu;
        self.potential_with(q, |i, a| keep * table.get(a, i) + self.mu)
    }
}

/// Variance statistics of one policy under `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceStats {
    /// `Ê_x[1 / Q^μ(π(x)|x)]`
    pub v: f64,
    /// `Ê_x[1 / Q^μ(π(x)|x)²]`
    pub s: f64,
    /// `V − (2K + b_π)`; positive iff the variance constraint is violated.
    pub d: f64,
}

/// Outcome of the rescaling step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rescale {
    pub applied: bool,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Rescale,
    Ascent,
}

/// Potential before and after one mutation of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub before: f64,
    pub after: f64,
}

impl TraceStep {
    pub fn delta(&self) -> f64 {
        self.after - self.before
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    /// Record the potential before and after every step.
    pub verify: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub q: SparseWeights,
    /// Number of ascent steps taken.
    pub ascent_steps: usize,
    pub rescales: usize,
    /// Oracle calls made by the loop: one per pass, including the pass that halts.
    pub oracle_calls: u64,
    pub trace: Vec<TraceStep>,
}

impl SolveReport {
    /// Potential values in order (first `before`, then every `after`).
    pub fn potential_trace(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.trace.first().map(|s| s.before).into_iter().collect();
        out.extend(self.trace.iter().map(|s| s.after));
        out
    }
}

/// `4 ln(1/(Kμ)) / μ`: the cold-start cap on ascent steps.
pub fn iteration_bound(num_actions: usize, mu: f64) -> f64 {
    4.0 * (1.0 / (num_actions as f64 * mu)).ln() / mu
}

/// Hard cap on ascent steps before the solver reports a bug.
///
/// From a nonzero start the price term of the potential adds at most `tμ`,
/// hence the extra `4(1 − Kμ)/μ` steps.
pub fn iteration_budget(num_actions: usize, mu: f64, warm: bool) -> usize {
    let mut bound = iteration_bound(num_actions, mu);
    if warm {
        bound += 4.0 * (1.0 - num_actions as f64 * mu) / mu;
    }
    bound.ceil() as usize + 8
}

pub fn variance_stats<P: PolicyClass + ?Sized>(
    q: &SparseWeights,
    policy: PolicyId,
    inst: &OpInstance<'_, P>,
) -> VarianceStats {
    inst.variance_stats(q, policy)
}

/// Rescales `q` onto the regret budget `Σ Q(π)(2K + b_π) ≤ 2K` if it is exceeded.
pub fn rescale_if_needed<P: PolicyClass + ?Sized>(q: &mut SparseWeights, inst: &OpInstance<'_, P>) -> Rescale {
    let two_k = 2.0 * inst.num_actions() as f64;
    let load = inst.budget_load(q);
    if load > two_k {
        let c = two_k / load;
        q.scale(c);
        Rescale { applied: true, c }
    } else {
        Rescale {
            applied: false,
            c: 1.0,
        }
    }
}

/// Step size `α = (V + D) / (2 (1 − Kμ) S)` for a violated constraint.
pub fn ascent_amount(stats: &VarianceStats, num_actions: usize, mu: f64) -> Result<f64> {
    if !(stats.d > 0.0) {
        return Err(Error::Contract(format!(
            "ascent step requires a violated constraint (D = {})",
            stats.d
        )));
    }
    Ok((stats.v + stats.d) / (2.0 * (1.0 - num_actions as f64 * mu) * stats.s))
}

/// Adds `α` to `Q(policy)`; returns `α`.
pub fn ascent_step<P: PolicyClass + ?Sized>(
    q: &mut SparseWeights,
    policy: PolicyId,
    stats: &VarianceStats,
    inst: &OpInstance<'_, P>,
) -> Result<f64> {
    let alpha = ascent_amount(stats, inst.num_actions(), inst.mu())?;
    q.increment(policy, alpha);
    Ok(alpha)
}

/// `Φ(q)`, computed directly from `q`.
pub fn potential<P: PolicyClass + ?Sized>(q: &SparseWeights, inst: &OpInstance<'_, P>) -> Result<f64> {
    let k = inst.num_actions();
    let m = inst.smoothed_matrix(q);
    inst.potential_with(q, |i, a| m[i * k + a])
}

/// Unnormalized relative entropy `Σ_a p_a ln(p_a/q_a) + q_a − p_a`.
pub fn relative_entropy(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&pa, &qa)| {
            let log_term = if pa > 0.0 { pa * (pa / qa).ln() } else { 0.0 };
            log_term + qa - pa
        })
        .sum()
}

/// Runs coordinate descent from `q_init`, building a fresh probability table.
pub fn solve_op<P, O>(
    inst: &OpInstance<'_, P>,
    q_init: SparseWeights,
    oracle: &mut O,
    opts: SolveOptions,
) -> Result<SolveReport>
where
    P: PolicyClass + ?Sized,
    O: ArgmaxOracle + ?Sized,
{
    let mut table = ProbTable::build(&q_init, inst.history().contexts(), inst.class());
    solve_op_with_table(inst, q_init, oracle, &mut table, opts)
}

/// Runs coordinate descent from `q_init`; `table` must hold `Q(a|x_i)` for
/// `q_init` over the instance history and is kept in sync with every update.
pub fn solve_op_with_table<P, O>(
    inst: &OpInstance<'_, P>,
    q_init: SparseWeights,
    oracle: &mut O,
    table: &mut ProbTable,
    opts: SolveOptions,
) -> Result<SolveReport>
where
    P: PolicyClass + ?Sized,
    O: ArgmaxOracle + ?Sized,
{
    let k = inst.num_actions();
    let mu = inst.mu();
    if !(mu > 0.0) {
        return domain("coordinate descent needs a positive probability floor");
    }
    let budget = iteration_budget(k, mu, !q_init.is_empty());
    let mut q = q_init;
    let mut report = SolveReport {
        q: SparseWeights::new(),
        ascent_steps: 0,
        rescales: 0,
        oracle_calls: 0,
        trace: Vec::new(),
    };

    loop {
        let before = if opts.verify {
            Some(inst.potential_from_table(&q, table)?)
        } else {
            None
        };
        let r = rescale_if_needed(&mut q, inst);
        if r.applied {
            table.apply_rescale(r.c);
            report.rescales += 1;
            if let Some(before) = before {
                let after = inst.potential_from_table(&q, table)?;
                report.trace.push(TraceStep {
                    kind: StepKind::Rescale,
                    before,
                    after,
                });
            }
        }

        report.oracle_calls += 1;
        let Some(v) = find_violating_policy(&q, inst, oracle, table)? else {
            break;
        };
        if report.ascent_steps >= budget {
            return Err(Error::IterationBudgetExceeded { budget });
        }
        let before = if opts.verify {
            Some(inst.potential_from_table(&q, table)?)
        } else {
            None
        };
        let alpha = ascent_step(&mut q, v.policy, &v.stats, inst)?;
        table.apply_increment(v.policy, alpha, inst.history().contexts(), inst.class())?;
        report.ascent_steps += 1;
        if let Some(before) = before {
            let after = inst.potential_from_table(&q, table)?;
            report.trace.push(TraceStep {
                kind: StepKind::Ascent,
                before,
                after,
            });
        }
    }

    report.q = q;
    Ok(report)
}

/// Slack of every constraint, found by enumerating the whole class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    /// `2K − Σ Q(π) b_π`
    pub regret_slack: f64,
    /// `min_π (2K + b_π − V_π)`
    pub variance_slack: f64,
    pub worst_policy: PolicyId,
    pub total_weight: f64,
}

impl Feasibility {
    pub fn holds(&self, tol: f64) -> bool {
        self.regret_slack >= -tol && self.variance_slack >= -tol && self.total_weight <= 1.0 + 1e-12
    }
}

/// Checks both constraint families for every policy in the class.
pub fn check_feasibility<P: PolicyClass + ?Sized>(q: &SparseWeights, inst: &OpInstance<'_, P>) -> Feasibility {
    let k = inst.num_actions();
    let two_k = 2.0 * k as f64;
    let m = inst.smoothed_matrix(q);
    let t = inst.history().len() as f64;
    let regret_slack = two_k - q.iter().map(|(p, w)| w * inst.price(p)).sum::<f64>();
    let mut worst = (PolicyId(0), f64::INFINITY);
    for p in (0..inst.class().len()).map(PolicyId) {
        let v: f64 = inst
            .history()
            .contexts()
            .enumerate()
            .map(|(i, x)| 1.0 / m[i * k + inst.class().evaluate(p, x).index()])
            .sum::<f64>()
            / t;
        let slack = two_k + inst.price(p) - v;
        if slack < worst.1 {
            worst = (p, slack);
        }
    }
    Feasibility {
        regret_slack,
        variance_slack: worst.1,
        worst_policy: worst.0,
        total_weight: q.total(),
    }
}

// Neumaier compensated summation.
#[derive(Default, Clone, Copy)]
struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::EnumerationOracle;
    use crate::policies::TabularPolicies;
    use crate::types::{ActionId, Context, InteractionRecord};

    fn single_context(k: usize, action: usize) -> (TabularPolicies, History) {
        let class = TabularPolicies::new(k, vec![vec![ActionId(action)]]).unwrap();
        let mut h = History::new(k);
        h.push(InteractionRecord::new(Context::from_id(0), ActionId(0), 0.0, 0.5).unwrap())
            .unwrap();
        (class, h)
    }

    #[test]
    fn variance_stats_at_zero_weights() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        let s = variance_stats(&SparseWeights::new(), PolicyId(0), &inst);
        assert!((s.v - 10.0).abs() < 1e-12);
        assert!((s.s - 100.0).abs() < 1e-10);
        assert!((s.d - 6.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_coverage_has_unit_variance() {
        let (class, h) = single_context(2, 1);
        let inst = OpInstance::with_best(&h, &class, 0.0, 100.0, PolicyId(0)).unwrap();
        let q = SparseWeights::from_entries([(PolicyId(0), 1.0)]).unwrap();
        let s = variance_stats(&q, PolicyId(0), &inst);
        assert_eq!((s.v, s.s), (1.0, 1.0));
    }

    #[test]
    fn rescale_examples() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        // force b = 4 for policy 0 via the cache
        inst.prices.borrow_mut().insert(PolicyId(0), 4.0);
        let mut q = SparseWeights::from_entries([(PolicyId(0), 1.0)]).unwrap();
        let r = rescale_if_needed(&mut q, &inst);
        assert!(r.applied);
        assert!((r.c - 0.5).abs() < 1e-15);
        assert!((q.get(PolicyId(0)) - 0.5).abs() < 1e-15);
        assert!((inst.budget_load(&q) - 4.0).abs() < 1e-12);

        let mut empty = SparseWeights::new();
        assert!(!rescale_if_needed(&mut empty, &inst).applied);

        let mut ok = SparseWeights::from_entries([(PolicyId(0), 0.2)]).unwrap();
        let r = rescale_if_needed(&mut ok, &inst);
        assert!(!r.applied);
        assert_eq!(ok.get(PolicyId(0)), 0.2);
    }

    #[test]
    fn ascent_amount_examples() {
        let s = VarianceStats { v: 10.0, s: 100.0, d: 6.0 };
        assert!((ascent_amount(&s, 2, 0.1).unwrap() - 0.1).abs() < 1e-15);
        let eps = VarianceStats { v: 4.0 + 1e-12, s: 20.0, d: 1e-12 };
        let a = ascent_amount(&eps, 2, 0.1).unwrap();
        assert!(a > 0.0 && (a - 4.0 / (2.0 * 0.8 * 20.0)).abs() < 1e-9);
        assert!(ascent_amount(&VarianceStats { v: 3.0, s: 9.0, d: 0.0 }, 2, 0.1).is_err());
    }

    #[test]
    fn potential_examples() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        let phi = potential(&SparseWeights::new(), &inst).unwrap();
        let expect = 0.1 * (5f64.ln() + 0.2 - 1.0) / 0.8;
        assert!((phi - expect).abs() < 1e-14);
        assert!((phi - 0.10118).abs() < 1e-5);
        let cap = 0.1 * (1.0 / 0.2f64).ln() / 0.8;
        assert!(phi <= cap);
    }

    #[test]
    fn uniform_smoothed_distribution_has_zero_potential() {
        // two policies splitting weight evenly over K=2 actions: Q(a|x) = 1/2 each
        let class = TabularPolicies::new(2, vec![vec![ActionId(0)], vec![ActionId(1)]]).unwrap();
        let mut h = History::new(2);
        h.push(InteractionRecord::new(Context::from_id(0), ActionId(0), 0.0, 0.5).unwrap())
            .unwrap();
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        let q = SparseWeights::from_entries([(PolicyId(0), 0.5), (PolicyId(1), 0.5)]).unwrap();
        assert!(potential(&q, &inst).unwrap().abs() < 1e-15);
    }

    #[test]
    fn relative_entropy_basics() {
        assert_eq!(relative_entropy(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert!(relative_entropy(&[0.5, 0.5], &[0.9, 0.1]) > 0.0);
        // unnormalized: scaling q up adds the mass difference
        let v = relative_entropy(&[1.0], &[2.0]);
        assert!((v - (0.5f64.ln() + 1.0)).abs() < 1e-15);
    }

    #[test]
    fn solve_halts_immediately_at_the_cap() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.25, 100.0, PolicyId(0)).unwrap();
        let mut oracle = EnumerationOracle::new(&class);
        let rep = solve_op(&inst, SparseWeights::new(), &mut oracle, SolveOptions::default()).unwrap();
        assert!(rep.q.is_empty());
        assert_eq!(rep.ascent_steps, 0);
        assert_eq!(rep.oracle_calls, 1);
    }

    #[test]
    fn single_policy_solution_covers_its_action() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        let mut oracle = EnumerationOracle::new(&class);
        let rep = solve_op(&inst, SparseWeights::new(), &mut oracle, SolveOptions { verify: true }).unwrap();
        let w = rep.q.get(PolicyId(0));
        assert!(w >= 0.1875 - 1e-12, "w = {w}");
        assert!(0.8 * w + 0.1 >= 0.25 - 1e-12);
        assert!(check_feasibility(&rep.q, &inst).holds(1e-9));
        assert!(rep.ascent_steps as f64 <= iteration_bound(2, 0.1));
        assert_eq!(rep.oracle_calls, rep.ascent_steps as u64 + 1);
    }

    #[test]
    fn violating_policy_matches_optimizer_example() {
        let (class, h) = single_context(2, 0);
        let inst = OpInstance::with_best(&h, &class, 0.1, 100.0, PolicyId(0)).unwrap();
        let q = SparseWeights::new();
        let table = ProbTable::build(&q, h.contexts(), &class);
        let mut oracle = EnumerationOracle::new(&class);
        let v = find_violating_policy(&q, &inst, &mut oracle, &table).unwrap().unwrap();
        assert_eq!(v.policy, PolicyId(0));
        assert!((v.stats.d - 6.0).abs() < 1e-12);

        let capped = OpInstance::with_best(&h, &class, 0.25, 100.0, PolicyId(0)).unwrap();
        assert!(find_violating_policy(&q, &capped, &mut oracle, &table).unwrap().is_none());
    }

    #[test]
    fn prices_are_lazy() {
        let class = TabularPolicies::new(2, (0..10).map(|i| vec![ActionId(i % 2)]).collect()).unwrap();
        let mut h = History::new(2);
        h.push(InteractionRecord::new(Context::from_id(0), ActionId(1), 1.0, 0.5).unwrap())
            .unwrap();
        let inst = OpInstance::with_best(&h, &class, 0.25, 100.0, PolicyId(1)).unwrap();
        assert_eq!(inst.prices_materialized(), 1);
        assert!((inst.price(PolicyId(0)) - 2.0 / 25.0).abs() < 1e-15);
        assert_eq!(inst.price(PolicyId(1)), 0.0);
        assert_eq!(inst.prices_materialized(), 2);
    }

    #[test]
    fn instance_validation() {
        let (class, h) = single_context(2, 0);
        assert!(OpInstance::with_best(&h, &class, 0.3, 100.0, PolicyId(0)).is_err());
        assert!(OpInstance::with_best(&h, &class, -0.1, 100.0, PolicyId(0)).is_err());
        let zero = OpInstance::with_best(&h, &class, 0.0, 100.0, PolicyId(0)).unwrap();
        let mut oracle = EnumerationOracle::new(&class);
        assert!(solve_op(&zero, SparseWeights::new(), &mut oracle, SolveOptions::default()).is_err());
        let empty = History::new(2);
        assert!(OpInstance::with_best(&empty, &class, 0.1, 100.0, PolicyId(0)).is_err());
    }
}
