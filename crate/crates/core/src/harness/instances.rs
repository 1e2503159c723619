//! Simulated environments.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};
use crate::harness::env::{Environment, Round};
use crate::optimizer::OpInstance;
use crate::policies::{gaussian, TabularPolicies};
use crate::sampler::SparseWeights;
use crate::types::{ActionId, Context, History, PolicyClass, PolicyId};

/// A finite-context environment with a tabular policy class.
///
/// Contexts are drawn uniformly from `0..num_contexts`; the reward of action
/// `a` on context `x` is `means[x][a]` plus uniform noise of half-width
/// `noise`, clipped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticInstance {
    means: Vec<Vec<f64>>,
    noise: f64,
    class: TabularPolicies,
    policy_rewards: Vec<f64>,
    best: PolicyId,
}

impl SyntheticInstance {
    pub fn new(means: Vec<Vec<f64>>, noise: f64, class: TabularPolicies) -> Result<Self> {
        let k = class.num_actions();
        if means.is_empty() {
            return domain("need at least one context");
        }
        if means.iter().any(|m| m.len() != k) {
            return domain("every context needs K reward means");
        }
        if means.iter().flatten().any(|m| !(0.0..=1.0).contains(m)) {
            return domain("reward means must lie in [0, 1]");
        }
        if !(0.0..=0.5).contains(&noise) {
            return domain("noise half-width must lie in [0, 0.5]");
        }
        let n = means.len() as f64;
        let policy_rewards: Vec<f64> = (0..class.len())
            .map(|p| {
                means
                    .iter()
                    .enumerate()
                    .map(|(x, m)| m[class.evaluate(PolicyId(p), &Context::from_id(x as u64)).index()])
                    .sum::<f64>()
                    / n
            })
            .collect();
        let best = PolicyId(
            policy_rewards
                .iter()
                .enumerate()
                .fold(0, |b, (i, &r)| if r > policy_rewards[b] { i } else { b }),
        );
        Ok(Self {
            means,
            noise,
            class,
            policy_rewards,
            best,
        })
    }

    /// The reference instance: K = 3, 20 policies, 32 contexts.
    ///
    /// Each context has one action with mean 0.6 and two with mean 0.4, plus
    /// uniform noise of half-width 0.1. One policy always picks the good
    /// action; each of the other 19 agrees with it except on one context.
    pub fn reference() -> Self {
        Self::perturbed(3, 32, 20, 0.2, 0.1, 1, 20_140_101).expect("reference parameters are valid")
    }

    /// An instance whose policies are local perturbations of the optimum.
    pub fn perturbed(
        num_actions: usize,
        num_contexts: usize,
        num_policies: usize,
        gap: f64,
        noise: f64,
        max_deviations: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_actions < 2 || num_policies < 1 || !(0.0..=0.6).contains(&gap) {
            return domain("need K >= 2, a nonempty class and a gap in [0, 0.6]");
        }
        if max_deviations == 0 || max_deviations > num_contexts {
            return domain("deviations per policy must be in 1..=num_contexts");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let low = 0.5 - gap / 2.0;
        let good: Vec<usize> = (0..num_contexts).map(|_| rng.random_range(0..num_actions)).collect();
        let means = good
            .iter()
            .map(|&g| (0..num_actions).map(|a| if a == g { low + gap } else { low }).collect())
            .collect();
        let star_at = rng.random_range(0..num_policies);
        let table = (0..num_policies)
            .map(|p| {
                let mut row: Vec<ActionId> = good.iter().map(|&g| ActionId(g)).collect();
                if p != star_at {
                    let m = rng.random_range(1..=max_deviations);
                    for x in sample_indices(&mut rng, num_contexts, m) {
                        let shift = rng.random_range(1..num_actions);
                        row[x] = ActionId((good[x] + shift) % num_actions);
                    }
                }
                row
            })
            .collect();
        Self::new(means, noise, TabularPolicies::new(num_actions, table)?)
    }

    pub fn num_actions(&self) -> usize {
        self.class.num_actions()
    }

    pub fn num_contexts(&self) -> usize {
        self.means.len()
    }

    pub fn class(&self) -> &TabularPolicies {
        &self.class
    }

    pub fn means(&self) -> &[Vec<f64>] {
        &self.means
    }

    /// Expected reward of every policy.
    pub fn policy_rewards(&self) -> &[f64] {
        &self.policy_rewards
    }

    /// `π*`, the policy with the highest expected reward (lowest index on ties).
    pub fn best_policy(&self) -> PolicyId {
        self.best
    }

    pub fn environment(&self, seed: u64) -> SyntheticEnvironment<'_> {
        SyntheticEnvironment {
            instance: self,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

pub struct SyntheticEnvironment<'a> {
    instance: &'a SyntheticInstance,
    rng: ChaCha8Rng,
}

impl Environment for SyntheticEnvironment<'_> {
    fn num_actions(&self) -> usize {
        self.instance.num_actions()
    }

    fn next_round(&mut self) -> Option<Round> {
        let inst = self.instance;
        let x = self.rng.random_range(0..inst.num_contexts());
        let noise = inst.noise;
        let rewards: Vec<f64> = inst.means[x]
            .iter()
            .map(|&m| {
                let e = if noise > 0.0 {
                    self.rng.random_range(-noise..=noise)
                } else {
                    0.0
                };
                (m + e).clamp(0.0, 1.0)
            })
            .collect();
        let context = one_hot(x);
        let star = inst.class.evaluate(inst.best, &context);
        Some(Round {
            optimal_reward: Some(rewards[star.index()]),
            rewards,
            context,
        })
    }
}

/// Context `x` with a single indicator feature, so online learners can
/// tell contexts apart too.
fn one_hot(x: usize) -> Context {
    Context::new(x as u64, vec![(x as u32, 1.0)]).expect("one feature is always valid")
}

/// Policies `π_ij` that play `j` on context `i` and `K − 1` elsewhere.
///
/// Policy index `p` maps to `i = p / (K − 1)`, `j = p % (K − 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LowerBoundInstance {
    num_contexts: usize,
    num_actions: usize,
}

/// The hard instance on `N` contexts and `K` actions: action `K − 1` always
/// pays 1 and every other action pays 0.
pub fn gen_lower_bound_instance(num_contexts: usize, num_actions: usize) -> Result<LowerBoundInstance> {
    if num_contexts < 1 || num_actions < 2 {
        return domain("need N >= 1 and K >= 2");
    }
    Ok(LowerBoundInstance {
        num_contexts,
        num_actions,
    })
}

impl LowerBoundInstance {
    pub fn num_contexts(&self) -> usize {
        self.num_contexts
    }

    /// `(i, j)` for policy index `p`.
    pub fn decode(&self, p: PolicyId) -> (usize, usize) {
        (p.index() / (self.num_actions - 1), p.index() % (self.num_actions - 1))
    }

    pub fn policy(&self, i: usize, j: usize) -> PolicyId {
        PolicyId(i * (self.num_actions - 1) + j)
    }

    pub fn rewards(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.num_actions];
        r[self.num_actions - 1] = 1.0;
        r
    }

    /// Expected reward of any policy: `1 − 1/N`.
    pub fn policy_reward(&self, _p: PolicyId) -> f64 {
        1.0 - 1.0 / self.num_contexts as f64
    }

    pub fn environment(&self, seed: u64) -> LowerBoundEnvironment {
        LowerBoundEnvironment {
            instance: *self,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl PolicyClass for LowerBoundInstance {
    fn len(&self) -> usize {
        (self.num_actions - 1) * self.num_contexts
    }

    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn evaluate(&self, policy: PolicyId, x: &Context) -> ActionId {
        let (i, j) = self.decode(policy);
        if x.id() == i as u64 {
            ActionId(j)
        } else {
            ActionId(self.num_actions - 1)
        }
    }
}

pub struct LowerBoundEnvironment {
    instance: LowerBoundInstance,
    rng: ChaCha8Rng,
}

impl Environment for LowerBoundEnvironment {
    fn num_actions(&self) -> usize {
        self.instance.num_actions
    }

    fn next_round(&mut self) -> Option<Round> {
        let x = self.rng.random_range(0..self.instance.num_contexts);
        let context = one_hot(x);
        let rewards = self.instance.rewards();
        // Every policy is optimal; regret is measured against π_{0,0}.
        let star = self.instance.evaluate(PolicyId(0), &context);
        Some(Round {
            optimal_reward: Some(rewards[star.index()]),
            rewards,
            context,
        })
    }
}

/// Whether `drop` violates its variance constraint once its weight in `q`
/// is set to zero: `V_drop(Q) > 2K + b_drop`, evaluated on `history`.
pub fn support_lb_check(
    instance: &LowerBoundInstance,
    history: &History,
    mu: f64,
    psi: f64,
    q: &SparseWeights,
    drop: PolicyId,
) -> Result<bool> {
    if drop.index() >= instance.len() {
        return domain(format!("policy {} is outside the class", drop.index()));
    }
    let mut oracle = crate::oracle::EnumerationOracle::new(instance);
    let inst = OpInstance::new(history, instance, mu, psi, &mut oracle)?;
    let mut q = q.clone();
    q.remove(drop);
    Ok(inst.variance_stats(&q, drop).d > 0.0)
}

/// A linearly separable two-class stream on the unit sphere in `R^d`.
///
/// The label is `1{w* · x > 0}`; playing the label pays 1.
pub struct SeparableStream {
    w_star: Vec<f64>,
    rng: ChaCha8Rng,
    t: u64,
}

impl SeparableStream {
    /// `w*` comes from `instance_seed`, the contexts from `stream_seed`.
    pub fn new(dim: usize, instance_seed: u64, stream_seed: u64) -> Result<Self> {
        if dim == 0 {
            return domain("dimension must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
        let w_star = unit_gaussian(dim, &mut rng);
        Ok(Self {
            w_star,
            rng: ChaCha8Rng::seed_from_u64(stream_seed),
            t: 0,
        })
    }

    pub fn w_star(&self) -> &[f64] {
        &self.w_star
    }
}

fn unit_gaussian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

impl Environment for SeparableStream {
    fn num_actions(&self) -> usize {
        2
    }

    fn next_round(&mut self) -> Option<Round> {
        self.t += 1;
        let x = unit_gaussian(self.w_star.len(), &mut self.rng);
        let margin: f64 = x.iter().zip(&self.w_star).map(|(a, b)| a * b).sum();
        let label = usize::from(margin > 0.0);
        let mut rewards = vec![0.0; 2];
        rewards[label] = 1.0;
        Some(Round {
            context: Context::from_dense(self.t, &x).ok()?,
            rewards,
            optimal_reward: Some(1.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::env::Environment;

    #[test]
    fn lower_bound_construction() {
        let lb = gen_lower_bound_instance(2, 3).unwrap();
        assert_eq!(lb.len(), 4);
        assert_eq!(lb.rewards(), vec![0.0, 0.0, 1.0]);
        for p in (0..4).map(PolicyId) {
            let (i, j) = lb.decode(p);
            assert_eq!(lb.policy(i, j), p);
            for x in 0..2u64 {
                let a = lb.evaluate(p, &Context::from_id(x));
                assert_eq!(a, if x == i as u64 { ActionId(j) } else { ActionId(2) });
            }
            // Exact expectation over the uniform context distribution.
            let r: f64 = (0..2)
                .map(|x| lb.rewards()[lb.evaluate(p, &Context::from_id(x)).index()])
                .sum::<f64>()
                / 2.0;
            assert_eq!(r, lb.policy_reward(p));
            assert_eq!(r, 0.5);
        }
        assert!(gen_lower_bound_instance(0, 3).is_err());
        assert!(gen_lower_bound_instance(2, 1).is_err());
    }

    #[test]
    fn reference_instance_shape() {
        let inst = SyntheticInstance::reference();
        assert_eq!(inst.num_actions(), 3);
        assert_eq!(inst.class().len(), 20);
        let best = inst.best_policy();
        assert!((inst.policy_rewards()[best.index()] - 0.6).abs() < 1e-12);
        for (p, &r) in inst.policy_rewards().iter().enumerate() {
            if p != best.index() {
                assert!(r < 0.6 - 1e-9);
            }
        }
        let mut env = inst.environment(3);
        for _ in 0..1000 {
            let round = env.next_round().unwrap();
            assert!(round.rewards.iter().all(|r| (0.0..=1.0).contains(r)));
        }
    }

    #[test]
    fn separable_stream_labels() {
        let mut s = SeparableStream::new(10, 1, 2).unwrap();
        for _ in 0..200 {
            let r = s.next_round().unwrap();
            let margin = r.context.dot(s.w_star());
            let label = usize::from(margin > 0.0);
            assert_eq!(r.rewards[label], 1.0);
            assert_eq!(r.rewards[1 - label], 0.0);
        }
    }

    fn lb_history(lb: &LowerBoundInstance, n: usize) -> History {
        let mut h = History::new(3);
        for t in 0..n {
            let x = Context::from_id((t % lb.num_contexts()) as u64);
            let a = t % 3;
            let r = lb.rewards()[a];
            h.push(crate::types::InteractionRecord::new(x, ActionId(a), r, 1.0 / 3.0).unwrap())
                .unwrap();
        }
        h
    }

    #[test]
    fn dropping_under_small_floor_violates() {
        let mu = 0.002;
        let n = (1.0 / (8.0 * 3.0 * mu)) as usize;
        let lb = gen_lower_bound_instance(n, 3).unwrap();
        let h = lb_history(&lb, 3000);
        let q = SparseWeights::new();
        for p in (0..lb.len()).map(PolicyId) {
            assert!(support_lb_check(&lb, &h, mu, 100.0, &q, p).unwrap());
        }
    }

    #[test]
    fn cap_floor_and_full_support_are_not_violated() {
        let lb = gen_lower_bound_instance(4, 3).unwrap();
        let h = lb_history(&lb, 600);
        assert!(!support_lb_check(&lb, &h, 1.0 / 6.0, 100.0, &SparseWeights::new(), PolicyId(0)).unwrap());

        let mu = 0.01;
        let w = 1.0 / lb.len() as f64;
        let q = SparseWeights::from_entries((0..lb.len()).map(|p| (PolicyId(p), w))).unwrap();
        let mut oracle = crate::oracle::EnumerationOracle::new(&lb);
        let inst = OpInstance::new(&h, &lb, mu, 100.0, &mut oracle).unwrap();
        // With full support nobody violates, and the check leaves the others alone.
        for p in (0..lb.len()).map(PolicyId) {
            assert!(inst.variance_stats(&q, p).d <= 0.0);
        }
    }
}
