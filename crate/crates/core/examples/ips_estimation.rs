//! Off-policy evaluation with inverse propensity scores.
//!
//! Logs uniformly at random on a small synthetic problem, then compares each
//! policy's IPS estimate with its true expected reward.

use cbandit::estimator::{best_estimated_policy, reward_estimate};
use cbandit::harness::instances::SyntheticInstance;
use cbandit::harness::Environment;
use cbandit::oracle::EnumerationOracle;
use cbandit::{ActionId, History, InteractionRecord, PolicyClass, PolicyId, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let inst = SyntheticInstance::reference();
    let k = inst.num_actions();
    let mut env = inst.environment(7);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut history = History::new(k);
    for _ in 0..20_000 {
        let round = env.next_round().expect("synthetic streams are endless");
        let a = ActionId(rng.random_range(0..k));
        history.push(InteractionRecord::new(round.context.clone(), a, round.reward(a), 1.0 / k as f64)?)?;
    }

    println!("policy  true    estimate");
    for p in (0..inst.class().len()).map(PolicyId) {
        let est = reward_estimate(p, &history, inst.class())?;
        println!("{:>6}  {:.4}  {:.4}", p.index(), inst.policy_rewards()[p.index()], est);
    }
    let mut oracle = EnumerationOracle::new(inst.class());
    let best = best_estimated_policy(&history, &mut oracle)?;
    println!("empirical best: {}  (true best: {})", best.index(), inst.best_policy().index());
    Ok(())
}
