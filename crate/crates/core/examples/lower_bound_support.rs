//! Every policy of the lower-bound instance needs weight.
//!
//! On this instance all policies earn the same reward, but each one is the
//! only policy playing its action on its context. Dropping any of them from
//! the solver's distribution breaks that policy's variance constraint.

use cbandit::harness::instances::{gen_lower_bound_instance, support_lb_check};
use cbandit::harness::Environment;
use cbandit::optimizer::{solve_op, OpInstance, SolveOptions};
use cbandit::oracle::EnumerationOracle;
use cbandit::sampler::SparseWeights;
use cbandit::{ActionId, History, InteractionRecord, PolicyClass, PolicyId, Result};

fn main() -> Result<()> {
    let (k, mu) = (3, 0.002);
    let n = (1.0 / (8.0 * k as f64 * mu)).floor() as usize;
    let lb = gen_lower_bound_instance(n, k)?;
    println!("{n} contexts, {} policies", lb.len());

    let mut env = lb.environment(1);
    let mut history = History::new(k);
    for t in 0..2000 {
        let round = env.next_round().expect("endless");
        let a = ActionId((round.context.id() as usize + t) % k);
        history.push(InteractionRecord::new(round.context.clone(), a, round.reward(a), 1.0 / k as f64)?)?;
    }

    let mut oracle = EnumerationOracle::new(&lb);
    let op = OpInstance::new(&history, &lb, mu, 100.0, &mut oracle)?;
    let q = solve_op(&op, SparseWeights::new(), &mut oracle, SolveOptions::default())?.q;
    println!("solver support: {} of {}", q.support_len(), lb.len());

    let mut violated = 0;
    for p in (0..lb.len()).map(PolicyId) {
        if support_lb_check(&lb, &history, mu, 100.0, &q, p)? {
            violated += 1;
        }
    }
    println!("dropping a policy breaks its constraint in {violated} of {} cases", lb.len());
    Ok(())
}
