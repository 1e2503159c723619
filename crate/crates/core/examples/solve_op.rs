//! Solving the per-epoch optimization problem directly.
//!
//! Builds a logged history, runs the coordinate-descent solver from an empty
//! distribution, and prints the potential trace and the constraint slacks.

use cbandit::harness::instances::SyntheticInstance;
use cbandit::harness::Environment;
use cbandit::optimizer::{check_feasibility, iteration_bound, solve_op, OpInstance, SolveOptions};
use cbandit::oracle::{ArgmaxOracle, EnumerationOracle};
use cbandit::sampler::SparseWeights;
use cbandit::{ActionId, History, InteractionRecord, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let inst = SyntheticInstance::reference();
    let k = inst.num_actions();
    let mut env = inst.environment(3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut history = History::new(k);
    for _ in 0..2000 {
        let round = env.next_round().expect("endless");
        let a = ActionId(rng.random_range(0..k));
        history.push(InteractionRecord::new(round.context.clone(), a, round.reward(a), 1.0 / k as f64)?)?;
    }

    let mu = 0.02;
    let mut oracle = EnumerationOracle::new(inst.class());
    let op = OpInstance::new(&history, inst.class(), mu, 100.0, &mut oracle)?;
    let report = solve_op(&op, SparseWeights::new(), &mut oracle, SolveOptions { verify: true })?;

    println!("best policy by IPS: {}", op.best().index());
    println!(
        "ascent steps {} (cold-start bound {:.0}), rescales {}, oracle calls {}",
        report.ascent_steps,
        iteration_bound(k, mu),
        report.rescales,
        oracle.calls()
    );
    let trace = report.potential_trace();
    println!("potential: {:.4} -> {:.4}", trace.first().unwrap_or(&0.0), trace.last().unwrap_or(&0.0));
    println!("support:");
    for (p, w) in report.q.iter() {
        println!("  policy {:>2}  weight {w:.4}  price {:.3}", p.index(), op.price(p));
    }
    let f = check_feasibility(&report.q, &op);
    println!(
        "regret slack {:.4}, worst variance slack {:.4}, total weight {:.4}",
        f.regret_slack, f.variance_slack, f.total_weight
    );
    Ok(())
}
