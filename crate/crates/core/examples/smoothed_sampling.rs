//! From a sparse distribution over policies to a distribution over actions.
//!
//! The weights need not sum to one: the leftover mass goes to a default
//! policy, and every action keeps at least probability `μ`.

use cbandit::policies::TabularPolicies;
use cbandit::sampler::{action_distribution, conditional_weights, SparseWeights};
use cbandit::{ActionId, Context, PolicyId, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    // Three policies over two contexts and three actions.
    let class = TabularPolicies::new(
        3,
        vec![
            vec![ActionId(0), ActionId(1)],
            vec![ActionId(1), ActionId(1)],
            vec![ActionId(2), ActionId(0)],
        ],
    )?;
    let q = SparseWeights::from_entries([(PolicyId(1), 0.5), (PolicyId(2), 0.3)])?;
    let mu = 0.05;

    for x in [Context::from_id(0), Context::from_id(1)] {
        let raw = conditional_weights(&q, &x, &class);
        let dist = action_distribution(&x, &q, PolicyId(0), mu, &class)?;
        println!("context {}: Q(a|x) = {raw:?}", x.id());
        println!("           smoothed = {:?}", dist.probs());

        let mut rng = ChaCha8Rng::seed_from_u64(x.id());
        let mut counts = [0usize; 3];
        for _ in 0..30_000 {
            counts[dist.draw(&mut rng).0.index()] += 1;
        }
        let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / 30_000.0).collect();
        println!("           sampled  = {freq:.3?}");
    }
    Ok(())
}
