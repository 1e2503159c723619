//! Turning a labelled multiclass file into a bandit problem.
//!
//! Only the reward of the chosen action is revealed: 1 if it matches the
//! label. Usage: `cargo run --example supervised_dataset -- [path] [K]`.

use std::fs::File;
use std::io::BufReader;

use cbandit::harness::dataset::{read_examples, supervised_to_bandit};
use cbandit::policies::LinearPolicies;
use cbandit::{bandit, cover, AlgoConfig, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args
        .next()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/sample.tsv").into());
    let k: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);

    let examples = read_examples(BufReader::new(File::open(&path)?), k)?;
    let dim = examples
        .iter()
        .flat_map(|e| e.context.features().iter().map(|&(i, _)| i as usize + 1))
        .max()
        .unwrap_or(1);
    let rounds = examples.len() as u64;
    println!("{rounds} examples, {k} classes, {dim} features");

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let class = LinearPolicies::random(50, k, dim, &mut rng)?;
    let iltcb = bandit::run(AlgoConfig::new(k), &class, supervised_to_bandit(examples.clone(), k)?, rounds)?;
    let cov = cover::run(4, 0.1, supervised_to_bandit(examples, k)?, rounds, 0)?;
    println!("iltcb over 50 random linear policies: pv loss {:.4}", iltcb.output.summary.pv_loss);
    println!("cover with 4 online learners:         pv loss {:.4}", cov.summary.pv_loss);
    Ok(())
}
