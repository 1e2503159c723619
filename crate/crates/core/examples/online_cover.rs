//! Online Cover on a linearly separable stream with online least-squares learners.
//!
//! Compares cover sizes; `n = 1` reduces to greedy with a decaying floor.

use cbandit::cover;
use cbandit::harness::instances::SeparableStream;
use cbandit::Result;

fn main() -> Result<()> {
    let rounds = 20_000;
    for n in [1, 2, 4, 8] {
        let env = SeparableStream::new(10, 77, 5)?;
        let out = cover::run(n, 0.1, env, rounds, 0)?;
        let tail: f64 = out.records[rounds as usize / 2..].iter().map(|r| r.reward).sum::<f64>()
            / (rounds / 2) as f64;
        println!(
            "n = {n}: pv loss {:.4}, second-half accuracy {:.4}",
            out.summary.pv_loss, tail
        );
    }
    Ok(())
}
