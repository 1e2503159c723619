//! Plugging in your own argmax oracle.
//!
//! The learner touches the policy class only through [`ArgmaxOracle`]. Here
//! a wrapper logs the size of every dataset it is handed before delegating
//! to exhaustive search, and the run confirms the call accounting.

use cbandit::bandit::run_with_oracle;
use cbandit::estimator::CscDataset;
use cbandit::harness::instances::SyntheticInstance;
use cbandit::oracle::{ArgmaxOracle, EnumerationOracle};
use cbandit::{AlgoConfig, PolicyId, Result};

struct Logged<O> {
    inner: O,
    sizes: Vec<usize>,
}

impl<O: ArgmaxOracle> ArgmaxOracle for Logged<O> {
    fn argmax(&mut self, data: &CscDataset<'_>) -> Result<PolicyId> {
        self.sizes.push(data.len());
        self.inner.argmax(data)
    }

    fn calls(&self) -> u64 {
        self.inner.calls()
    }
}

fn main() -> Result<()> {
    let inst = SyntheticInstance::reference();
    let mut oracle = Logged {
        inner: EnumerationOracle::new(inst.class()),
        sizes: Vec::new(),
    };
    let run = run_with_oracle(AlgoConfig::new(3), inst.class(), inst.environment(0), 4096, &mut oracle)?;
    for e in &run.epochs {
        println!(
            "epoch {:>2}  tau {:>5}  mu {:.4}  oracle calls {:>2}  ascents {}",
            e.epoch, e.tau, e.mu, e.oracle_calls, e.ascent_steps
        );
    }
    println!("total calls {}, dataset sizes seen {:?}", oracle.calls(), oracle.sizes);
    Ok(())
}
