//! The epoch-scheduled learner against ε-greedy on the reference instance.
//!
//! Both see the same context and reward stream. Usage:
//! `cargo run --release --example iltcb_simulation -- [rounds] [metrics.jsonl]`

use std::fs::File;
use std::io::BufWriter;

use cbandit::bandit;
use cbandit::harness::baselines::{run_baseline, BaselineKind, ClassGreedy};
use cbandit::harness::instances::SyntheticInstance;
use cbandit::harness::metrics::write_jsonl;
use cbandit::{AlgoConfig, EpochSchedule, Result};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let rounds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1 << 14);
    let out = args.next();

    let inst = SyntheticInstance::reference();
    let mut cfg = AlgoConfig::new(inst.num_actions());
    cfg.warm_start = true;
    let run = bandit::run(cfg, inst.class(), inst.environment(11), rounds)?;
    let greedy = run_baseline(
        BaselineKind::EpsilonGreedy {
            epsilon: 0.1,
            schedule: EpochSchedule::Doubling,
        },
        ClassGreedy::new(inst.class()),
        inst.environment(11),
        rounds,
        0,
    )?;

    for s in [&run.output.summary, &greedy.summary] {
        println!(
            "{:<8} average regret {:.4}  pv loss {:.4}  oracle calls {}",
            s.algo,
            s.average_regret.unwrap_or(f64::NAN),
            s.pv_loss,
            s.oracle_calls
        );
    }
    let last = run.epochs.last().expect("at least one epoch");
    println!(
        "final epoch: best policy {} (true best {}), support {}, mu {:.4}",
        last.best.index(),
        inst.best_policy().index(),
        last.support,
        last.mu
    );
    if let Some(path) = out {
        write_jsonl(&run.output, BufWriter::new(File::create(&path)?))?;
        println!("wrote {path}");
    }
    Ok(())
}
