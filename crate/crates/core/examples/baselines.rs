//! ε-greedy and explore-first, each with both greedy engines.

use cbandit::harness::baselines::{run_baseline, BaselineKind, ClassGreedy, OlsGreedy};
use cbandit::harness::instances::SyntheticInstance;
use cbandit::{EpochSchedule, Result};

fn main() -> Result<()> {
    let inst = SyntheticInstance::reference();
    let rounds = 10_000;
    let kinds = [
        BaselineKind::EpsilonGreedy {
            epsilon: 0.05,
            schedule: EpochSchedule::Doubling,
        },
        BaselineKind::EpsilonGreedy {
            epsilon: 0.2,
            schedule: EpochSchedule::Doubling,
        },
        BaselineKind::ExploreFirst { n0: rounds / 10 },
    ];
    for kind in kinds {
        let class = run_baseline(kind, ClassGreedy::new(inst.class()), inst.environment(2), rounds, 9)?;
        let ols = run_baseline(kind, OlsGreedy::new(3, 0.1)?, inst.environment(2), rounds, 9)?;
        println!(
            "{kind:?}\n  class greedy: average regret {:.4}  oracle calls {}\n  ols greedy:   average regret {:.4}",
            class.summary.average_regret.unwrap_or(f64::NAN),
            class.summary.oracle_calls,
            ols.summary.average_regret.unwrap_or(f64::NAN),
        );
    }
    Ok(())
}
