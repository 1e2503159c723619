//! Simulation driver. Writes per-round JSON Lines metrics per replica.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cbandit::harness::baselines::{run_baseline, BaselineKind, ClassGreedy, OlsGreedy};
use cbandit::harness::dataset::{read_examples, supervised_to_bandit, Example};
use cbandit::harness::instances::{gen_lower_bound_instance, SeparableStream, SyntheticInstance};
use cbandit::harness::metrics::write_jsonl;
use cbandit::harness::replicas::run_replicas;
use cbandit::harness::{Environment, RunOutput};
use cbandit::policies::LinearPolicies;
use cbandit::schedule::mu_m;
use cbandit::{bandit, cover, AlgoConfig, EpochSchedule, Error, PolicyClass, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Iltcb,
    Cover,
    Egreedy,
    ExploreFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Instance {
    Synthetic,
    LowerBound,
    File,
    Separable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Greedy {
    Class,
    Ols,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Schedule {
    Doubling,
    Squares,
    Unit,
}

impl From<Schedule> for EpochSchedule {
    fn from(s: Schedule) -> Self {
        match s {
            Schedule::Doubling => EpochSchedule::Doubling,
            Schedule::Squares => EpochSchedule::Squares,
            Schedule::Unit => EpochSchedule::Unit,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cbsim", about = "Run contextual bandit simulations")]
struct Args {
    #[arg(long, value_enum, default_value = "iltcb")]
    algo: Algo,
    #[arg(long, value_enum, default_value = "doubling")]
    schedule: Schedule,
    #[arg(long)]
    warm_start: bool,
    /// Rounds; defaults to 4096, or the file length for `--instance file`.
    #[arg(long = "T")]
    rounds: Option<u64>,
    /// Number of actions (ignored by `separable`, which is binary).
    #[arg(long = "K", default_value_t = 3)]
    num_actions: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = cbandit::config::DEFAULT_PSI)]
    psi: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Exploration rounds for explore-first; defaults to T/10.
    #[arg(long)]
    explore_rounds: Option<u64>,
    #[arg(long, default_value_t = 1)]
    cover_n: usize,
    /// Learning rate of the online least-squares learners.
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Greedy engine for the baselines; defaults to `class` on finite
    /// instances and `ols` on feature streams.
    #[arg(long, value_enum)]
    greedy: Option<Greedy>,
    #[arg(long, value_enum, default_value = "synthetic")]
    instance: Instance,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Policy count for synthetic and file instances.
    #[arg(long, default_value_t = 20)]
    n_policies: usize,
    /// Contexts of the lower-bound instance; defaults to ⌊1/(8Kμ)⌋ at τ = T.
    #[arg(long)]
    lb_contexts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    replicas: usize,
    /// Metrics file; with several replicas, `.r<i>` is inserted before the extension.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    verify: bool,
}

enum Setup {
    Synthetic(SyntheticInstance),
    LowerBound(cbandit::harness::instances::LowerBoundInstance),
    File { examples: Vec<Example>, class: LinearPolicies },
    Separable,
}

fn build_setup(args: &Args) -> Result<(Setup, u64)> {
    let k = args.num_actions;
    Ok(match args.instance {
        Instance::Synthetic => {
            let inst = if k == 3 && args.n_policies == 20 {
                SyntheticInstance::reference()
            } else {
                SyntheticInstance::perturbed(k, 32, args.n_policies, 0.2, 0.1, 1, 20_140_101)?
            };
            (Setup::Synthetic(inst), args.rounds.unwrap_or(4096))
        }
        Instance::LowerBound => {
            let t = args.rounds.unwrap_or(4096);
            let n = match args.lb_contexts {
                Some(n) => n,
                None => lower_bound_contexts(t, k, args.delta)?,
            };
            (Setup::LowerBound(gen_lower_bound_instance(n, k)?), t)
        }
        Instance::File => {
            let path = args
                .dataset
                .as_ref()
                .ok_or_else(|| Error::Domain("--instance file needs --dataset".into()))?;
            let examples = read_examples(BufReader::new(File::open(path)?), k)?;
            let dim = examples
                .iter()
                .filter_map(|e| e.context.features().last().map(|&(i, _)| i as usize + 1))
                .max()
                .unwrap_or(1);
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ 0x5eed);
            let class = LinearPolicies::random(args.n_policies, k, dim, &mut rng)?;
            let t = args.rounds.unwrap_or(examples.len() as u64);
            (Setup::File { examples, class }, t)
        }
        Instance::Separable => (Setup::Separable, args.rounds.unwrap_or(20_000)),
    })
}

/// Largest `N` with `N ≤ 1/(8Kμ)`, where `μ` itself depends on the class
/// size `(K − 1) N`; iterated to a fixed point.
fn lower_bound_contexts(t: u64, k: usize, delta: f64) -> Result<usize> {
    let mut n = 1usize;
    for _ in 0..64 {
        let mu = mu_m(t, k, (k - 1) * n, delta)?;
        let next = ((1.0 / (8.0 * k as f64 * mu)).floor() as usize).max(1);
        if next == n {
            break;
        }
        n = next;
    }
    Ok(n)
}

fn run_one(args: &Args, setup: &Setup, rounds: u64, seed: u64) -> Result<RunOutput> {
    let mut cfg = AlgoConfig::new(args.num_actions);
    cfg.delta = args.delta;
    cfg.psi = args.psi;
    cfg.schedule = args.schedule.into();
    cfg.warm_start = args.warm_start;
    cfg.verify = args.verify;
    // The environment and the learner draw from separate streams, so every
    // algorithm sees the same rounds for a given seed.
    cfg.seed = seed;
    let env_seed = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(1);

    match setup {
        Setup::Synthetic(inst) => dispatch(args, cfg, Some(inst.class()), inst.environment(env_seed), rounds),
        Setup::LowerBound(lb) => dispatch(args, cfg, Some(lb), lb.environment(env_seed), rounds),
        Setup::File { examples, class } => {
            let env = supervised_to_bandit(examples.clone(), args.num_actions)?;
            dispatch(args, cfg, Some(class), env, rounds)
        }
        Setup::Separable => {
            cfg.num_actions = 2;
            let env = SeparableStream::new(10, 77, env_seed)?;
            dispatch::<LinearPolicies, _>(args, cfg, None, env, rounds)
        }
    }
}

fn dispatch<P: PolicyClass, E: Environment>(
    args: &Args,
    cfg: AlgoConfig,
    class: Option<&P>,
    env: E,
    rounds: u64,
) -> Result<RunOutput> {
    let need_class = || class.ok_or_else(|| Error::Domain("this instance has no finite policy class".into()));
    let greedy = args.greedy.unwrap_or(match args.instance {
        Instance::Synthetic | Instance::LowerBound => Greedy::Class,
        Instance::File | Instance::Separable => Greedy::Ols,
    });
    let kind = match args.algo {
        Algo::Iltcb => return Ok(bandit::run(cfg, need_class()?, env, rounds)?.output),
        Algo::Cover => return cover::run(args.cover_n, args.eta, env, rounds, cfg.seed),
        Algo::Egreedy => BaselineKind::EpsilonGreedy {
            epsilon: args.epsilon,
            schedule: cfg.schedule,
        },
        Algo::ExploreFirst => BaselineKind::ExploreFirst {
            n0: args.explore_rounds.unwrap_or(rounds / 10),
        },
    };
    match greedy {
        Greedy::Class => run_baseline(kind, ClassGreedy::new(need_class()?), env, rounds, cfg.seed),
        Greedy::Ols => run_baseline(kind, OlsGreedy::new(cfg.num_actions, args.eta)?, env, rounds, cfg.seed),
    }
}

fn replica_path(out: &Path, i: usize, replicas: usize) -> PathBuf {
    if replicas == 1 {
        return out.to_path_buf();
    }
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("metrics");
    let name = match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}.r{i}.{ext}"),
        None => format!("{stem}.r{i}"),
    };
    out.with_file_name(name)
}

fn main_inner(args: &Args) -> Result<()> {
    if args.replicas == 0 {
        return Err(Error::Domain("--replicas must be at least 1".into()));
    }
    let (setup, rounds) = build_setup(args)?;
    let seeds: Vec<u64> = (0..args.replicas as u64).map(|i| args.seed + i).collect();
    let results = run_replicas(&seeds, |seed| run_one(args, &setup, rounds, seed));
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    for (i, res) in results.into_iter().enumerate() {
        let out = res?;
        if let Some(path) = &args.out {
            let path = replica_path(path, i, args.replicas);
            write_jsonl(&out, BufWriter::new(File::create(&path)?))?;
        }
        let line = serde_json::to_string(&out.summary).map_err(|e| Error::Io(e.to_string()))?;
        writeln!(stdout, "{line}")?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match main_inner(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ Error::ConstraintViolation(_)) => {
            eprintln!("cbsim: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("cbsim: {e}");
            ExitCode::from(1)
        }
    }
}
