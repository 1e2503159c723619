#![allow(dead_code)]

use cbandit::policies::TabularPolicies;
use cbandit::sampler::SparseWeights;
use cbandit::{ActionId, Context, History, InteractionRecord, PolicyId};
use rand::Rng;

/// A random tabular problem: class, history and the context count.
pub struct Problem {
    pub k: usize,
    pub contexts: usize,
    pub class: TabularPolicies,
    pub history: History,
}

pub fn random_class<R: Rng>(rng: &mut R, k: usize, contexts: usize, n: usize) -> TabularPolicies {
    let table = (0..n)
        .map(|_| (0..contexts).map(|_| ActionId(rng.random_range(0..k))).collect())
        .collect();
    TabularPolicies::new(k, table).unwrap()
}

/// A history logged by a random smoothed policy, with reward means per
/// (context, action) and uniform noise.
pub fn random_history<R: Rng>(rng: &mut R, k: usize, contexts: usize, t: usize) -> History {
    let means: Vec<Vec<f64>> = (0..contexts)
        .map(|_| (0..k).map(|_| rng.random::<f64>()).collect())
        .collect();
    let mut h = History::with_capacity(k, t);
    for _ in 0..t {
        let x = rng.random_range(0..contexts);
        let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.05).collect();
        let s: f64 = raw.iter().sum();
        let u = rng.random::<f64>() * s;
        let mut acc = 0.0;
        let mut a = k - 1;
        for (i, v) in raw.iter().enumerate() {
            acc += v;
            if u < acc {
                a = i;
                break;
            }
        }
        let p = raw[a] / s;
        let r = (means[x][a] + rng.random_range(-0.1..0.1)).clamp(0.0, 1.0);
        h.push(InteractionRecord::new(Context::from_id(x as u64), ActionId(a), r, p).unwrap())
            .unwrap();
    }
    h
}

pub fn random_problem<R: Rng>(rng: &mut R, max_t: usize) -> Problem {
    let k = rng.random_range(2..=5);
    let contexts = rng.random_range(1..=8);
    let n = rng.random_range(1..=50);
    let t = rng.random_range(1..=max_t);
    Problem {
        k,
        contexts,
        class: random_class(rng, k, contexts, n),
        history: random_history(rng, k, contexts, t),
    }
}

/// Random sparse weights over `n` policies with total at most 1.
pub fn random_weights<R: Rng>(rng: &mut R, n: usize) -> SparseWeights {
    let support = rng.random_range(0..=n.min(6));
    let total = rng.random_range(0.01..=1.0);
    let raw: Vec<(usize, f64)> = (0..support)
        .map(|_| (rng.random_range(0..n), rng.random::<f64>() + 1e-3))
        .collect();
    let s: f64 = raw.iter().map(|(_, w)| w).sum();
    let mut q = SparseWeights::new();
    for (p, w) in raw {
        q.increment(PolicyId(p), total * w / s);
    }
    q
}
