//! Argmax-oracle access to the policy class, the cost-sensitive reduction used
//! to find violated variance constraints, and the conditional-probability table
//! that keeps that reduction at `O(K t)` per oracle call.

use crate::error::{Error, Result};
use crate::estimator::CscDataset;
use crate::optimizer::{OpInstance, VarianceStats};
use crate::sampler::{conditional_weights, SparseWeights};
use crate::types::{ActionId, Context, History, PolicyClass, PolicyId};

/// An argmax oracle: returns `argmax_π Σ_τ r_τ(π(x_τ))` over its policy class.
///
/// Implementations count every `argmax` call.
pub trait ArgmaxOracle {
    fn argmax(&mut self, data: &CscDataset<'_>) -> Result<PolicyId>;

    fn calls(&self) -> u64;
}

impl<O: ArgmaxOracle + ?Sized> ArgmaxOracle for &mut O {
    fn argmax(&mut self, data: &CscDataset<'_>) -> Result<PolicyId> {
        (**self).argmax(data)
    }

    fn calls(&self) -> u64 {
        (**self).calls()
    }
}

/// Exact oracle by full enumeration of the class. Ties go to the lowest index.
#[derive(Debug, Clone)]
pub struct EnumerationOracle<P> {
    class: P,
    calls: u64,
}

impl<P: PolicyClass> EnumerationOracle<P> {
    pub fn new(class: P) -> Self {
        Self { class, calls: 0 }
    }

    pub fn class(&self) -> &P {
        &self.class
    }
}

/// Exact argmax by enumeration, without touching any call counter.
pub fn enum_argmax<P: PolicyClass + ?Sized>(data: &CscDataset<'_>, class: &P) -> Result<PolicyId> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut best = (PolicyId(0), f64::NEG_INFINITY);
    for p in (0..class.len()).map(PolicyId) {
        let total = data.policy_total(class, p);
        if total > best.1 {
            best = (p, total);
        }
    }
    Ok(best.0)
}

impl<P: PolicyClass> ArgmaxOracle for EnumerationOracle<P> {
    fn argmax(&mut self, data: &CscDataset<'_>) -> Result<PolicyId> {
        self.calls += 1;
        enum_argmax(data, &self.class)
    }

    fn calls(&self) -> u64 {
        self.calls
    }
}

/// Table of unsmoothed conditional weights `Q(a|x_i)`, one column per
/// historical context, with a lazily applied scalar multiplier.
///
/// Effective entry = stored entry × pending scale.
#[derive(Debug, Clone)]
pub struct ProbTable {
    num_actions: usize,
    raw: Vec<f64>,
    scale: f64,
}

impl ProbTable {
    pub fn new(num_actions: usize) -> Self {
        Self {
            num_actions,
            raw: Vec::new(),
            scale: 1.0,
        }
    }

    /// Builds the table for `q` over the given contexts from scratch.
    pub fn build<'a, P, I>(q: &SparseWeights, contexts: I, class: &P) -> Self
    where
        P: PolicyClass + ?Sized,
        I: IntoIterator<Item = &'a Context>,
    {
        let mut t = Self::new(class.num_actions());
        for x in contexts {
            t.append_context(q, x, class);
        }
        t
    }

    #[inline]
    pub fn num_actions(&self) -> usize {
        self.num_actions
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.raw.len() / self.num_actions
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    #[inline]
    pub fn pending_scale(&self) -> f64 {
        self.scale
    }

    /// Adds the column for a new context; costs `K · |supp(q)|` evaluations.
    pub fn append_context<P: PolicyClass + ?Sized>(&mut self, q: &SparseWeights, x: &Context, class: &P) {
        let col = conditional_weights(q, x, class);
        let inv = 1.0 / self.scale;
        self.raw.extend(col.into_iter().map(|v| v * inv));
    }

    /// Records `Q ← cQ` in O(1).
    pub fn apply_rescale(&mut self, c: f64) {
        debug_assert!(c > 0.0);
        self.scale *= c;
    }

    /// Records `Q(policy) += alpha` with one linear scan, folding in the pending scale.
    pub fn apply_increment<'a, P, I>(&mut self, policy: PolicyId, alpha: f64, contexts: I, class: &P) -> Result<()>
    where
        P: PolicyClass + ?Sized,
        I: IntoIterator<Item = &'a Context>,
    {
        let k = self.num_actions;
        let s = self.scale;
        if s != 1.0 {
            self.raw.iter_mut().for_each(|v| *v *= s);
            self.scale = 1.0;
        }
        let mut n = 0;
        for (i, x) in contexts.into_iter().enumerate() {
            let a = class.evaluate(policy, x).index();
            match self.raw.get_mut(i * k + a) {
                Some(v) => *v += alpha,
                None => {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        len: self.len(),
                    })
                }
            }
            n += 1;
        }
        if n != self.len() {
            return Err(Error::Contract(format!(
                "increment scanned {n} contexts but the table has {} columns",
                self.len()
            )));
        }
        Ok(())
    }

    /// Current `Q(a|x_i)`.
    pub fn lookup(&self, a: ActionId, i: usize) -> Result<f64> {
        if a.index() >= self.num_actions {
            return Err(Error::IndexOutOfRange {
                index: a.index(),
                len: self.num_actions,
            });
        }
        let len = self.len();
        if i >= len {
            return Err(Error::IndexOutOfRange { index: i, len });
        }
        Ok(self.raw[i * self.num_actions + a.index()] * self.scale)
    }

    #[inline]
    pub(crate) fn get(&self, a: usize, i: usize) -> f64 {
        self.raw[i * self.num_actions + a] * self.scale
    }

    /// Column `i` as current (unsmoothed) values.
    pub fn column(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        let k = self.num_actions;
        self.raw[i * k..(i + 1) * k].iter().map(move |v| v * self.scale)
    }

    /// Drops all columns' mass (the table of `Q = 0`), keeping the column count.
    pub fn reset_to_zero(&mut self) {
        self.raw.iter_mut().for_each(|v| *v = 0.0);
        self.scale = 1.0;
    }
}

/// Builds the cost-sensitive dataset
/// `r̃_τ(a) = (1/t) (ψμ / Q^μ(a|x_τ) + r̂_τ(a))`, reading `Q(a|x_τ)` from `table`.
pub fn cse_dataset<'h>(
    q: &SparseWeights,
    history: &'h History,
    mu: f64,
    psi: f64,
    table: &ProbTable,
) -> Result<CscDataset<'h>> {
    let t = history.len();
    if table.len() != t {
        return Err(Error::Contract(format!(
            "probability table has {} columns for a history of length {t}",
            table.len()
        )));
    }
    let k = history.num_actions();
    let inv_t = 1.0 / t as f64;
    let keep = 1.0 - k as f64 * mu;
    let mut data = CscDataset::with_capacity(k, t);
    let mut row = vec![0.0; k];
    for (i, x) in history.contexts().enumerate() {
        let fict = history.fictitious(i);
        let mut col_sum = 0.0;
        for a in 0..k {
            let qa = table.get(a, i);
            col_sum += qa;
            let smoothed = keep * qa + mu;
            row[a] = inv_t * (psi * mu / smoothed + fict[a]);
        }
        if (col_sum - q.total()).abs() > 1e-9 * (1.0 + q.total()) {
            return Err(Error::Contract(format!(
                "table column {i} sums to {col_sum} but the weights sum to {}",
                q.total()
            )));
        }
        data.push(x, &row)?;
    }
    Ok(data)
}

/// A policy whose variance constraint is violated, with its statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub policy: PolicyId,
    pub stats: VarianceStats,
}

/// One oracle call on the reduction dataset; returns the `D`-maximizing policy
/// when its `D` is positive, `None` when every variance constraint holds.
pub fn find_violating_policy<P, O>(
    q: &SparseWeights,
    inst: &OpInstance<'_, P>,
    oracle: &mut O,
    table: &ProbTable,
) -> Result<Option<Violation>>
where
    P: PolicyClass + ?Sized,
    O: ArgmaxOracle + ?Sized,
{
    let data = cse_dataset(q, inst.history(), inst.mu(), inst.psi(), table)?;
    let policy = oracle.argmax(&data)?;
    let stats = inst.variance_stats_from_table(policy, table)?;
    Ok((stats.d > 0.0).then_some(Violation { policy, stats }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::TabularPolicies;
    use crate::types::InteractionRecord;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset_class() -> TabularPolicies {
        TabularPolicies::new(
            3,
            vec![
                vec![ActionId(0), ActionId(2)],
                vec![ActionId(1), ActionId(2)],
                vec![ActionId(2), ActionId(0)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn enum_argmax_examples() {
        let class = dataset_class();
        let x0 = Context::from_id(0);
        let x1 = Context::from_id(1);

        // policy 0 collects 3.0, policy 1 collects 2.0, policy 2 collects 0.5
        let mut d = CscDataset::new(3);
        d.push(&x0, &[1.0, 0.0, 0.5]).unwrap();
        d.push(&x1, &[0.0, 0.0, 2.0]).unwrap();
        let mut oracle = EnumerationOracle::new(&class);
        assert_eq!(oracle.argmax(&d).unwrap(), PolicyId(0));

        let mut zero = CscDataset::new(3);
        zero.push(&x0, &[0.0; 3]).unwrap();
        assert_eq!(oracle.argmax(&zero).unwrap(), PolicyId(0));

        let mut unit = CscDataset::new(3);
        unit.push(&x0, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(oracle.argmax(&unit).unwrap(), PolicyId(2));

        // negative entries are fine
        let mut neg = CscDataset::new(3);
        neg.push(&x0, &[-3.0, -1.0, -2.0]).unwrap();
        assert_eq!(oracle.argmax(&neg).unwrap(), PolicyId(1));

        assert_eq!(oracle.argmax(&CscDataset::new(3)), Err(Error::EmptyDataset));
        assert_eq!(oracle.calls(), 5);
    }

    fn cse_fixture() -> (TabularPolicies, History) {
        let class = TabularPolicies::new(2, vec![vec![ActionId(1)]]).unwrap();
        let mut h = History::new(2);
        h.push(InteractionRecord::new(Context::from_id(0), ActionId(1), 0.5, 0.25).unwrap())
            .unwrap();
        (class, h)
    }

    #[test]
    fn cse_dataset_values() {
        let (class, h) = cse_fixture();
        // Q = 0, K = 2, mu = 0.25: Q^mu = 0.25 everywhere
        let q = SparseWeights::new();
        let table = ProbTable::build(&q, h.contexts(), &class);
        let d = cse_dataset(&q, &h, 0.25, 100.0, &table).unwrap();
        // ψμ/Q^μ = 100*0.25/0.25 = 100; r̂ = 0.5/0.25 = 2 on action 1
        assert!((d.rewards(0)[0] - 100.0).abs() < 1e-12);
        assert!((d.rewards(0)[1] - 102.0).abs() < 1e-12);

        // ψ=100, μ=0.1, Q^μ(a|x) = 0.25 via Q(a|x)=0.1875 (K=2: 0.8*0.1875+0.1)
        let q = SparseWeights::from_entries([(PolicyId(0), 0.1875)]).unwrap();
        let table = ProbTable::build(&q, h.contexts(), &class);
        let d = cse_dataset(&q, &h, 0.1, 100.0, &table).unwrap();
        assert!((d.rewards(0)[1] - 42.0).abs() < 1e-9);

        let mut h2 = h.clone();
        h2.push(InteractionRecord::new(Context::from_id(0), ActionId(1), 0.5, 0.25).unwrap())
            .unwrap();
        let table = ProbTable::build(&q, h2.contexts(), &class);
        let d = cse_dataset(&q, &h2, 0.1, 100.0, &table).unwrap();
        assert!((d.rewards(0)[1] - 21.0).abs() < 1e-9);
        assert!((d.rewards(1)[1] - 21.0).abs() < 1e-9);
    }

    #[test]
    fn cse_dataset_rejects_stale_table() {
        let (class, h) = cse_fixture();
        let q = SparseWeights::from_entries([(PolicyId(0), 0.5)]).unwrap();
        let table = ProbTable::build(&SparseWeights::new(), h.contexts(), &class);
        assert!(matches!(cse_dataset(&q, &h, 0.1, 100.0, &table), Err(Error::Contract(_))));
        let empty = ProbTable::new(2);
        assert!(cse_dataset(&q, &h, 0.1, 100.0, &empty).is_err());
    }

    #[test]
    fn table_lazy_rescale_and_increment() {
        let class = dataset_class();
        let xs = [Context::from_id(0), Context::from_id(1)];
        let q = SparseWeights::from_entries([(PolicyId(0), 0.4), (PolicyId(2), 0.2)]).unwrap();
        let mut t = ProbTable::build(&q, xs.iter(), &class);
        assert!((t.lookup(ActionId(0), 0).unwrap() - 0.4).abs() < 1e-15);
        assert!((t.lookup(ActionId(2), 1).unwrap() - 0.4).abs() < 1e-15);

        let before = t.raw.clone();
        t.apply_rescale(0.5);
        assert_eq!(t.raw, before);
        assert!((t.lookup(ActionId(0), 0).unwrap() - 0.2).abs() < 1e-15);

        t.apply_increment(PolicyId(1), 0.1, xs.iter(), &class).unwrap();
        assert_eq!(t.pending_scale(), 1.0);
        // policy 1 plays action 1 on x0 and action 2 on x1
        assert!((t.lookup(ActionId(1), 0).unwrap() - 0.1).abs() < 1e-15);
        assert!((t.lookup(ActionId(2), 1).unwrap() - 0.3).abs() < 1e-15);

        assert!(t.lookup(ActionId(3), 0).is_err());
        assert!(t.lookup(ActionId(0), 2).is_err());
        assert!(t.apply_increment(PolicyId(0), 0.1, xs[..1].iter(), &class).is_err());
    }

    #[test]
    fn table_matches_recomputation_under_random_ops() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let k = 4;
        let n_pol = 12;
        let table: Vec<Vec<ActionId>> = (0..n_pol)
            .map(|_| (0..30).map(|_| ActionId(rng.random_range(0..k))).collect())
            .collect();
        let class = TabularPolicies::new(k, table).unwrap();
        let mut contexts: Vec<Context> = Vec::new();
        let mut q = SparseWeights::new();
        let mut t = ProbTable::new(k);
        for _ in 0..2000 {
            match rng.random_range(0..3) {
                0 => {
                    let x = Context::from_id(rng.random_range(0..30));
                    t.append_context(&q, &x, &class);
                    contexts.push(x);
                }
                1 => {
                    let c = rng.random_range(0.3..1.0);
                    q.scale(c);
                    t.apply_rescale(c);
                }
                _ => {
                    let p = PolicyId(rng.random_range(0..n_pol));
                    let alpha = rng.random_range(0.0..0.2) + 1e-6;
                    q.increment(p, alpha);
                    t.apply_increment(p, alpha, contexts.iter(), &class).unwrap();
                }
            }
            if q.total() > 1.0 {
                let c = 0.5 / q.total();
                q.scale(c);
                t.apply_rescale(c);
            }
        }
        for (i, x) in contexts.iter().enumerate() {
            let direct = conditional_weights(&q, x, &class);
            for a in 0..k {
                assert!((t.lookup(ActionId(a), i).unwrap() - direct[a]).abs() < 1e-12);
            }
        }
    }
}
