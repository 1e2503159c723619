//! Per-round telemetry and its JSON Lines encoding.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One round of telemetry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub t: u64,
    pub epoch: u64,
    pub mu: f64,
    pub action: usize,
    pub prob: f64,
    pub reward: f64,
    pub cum_reward: f64,
    /// `None` when the environment does not expose the optimal policy's reward.
    pub cum_regret: Option<f64>,
    pub oracle_calls: u64,
}

/// End-of-run summary, written as the last JSON Lines object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub algo: String,
    pub seed: u64,
    pub rounds: u64,
    pub total_reward: f64,
    pub total_regret: Option<f64>,
    pub average_regret: Option<f64>,
    /// Progressive-validation 0/1-style loss, `mean(1 − r_t(a_t))`.
    pub pv_loss: f64,
    pub oracle_calls: u64,
    pub solves: u64,
    pub ascent_steps: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<MetricsRecord>,
    pub summary: RunSummary,
}

/// Accumulates per-round metrics for any learner.
#[derive(Debug, Clone)]
pub(crate) struct Tracker {
    records: Vec<MetricsRecord>,
    cum_reward: f64,
    cum_regret: Option<f64>,
    pv: ProgressiveValidation,
}

impl Tracker {
    pub(crate) fn new(capacity: usize) -> Self {
        Self {
            records: Vec::with_capacity(capacity),
            cum_reward: 0.0,
            cum_regret: Some(0.0),
            pv: ProgressiveValidation::default(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn push(
        &mut self,
        t: u64,
        epoch: u64,
        mu: f64,
        action: usize,
        prob: f64,
        reward: f64,
        optimal_reward: Option<f64>,
        oracle_calls: u64,
    ) {
        self.cum_reward += reward;
        self.cum_regret = match (self.cum_regret, optimal_reward) {
            (Some(c), Some(opt)) => Some(c + opt - reward),
            _ => None,
        };
        self.pv.push(1.0 - reward);
        self.records.push(MetricsRecord {
            t,
            epoch,
            mu,
            action,
            prob,
            reward,
            cum_reward: self.cum_reward,
            cum_regret: self.cum_regret,
            oracle_calls,
        });
    }

    pub(crate) fn finish(self, algo: &str, seed: u64, oracle_calls: u64, solves: u64, ascent_steps: u64) -> RunOutput {
        let rounds = self.records.len() as u64;
        let total_regret = if rounds == 0 { Some(0.0) } else { self.cum_regret };
        RunOutput {
            summary: RunSummary {
                algo: algo.to_string(),
                seed,
                rounds,
                total_reward: self.cum_reward,
                total_regret,
                average_regret: total_regret.map(|r| if rounds == 0 { 0.0 } else { r / rounds as f64 }),
                pv_loss: self.pv.value(),
                oracle_calls,
                solves,
                ascent_steps,
            },
            records: self.records,
        }
    }
}

/// Running mean of losses, each scored before the update that consumes it.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ProgressiveValidation {
    sum: f64,
    n: u64,
}

impl ProgressiveValidation {
    pub fn push(&mut self, loss: f64) {
        self.sum += loss;
        self.n += 1;
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Mean loss so far (0 for an empty stream).
    pub fn value(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }
}

/// Mean of a loss stream in `[0, 1]`.
pub fn progressive_validation<I: IntoIterator<Item = f64>>(losses: I) -> Result<f64> {
    let mut pv = ProgressiveValidation::default();
    for l in losses {
        if !(0.0..=1.0).contains(&l) {
            return Err(Error::Domain(format!("loss {l} is outside [0, 1]")));
        }
        pv.push(l);
    }
    Ok(pv.value())
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a RunSummary,
}

/// Writes one JSON object per round followed by `{"summary": {...}}`.
pub fn write_jsonl<W: Write>(out: &RunOutput, mut w: W) -> Result<()> {
    let ser = |e: serde_json::Error| Error::Io(e.to_string());
    for r in &out.records {
        serde_json::to_writer(&mut w, r).map_err(ser)?;
        w.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut w, &SummaryLine { summary: &out.summary }).map_err(ser)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Parses a metrics file written by [`write_jsonl`], validating every line.
pub fn read_jsonl<R: BufRead>(r: R) -> Result<RunOutput> {
    #[derive(Deserialize)]
    struct SummaryOwned {
        summary: RunSummary,
    }
    let mut records = Vec::new();
    let mut summary = None;
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if summary.is_some() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "content after summary".into(),
            });
        }
        let value: serde_json::Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
        let parsed = if value.get("summary").is_some() {
            serde_json::from_value::<SummaryOwned>(value).map(|s| summary = Some(s.summary))
        } else {
            serde_json::from_value::<MetricsRecord>(value).map(|m| records.push(m))
        };
        parsed.map_err(|e| Error::Parse {
            line: i + 1,
            msg: e.to_string(),
        })?;
    }
    let summary = summary.ok_or(Error::Parse {
        line: records.len() + 1,
        msg: "missing summary line".into(),
    })?;
    Ok(RunOutput { records, summary })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pv_examples() {
        assert_eq!(progressive_validation([1.0, 0.0, 0.0, 1.0]).unwrap(), 0.5);
        assert_eq!(progressive_validation([0.0; 7]).unwrap(), 0.0);
        assert_eq!(progressive_validation(std::iter::empty()).unwrap(), 0.0);
        assert!(progressive_validation([1.5]).is_err());
    }

    proptest! {
        #[test]
        fn pv_is_permutation_invariant(mut v in prop::collection::vec(0u8..=1, 1..50), seed in any::<u64>()) {
            let a = progressive_validation(v.iter().map(|&x| x as f64)).unwrap();
            let n = v.len();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                v.swap(i, (s >> 33) as usize % (i + 1));
            }
            let b = progressive_validation(v.iter().map(|&x| x as f64)).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn jsonl_roundtrip_and_schema() {
        let mut tr = Tracker::new(2);
        tr.push(1, 1, 0.25, 0, 0.75, 1.0, Some(1.0), 0);
        tr.push(2, 2, 0.25, 1, 0.25, 0.0, Some(1.0), 2);
        let out = tr.finish("iltcb", 7, 2, 1, 0);
        assert_eq!(out.summary.total_regret, Some(1.0));
        assert_eq!(out.summary.pv_loss, 0.5);
        let mut buf = Vec::new();
        write_jsonl(&out, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 3);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        for key in ["t", "epoch", "mu", "action", "prob", "reward", "cum_reward", "cum_regret", "oracle_calls"] {
            assert!(first.get(key).is_some(), "missing {key}");
        }
        let back = read_jsonl(&buf[..]).unwrap();
        assert_eq!(back, out);
        assert!(read_jsonl(&b"{\"t\":1}\n"[..]).is_err());
    }

    #[test]
    fn unknown_regret_propagates() {
        let mut tr = Tracker::new(2);
        tr.push(1, 0, 0.1, 0, 1.0, 1.0, None, 0);
        tr.push(2, 0, 0.1, 0, 1.0, 1.0, Some(1.0), 0);
        let out = tr.finish("x", 0, 0, 0, 0);
        assert_eq!(out.summary.total_regret, None);
        assert!(out.records.iter().all(|r| r.cum_regret.is_none()));
    }
}
