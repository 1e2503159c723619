//! Supervised examples as a bandit stream: labels are actions and the
//! reward is 1 for the correct label, 0 otherwise.
//!
//! File format, one example per line: `label<TAB>idx:val idx:val ...`.
//! The feature list may be empty; blank lines and `#` comments are skipped.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::harness::env::{Environment, Round};
use crate::types::Context;

#[derive(Debug, Clone, PartialEq)]
pub struct Example {
    pub label: usize,
    pub context: Context,
}

pub fn parse_line(line: &str, line_no: usize, id: u64) -> Result<Example> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let (label, rest) = match line.split_once('\t') {
        Some((l, r)) => (l, r),
        None => (line, ""),
    };
    let label: usize = label
        .trim()
        .parse()
        .map_err(|_| err(format!("bad label {label:?}")))?;
    let mut features = Vec::new();
    for tok in rest.split_whitespace() {
        let (i, v) = tok
            .split_once(':')
            .ok_or_else(|| err(format!("expected idx:val, got {tok:?}")))?;
        let i: u32 = i.parse().map_err(|_| err(format!("bad feature index {i:?}")))?;
        let v: f64 = v.parse().map_err(|_| err(format!("bad feature value {v:?}")))?;
        features.push((i, v));
    }
    let context = Context::new(id, features).map_err(|e| err(e.to_string()))?;
    Ok(Example { label, context })
}

/// Reads every example, checking labels against `num_actions`.
pub fn read_examples<R: BufRead>(reader: R, num_actions: usize) -> Result<Vec<Example>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim_end();
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        let ex = parse_line(trimmed, i + 1, out.len() as u64)?;
        if ex.label >= num_actions {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("label {} is not below K = {num_actions}", ex.label),
            });
        }
        out.push(ex);
    }
    Ok(out)
}

/// One pass over the examples in file order.
#[derive(Debug, Clone)]
pub struct SupervisedEnvironment {
    num_actions: usize,
    examples: std::vec::IntoIter<Example>,
}

pub fn supervised_to_bandit(examples: Vec<Example>, num_actions: usize) -> Result<SupervisedEnvironment> {
    if num_actions < 2 {
        return Err(Error::Domain("need at least 2 classes".into()));
    }
    if let Some(ex) = examples.iter().find(|e| e.label >= num_actions) {
        return Err(Error::Domain(format!("label {} is not below K = {num_actions}", ex.label)));
    }
    Ok(SupervisedEnvironment {
        num_actions,
        examples: examples.into_iter(),
    })
}

impl SupervisedEnvironment {
    pub fn remaining(&self) -> usize {
        self.examples.len()
    }
}

impl Environment for SupervisedEnvironment {
    fn num_actions(&self) -> usize {
        self.num_actions
    }

    fn next_round(&mut self) -> Option<Round> {
        let ex = self.examples.next()?;
        let mut rewards = vec![0.0; self.num_actions];
        rewards[ex.label] = 1.0;
        Some(Round {
            context: ex.context,
            rewards,
            optimal_reward: Some(1.0),
        })
    }
}
