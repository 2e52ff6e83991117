//! Micro-averaged evaluation and episode-wise cross-validation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dispatch::{run_online, OnlineConfig};
use crate::ec::{Interpretation, Recognizer, Target};
use crate::error::{Error, Result};
use crate::logic::{ModeBias, Theory};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub theory_size: usize,
    /// Seconds.
    pub train_time: f64,
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Metrics {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Metrics {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        Metrics { tp, fp, fn_, precision, recall, f1, ..Default::default() }
    }

    /// Pools the counts of several runs.
    pub fn pooled<'a>(runs: impl IntoIterator<Item = &'a Metrics>) -> Metrics {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        let (mut size, mut time, mut n) = (0, 0.0, 0usize);
        for m in runs {
            tp += m.tp;
            fp += m.fp;
            fn_ += m.fn_;
            size += m.theory_size;
            time += m.train_time;
            n += 1;
        }
        let mut out = Metrics::from_counts(tp, fp, fn_);
        if n > 0 {
            out.theory_size = size / n;
            out.train_time = time / n as f64;
        }
        out
    }
}

/// Recognizes the target over `stream` with `theory` and compares the
/// predicted fluents at the second time point of every window with the
/// annotation there.
pub fn evaluate<'s>(
    theory: &Theory,
    stream: impl IntoIterator<Item = &'s Interpretation>,
    target: &Target,
) -> Metrics {
    let mut rec = Recognizer::new(theory, target);
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for interp in stream {
        let predicted = rec.step(interp);
        let actual = interp.holds_next.iter().filter(|f| target.is_fluent(f));
        let hits = predicted.iter().filter(|f| interp.holds_next.contains(*f)).count() as u64;
        tp += hits;
        fp += predicted.len() as u64 - hits;
        fn_ += actual.count() as u64 - hits;
    }
    let mut m = Metrics::from_counts(tp, fp, fn_);
    m.theory_size = theory.size();
    m
}

/// Maximal runs of consecutive windows, as index ranges.
pub fn episodes(stream: &[Interpretation]) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=stream.len() {
        if i == stream.len() || stream[i].time != stream[i - 1].time + 1 {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// `k` contiguous blocks of whole episodes; block `f` gets episodes
/// `[f·E/k, (f+1)·E/k)`.
pub fn fold_blocks(stream: &[Interpretation], k: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if k < 2 {
        return Err(Error::Config(format!("cross-validation needs at least 2 folds, got {k}")));
    }
    let eps = episodes(stream);
    if eps.len() < k {
        return Err(Error::Config(format!("{} episodes cannot be split into {k} folds", eps.len())));
    }
    let e = eps.len();
    Ok((0..k).map(|f| eps[f * e / k].start..eps[(f + 1) * e / k - 1].end).collect())
}

/// Trains on all blocks but one and evaluates on the held-out block, for
/// each block in turn.
pub fn cross_validate(
    stream: &[Interpretation],
    k: usize,
    bias: Arc<ModeBias>,
    target: Arc<Target>,
    cfg: &OnlineConfig,
) -> Result<Vec<Metrics>> {
    let blocks = fold_blocks(stream, k)?;
    let mut out = Vec::with_capacity(k);
    for test in &blocks {
        let train = stream[..test.start].iter().chain(&stream[test.end..]).cloned().map(Ok);
        let res = run_online(train, Arc::clone(&bias), Arc::clone(&target), cfg, |_| {})?;
        let theory = res.theory();
        let mut m = evaluate(&theory, &stream[test.clone()], &target);
        m.train_time = res.train_time().as_secs_f64();
        out.push(m);
    }
    Ok(out)
}
