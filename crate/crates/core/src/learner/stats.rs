use serde::{Deserialize, Serialize};

use crate::ec::OutcomeDelta;
use crate::error::{Error, Result};
use crate::logic::HeadKind;

/// Accumulated outcome counters of one clause.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseStats {
    /// Interpretations the clause has been evaluated on.
    pub n: u64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ClauseStats {
    pub fn record(&mut self, d: OutcomeDelta) {
        self.n += 1;
        self.tp += d.tp;
        self.fp += d.fp;
        self.fn_ += d.fn_;
    }

    pub fn score(&self, kind: HeadKind) -> f64 {
        g_score(self, kind)
    }
}

/// Precision for initiation clauses, recall for termination clauses, as
/// ratios of the accumulated counts. Zero when the denominator is zero.
pub fn g_score(stats: &ClauseStats, kind: HeadKind) -> f64 {
    let (num, den) = match kind {
        HeadKind::Initiated => (stats.tp, stats.tp + stats.fp),
        HeadKind::Terminated => (stats.tp, stats.tp + stats.fn_),
    };
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Hoeffding bound `sqrt(ln(1/δ) / 2n)`.
pub fn hoeffding_epsilon(delta: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InsufficientObservations);
    }
    Ok(((1.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// Arithmetic mean of every ε computed so far; the adaptive tie-breaking
/// threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EpsilonMean {
    pub sum: f64,
    pub count: u64,
}

impl EpsilonMean {
    pub fn observe(&mut self, eps: f64) {
        self.sum += eps;
        self.count += 1;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }
}
