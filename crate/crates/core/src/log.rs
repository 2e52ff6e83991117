//! Structured decision log: one JSON object per line for every clause
//! creation, expansion and prune, with enough counters to replay the test.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::learner::{g_score, hoeffding_epsilon, ClauseStats};
use crate::logic::HeadKind;

/// Counters of one clause at decision time, with its mean G.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub n: u64,
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub g: f64,
}

impl Scored {
    pub fn of(stats: &ClauseStats, kind: HeadKind) -> Scored {
        Scored { n: stats.n, tp: stats.tp, fp: stats.fp, fn_: stats.fn_, g: g_score(stats, kind) }
    }

    fn stats(&self) -> ClauseStats {
        ClauseStats { n: self.n, tp: self.tp, fp: self.fp, fn_: self.fn_ }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpandRecord {
    pub learner: HeadKind,
    pub interp: u64,
    pub clause_id: u64,
    pub delta: f64,
    pub parent: Scored,
    pub best: Scored,
    pub second: Scored,
    pub delta_g: f64,
    pub epsilon: f64,
    pub tau: f64,
    pub eps_sum: f64,
    pub eps_count: u64,
    pub tie_break: bool,
    pub clause: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneRecord {
    pub learner: HeadKind,
    pub interp: u64,
    pub clause_id: u64,
    pub delta: f64,
    pub s_min: f64,
    pub stats: Scored,
    pub epsilon: f64,
    pub clause: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum Decision {
    Start { learner: HeadKind, interp: u64, clause_id: u64, bottom_size: usize, clause: String },
    Expand(ExpandRecord),
    Prune(PruneRecord),
}

pub fn write_decision(w: &mut impl Write, d: &Decision) -> Result<()> {
    serde_json::to_writer(&mut *w, d)?;
    w.write_all(b"\n")?;
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub starts: usize,
    pub expansions: usize,
    pub prunes: usize,
    pub violations: Vec<String>,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

const TOL: f64 = 1e-9;

/// Replays every logged decision from its counters: recomputes Ḡ and ε,
/// checks the expansion and prune conditions and that τ was the running
/// mean of ε.
pub fn audit(decisions: &[Decision]) -> AuditReport {
    let mut rep = AuditReport::default();
    let mut last_count: BTreeMap<HeadKind, u64> = BTreeMap::new();
    for (i, d) in decisions.iter().enumerate() {
        let mut bad = |msg: String| rep.violations.push(format!("record {}: {msg}", i + 1));
        match d {
            Decision::Start { .. } => rep.starts += 1,
            Decision::Expand(e) => {
                rep.expansions += 1;
                for (name, s) in [("parent", &e.parent), ("best", &e.best), ("second", &e.second)] {
                    let g = g_score(&s.stats(), e.learner);
                    if (g - s.g).abs() > TOL {
                        bad(format!("{name} g {} but counters give {g}", s.g));
                    }
                }
                match hoeffding_epsilon(e.delta, e.parent.n) {
                    Ok(eps) if (eps - e.epsilon).abs() <= TOL => {}
                    Ok(eps) => bad(format!("epsilon {} but n={} gives {eps}", e.epsilon, e.parent.n)),
                    Err(err) => bad(err.to_string()),
                }
                if e.eps_count == 0 || (e.eps_sum / e.eps_count as f64 - e.tau).abs() > TOL {
                    bad(format!("tau {} is not the mean {}/{}", e.tau, e.eps_sum, e.eps_count));
                }
                let prev = last_count.insert(e.learner, e.eps_count);
                if prev.is_some_and(|p| p >= e.eps_count) {
                    bad(format!("epsilon count did not grow ({:?} -> {})", prev, e.eps_count));
                }
                let dg = e.best.g - e.second.g;
                if (dg - e.delta_g).abs() > TOL {
                    bad(format!("delta_g {} but best-second is {dg}", e.delta_g));
                }
                if !(e.best.g > e.parent.g) {
                    bad(format!("best g {} does not beat parent g {}", e.best.g, e.parent.g));
                }
                if !(dg > e.epsilon || e.epsilon < e.tau) {
                    bad(format!("neither delta_g {dg} > eps {} nor eps < tau {}", e.epsilon, e.tau));
                }
            }
            Decision::Prune(p) => {
                rep.prunes += 1;
                let g = g_score(&p.stats.stats(), p.learner);
                if (g - p.stats.g).abs() > TOL {
                    bad(format!("g {} but counters give {g}", p.stats.g));
                }
                match hoeffding_epsilon(p.delta, p.stats.n) {
                    Ok(eps) => {
                        if (eps - p.epsilon).abs() > TOL {
                            bad(format!("epsilon {} but n={} gives {eps}", p.epsilon, p.stats.n));
                        }
                        if !(p.s_min - g > eps) {
                            bad(format!("s_min {} - g {g} does not exceed eps {eps}", p.s_min));
                        }
                    }
                    Err(err) => bad(err.to_string()),
                }
            }
        }
    }
    rep
}

pub fn read_decisions(r: impl BufRead) -> Result<Vec<Decision>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scored(tp: u64, fp: u64, n: u64) -> Scored {
        let s = ClauseStats { n, tp, fp, fn_: 0 };
        Scored::of(&s, HeadKind::Initiated)
    }

    fn expand() -> ExpandRecord {
        let eps = hoeffding_epsilon(1e-5, 1000).unwrap();
        ExpandRecord {
            learner: HeadKind::Initiated,
            interp: 7,
            clause_id: 0,
            delta: 1e-5,
            parent: scored(6, 4, 1000),
            best: scored(9, 1, 1000),
            second: scored(7, 3, 1000),
            delta_g: 0.9 - 0.7,
            epsilon: eps,
            tau: eps,
            eps_sum: eps,
            eps_count: 1,
            tie_break: false,
            clause: "initiatedAt(f(X),T) :- p(X,T).".into(),
        }
    }

    #[test]
    fn valid_expansion_passes_and_round_trips() {
        let d = Decision::Expand(expand());
        let mut buf = Vec::new();
        write_decision(&mut buf, &d).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("{\"event\":\"expand\""));
        let back = read_decisions(&buf[..]).unwrap();
        assert_eq!(back, vec![d]);
        assert!(audit(&back).ok());
    }

    #[test]
    fn forged_expansion_is_caught() {
        let mut e = expand();
        e.best = scored(5, 5, 1000);
        e.delta_g = e.best.g - e.second.g;
        let rep = audit(&[Decision::Expand(e)]);
        assert!(!rep.ok());
        assert!(rep.violations[0].contains("does not beat parent"));
    }

    #[test]
    fn tau_must_be_running_mean() {
        let mut e = expand();
        e.tau = 0.5;
        assert!(!audit(&[Decision::Expand(e)]).ok());
    }

    #[test]
    fn prune_condition_checked() {
        let eps = hoeffding_epsilon(1e-5, 1000).unwrap();
        let mk = |tp, fp| PruneRecord {
            learner: HeadKind::Initiated,
            interp: 1,
            clause_id: 3,
            delta: 1e-5,
            s_min: 0.7,
            stats: scored(tp, fp, 1000),
            epsilon: eps,
            clause: String::new(),
        };
        assert!(audit(&[Decision::Prune(mk(5, 5))]).ok());
        let rep = audit(&[Decision::Prune(mk(69, 31))]);
        assert_eq!(rep.prunes, 1);
        assert_eq!(rep.violations.len(), 1);
    }
}
