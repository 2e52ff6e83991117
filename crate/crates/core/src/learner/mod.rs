//! One online learner (initiation or termination): statistics upkeep,
//! the Hoeffding expansion test with adaptive tie-breaking, pruning and
//! warm-up gating.

mod refine;
mod stats;

use std::mem;
use std::sync::Arc;
use std::time::{Duration, Instant};

pub use refine::specializations;
pub use stats::{g_score, hoeffding_epsilon, ClauseStats, EpsilonMean};

use crate::abduce::{abduce_seeds, saturate, variabilize, BottomClause, Seed, DEFAULT_MAX_BODY};
use crate::dispatch::{detect_failures, dispatch, Action};
use crate::ec::{count_outcomes, fires_for, Interpretation, Target};
use crate::error::{Error, Result};
use crate::log::{Decision, ExpandRecord, PruneRecord, Scored};
use crate::logic::{theta_subsumes, Clause, HeadKind, ModeBias, Theory};

#[derive(Clone, Debug, PartialEq)]
pub struct LearnerConfig {
    pub kind: HeadKind,
    /// Confidence of the Hoeffding test.
    pub delta: f64,
    /// Maximum number of literals added by one specialization step.
    pub depth: usize,
    /// Prune threshold on mean G.
    pub s_min: f64,
    /// Warm-up: clauses seen on fewer interpretations are neither output
    /// nor pruned.
    pub n_min: u64,
    pub max_bottom: usize,
}

impl LearnerConfig {
    pub fn new(kind: HeadKind) -> LearnerConfig {
        LearnerConfig { kind, delta: 1e-5, depth: 1, s_min: 0.5, n_min: 1000, max_bottom: DEFAULT_MAX_BODY }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta must lie in (0,1), got {}", self.delta)));
        }
        if self.depth < 1 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.s_min) {
            return Err(Error::Config(format!("prune threshold must lie in [0,1], got {}", self.s_min)));
        }
        if self.max_bottom < 1 {
            return Err(Error::Config("bottom clause cap must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub clause: Clause,
    pub stats: ClauseStats,
}

#[derive(Clone, Debug)]
pub struct LearnedClause {
    pub id: u64,
    pub clause: Clause,
    pub bottom: Arc<BottomClause>,
    pub stats: ClauseStats,
    pub candidates: Vec<Candidate>,
}

impl LearnedClause {
    pub fn new(id: u64, clause: Clause, bottom: Arc<BottomClause>, depth: usize) -> LearnedClause {
        let candidates = specializations(&clause, &bottom, depth)
            .into_iter()
            .map(|clause| Candidate { clause, stats: ClauseStats::default() })
            .collect();
        LearnedClause { id, clause, bottom, stats: ClauseStats::default(), candidates }
    }

    fn approx_bytes(&self) -> usize {
        const LIT: usize = 96;
        let lits = self.clause.size()
            + self.bottom.len() * 3
            + self.candidates.iter().map(|c| c.clause.size()).sum::<usize>();
        mem::size_of::<Self>() + lits * LIT + self.candidates.len() * mem::size_of::<Candidate>()
    }
}

/// The expansion condition: `Ḡ(r1) > Ḡ(r)` and `ΔḠ > ε or ε < τ`.
/// Returns `Some(tie_break)` when the clause should be replaced by `r1`,
/// where `tie_break` says the ε < τ branch was needed.
pub fn expansion_test(parent: f64, best: f64, second: f64, epsilon: f64, tau: f64) -> Option<bool> {
    if !(best > parent) {
        return None;
    }
    if best - second > epsilon {
        Some(false)
    } else if epsilon < tau {
        Some(true)
    } else {
        None
    }
}

/// `S_min − Ḡ > ε`.
pub fn prune_test(s_min: f64, g: f64, epsilon: f64) -> bool {
    s_min - g > epsilon
}

pub struct Learner {
    cfg: LearnerConfig,
    bias: Arc<ModeBias>,
    target: Arc<Target>,
    clauses: Vec<LearnedClause>,
    next_id: u64,
    eps: EpsilonMean,
    processed: u64,
    peak_bytes: usize,
    elapsed: Duration,
    decisions: Vec<Decision>,
}

impl Learner {
    pub fn new(cfg: LearnerConfig, bias: Arc<ModeBias>, target: Arc<Target>) -> Result<Learner> {
        cfg.validate()?;
        Ok(Learner {
            cfg,
            bias,
            target,
            clauses: Vec::new(),
            next_id: 0,
            eps: EpsilonMean::default(),
            processed: 0,
            peak_bytes: 0,
            elapsed: Duration::ZERO,
            decisions: Vec::new(),
        })
    }

    pub fn kind(&self) -> HeadKind {
        self.cfg.kind
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.cfg
    }

    pub fn target(&self) -> &Target {
        &self.target
    }

    pub fn clauses(&self) -> &[LearnedClause] {
        &self.clauses
    }

    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn tau(&self) -> f64 {
        self.eps.mean()
    }

    pub fn elapsed(&self) -> Duration {
        self.elapsed
    }

    /// Largest estimated size of the learner state seen after any
    /// interpretation.
    pub fn peak_state_bytes(&self) -> usize {
        self.peak_bytes
    }

    pub fn state_bytes(&self) -> usize {
        mem::size_of::<Self>() + self.clauses.iter().map(LearnedClause::approx_bytes).sum::<usize>()
    }

    pub fn take_decisions(&mut self) -> Vec<Decision> {
        mem::take(&mut self.decisions)
    }

    /// Current theory, including clauses still warming up.
    pub fn theory(&self) -> Theory {
        Theory::new(self.clauses.iter().map(|c| c.clause.clone()).collect())
    }

    /// Clauses evaluated on at least `n_min` interpretations.
    pub fn output_hypothesis(&self) -> Theory {
        Theory::new(
            self.clauses.iter().filter(|c| c.stats.n >= self.cfg.n_min).map(|c| c.clause.clone()).collect(),
        )
    }

    /// Seeds of this learner's kind that no current clause accounts for.
    pub fn uncovered_seeds(&self, interp: &Interpretation) -> Vec<Seed> {
        abduce_seeds(interp, &self.target)
            .into_iter()
            .filter(|s| s.kind == self.cfg.kind)
            .filter(|s| !self.clauses.iter().any(|c| fires_for(&c.clause, interp, &self.target, &s.fluent)))
            .collect()
    }

    /// One step of the main loop. The interpretation is not retained.
    pub fn process(&mut self, interp: &Interpretation) -> Result<()> {
        let start = Instant::now();
        self.update_stats(interp);
        let failures = detect_failures(self, interp);
        let wants_theory = failures.iter().any(|f| dispatch(f.learner, f.kind) == Action::TheoryExpansion);
        let grew = wants_theory && self.start_new_clause(interp)?.is_some();
        if !grew {
            for i in 0..self.clauses.len() {
                self.try_expand(i, interp.id)?;
            }
        }
        self.prune(interp.id)?;
        self.processed += 1;
        self.peak_bytes = self.peak_bytes.max(self.state_bytes());
        self.elapsed += start.elapsed();
        Ok(())
    }

    pub fn update_stats(&mut self, interp: &Interpretation) {
        let target = &*self.target;
        for c in &mut self.clauses {
            c.stats.record(count_outcomes(&c.clause, interp, target));
            for cand in &mut c.candidates {
                cand.stats.record(count_outcomes(&cand.clause, interp, target));
            }
        }
    }

    /// Adds `head(⊥) ←` for the largest non-empty bottom clause built from
    /// an uncovered seed, unless an existing clause's bottom θ-subsumes it.
    /// `Err(NoSeed)` when the interpretation has no seed of this kind at
    /// all, `Ok(None)` when every seed was covered, empty or redundant.
    pub fn start_new_clause(&mut self, interp: &Interpretation) -> Result<Option<u64>> {
        let kind = self.cfg.kind;
        if !abduce_seeds(interp, &self.target).iter().any(|s| s.kind == kind) {
            return Err(Error::NoSeed(kind));
        }
        let mut best: Option<BottomClause> = None;
        for seed in self.uncovered_seeds(interp) {
            let b = variabilize(&saturate(&seed, interp, &self.bias, self.cfg.max_bottom), &self.bias);
            if b.is_empty() {
                continue;
            }
            let bc = b.as_clause();
            if self.clauses.iter().any(|c| theta_subsumes(&c.bottom.as_clause(), &bc)) {
                continue;
            }
            if best.as_ref().is_none_or(|cur| b.len() > cur.len()) {
                best = Some(b);
            }
        }
        let Some(bottom) = best else { return Ok(None) };
        let id = self.next_id;
        self.next_id += 1;
        let lc = LearnedClause::new(id, bottom.head_clause(), Arc::new(bottom), self.cfg.depth);
        self.decisions.push(Decision::Start {
            learner: kind,
            interp: interp.id,
            clause_id: id,
            bottom_size: lc.bottom.len(),
            clause: lc.clause.to_string(),
        });
        self.clauses.push(lc);
        Ok(Some(id))
    }

    /// Runs the Hoeffding test on clause `idx` and replaces it by its best
    /// specialization when the test passes. Returns whether it expanded.
    pub fn try_expand(&mut self, idx: usize, interp_id: u64) -> Result<bool> {
        let kind = self.cfg.kind;
        let r = &self.clauses[idx];
        if r.stats.n == 0 || r.candidates.is_empty() {
            return Ok(false);
        }
        let epsilon = hoeffding_epsilon(self.cfg.delta, r.stats.n)?;
        self.eps.observe(epsilon);
        let tau = self.eps.mean();
        // The parent takes part in the ranking and wins ties against its
        // specializations; among equal candidates the earlier (shorter) wins.
        let mut ranked: Vec<(f64, Option<usize>)> = vec![(r.stats.score(kind), None)];
        ranked.extend(r.candidates.iter().enumerate().map(|(i, c)| (c.stats.score(kind), Some(i))));
        ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (g1, Some(best)) = ranked[0] else { return Ok(false) };
        let g2 = ranked[1].0;
        let g = r.stats.score(kind);
        let Some(tie_break) = expansion_test(g, g1, g2, epsilon, tau) else { return Ok(false) };
        let second = match ranked[1].1 {
            Some(i) => r.candidates[i].stats,
            None => r.stats,
        };
        let new_clause = r.candidates[best].clause.clone();
        self.decisions.push(Decision::Expand(ExpandRecord {
            learner: kind,
            interp: interp_id,
            clause_id: r.id,
            delta: self.cfg.delta,
            parent: Scored::of(&r.stats, kind),
            best: Scored::of(&r.candidates[best].stats, kind),
            second: Scored::of(&second, kind),
            delta_g: g1 - g2,
            epsilon,
            tau,
            eps_sum: self.eps.sum,
            eps_count: self.eps.count,
            tie_break,
            clause: new_clause.to_string(),
        }));
        let bottom = Arc::clone(&r.bottom);
        self.clauses[idx] = LearnedClause::new(r.id, new_clause, bottom, self.cfg.depth);
        Ok(true)
    }

    /// Removes clauses past warm-up whose mean G sits more than ε below
    /// the threshold.
    pub fn prune(&mut self, interp_id: u64) -> Result<()> {
        let kind = self.cfg.kind;
        let mut keep = Vec::with_capacity(self.clauses.len());
        for c in mem::take(&mut self.clauses) {
            if c.stats.n >= self.cfg.n_min.max(1) {
                let epsilon = hoeffding_epsilon(self.cfg.delta, c.stats.n)?;
                let g = c.stats.score(kind);
                if prune_test(self.cfg.s_min, g, epsilon) {
                    self.decisions.push(Decision::Prune(PruneRecord {
                        learner: kind,
                        interp: interp_id,
                        clause_id: c.id,
                        delta: self.cfg.delta,
                        s_min: self.cfg.s_min,
                        stats: Scored::of(&c.stats, kind),
                        epsilon,
                        clause: c.clause.to_string(),
                    }));
                    continue;
                }
            }
            keep.push(c);
        }
        self.clauses = keep;
        Ok(())
    }
}
