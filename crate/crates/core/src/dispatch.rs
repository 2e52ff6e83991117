//! Failure detection and action dispatch for the two learners, and the
//! online driver that fans one stream out to both.

use std::collections::BTreeSet;
use std::sync::mpsc::{sync_channel, Receiver, SyncSender};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use crate::ec::{fired_fluents, fires_for, Interpretation, Target};
use crate::error::{Error, Result};
use crate::learner::{Learner, LearnerConfig};
use crate::log::Decision;
use crate::logic::{HeadKind, ModeBias, Theory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FailureType {
    FP,
    FN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FailureKind {
    pub learner: HeadKind,
    pub kind: FailureType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    TheoryExpansion,
    ClauseExpansion,
}

pub fn dispatch(learner: HeadKind, failure: FailureType) -> Action {
    use FailureType::*;
    use HeadKind::*;
    match (learner, failure) {
        (Initiated, FP) | (Terminated, FN) => Action::ClauseExpansion,
        (Initiated, FN) | (Terminated, FP) => Action::TheoryExpansion,
    }
}

/// Failures of one learner's current theory on `interp`, judged against
/// the annotation only (each learner sees its own clauses plus annotated
/// inertia).
pub fn detect_failures(learner: &Learner, interp: &Interpretation) -> BTreeSet<FailureKind> {
    let kind = learner.kind();
    let target = learner.target();
    let mut out = BTreeSet::new();
    let fail = |k| FailureKind { learner: kind, kind: k };
    if !learner.uncovered_seeds(interp).is_empty() {
        out.insert(fail(match kind {
            HeadKind::Initiated => FailureType::FN,
            HeadKind::Terminated => FailureType::FP,
        }));
    }
    let clauses = learner.clauses();
    match kind {
        HeadKind::Initiated => {
            let wrong = clauses
                .iter()
                .any(|c| fired_fluents(&c.clause, interp, target).iter().any(|f| !interp.holds_next.contains(f)));
            if wrong {
                out.insert(fail(FailureType::FP));
            }
        }
        HeadKind::Terminated => {
            let wrong = interp
                .holds_now
                .intersection(&interp.holds_next)
                .any(|f| clauses.iter().any(|c| fires_for(&c.clause, interp, target, f)));
            if wrong {
                out.insert(fail(FailureType::FN));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct OnlineConfig {
    pub init: LearnerConfig,
    pub term: LearnerConfig,
    /// Interpretations buffered per learner before the reader blocks.
    pub window: usize,
    /// Emit a status line every this many interpretations; 0 disables.
    pub progress_every: u64,
}

impl OnlineConfig {
    pub fn new(init: LearnerConfig, term: LearnerConfig) -> OnlineConfig {
        OnlineConfig { init, term, window: 64, progress_every: 1000 }
    }
}

pub struct OnlineResult {
    pub init: Learner,
    pub term: Learner,
    pub interpretations: u64,
}

impl OnlineResult {
    pub fn theory(&self) -> Theory {
        merge_output(&self.init, &self.term)
    }

    /// The slower of the two learners.
    pub fn train_time(&self) -> Duration {
        self.init.elapsed().max(self.term.elapsed())
    }
}

/// Initiation clauses then termination clauses, each past warm-up.
pub fn merge_output(init: &Learner, term: &Learner) -> Theory {
    let mut clauses = init.output_hypothesis().clauses;
    clauses.extend(term.output_hypothesis().clauses);
    Theory::new(clauses)
}

fn learner_loop(
    mut learner: Learner,
    rx: Receiver<Arc<Interpretation>>,
    log: SyncSender<Decision>,
    progress_every: u64,
) -> Result<Learner> {
    for interp in rx {
        learner.process(&interp).map_err(|e| Error::Interpretation { id: interp.id, source: Box::new(e) })?;
        for d in learner.take_decisions() {
            // The sink only goes away when the run is being torn down.
            let _ = log.send(d);
        }
        if progress_every > 0 && learner.processed().is_multiple_of(progress_every) {
            log::info!(
                "learner={} processed={} clauses={} size={} tau={:.5}",
                learner.kind().short(),
                learner.processed(),
                learner.clauses().len(),
                learner.theory().size(),
                learner.tau()
            );
        }
    }
    Ok(learner)
}

/// Feeds every interpretation, in order, to an initiation and a
/// termination learner running on their own threads. Decision records
/// are handed to `sink` as they are made.
pub fn run_online<I, S>(
    stream: I,
    bias: Arc<ModeBias>,
    target: Arc<Target>,
    cfg: &OnlineConfig,
    mut sink: S,
) -> Result<OnlineResult>
where
    I: IntoIterator<Item = Result<Interpretation>>,
    S: FnMut(Decision) + Send,
{
    let init = Learner::new(cfg.init.clone(), Arc::clone(&bias), Arc::clone(&target))?;
    let term = Learner::new(cfg.term.clone(), bias, target)?;
    if init.kind() != HeadKind::Initiated || term.kind() != HeadKind::Terminated {
        return Err(Error::Config("learner kinds must be initiatedAt and terminatedAt".into()));
    }
    let window = cfg.window.max(1);
    let every = cfg.progress_every;
    thread::scope(|s| {
        let (log_tx, log_rx) = sync_channel::<Decision>(window * 4);
        let sink_thread = s.spawn(move || log_rx.into_iter().for_each(&mut sink));
        let (itx, irx) = sync_channel(window);
        let (ttx, trx) = sync_channel(window);
        let lt = log_tx.clone();
        let hi = s.spawn(move || learner_loop(init, irx, lt, every));
        let ht = s.spawn(move || learner_loop(term, trx, log_tx, every));
        let mut count = 0u64;
        let mut read_err = None;
        for item in stream {
            match item {
                Ok(interp) => {
                    let interp = Arc::new(interp);
                    count += 1;
                    // A closed channel means that learner failed; its error
                    // surfaces at join.
                    if itx.send(Arc::clone(&interp)).is_err() || ttx.send(interp).is_err() {
                        break;
                    }
                }
                Err(e) => {
                    read_err = Some(Error::Interpretation { id: count, source: Box::new(e) });
                    break;
                }
            }
        }
        drop(itx);
        drop(ttx);
        let init = hi.join().expect("initiation learner panicked");
        let term = ht.join().expect("termination learner panicked");
        sink_thread.join().expect("decision sink panicked");
        if let Some(e) = read_err {
            return Err(e);
        }
        Ok(OnlineResult { init: init?, term: term?, interpretations: count })
    })
}
