//! The two domain-independent Event Calculus axioms
//!
//! ```text
//! holdsAt(F,T+1) :- initiatedAt(F,T).
//! holdsAt(F,T+1) :- holdsAt(F,T), not terminatedAt(F,T).
//! ```
//!
//! evaluated over one interpretation (a pair of consecutive time points) at
//! a time, plus the per-clause outcome counting used to score clauses.

mod background;
mod model;

use std::collections::{BTreeMap, BTreeSet};

pub use background::{angle_between, Background, Comparison, Measure, SpatialTest};
pub use model::{
    compute_model, compute_next, count_outcomes, fired_fluents, fires_for, infer_stream, OutcomeDelta, Recognizer,
};

use crate::error::{Error, Result};
use crate::logic::{FactSet, HeadKind, Literal, ModeBias, Sym, Term};

/// The complex event being learned, e.g. `moving/2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Target {
    pub fluent: Sym,
    /// Types of the fluent's arguments, when a mode bias is available.
    pub arg_types: Option<Vec<Sym>>,
}

impl Target {
    pub fn new(fluent: &str) -> Target {
        Target { fluent: Sym::from(fluent), arg_types: None }
    }

    /// Requires an `initiatedAt` and a `terminatedAt` head declaration for
    /// the fluent.
    pub fn from_bias(bias: &ModeBias, fluent: &str) -> Result<Target> {
        let mut arg_types = None;
        for kind in [HeadKind::Initiated, HeadKind::Terminated] {
            let head = bias
                .heads
                .iter()
                .find(|h| &*h.pred == kind.predicate() && background::fluent_arg_types(h, fluent).is_some())
                .ok_or_else(|| Error::Bias(format!("no modeh for {}({fluent}(...),T)", kind.predicate())))?;
            arg_types.get_or_insert_with(|| background::fluent_arg_types(head, fluent).unwrap());
        }
        Ok(Target { fluent: Sym::from(fluent), arg_types })
    }

    pub fn is_fluent(&self, t: &Term) -> bool {
        match t {
            Term::Compound(f, args) => {
                f == &self.fluent && self.arg_types.as_ref().is_none_or(|ty| ty.len() == args.len())
            }
            Term::Const(c) => c == &self.fluent,
            _ => false,
        }
    }
}

/// One training instance: narrative and annotation over times `t` and `t+1`.
#[derive(Clone, Debug)]
pub struct Interpretation {
    pub id: u64,
    pub time: i64,
    /// Observed atoms (simple events and context), sorted.
    pub narrative: Vec<Literal>,
    /// Background-derived atoms (spatial tests), sorted.
    pub derived: Vec<Literal>,
    /// Target fluents annotated as holding at `t`.
    pub holds_now: BTreeSet<Term>,
    /// Target fluents annotated as holding at `t+1`.
    pub holds_next: BTreeSet<Term>,
    pub domains: BTreeMap<Sym, BTreeSet<Term>>,
    facts: FactSet,
}

impl Interpretation {
    /// Splits `atoms` into narrative and annotation and derives background
    /// atoms for both time points.
    pub fn new(id: u64, time: i64, atoms: Vec<Literal>, bg: &Background) -> Result<Interpretation> {
        let (annotation, narrative): (Vec<_>, Vec<_>) = atoms.into_iter().partition(|l| bg.is_annotation(l));
        let mut derived = bg.derive(&narrative, time);
        derived.extend(bg.derive(&narrative, time + 1));
        Interpretation::from_parts(id, time, narrative, derived, annotation, bg)
    }

    pub fn from_parts(
        id: u64,
        time: i64,
        mut narrative: Vec<Literal>,
        mut derived: Vec<Literal>,
        annotation: Vec<Literal>,
        bg: &Background,
    ) -> Result<Interpretation> {
        let bad_time = |l: &Literal| !matches!(l.time(), Some(x) if x == time || x == time + 1);
        if let Some(l) = narrative.iter().chain(&annotation).find(|l| bad_time(l)) {
            return Err(Error::Config(format!("atom {l} lies outside the window ({time},{})", time + 1)));
        }
        let mut holds_now = BTreeSet::new();
        let mut holds_next = BTreeSet::new();
        for l in annotation {
            let fluent = l.args[0].clone();
            if l.time() == Some(time) {
                holds_now.insert(fluent);
            } else {
                holds_next.insert(fluent);
            }
        }
        narrative.sort();
        narrative.dedup();
        derived.sort();
        derived.dedup();
        let domains = bg.domains(narrative.iter().chain(&derived));
        let facts = narrative.iter().chain(&derived).cloned().collect();
        Ok(Interpretation { id, time, narrative, derived, holds_now, holds_next, domains, facts })
    }

    pub fn facts(&self) -> &FactSet {
        &self.facts
    }

    /// Annotation as `holdsAt` atoms.
    pub fn annotation(&self) -> Vec<Literal> {
        let at = |f: &Term, t: i64| Literal::new("holdsAt", vec![f.clone(), Term::Int(t)]);
        self.holds_now
            .iter()
            .map(|f| at(f, self.time))
            .chain(self.holds_next.iter().map(|f| at(f, self.time + 1)))
            .collect()
    }

    pub fn domain(&self, ty: &str) -> Option<&BTreeSet<Term>> {
        self.domains.get(ty)
    }
}
