use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Interpretation, Target};
use crate::logic::{for_each_solution, Bindings, Clause, HeadKind, Literal, Substitution, Sym, Term, Theory};

/// Per-interpretation outcome counts of one clause.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeDelta {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl OutcomeDelta {
    pub fn new(tp: u64, fp: u64, fn_: u64) -> Self {
        OutcomeDelta { tp, fp, fn_ }
    }
}

fn head_parts(clause: &Clause) -> Option<(&Term, &Term)> {
    match clause.head.args.as_slice() {
        [fluent, time] => Some((fluent, time)),
        _ => None,
    }
}

/// Every argument of a typed target fluent must lie in the interpretation's
/// domain for its type.
fn well_typed(fluent: &Term, interp: &Interpretation, target: &Target) -> bool {
    if !target.is_fluent(fluent) || !fluent.is_ground() {
        return false;
    }
    match (&target.arg_types, fluent) {
        (Some(types), Term::Compound(_, args)) => types
            .iter()
            .zip(args)
            .all(|(ty, a)| interp.domain(ty).is_some_and(|d| d.contains(a))),
        _ => true,
    }
}

/// Ground target fluents `F` such that `clause` derives `kind(F, t)` in `interp`.
///
/// Head variables not bound by the body range over the interpretation's
/// domain for their type.
pub fn fired_fluents(clause: &Clause, interp: &Interpretation, target: &Target) -> BTreeSet<Term> {
    let mut out = BTreeSet::new();
    let Some((fluent, time)) = head_parts(clause) else {
        return out;
    };
    let mut seed = Bindings::default();
    if !seed.match_term(time, &Term::Int(interp.time)) {
        return out;
    }
    for_each_solution(&clause.body, interp.facts(), &seed.to_subst(), &mut |b| {
        let partial = fluent.apply(&b.to_subst());
        if partial.is_ground() {
            if well_typed(&partial, interp, target) {
                out.insert(partial);
            }
        } else {
            ground_over_domains(&partial, interp, target, &mut out);
        }
        false
    });
    out
}

fn ground_over_domains(partial: &Term, interp: &Interpretation, target: &Target, out: &mut BTreeSet<Term>) {
    let (Some(types), Term::Compound(_, args)) = (&target.arg_types, partial) else {
        return;
    };
    // Each unbound variable takes its type from the first argument slot it fills.
    let mut vars: Vec<(Sym, Vec<Term>)> = Vec::new();
    for (a, ty) in args.iter().zip(types) {
        if let Term::Var(v) = a {
            if vars.iter().all(|(w, _)| w != v) {
                let dom = interp.domain(ty).map(|d| d.iter().cloned().collect()).unwrap_or_default();
                vars.push((v.clone(), dom));
            }
        }
    }
    let mut subst = Substitution::new();
    enumerate(&vars, &mut subst, &mut |s| {
        let g = partial.apply(s);
        if well_typed(&g, interp, target) {
            out.insert(g);
        }
    });
}

fn enumerate(vars: &[(Sym, Vec<Term>)], subst: &mut Substitution, f: &mut dyn FnMut(&Substitution)) {
    match vars.split_first() {
        None => f(subst),
        Some(((v, dom), rest)) => {
            for value in dom {
                subst.insert(v.clone(), value.clone());
                enumerate(rest, subst, f);
            }
            subst.remove(v);
        }
    }
}

/// Whether `clause` derives `kind(fluent, t)` in `interp`.
pub fn fires_for(clause: &Clause, interp: &Interpretation, target: &Target, fluent: &Term) -> bool {
    let Some((pattern, time)) = head_parts(clause) else {
        return false;
    };
    if !well_typed(fluent, interp, target) {
        return false;
    }
    let mut seed = Bindings::default();
    if !seed.match_term(time, &Term::Int(interp.time)) || !seed.match_term(pattern, fluent) {
        return false;
    }
    crate::logic::body_satisfiable(&clause.body, interp.facts(), &seed.to_subst())
}

/// Fluents holding at `t+1` given those holding at `t`.
pub fn compute_next(
    theory: &Theory,
    interp: &Interpretation,
    target: &Target,
    holds_now: &BTreeSet<Term>,
) -> BTreeSet<Term> {
    let mut next: BTreeSet<Term> = BTreeSet::new();
    for c in theory.of_kind(HeadKind::Initiated) {
        next.extend(fired_fluents(c, interp, target));
    }
    let terminators: Vec<&Clause> = theory.of_kind(HeadKind::Terminated).collect();
    for f in holds_now.iter().filter(|f| target.is_fluent(f)) {
        if !next.contains(f) && !terminators.iter().any(|c| fires_for(c, interp, target, f)) {
            next.insert(f.clone());
        }
    }
    next
}

/// `holdsAt(F, t+1)` atoms entailed by the axioms, with the annotation at
/// `t` as the inertia source.
pub fn compute_model(theory: &Theory, interp: &Interpretation, target: &Target) -> BTreeSet<Literal> {
    compute_next(theory, interp, target, &interp.holds_now)
        .into_iter()
        .map(|f| Literal::new("holdsAt", vec![f, Term::Int(interp.time + 1)]))
        .collect()
}

/// Outcome counts of a single clause on one interpretation.
///
/// Initiation clauses score each distinct fluent they initiate: TP when it
/// holds at `t+1`, FP otherwise. Termination clauses score each fluent that
/// persists from `t` to `t+1`: TP when the clause leaves it alone, FN when
/// it fires.
pub fn count_outcomes(clause: &Clause, interp: &Interpretation, target: &Target) -> OutcomeDelta {
    let mut d = OutcomeDelta::default();
    match clause.head_kind() {
        Some(HeadKind::Initiated) => {
            for f in fired_fluents(clause, interp, target) {
                if interp.holds_next.contains(&f) {
                    d.tp += 1;
                } else {
                    d.fp += 1;
                }
            }
        }
        Some(HeadKind::Terminated) => {
            for f in interp.holds_now.intersection(&interp.holds_next) {
                if fires_for(clause, interp, target, f) {
                    d.fn_ += 1;
                } else {
                    d.tp += 1;
                }
            }
        }
        None => {}
    }
    d
}

/// Test-time recognition: inertia chains over the recognizer's own
/// predictions and resets at every gap in time.
pub struct Recognizer<'a> {
    theory: &'a Theory,
    target: &'a Target,
    next_time: Option<i64>,
    holding: BTreeSet<Term>,
}

impl<'a> Recognizer<'a> {
    pub fn new(theory: &'a Theory, target: &'a Target) -> Self {
        Recognizer { theory, target, next_time: None, holding: BTreeSet::new() }
    }

    /// Fluents predicted to hold at `interp.time + 1`.
    pub fn step(&mut self, interp: &Interpretation) -> &BTreeSet<Term> {
        if self.next_time != Some(interp.time) {
            self.holding.clear();
        }
        self.holding = compute_next(self.theory, interp, self.target, &self.holding);
        self.next_time = Some(interp.time + 1);
        &self.holding
    }
}

pub fn infer_stream<'s>(
    theory: &Theory,
    stream: impl IntoIterator<Item = &'s Interpretation>,
    target: &Target,
) -> BTreeSet<Literal> {
    let mut rec = Recognizer::new(theory, target);
    let mut out = BTreeSet::new();
    for interp in stream {
        let t = interp.time + 1;
        for f in rec.step(interp) {
            out.insert(Literal::new("holdsAt", vec![f.clone(), Term::Int(t)]));
        }
    }
    out
}
