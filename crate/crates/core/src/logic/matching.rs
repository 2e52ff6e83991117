//! Matching of clause bodies against sets of ground facts.

use std::collections::{HashMap, HashSet};

use super::term::{Literal, Substitution, Sym, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum ArgKey {
    Const(Sym),
    Int(i64),
    Functor(Sym, usize),
}

impl ArgKey {
    fn of(t: &Term) -> Option<ArgKey> {
        match t {
            Term::Var(_) => None,
            Term::Const(c) => Some(ArgKey::Const(c.clone())),
            Term::Int(i) => Some(ArgKey::Int(*i)),
            Term::Compound(f, a) => Some(ArgKey::Functor(f.clone(), a.len())),
        }
    }
}

/// A set of ground literals indexed by predicate and by the shape of the
/// first argument.
#[derive(Clone, Debug, Default)]
pub struct FactSet {
    by_pred: HashMap<(Sym, usize), Vec<Literal>>,
    by_first: HashMap<(Sym, usize, ArgKey), Vec<Literal>>,
    all: HashSet<Literal>,
}

impl FactSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, lit: Literal) -> bool {
        debug_assert!(lit.is_ground() && !lit.negated);
        if !self.all.insert(lit.clone()) {
            return false;
        }
        let key = (lit.pred.clone(), lit.arity());
        if let Some(first) = lit.args.first().and_then(ArgKey::of) {
            self.by_first.entry((key.0.clone(), key.1, first)).or_default().push(lit.clone());
        }
        self.by_pred.entry(key).or_default().push(lit);
        true
    }

    pub fn contains(&self, lit: &Literal) -> bool {
        self.all.contains(lit)
    }

    pub fn len(&self) -> usize {
        self.all.len()
    }

    pub fn is_empty(&self) -> bool {
        self.all.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Literal> {
        self.by_pred.values().flatten()
    }

    pub fn with_predicate(&self, pred: &str, arity: usize) -> &[Literal] {
        self.by_pred.get(&(Sym::from(pred), arity)).map_or(&[], Vec::as_slice)
    }

    fn candidates(&self, pattern: &Literal, b: &Bindings) -> &[Literal] {
        let first = pattern.args.first().and_then(|a| match a {
            Term::Var(v) => b.get(v).and_then(ArgKey::of),
            other => ArgKey::of(other),
        });
        match first {
            Some(k) => self
                .by_first
                .get(&(pattern.pred.clone(), pattern.arity(), k))
                .map_or(&[], Vec::as_slice),
            None => self
                .by_pred
                .get(&(pattern.pred.clone(), pattern.arity()))
                .map_or(&[], Vec::as_slice),
        }
    }
}

impl FromIterator<Literal> for FactSet {
    fn from_iter<I: IntoIterator<Item = Literal>>(iter: I) -> Self {
        let mut fs = FactSet::new();
        for l in iter {
            fs.insert(l);
        }
        fs
    }
}

impl<'a> Extend<&'a Literal> for FactSet {
    fn extend<I: IntoIterator<Item = &'a Literal>>(&mut self, iter: I) {
        for l in iter {
            self.insert(l.clone());
        }
    }
}

/// Trail-based binding store; undo by truncation.
#[derive(Default)]
pub(crate) struct Bindings {
    trail: Vec<(Sym, Term)>,
}

impl Bindings {
    pub(crate) fn from_subst(s: &Substitution) -> Self {
        Bindings { trail: s.iter().map(|(k, v)| (k.clone(), v.clone())).collect() }
    }

    pub(crate) fn get(&self, v: &Sym) -> Option<&Term> {
        self.trail.iter().rev().find(|(k, _)| k == v).map(|(_, t)| t)
    }

    pub(crate) fn mark(&self) -> usize {
        self.trail.len()
    }

    pub(crate) fn undo(&mut self, mark: usize) {
        self.trail.truncate(mark);
    }

    pub(crate) fn to_subst(&self) -> Substitution {
        self.trail.iter().cloned().collect()
    }

    fn is_bound(&self, t: &Term) -> bool {
        match t {
            Term::Var(v) => self.get(v).is_some(),
            Term::Compound(_, args) => args.iter().all(|a| self.is_bound(a)),
            _ => true,
        }
    }

    /// One-way matching of `pattern` onto `target`: variables in the pattern
    /// bind, everything in `target` is rigid. Leaves partial bindings on
    /// failure; callers undo to their mark.
    pub(crate) fn match_term(&mut self, pattern: &Term, target: &Term) -> bool {
        match pattern {
            Term::Var(v) => match self.get(v) {
                Some(bound) => bound == target,
                None => {
                    self.trail.push((v.clone(), target.clone()));
                    true
                }
            },
            Term::Compound(f, args) => match target {
                Term::Compound(g, targs) if f == g && args.len() == targs.len() => {
                    args.iter().zip(targs).all(|(p, t)| self.match_term(p, t))
                }
                _ => false,
            },
            other => other == target,
        }
    }

    pub(crate) fn match_literal(&mut self, pattern: &Literal, target: &Literal) -> bool {
        pattern.pred == target.pred
            && pattern.args.len() == target.args.len()
            && pattern.args.iter().zip(&target.args).all(|(p, t)| self.match_term(p, t))
    }
}

/// All substitutions extending `seed` under which every positive body
/// literal is a fact and no negated literal matches a fact.
///
/// Negated literals are checked once the positive ones are matched; a
/// variable left unbound inside a negated literal is read existentially
/// (`not p(X)` succeeds iff no `p(_)` fact exists). The result is sorted and
/// free of duplicates.
pub fn match_body(body: &[Literal], facts: &FactSet, seed: &Substitution) -> Vec<Substitution> {
    let mut out = Vec::new();
    run(body, facts, seed, &mut |b| {
        out.push(b.to_subst());
        false
    });
    out.sort();
    out.dedup();
    out
}

/// Whether `match_body` would return at least one substitution.
pub fn body_satisfiable(body: &[Literal], facts: &FactSet, seed: &Substitution) -> bool {
    let mut found = false;
    run(body, facts, seed, &mut |_| {
        found = true;
        true
    });
    found
}

/// Calls `on_solution` for every solution (possibly with repeats); stops as
/// soon as the callback returns `true`.
pub(crate) fn for_each_solution(
    body: &[Literal],
    facts: &FactSet,
    seed: &Substitution,
    on_solution: &mut dyn FnMut(&Bindings) -> bool,
) {
    run(body, facts, seed, on_solution)
}

fn run(body: &[Literal], facts: &FactSet, seed: &Substitution, on_solution: &mut dyn FnMut(&Bindings) -> bool) {
    let mut positives: Vec<&Literal> = body.iter().filter(|l| !l.negated).collect();
    let negatives: Vec<&Literal> = body.iter().filter(|l| l.negated).collect();
    let mut b = Bindings::from_subst(seed);
    solve(&mut positives, &negatives, facts, &mut b, on_solution);
}

fn solve(
    remaining: &mut Vec<&Literal>,
    negatives: &[&Literal],
    facts: &FactSet,
    b: &mut Bindings,
    on_solution: &mut dyn FnMut(&Bindings) -> bool,
) -> bool {
    if remaining.is_empty() {
        let blocked = negatives.iter().any(|neg| {
            facts.candidates(neg, b).iter().any(|fact| {
                let mark = b.mark();
                let hit = b.match_literal(neg, fact);
                b.undo(mark);
                hit
            })
        });
        return !blocked && on_solution(b);
    }
    // Most-bound literal first; ties keep body order.
    let pick = (0..remaining.len())
        .max_by_key(|&i| {
            let bound = remaining[i].args.iter().filter(|a| b.is_bound(a)).count();
            (bound, std::cmp::Reverse(i))
        })
        .unwrap();
    let lit = remaining.remove(pick);
    let mut stop = false;
    for fact in facts.candidates(lit, b) {
        let mark = b.mark();
        if b.match_literal(lit, fact) && solve(remaining, negatives, facts, b, on_solution) {
            stop = true;
        }
        b.undo(mark);
        if stop {
            break;
        }
    }
    remaining.insert(pick, lit);
    stop
}
