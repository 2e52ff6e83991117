//! Seeds for theory expansion and bottom-clause construction.
//!
//! `initiatedAt`/`terminatedAt` never occur in the data, so seed atoms are
//! abduced from annotation transitions: under the two EC axioms a fluent
//! that starts holding at `t+1` must have been initiated at `t`, and one
//! that stops holding must have been terminated at `t`.

use std::collections::{BTreeMap, BTreeSet};

use crate::ec::{Interpretation, Target};
use crate::logic::{sym, Clause, HeadKind, Literal, ModeAtom, ModeBias, ModeTerm, Placemarker, Placement, Sym, Term};

pub const DEFAULT_MAX_BODY: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Seed {
    pub kind: HeadKind,
    pub fluent: Term,
    pub time: i64,
}

impl Seed {
    pub fn atom(&self) -> Literal {
        Literal::new(self.kind.predicate(), vec![self.fluent.clone(), Term::Int(self.time)])
    }
}

pub fn abduce_seeds(interp: &Interpretation, target: &Target) -> BTreeSet<Seed> {
    let started = interp.holds_next.difference(&interp.holds_now).map(|f| (HeadKind::Initiated, f));
    let ended = interp.holds_now.difference(&interp.holds_next).map(|f| (HeadKind::Terminated, f));
    started
        .chain(ended)
        .filter(|(_, f)| target.is_fluent(f))
        .map(|(kind, f)| Seed { kind, fluent: f.clone(), time: interp.time })
        .collect()
}

/// Most specific clause for a seed under the mode bias.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BottomClause {
    pub head: Literal,
    pub body: Vec<Literal>,
    /// Index into `ModeBias::bodies` of the declaration each body literal instantiates.
    pub modes: Vec<usize>,
    /// Terms in `+` slots of each body literal.
    pub inputs: Vec<Vec<Term>>,
    /// Terms in `-` slots of each body literal.
    pub outputs: Vec<Vec<Term>>,
    /// Variable to the constant it replaced.
    pub bindings: BTreeMap<Sym, Term>,
}

impl BottomClause {
    pub fn as_clause(&self) -> Clause {
        Clause::new(self.head.clone(), self.body.clone())
    }

    /// The empty-bodied clause `head(⊥) ←`.
    pub fn head_clause(&self) -> Clause {
        Clause::fact(self.head.clone())
    }

    pub fn len(&self) -> usize {
        self.body.len()
    }

    pub fn is_empty(&self) -> bool {
        self.body.is_empty()
    }
}

fn head_mode<'a>(bias: &'a ModeBias, head: &Literal) -> Option<&'a ModeAtom> {
    bias.heads.iter().find(|m| m.slots(head).is_some())
}

/// Ground bottom clause: every narrative atom at the seed's time that
/// instantiates a body declaration whose `+` slots are filled by constants
/// of the head or of earlier `-` slots. Body size is capped at `max_body`.
pub fn saturate(seed: &Seed, interp: &Interpretation, bias: &ModeBias, max_body: usize) -> BottomClause {
    let head = seed.atom();
    let mut bottom = BottomClause {
        head: head.clone(),
        body: Vec::new(),
        modes: Vec::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        bindings: BTreeMap::new(),
    };
    let Some(hmode) = head_mode(bias, &head) else {
        return bottom;
    };
    let mut known: BTreeMap<Sym, BTreeSet<Term>> = BTreeMap::new();
    for (p, t) in hmode.slots(&head).unwrap() {
        if p.placement != Placement::Constant {
            known.entry(p.ty.clone()).or_default().insert(t.clone());
        }
    }
    let mut seen: BTreeSet<&Literal> = BTreeSet::new();
    'rounds: loop {
        let mut produced: Vec<(Sym, Term)> = Vec::new();
        let before = bottom.body.len();
        for (mi, m) in bias.bodies.iter().enumerate() {
            let mut facts: Vec<&Literal> = interp.facts().with_predicate(&m.pred, m.args.len()).iter().collect();
            facts.sort();
            for fact in facts {
                if seen.contains(fact) {
                    continue;
                }
                let Some(slots) = m.slots(fact) else { continue };
                if !slots.iter().all(|(p, t)| admissible(p, t, &known, bias)) {
                    continue;
                }
                if bottom.body.len() == max_body {
                    break 'rounds;
                }
                seen.insert(fact);
                let pick = |pl: Placement| -> Vec<Term> {
                    slots.iter().filter(|(p, _)| p.placement == pl).map(|(_, t)| (*t).clone()).collect()
                };
                let outs = pick(Placement::Output);
                for (p, t) in slots.iter().filter(|(p, _)| p.placement == Placement::Output) {
                    produced.push((p.ty.clone(), (*t).clone()));
                }
                bottom.inputs.push(pick(Placement::Input));
                bottom.outputs.push(outs);
                bottom.body.push(fact.clone());
                bottom.modes.push(mi);
            }
        }
        let mut grew = false;
        for (ty, t) in produced {
            grew |= known.entry(ty).or_default().insert(t);
        }
        if bottom.body.len() == before || !grew {
            break;
        }
    }
    bottom
}

fn admissible(p: &Placemarker, t: &Term, known: &BTreeMap<Sym, BTreeSet<Term>>, bias: &ModeBias) -> bool {
    match p.placement {
        Placement::Input => known.get(&p.ty).is_some_and(|s| s.contains(t)),
        Placement::Output => true,
        Placement::Constant => bias.constants_of(&p.ty).is_none_or(|vals| vals.contains(t)),
    }
}

/// Replaces constants in `+`/`-` slots with variables, consistently across
/// the clause; `#` slots keep their constants. Time-typed variables are
/// named `T`, `T1`, ..., all others `X0`, `X1`, ....
pub fn variabilize(ground: &BottomClause, bias: &ModeBias) -> BottomClause {
    let time_type = bias.time_type().cloned();
    let mut names = Namer { vars: BTreeMap::new(), bindings: ground.bindings.clone(), time_type, n_time: 0, n_other: 0 };
    for (v, c) in &ground.bindings {
        names.vars.insert(c.clone(), v.clone());
    }
    let head = match head_mode(bias, &ground.head) {
        Some(m) => rewrite_literal(m, &ground.head, &mut names),
        None => ground.head.clone(),
    };
    let mut out = BottomClause {
        head,
        body: Vec::with_capacity(ground.body.len()),
        modes: ground.modes.clone(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        bindings: BTreeMap::new(),
    };
    for (lit, &mi) in ground.body.iter().zip(&ground.modes) {
        let m = &bias.bodies[mi];
        let lit = rewrite_literal(m, lit, &mut names);
        let slots = m.slots(&lit).expect("rewritten literal keeps its mode shape");
        let pick = |pl: Placement| slots.iter().filter(|(p, _)| p.placement == pl).map(|(_, t)| (*t).clone()).collect();
        out.inputs.push(pick(Placement::Input));
        out.outputs.push(pick(Placement::Output));
        out.body.push(lit);
    }
    out.bindings = names.bindings;
    out
}

struct Namer {
    vars: BTreeMap<Term, Sym>,
    bindings: BTreeMap<Sym, Term>,
    time_type: Option<Sym>,
    n_time: usize,
    n_other: usize,
}

impl Namer {
    fn var_for(&mut self, ty: &Sym, constant: &Term) -> Term {
        if constant.is_var() {
            return constant.clone();
        }
        if let Some(v) = self.vars.get(constant) {
            return Term::Var(v.clone());
        }
        let name = if self.time_type.as_ref() == Some(ty) {
            let n = self.n_time;
            self.n_time += 1;
            if n == 0 { sym("T") } else { sym(&format!("T{n}")) }
        } else {
            let n = self.n_other;
            self.n_other += 1;
            sym(&format!("X{n}"))
        };
        self.vars.insert(constant.clone(), name.clone());
        self.bindings.insert(name.clone(), constant.clone());
        Term::Var(name)
    }
}

fn rewrite_literal(m: &ModeAtom, lit: &Literal, names: &mut Namer) -> Literal {
    Literal {
        pred: lit.pred.clone(),
        args: m.args.iter().zip(&lit.args).map(|(mt, t)| rewrite(mt, t, names)).collect(),
        negated: lit.negated,
    }
}

fn rewrite(m: &ModeTerm, t: &Term, names: &mut Namer) -> Term {
    match (m, t) {
        (ModeTerm::Place(p), t) if p.placement != Placement::Constant => names.var_for(&p.ty, t),
        (ModeTerm::Compound(_, margs), Term::Compound(f, targs)) => {
            Term::Compound(f.clone(), margs.iter().zip(targs).map(|(m, t)| rewrite(m, t, names)).collect())
        }
        _ => t.clone(),
    }
}

/// Ground bottom clause for each seed of `kind`, variabilized.
pub fn bottoms_for(
    interp: &Interpretation,
    target: &Target,
    bias: &ModeBias,
    kind: HeadKind,
    max_body: usize,
) -> Vec<(Seed, BottomClause)> {
    abduce_seeds(interp, target)
        .into_iter()
        .filter(|s| s.kind == kind)
        .map(|s| {
            let g = saturate(&s, interp, bias, max_body);
            let b = variabilize(&g, bias);
            (s, b)
        })
        .collect()
}
