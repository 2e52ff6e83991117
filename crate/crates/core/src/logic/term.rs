use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-by-sharing symbol. Ordering is lexicographic so every ordered
/// collection keyed by symbols is deterministic across runs.
pub type Sym = Arc<str>;

pub fn sym(s: &str) -> Sym {
    Arc::from(s)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Sym),
    Const(Sym),
    Int(i64),
    Compound(Sym, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(sym(name))
    }

    pub fn constant(name: &str) -> Term {
        Term::Const(sym(name))
    }

    pub fn compound(functor: &str, args: Vec<Term>) -> Term {
        Term::Compound(sym(functor), args)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Const(_) | Term::Int(_) => true,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(i) => Some(*i),
            _ => None,
        }
    }

    /// Functor name and arity of a compound, or `None` for other terms.
    pub fn functor(&self) -> Option<(&Sym, usize)> {
        match self {
            Term::Compound(f, args) => Some((f, args.len())),
            _ => None,
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Sym>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            _ => {}
        }
    }

    /// Pushes this term and all of its subterms.
    pub fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        out.insert(self.clone());
        if let Term::Compound(_, args) = self {
            args.iter().for_each(|a| a.collect_subterms(out));
        }
    }

    pub fn apply(&self, subst: &Substitution) -> Term {
        match self {
            Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| a.apply(subst)).collect())
            }
            _ => self.clone(),
        }
    }

    /// Replaces variables through `f`, leaving everything else intact.
    pub fn map_vars(&self, f: &mut impl FnMut(&Sym) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::Compound(name, args) => {
                Term::Compound(name.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::Int(i) => write!(f, "{i}"),
            Term::Compound(name, args) => {
                write!(f, "{name}(")?;
                write_args(f, args)?;
                f.write_str(")")
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

/// A substitution from variable names to terms.
pub type Substitution = BTreeMap<Sym, Term>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub pred: Sym,
    pub args: Vec<Term>,
    /// Negation as failure.
    pub negated: bool,
}

impl Literal {
    pub fn new(pred: &str, args: Vec<Term>) -> Literal {
        Literal { pred: sym(pred), args, negated: false }
    }

    pub fn negate(mut self) -> Literal {
        self.negated = !self.negated;
        self
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        self.args.iter().for_each(|a| a.collect_vars(&mut out));
        out
    }

    pub fn apply(&self, subst: &Substitution) -> Literal {
        Literal {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.apply(subst)).collect(),
            negated: self.negated,
        }
    }

    pub fn map_vars(&self, f: &mut impl FnMut(&Sym) -> Term) -> Literal {
        Literal {
            pred: self.pred.clone(),
            args: self.args.iter().map(|a| a.map_vars(f)).collect(),
            negated: self.negated,
        }
    }

    /// Trailing integer argument, the time stamp of `happensAt`/`holdsAt` atoms.
    pub fn time(&self) -> Option<i64> {
        self.args.last().and_then(Term::as_int)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{}(", self.pred)?;
        write_args(f, &self.args)?;
        f.write_str(")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadKind {
    Initiated,
    Terminated,
}

impl HeadKind {
    pub fn predicate(self) -> &'static str {
        match self {
            HeadKind::Initiated => "initiatedAt",
            HeadKind::Terminated => "terminatedAt",
        }
    }

    pub fn of_predicate(pred: &str) -> Option<HeadKind> {
        match pred {
            "initiatedAt" => Some(HeadKind::Initiated),
            "terminatedAt" => Some(HeadKind::Terminated),
            _ => None,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            HeadKind::Initiated => "init",
            HeadKind::Terminated => "term",
        }
    }
}

impl fmt::Display for HeadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.predicate())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub head: Literal,
    pub body: Vec<Literal>,
}

impl Clause {
    pub fn new(head: Literal, body: Vec<Literal>) -> Clause {
        Clause { head, body }
    }

    pub fn fact(head: Literal) -> Clause {
        Clause { head, body: Vec::new() }
    }

    pub fn head_kind(&self) -> Option<HeadKind> {
        HeadKind::of_predicate(&self.head.pred)
    }

    /// Number of literals, head included.
    pub fn size(&self) -> usize {
        1 + self.body.len()
    }

    pub fn vars(&self) -> Vec<Sym> {
        let mut out = Vec::new();
        for lit in std::iter::once(&self.head).chain(&self.body) {
            lit.args.iter().for_each(|a| a.collect_vars(&mut out));
        }
        out
    }

    /// Key identifying the clause up to variable renaming and body order.
    ///
    /// Variables are renumbered by first occurrence in the head, then in the
    /// body literals sorted by their variable-blind shape.
    pub fn canonical_key(&self) -> Clause {
        let mut order: Vec<&Literal> = self.body.iter().collect();
        order.sort_by_cached_key(|l| (shape(l), (*l).clone()));
        let mut names: BTreeMap<Sym, Term> = BTreeMap::new();
        let mut rename = |v: &Sym| {
            let next = names.len();
            names.entry(v.clone()).or_insert_with(|| Term::Var(sym(&format!("_V{next}")))).clone()
        };
        let head = self.head.map_vars(&mut rename);
        let mut body: Vec<Literal> = order.into_iter().map(|l| l.map_vars(&mut rename)).collect();
        body.sort();
        body.dedup();
        Clause { head, body }
    }
}

fn shape(lit: &Literal) -> Literal {
    lit.map_vars(&mut |_| Term::Var(sym("_")))
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, lit) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{lit}")?;
            }
        }
        f.write_str(".")
    }
}

/// An ordered collection of clauses.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theory {
    pub clauses: Vec<Clause>,
}

impl Theory {
    pub fn new(clauses: Vec<Clause>) -> Theory {
        Theory { clauses }
    }

    /// Total number of literals, counting heads.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::size).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn of_kind(&self, kind: HeadKind) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(move |c| c.head_kind() == Some(kind))
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}
