//! Domain knowledge that is computed rather than observed: spatial test
//! atoms derived from coordinates and directions, and the per-type constant
//! domains used to ground head variables.

use std::collections::{BTreeMap, BTreeSet};

use crate::logic::{Clause, Literal, ModeAtom, ModeBias, ModeTerm, Placement, Sym, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Distance,
    Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    Less,
    More,
}

/// A derived predicate `pred(A, B, Threshold, T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpatialTest {
    pub pred: Sym,
    pub measure: Measure,
    pub comparison: Comparison,
    pub thresholds: Vec<i64>,
}

const SPATIAL: [(&str, Measure, Comparison); 4] = [
    ("distanceLessThan", Measure::Distance, Comparison::Less),
    ("distanceMoreThan", Measure::Distance, Comparison::More),
    ("directionLessThan", Measure::Direction, Comparison::Less),
    ("directionMoreThan", Measure::Direction, Comparison::More),
];

fn spatial_kind(pred: &str) -> Option<(Measure, Comparison)> {
    SPATIAL.iter().find(|(p, ..)| *p == pred).map(|&(_, m, c)| (m, c))
}

#[derive(Clone, Debug, Default)]
pub struct Background {
    pub target: Option<Sym>,
    pub spatial: Vec<SpatialTest>,
    typing: Vec<ModeAtom>,
}

impl Background {
    /// Background with no derived predicates and no typing.
    pub fn plain(target: &str) -> Background {
        Background { target: Some(Sym::from(target)), ..Default::default() }
    }

    /// Spatial thresholds come from the `#type` vocabulary of each spatial
    /// body declaration; type domains from every body declaration.
    pub fn from_bias(bias: &ModeBias, target: &str) -> Background {
        let mut bg = Background::plain(target);
        for m in &bias.bodies {
            if spatial_kind(&m.pred).is_none() {
                continue;
            }
            let thresholds = m
                .placemarkers()
                .into_iter()
                .filter(|p| p.placement == Placement::Constant)
                .filter_map(|p| bias.constants_of(&p.ty))
                .flatten()
                .filter_map(Term::as_int)
                .collect::<Vec<_>>();
            bg.add_thresholds(&m.pred, thresholds);
        }
        bg.typing = bias.bodies.clone();
        bg
    }

    /// Spatial thresholds used by the clauses of a theory (third argument of
    /// each spatial body literal).
    pub fn from_clauses<'a>(clauses: impl IntoIterator<Item = &'a Clause>, target: &str) -> Background {
        let mut bg = Background::plain(target);
        bg.absorb_clauses(clauses);
        bg
    }

    pub fn absorb_clauses<'a>(&mut self, clauses: impl IntoIterator<Item = &'a Clause>) {
        for c in clauses {
            for lit in &c.body {
                if spatial_kind(&lit.pred).is_some() {
                    if let Some(v) = lit.args.get(2).and_then(Term::as_int) {
                        self.add_thresholds(&lit.pred, [v]);
                    }
                }
            }
        }
    }

    fn add_thresholds(&mut self, pred: &Sym, values: impl IntoIterator<Item = i64>) {
        let (measure, comparison) = spatial_kind(pred).expect("spatial predicate");
        let pos = match self.spatial.iter().position(|t| &t.pred == pred) {
            Some(i) => i,
            None => {
                self.spatial.push(SpatialTest { pred: pred.clone(), measure, comparison, thresholds: vec![] });
                self.spatial.len() - 1
            }
        };
        let test = &mut self.spatial[pos];
        test.thresholds.extend(values);
        test.thresholds.sort_unstable();
        test.thresholds.dedup();
    }

    pub fn is_annotation(&self, lit: &Literal) -> bool {
        &*lit.pred == "holdsAt"
            && match (&self.target, lit.args.first()) {
                (Some(t), Some(Term::Compound(f, _))) => f == t,
                (Some(t), Some(Term::Const(c))) => c == t,
                _ => false,
            }
    }

    /// Spatial test atoms holding at `time`, computed from
    /// `holdsAt(coords(E,X,Y),time)` and `holdsAt(direction(E,D),time)`.
    pub fn derive<'a>(&self, facts: impl IntoIterator<Item = &'a Literal>, time: i64) -> Vec<Literal> {
        if self.spatial.is_empty() {
            return Vec::new();
        }
        let mut coords: BTreeMap<&Term, (f64, f64)> = BTreeMap::new();
        let mut dirs: BTreeMap<&Term, f64> = BTreeMap::new();
        for lit in facts {
            if &*lit.pred != "holdsAt" || lit.time() != Some(time) {
                continue;
            }
            match &lit.args[0] {
                Term::Compound(f, a) if &**f == "coords" && a.len() == 3 => {
                    if let (Some(x), Some(y)) = (a[1].as_int(), a[2].as_int()) {
                        coords.insert(&a[0], (x as f64, y as f64));
                    }
                }
                Term::Compound(f, a) if &**f == "direction" && a.len() == 2 => {
                    if let Some(d) = a[1].as_int() {
                        dirs.insert(&a[0], d as f64);
                    }
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        for test in &self.spatial {
            let source: Vec<(&Term, &Term, f64)> = match test.measure {
                Measure::Distance => pairs(&coords, |a, b| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()),
                Measure::Direction => pairs(&dirs, |a, b| angle_between(*a, *b)),
            };
            for (a, b, value) in source {
                for &thr in &test.thresholds {
                    let holds = match test.comparison {
                        Comparison::Less => value < thr as f64,
                        Comparison::More => value > thr as f64,
                    };
                    if holds {
                        out.push(Literal {
                            pred: test.pred.clone(),
                            args: vec![a.clone(), b.clone(), Term::Int(thr), Term::Int(time)],
                            negated: false,
                        });
                    }
                }
            }
        }
        out
    }

    /// Constants occupying `+`/`-` slots of each type, over `facts`.
    pub fn domains<'a>(&self, facts: impl IntoIterator<Item = &'a Literal>) -> BTreeMap<Sym, BTreeSet<Term>> {
        let mut out: BTreeMap<Sym, BTreeSet<Term>> = BTreeMap::new();
        if self.typing.is_empty() {
            return out;
        }
        for lit in facts {
            for m in self.typing.iter().filter(|m| m.pred == lit.pred) {
                if let Some(slots) = m.slots(lit) {
                    for (p, t) in slots {
                        if p.placement != Placement::Constant {
                            out.entry(p.ty.clone()).or_default().insert(t.clone());
                        }
                    }
                }
            }
        }
        out
    }
}

fn pairs<'a, V>(m: &BTreeMap<&'a Term, V>, f: impl Fn(&V, &V) -> f64) -> Vec<(&'a Term, &'a Term, f64)> {
    let mut out = Vec::new();
    for (a, va) in m {
        for (b, vb) in m {
            if a != b {
                out.push((*a, *b, f(va, vb)));
            }
        }
    }
    out
}

/// Smallest absolute difference between two headings in degrees.
pub fn angle_between(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 360.0;
    d.min(360.0 - d)
}

/// Argument types of a target fluent, read from the head declarations.
pub(crate) fn fluent_arg_types(head: &ModeAtom, fluent: &str) -> Option<Vec<Sym>> {
    match head.args.first()? {
        ModeTerm::Compound(f, args) if &**f == fluent => args
            .iter()
            .map(|a| match a {
                ModeTerm::Place(p) => Some(p.ty.clone()),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}
