#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng;

use ecstream::dispatch::{run_online, OnlineConfig};
use ecstream::ec::{Background, Interpretation, Target};
use ecstream::eval::{evaluate, Metrics};
use ecstream::io::{generate_synthetic, parse_theory, window_frames, NoiseSpec, SynthConfig};
use ecstream::learner::LearnerConfig;
use ecstream::log::Decision;
use ecstream::logic::{parse_mode_bias, Clause, HeadKind, Literal, ModeBias, Term, Theory};

pub const BIAS: &str = include_str!("../data/moving.mode");
pub const GT: &str = include_str!("../data/moving_gt.lp");

pub fn bias() -> ModeBias {
    parse_mode_bias(BIAS).unwrap()
}

pub fn gt() -> Theory {
    parse_theory(GT).unwrap()
}

pub fn target() -> Target {
    Target::from_bias(&bias(), "moving").unwrap()
}

pub fn background() -> Background {
    Background::from_bias(&bias(), "moving")
}

pub fn synthetic(entities: usize, length: usize, seed: u64, flip: f64) -> Vec<Interpretation> {
    let cfg = SynthConfig { noise: NoiseSpec { flip, drop: 0.0, seed }, ..SynthConfig::new(entities, length, seed) };
    window_frames(generate_synthetic(&gt(), &cfg).unwrap(), background()).collect::<Result<_, _>>().unwrap()
}

pub struct Run {
    pub metrics: Metrics,
    pub log: Vec<Decision>,
    pub elapsed: Duration,
    pub peak_bytes: usize,
    pub theory: Theory,
}

/// Trains on a generated stream and scores on a clean held-out one.
pub fn pipeline(length: usize, flip: f64, warmup: u64, test: &[Interpretation]) -> Run {
    let cfg = |kind| LearnerConfig { n_min: warmup, s_min: 0.5, delta: 1e-5, depth: 1, ..LearnerConfig::new(kind) };
    let mut online = OnlineConfig::new(cfg(HeadKind::Initiated), cfg(HeadKind::Terminated));
    online.progress_every = 0;
    let start = Instant::now();
    let cfg = SynthConfig { noise: NoiseSpec { flip, drop: 0.0, seed: 1 }, ..SynthConfig::new(4, length, 1) };
    let train = window_frames(generate_synthetic(&gt(), &cfg).unwrap(), background());
    let mut log = Vec::new();
    let res = run_online(train, Arc::new(bias()), Arc::new(target()), &online, |d| log.push(d)).unwrap();
    let theory = res.theory();
    let metrics = evaluate(&theory, test, &target());
    Run {
        metrics,
        log,
        elapsed: start.elapsed(),
        peak_bytes: res.init.peak_state_bytes() + res.term.peak_state_bytes(),
        theory,
    }
}

pub const ACTS: [&str; 3] = ["walking", "active", "inactive"];
pub const TESTS: [(&str, &[i64]); 3] =
    [("distanceLessThan", &[20, 25, 30, 40]), ("distanceMoreThan", &[20, 25, 30, 40]), ("directionLessThan", &[45, 90])];

pub fn entity(i: usize) -> Term {
    Term::constant(&format!("id{i}"))
}

pub fn holds(a: &Term, b: &Term, t: i64) -> Literal {
    Literal::new("holdsAt", vec![Term::compound("moving", vec![a.clone(), b.clone()]), Term::Int(t)])
}

/// A random interpretation at time 5 over at most four entities and at
/// most twenty narrative facts. Every entity gets at least one activity.
pub fn random_interpretation(rng: &mut impl Rng) -> Interpretation {
    let t = 5;
    let k = rng.gen_range(1..=4);
    let ents: Vec<Term> = (0..k).map(entity).collect();
    let mut narrative = Vec::new();
    for e in &ents {
        let act = *ACTS.choose(rng).unwrap();
        narrative.push(Literal::new("happensAt", vec![Term::compound(act, vec![e.clone()]), Term::Int(t)]));
    }
    let extra = rng.gen_range(0..=20 - k);
    for _ in 0..extra {
        let time = Term::Int(t + rng.gen_range(0..2));
        let a = ents.choose(rng).unwrap().clone();
        if rng.gen_bool(0.4) {
            let act = *ACTS.choose(rng).unwrap();
            narrative.push(Literal::new("happensAt", vec![Term::compound(act, vec![a]), time]));
        } else {
            let b = ents.choose(rng).unwrap().clone();
            let (pred, consts) = TESTS.choose(rng).unwrap();
            let c = Term::Int(*consts.choose(rng).unwrap());
            narrative.push(Literal::new(pred, vec![a, b, c, time]));
        }
    }
    let mut annotation = Vec::new();
    for a in &ents {
        for b in &ents {
            if a != b {
                for dt in 0..2 {
                    if rng.gen_bool(0.35) {
                        annotation.push(holds(a, b, t + dt));
                    }
                }
            }
        }
    }
    Interpretation::from_parts(0, t, narrative, Vec::new(), annotation, &background()).unwrap()
}

/// A random clause with a `moving(X,Y)` head and up to three body
/// literals over X, Y and a body-only variable Z.
pub fn random_clause(rng: &mut impl Rng) -> Clause {
    let kind = if rng.gen_bool(0.5) { HeadKind::Initiated } else { HeadKind::Terminated };
    let var = |rng: &mut dyn rand::RngCore| Term::var(["X", "Y", "Z"][rng.gen_range(0..3)]);
    let head = Literal::new(
        kind.predicate(),
        vec![Term::compound("moving", vec![Term::var("X"), Term::var("Y")]), Term::var("T")],
    );
    let n = rng.gen_range(0..=3);
    let mut body = Vec::new();
    for _ in 0..n {
        if rng.gen_bool(0.4) {
            let act = *ACTS.choose(rng).unwrap();
            body.push(Literal::new("happensAt", vec![Term::compound(act, vec![var(rng)]), Term::var("T")]));
        } else {
            let (pred, consts) = TESTS.choose(rng).unwrap();
            let c = Term::Int(*consts.choose(rng).unwrap());
            body.push(Literal::new(pred, vec![var(rng), var(rng), c, Term::var("T")]));
        }
    }
    Clause::new(head, body)
}

/// Brute-force grounding: every assignment of the clause's variables to
/// constants of the interpretation, with `T` fixed to its first time
/// point. A fluent counts when all its arguments occur as people in the
/// narrative.
pub fn oracle_fired(clause: &Clause, interp: &Interpretation) -> BTreeSet<Term> {
    let facts: BTreeSet<&Literal> = interp.narrative.iter().chain(&interp.derived).collect();
    let mut people = BTreeSet::new();
    for l in &interp.narrative {
        match (&*l.pred, l.args.first()) {
            ("happensAt", Some(Term::Compound(_, args))) => people.extend(args.iter().cloned()),
            (_, Some(_)) => people.extend(l.args[..2].iter().cloned()),
            _ => {}
        }
    }
    let universe: Vec<Term> = people.iter().cloned().chain((0..3).map(|i| entity(i + 10))).collect();
    let names = ["X", "Y", "Z"];
    let mut out = BTreeSet::new();
    let mut assign = [0usize; 3];
    let total = universe.len().pow(3);
    for code in 0..total {
        let mut c = code;
        for a in assign.iter_mut() {
            *a = c % universe.len();
            c /= universe.len();
        }
        let mut subst: BTreeMap<_, _> =
            names.iter().zip(assign).map(|(n, i)| (ecstream::logic::sym(n), universe[i].clone())).collect();
        subst.insert(ecstream::logic::sym("T"), Term::Int(interp.time));
        if clause.body.iter().all(|l| facts.contains(&l.apply(&subst))) {
            let x = &subst[&ecstream::logic::sym("X")];
            let y = &subst[&ecstream::logic::sym("Y")];
            if people.contains(x) && people.contains(y) {
                out.insert(Term::compound("moving", vec![x.clone(), y.clone()]));
            }
        }
    }
    out
}

/// (tp, fp, fn) by the counting rules, from an oracle firing set.
pub fn oracle_counts(clause: &Clause, interp: &Interpretation) -> (u64, u64, u64) {
    let fired = oracle_fired(clause, interp);
    match clause.head_kind().unwrap() {
        HeadKind::Initiated => {
            let tp = fired.iter().filter(|f| interp.holds_next.contains(*f)).count() as u64;
            (tp, fired.len() as u64 - tp, 0)
        }
        HeadKind::Terminated => {
            let persisting: Vec<&Term> = interp.holds_now.intersection(&interp.holds_next).collect();
            let fn_ = persisting.iter().filter(|f| fired.contains(**f)).count() as u64;
            (persisting.len() as u64 - fn_, 0, fn_)
        }
    }
}
