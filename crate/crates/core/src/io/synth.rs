//! Synthetic activity streams labelled by a known theory.
//!
//! Entities wander an arena, switching between walking, active and
//! inactive. From time to time two of them team up and walk side by side;
//! a team splits by one member stopping and the other walking off and
//! stopping further away. Near misses (people crossing, passing someone
//! standing still, or walking the same way a little too far apart) are
//! staged as well. The annotation is what the ground-truth theory derives
//! under the EC axioms.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stream::Frame;
use crate::ec::{compute_next, Background, Interpretation, Target};
use crate::error::{Error, Result};
use crate::logic::{HeadKind, Literal, Sym, Term, Theory};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    /// Probability of flipping each annotation instance at each time point.
    pub flip: f64,
    /// Probability of dropping each narrative atom.
    pub drop: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn clean(seed: u64) -> NoiseSpec {
        NoiseSpec { flip: 0.0, drop: 0.0, seed }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub entities: usize,
    /// Time points, gaps excluded.
    pub length: usize,
    /// Time points per episode; episodes are separated by a one-point gap.
    pub episode_len: usize,
    pub noise: NoiseSpec,
}

impl SynthConfig {
    pub fn new(entities: usize, length: usize, seed: u64) -> SynthConfig {
        SynthConfig { entities, length, episode_len: 500, noise: NoiseSpec::clean(seed) }
    }

    pub fn validate(&self) -> Result<()> {
        if self.entities < 2 {
            return Err(Error::Config("need at least two entities".into()));
        }
        if self.episode_len < 2 {
            return Err(Error::Config("episodes need at least two time points".into()));
        }
        for (name, p) in [("flip", self.noise.flip), ("drop", self.noise.drop)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} probability must lie in [0,1], got {p}")));
            }
        }
        Ok(())
    }
}

const ARENA: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Act {
    Walking,
    Active,
    Inactive,
}

impl Act {
    fn name(self) -> &'static str {
        match self {
            Act::Walking => "walking",
            Act::Active => "active",
            Act::Inactive => "inactive",
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Phase {
    act: Act,
    dir: f64,
    speed: f64,
    steps: u32,
    /// Part of a staged episode; wandering phases can be interrupted.
    staged: bool,
}

#[derive(Clone, Debug)]
enum Role {
    Free,
    /// `team`: walking together; otherwise merely side by side.
    Leader { follower: usize, left: u32, team: bool },
    Follower { dx: f64, dy: f64 },
}

#[derive(Clone, Debug)]
struct Entity {
    name: Term,
    x: f64,
    y: f64,
    dir: f64,
    act: Act,
    role: Role,
    plan: Vec<Phase>,
}

impl Entity {
    fn busy(&self) -> bool {
        !matches!(self.role, Role::Free) || self.plan.iter().any(|p| p.staged)
    }
}

fn heading(dx: f64, dy: f64) -> f64 {
    dy.atan2(dx).to_degrees().rem_euclid(360.0)
}

struct World {
    rng: ChaCha8Rng,
    entities: Vec<Entity>,
}

impl World {
    fn new(n: usize, rng: ChaCha8Rng) -> World {
        let mut w = World { rng, entities: Vec::new() };
        w.reset(n);
        w
    }

    fn reset(&mut self, n: usize) {
        let rng = &mut self.rng;
        self.entities = (0..n)
            .map(|i| Entity {
                name: Term::constant(&format!("id{}", i + 1)),
                x: rng.gen_range(100.0..ARENA - 100.0),
                y: rng.gen_range(100.0..ARENA - 100.0),
                dir: rng.gen_range(0.0..360.0),
                act: Act::Active,
                role: Role::Free,
                plan: Vec::new(),
            })
            .collect();
    }

    fn random_phase(&mut self, dir: f64) -> Phase {
        let rng = &mut self.rng;
        match rng.gen_range(0..10) {
            0..=4 => Phase {
                act: Act::Walking,
                dir: (dir + rng.gen_range(-60.0..60.0)).rem_euclid(360.0),
                speed: rng.gen_range(2.0..5.0),
                steps: rng.gen_range(5..30),
                staged: false,
            },
            5..=7 => Phase { act: Act::Active, dir, speed: 0.0, steps: rng.gen_range(5..20), staged: false },
            _ => Phase { act: Act::Inactive, dir, speed: 0.0, steps: rng.gen_range(5..30), staged: false },
        }
    }

    fn free_idle(&self) -> Vec<usize> {
        (0..self.entities.len()).filter(|&i| !self.entities[i].busy()).collect()
    }

    fn place_near(&mut self, j: usize, i: usize, lo: f64, hi: f64) -> (f64, f64) {
        let r = self.rng.gen_range(lo..hi);
        let a = self.rng.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (r * a.cos(), r * a.sin());
        let (x, y) = (self.entities[i].x, self.entities[i].y);
        self.entities[j].x = x + dx;
        self.entities[j].y = y + dy;
        (dx, dy)
    }

    fn form_team(&mut self, i: usize, j: usize, team: bool) {
        let (dx, dy) = if team { self.place_near(j, i, 5.0, 20.0) } else { self.place_near(j, i, 26.0, 38.0) };
        let dir = self.rng.gen_range(0.0..360.0);
        let left = self.rng.gen_range(20..80);
        let e = &mut self.entities[i];
        e.role = Role::Leader { follower: j, left, team };
        e.act = Act::Walking;
        e.dir = dir;
        e.plan.clear();
        let f = &mut self.entities[j];
        f.role = Role::Follower { dx, dy };
        f.act = Act::Walking;
        f.dir = dir;
        f.plan.clear();
    }

    fn split_team(&mut self, i: usize, j: usize) {
        let stop = self.rng.gen_range(15..30);
        let walk = self.rng.gen_range(10..15);
        let speed = self.rng.gen_range(4.0..6.0);
        let rest = self.rng.gen_range(10..20);
        let away = heading(self.entities[j].x - self.entities[i].x, self.entities[j].y - self.entities[i].y);
        let li = &mut self.entities[i];
        li.role = Role::Free;
        li.act = Act::Inactive;
        li.plan = vec![Phase { act: Act::Inactive, dir: li.dir, speed: 0.0, steps: stop, staged: true }];
        let fj = &mut self.entities[j];
        fj.role = Role::Free;
        fj.act = Act::Inactive;
        fj.plan = vec![
            Phase { act: Act::Inactive, dir: away, speed: 0.0, steps: rest, staged: true },
            Phase { act: Act::Walking, dir: away, speed, steps: walk, staged: true },
        ];
    }

    fn near_miss(&mut self, i: usize, j: usize) {
        let variant = self.rng.gen_range(0..2);
        let dir = self.rng.gen_range(0.0..360.0);
        let steps = self.rng.gen_range(5..15);
        let walk_i = Phase { act: Act::Walking, dir, speed: self.rng.gen_range(2.0..5.0), steps, staged: true };
        let phase_j = match variant {
            // crossing paths
            0 => {
                self.place_near(j, i, 5.0, 20.0);
                let off = self.rng.gen_range(90.0..270.0);
                Phase { act: Act::Walking, dir: (dir + off).rem_euclid(360.0), ..walk_i }
            }
            // passing someone who stands still
            _ => {
                self.place_near(j, i, 5.0, 20.0);
                let act = if self.rng.gen_bool(0.5) { Act::Active } else { Act::Inactive };
                let facing = self.rng.gen_range(0.0..360.0);
                Phase { act, dir: facing, speed: 0.0, steps, staged: true }
            }
        };
        self.entities[i].plan = vec![walk_i];
        self.entities[j].plan = vec![phase_j];
    }

    fn step(&mut self) {
        let idle = self.free_idle();
        if idle.len() >= 2 {
            let roll: f64 = self.rng.gen();
            if roll < 0.09 {
                let mut pair: Vec<usize> = idle.choose_multiple(&mut self.rng, 2).copied().collect();
                pair.sort_unstable();
                match roll {
                    r if r < 0.03 => self.form_team(pair[0], pair[1], true),
                    // walking the same way, a little too far apart
                    r if r < 0.06 => self.form_team(pair[0], pair[1], false),
                    _ => self.near_miss(pair[0], pair[1]),
                }
            }
        }
        for i in 0..self.entities.len() {
            match self.entities[i].role.clone() {
                Role::Leader { follower, left, team } => {
                    if left == 0 {
                        if team {
                            self.split_team(i, follower);
                        } else {
                            self.entities[i].role = Role::Free;
                            self.entities[follower].role = Role::Free;
                        }
                        continue;
                    }
                    let e = &mut self.entities[i];
                    e.role = Role::Leader { follower, left: left - 1, team };
                    e.dir = (e.dir + self.rng.gen_range(-15.0..15.0)).rem_euclid(360.0);
                    let v = self.rng.gen_range(2.0..4.0);
                    move_by(e, v);
                }
                Role::Follower { .. } => {}
                Role::Free => {
                    if self.entities[i].plan.is_empty() {
                        let p = self.random_phase(self.entities[i].dir);
                        self.entities[i].plan.push(p);
                    }
                    let e = &mut self.entities[i];
                    let last = e.plan.len() - 1;
                    let p = &mut e.plan[last];
                    e.act = p.act;
                    e.dir = p.dir;
                    let speed = p.speed;
                    p.steps = p.steps.saturating_sub(1);
                    if p.steps == 0 {
                        e.plan.pop();
                    }
                    if e.act == Act::Walking {
                        move_by(e, speed);
                    }
                }
            }
        }
        // followers mirror their leader
        for i in 0..self.entities.len() {
            if let Role::Leader { follower, .. } = self.entities[i].role {
                let (x, y, dir, act) = {
                    let l = &self.entities[i];
                    (l.x, l.y, l.dir, l.act)
                };
                let jitter = self.rng.gen_range(-10.0..10.0);
                let f = &mut self.entities[follower];
                if let Role::Follower { dx, dy } = f.role {
                    f.x = x + dx;
                    f.y = y + dy;
                    f.act = act;
                    f.dir = (dir + jitter).rem_euclid(360.0);
                }
            }
        }
    }

    fn narrative(&self, t: i64) -> Vec<Literal> {
        let mut out = Vec::with_capacity(self.entities.len() * 3);
        for e in &self.entities {
            let tt = Term::Int(t);
            out.push(Literal::new("happensAt", vec![Term::compound(e.act.name(), vec![e.name.clone()]), tt.clone()]));
            let coords = Term::compound(
                "coords",
                vec![e.name.clone(), Term::Int(e.x.round() as i64), Term::Int(e.y.round() as i64)],
            );
            out.push(Literal::new("holdsAt", vec![coords, tt.clone()]));
            let dir = Term::compound("direction", vec![e.name.clone(), Term::Int(e.dir.round() as i64 % 360)]);
            out.push(Literal::new("holdsAt", vec![dir, tt]));
        }
        out
    }
}

fn move_by(e: &mut Entity, v: f64) {
    let r = e.dir.to_radians();
    e.x += v * r.cos();
    e.y += v * r.sin();
    if !(0.0..=ARENA).contains(&e.x) || !(0.0..=ARENA).contains(&e.y) {
        e.x = e.x.clamp(0.0, ARENA);
        e.y = e.y.clamp(0.0, ARENA);
        e.dir = (e.dir + 180.0).rem_euclid(360.0);
    }
}

/// Target fluent name and arity from the heads of a theory.
pub fn theory_target(gt: &Theory) -> Result<(Sym, usize)> {
    let head = gt
        .clauses
        .iter()
        .find(|c| c.head_kind().is_some())
        .ok_or_else(|| Error::Config("ground-truth theory has no initiatedAt/terminatedAt clause".into()))?;
    match head.head.args.first() {
        Some(Term::Compound(f, args)) => Ok((f.clone(), args.len())),
        Some(Term::Const(f)) => Ok((f.clone(), 0)),
        _ => Err(Error::Config(format!("cannot read a target fluent from {head}"))),
    }
}

/// Lazily generated frames; see the module docs.
pub struct SyntheticStream {
    cfg: SynthConfig,
    gt: Theory,
    bg: Background,
    target: Target,
    arity: usize,
    world: World,
    noise: ChaCha8Rng,
    emitted: usize,
    holding: BTreeSet<Term>,
}

pub fn generate_synthetic(gt: &Theory, cfg: &SynthConfig) -> Result<SyntheticStream> {
    cfg.validate()?;
    let (fluent, arity) = theory_target(gt)?;
    if gt.of_kind(HeadKind::Initiated).next().is_none() {
        return Err(Error::Config("ground-truth theory has no initiatedAt clause".into()));
    }
    let bg = Background::from_clauses(&gt.clauses, &fluent);
    let rng = ChaCha8Rng::seed_from_u64(cfg.noise.seed);
    let noise = ChaCha8Rng::seed_from_u64(cfg.noise.seed ^ 0x9e37_79b9_7f4a_7c15);
    Ok(SyntheticStream {
        cfg: cfg.clone(),
        gt: gt.clone(),
        bg,
        target: Target::new(&fluent),
        arity,
        world: World::new(cfg.entities, rng),
        noise,
        emitted: 0,
        holding: BTreeSet::new(),
    })
}

impl SyntheticStream {
    /// Background the generator labels with (thresholds of the ground truth).
    pub fn background(&self) -> &Background {
        &self.bg
    }

    /// Every target instance over distinct entities.
    fn instances(&self) -> Vec<Term> {
        fn extend(names: &[Term], arity: usize, prefix: &mut Vec<Term>, out: &mut Vec<Vec<Term>>) {
            if prefix.len() == arity {
                out.push(prefix.clone());
                return;
            }
            for n in names {
                if !prefix.contains(n) {
                    prefix.push(n.clone());
                    extend(names, arity, prefix, out);
                    prefix.pop();
                }
            }
        }
        let names: Vec<Term> = self.world.entities.iter().map(|e| e.name.clone()).collect();
        let mut tuples = Vec::new();
        extend(&names, self.arity, &mut Vec::new(), &mut tuples);
        tuples.into_iter().map(|args| Term::Compound(self.target.fluent.clone(), args)).collect()
    }
}

impl Iterator for SyntheticStream {
    type Item = Frame;

    fn next(&mut self) -> Option<Frame> {
        if self.emitted >= self.cfg.length {
            return None;
        }
        let ep = self.emitted / self.cfg.episode_len;
        let k = self.emitted % self.cfg.episode_len;
        let t = (ep * (self.cfg.episode_len + 1) + k) as i64;
        if k == 0 {
            self.world.reset(self.cfg.entities);
            self.holding.clear();
        } else {
            self.world.step();
        }
        self.emitted += 1;
        let narrative = self.world.narrative(t);
        let derived = self.bg.derive(&narrative, t);
        let interp = Interpretation::from_parts(0, t, narrative.clone(), derived, vec![], &self.bg)
            .expect("generated atoms lie at time t");
        let mut shown = self.holding.clone();
        self.holding = compute_next(&self.gt, &interp, &self.target, &self.holding);
        let flip = self.cfg.noise.flip;
        for inst in self.instances() {
            if self.noise.gen_bool(flip) && !shown.remove(&inst) {
                shown.insert(inst);
            }
        }
        let drop = self.cfg.noise.drop;
        let mut atoms: Vec<Literal> = narrative.into_iter().filter(|_| !self.noise.gen_bool(drop)).collect();
        atoms.extend(shown.into_iter().map(|f| Literal::new("holdsAt", vec![f, Term::Int(t)])));
        Some(Frame { time: t, atoms })
    }
}
