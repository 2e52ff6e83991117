use std::sync::Arc;
use std::time::Instant;

use ecstream::dispatch::{run_online, OnlineConfig};
use ecstream::ec::{Background, Interpretation, Target};
use ecstream::eval::evaluate;
use ecstream::io::{generate_synthetic, parse_theory, window_frames, NoiseSpec, SynthConfig};
use ecstream::learner::LearnerConfig;
use ecstream::log::{audit, Decision};
use ecstream::logic::{parse_mode_bias, HeadKind};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let flip: f64 = args.get(1).map_or(0.0, |s| s.parse().unwrap());
    let len: usize = args.get(2).map_or(10_000, |s| s.parse().unwrap());
    let seed: u64 = args.get(3).map_or(1, |s| s.parse().unwrap());
    let bias = parse_mode_bias(include_str!("../tests/data/moving.mode")).unwrap();
    let gt = parse_theory(include_str!("../tests/data/moving_gt.lp")).unwrap();
    let bg = Background::from_bias(&bias, "moving");
    let target = Target::from_bias(&bias, "moving").unwrap();
    let train_cfg = SynthConfig { noise: NoiseSpec { flip, drop: 0.0, seed }, ..SynthConfig::new(4, len, seed) };
    let train = window_frames(generate_synthetic(&gt, &train_cfg).unwrap(), bg.clone());
    let mut cfg = OnlineConfig::new(
        LearnerConfig { n_min: 500, s_min: 0.5, ..LearnerConfig::new(HeadKind::Initiated) },
        LearnerConfig { n_min: 500, s_min: 0.5, ..LearnerConfig::new(HeadKind::Terminated) },
    );
    cfg.progress_every = 0;
    let mut log: Vec<Decision> = Vec::new();
    let t0 = Instant::now();
    let res = run_online(train, Arc::new(bias), Arc::new(target.clone()), &cfg, |d| log.push(d)).unwrap();
    println!("train {:?}", t0.elapsed());
    let theory = res.theory();
    print!("{theory}");
    println!("all init clauses: {}", res.init.clauses().len());
    println!("all term clauses: {}", res.term.clauses().len());
    let test: Vec<Interpretation> =
        window_frames(generate_synthetic(&gt, &SynthConfig::new(4, 2000, 99)).unwrap(), bg).map(|r| r.unwrap()).collect();
    let m = evaluate(&theory, &test, &target);
    println!("{m:?}");
    let gm = evaluate(&gt, &test, &target);
    println!("gt {gm:?}");
    for l in [&res.init, &res.term] {
        for c in l.clauses() {
            let mut rest = theory.clone();
            rest.clauses.retain(|k| k != &c.clause);
            let without = evaluate(&rest, &test, &target);
            println!(
                "n={} tp={} fp={} fn={} g={:.3} cands={} f1_without={:.3} :: {}",
                c.stats.n, c.stats.tp, c.stats.fp, c.stats.fn_, c.stats.score(l.kind()), c.candidates.len(), without.f1, c.clause
            );
        }
    }
    {
        use ecstream::logic::Theory;
        let mix = |a: HeadKind, from_learned: bool| -> Theory {
            let src = if from_learned { &theory } else { &gt };
            Theory::new(src.of_kind(a).cloned().collect())
        };
        let mut t1 = mix(HeadKind::Initiated, true);
        t1.clauses.extend(mix(HeadKind::Terminated, false).clauses);
        let mut t2 = mix(HeadKind::Initiated, false);
        t2.clauses.extend(mix(HeadKind::Terminated, true).clauses);
        println!("learned init + gt term: {:?}", evaluate(&t1, &test, &target));
        println!("gt init + learned term: {:?}", evaluate(&t2, &test, &target));
    }
    let rep = audit(&log);
    println!("audit starts={} expansions={} prunes={} violations={}", rep.starts, rep.expansions, rep.prunes, rep.violations.len());
    println!("peak bytes init={} term={}", res.init.peak_state_bytes(), res.term.peak_state_bytes());
}
