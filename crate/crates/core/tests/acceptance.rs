//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any gating criterion fails.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ecstream::abduce::{abduce_seeds, BottomClause};
use ecstream::ec::{compute_model, count_outcomes};
use ecstream::learner::{hoeffding_epsilon, specializations};
use ecstream::log::{write_decision, Decision};
use ecstream::logic::{Clause, HeadKind, Literal, Term, Theory};

use common::*;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit as f64, format!("took {:.1}s, limit {limit}s", elapsed.as_secs_f64()))
}

fn hoeffding() -> Outcome {
    let start = Instant::now();
    // sqrt(ln(1e5) / 2000) from 40-digit decimal arithmetic
    let reference = 0.075_871_356_469_257_32_f64;
    let eps = hoeffding_epsilon(1e-5, 1000).unwrap();
    check((eps - reference).abs() < 1e-12, format!("epsilon(1e-5, 1000) = {eps:.17}, expected {reference:.17}"))?;
    for n in 1..=10_000u64 {
        let a = hoeffding_epsilon(1e-5, 4 * n).unwrap();
        let b = hoeffding_epsilon(1e-5, n).unwrap() / 2.0;
        check(a == b, format!("epsilon(4n) != epsilon(n)/2 at n = {n}: {a} vs {b}"))?;
    }
    within(start.elapsed(), 1)?;
    Ok(format!("epsilon = {eps:.12}; quadrupling n halves epsilon exactly for n in 1..=10000"))
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let target = target();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = 2000;
    let mut nonzero = 0;
    for case in 0..cases {
        let interp = random_interpretation(&mut rng);
        let clause = random_clause(&mut rng);
        let d = count_outcomes(&clause, &interp, &target);
        let expected = oracle_counts(&clause, &interp);
        check(
            (d.tp, d.fp, d.fn_) == expected,
            format!("case {case}: {clause} gives {:?}, oracle {expected:?}", (d.tp, d.fp, d.fn_)),
        )?;
        nonzero += usize::from(expected != (0, 0, 0));
    }
    check(nonzero * 4 > cases, format!("only {nonzero} informative cases"))?;
    within(start.elapsed(), 30)?;
    Ok(format!("{cases} random clause/interpretation pairs agree ({nonzero} with non-zero counts)"))
}

fn abduction_soundness() -> Outcome {
    let target = target();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seeds_checked = 0;
    for case in 0..10_000 {
        let interp = random_interpretation(&mut rng);
        let seeds = abduce_seeds(&interp, &target);
        let started: BTreeSet<&Term> = interp.holds_next.difference(&interp.holds_now).collect();
        let ended: BTreeSet<&Term> = interp.holds_now.difference(&interp.holds_next).collect();
        for s in &seeds {
            let expected = match s.kind {
                HeadKind::Initiated => &started,
                HeadKind::Terminated => &ended,
            };
            check(expected.contains(&s.fluent), format!("case {case}: seed {} is not a transition", s.atom()))?;
            let model = compute_model(&Theory::new(vec![Clause::fact(s.atom())]), &interp, &target);
            let next = Literal::new("holdsAt", vec![s.fluent.clone(), Term::Int(interp.time + 1)]);
            let reproduced = match s.kind {
                HeadKind::Initiated => model.contains(&next),
                HeadKind::Terminated => !model.contains(&next),
            };
            check(reproduced, format!("case {case}: seed {} does not reproduce its transition", s.atom()))?;
            seeds_checked += 1;
        }
        check(
            seeds.len() == started.len() + ended.len(),
            format!("case {case}: {} seeds for {} transitions", seeds.len(), started.len() + ended.len()),
        )?;
    }
    Ok(format!("10000 patterns, {seeds_checked} seeds, all reproduce their transition"))
}

fn write_log(log: &[Decision], name: &str) -> tempfile::TempPath {
    let mut f = tempfile::Builder::new().prefix(name).suffix(".jsonl").tempfile().unwrap();
    for d in log {
        write_decision(&mut f, d).unwrap();
    }
    f.flush().unwrap();
    f.into_temp_path()
}

fn audit_cli(log: &[Decision], name: &str) -> Result<String, String> {
    let path = write_log(log, name);
    let out = Command::new(env!("CARGO_BIN_EXE_ecstream")).arg("audit").arg("--log").arg(&path).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout).trim().to_string();
    check(out.status.success(), format!("audit of {name} failed: {text}"))?;
    Ok(text.lines().last().unwrap_or("").to_string())
}

fn main() {
    let mut gating_failures = 0;
    let mut report = |n: u32, name: &str, outcome: Outcome| {
        match &outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(why) => {
                gating_failures += 1;
                println!("FAIL criterion {n} ({name}): {why}");
            }
        }
        std::io::stdout().flush().unwrap();
    };

    report(1, "Hoeffding arithmetic", hoeffding());
    report(2, "oracle equivalence", oracle_equivalence());
    report(3, "abduction soundness", abduction_soundness());

    let test = synthetic(4, 2000, 99, 0.0);
    let clean = pipeline(10_000, 0.0, 500, &test);
    report(4, "noise-free recovery", {
        let m = clean.metrics;
        check(m.f1 >= 0.95, format!("F1 {:.3} < 0.95 (P {:.3}, R {:.3})", m.f1, m.precision, m.recall))
            .and_then(|_| within(clean.elapsed, 120))
            .map(|_| format!("F1 {:.3}, size {}, {:.1}s", m.f1, clean.theory.size(), clean.elapsed.as_secs_f64()))
    });

    let noisy = pipeline(10_000, 0.1, 500, &test);
    report(5, "noise robustness", {
        let m = noisy.metrics;
        let prunes = noisy.log.iter().filter(|d| matches!(d, Decision::Prune(_))).count();
        check(prunes > 0, "no clause was pruned")
            .and_then(|_| {
                check(
                    m.f1 >= 0.80,
                    format!("F1 {:.3} < 0.80 (P {:.3}, R {:.3}); {prunes} prunes", m.f1, m.precision, m.recall),
                )
            })
            .and_then(|_| within(noisy.elapsed, 180))
            .map(|_| format!("F1 {:.3}, {prunes} prunes, {:.1}s", m.f1, noisy.elapsed.as_secs_f64()))
    });

    report(6, "decision-log audit", {
        audit_cli(&clean.log, "clean")
            .and_then(|a| audit_cli(&noisy.log, "noisy").map(|b| format!("noise-free: {a}; noisy: {b}")))
    });

    report(7, "bounded learner state", {
        let long = pipeline(100_000, 0.0, 500, &test);
        let (a, b) = (clean.peak_bytes as f64, long.peak_bytes as f64);
        let diff = (b - a).abs() / a.max(b);
        check(diff < 0.10, format!("peak state {a} bytes at 1e4 vs {b} at 1e5 ({:.1}%)", diff * 100.0))
            .map(|_| format!("peak state {a} bytes at 1e4, {b} at 1e5 ({:.1}% apart)", diff * 100.0))
    });

    report(8, "specialization counts", {
        let mut out = Ok(String::new());
        for n in [1usize, 5, 10, 15] {
            let bottom = Arc::new(flat_bottom(n));
            let r = bottom.head_clause();
            let (one, two) = (specializations(&r, &bottom, 1).len(), specializations(&r, &bottom, 2).len());
            if one != n || two != n + n * (n - 1) / 2 {
                out = Err(format!("n = {n}: |rho_1| = {one}, |rho_2| = {two}"));
                break;
            }
            if n == 15 {
                out = Ok(format!("15 free literals: |rho_1| = {one}, |rho_2| = {two}"));
            }
        }
        out
    });

    println!("SKIP criterion 9 (CAVIAR cross-validation): dataset not available, non-gating");

    if gating_failures > 0 {
        println!("{gating_failures} gating criteria failed");
        std::process::exit(1);
    }
}

/// A bottom clause with `n` distinct body literals over the head's
/// variables, all of them addable on their own.
fn flat_bottom(n: usize) -> BottomClause {
    let head = Literal::new(
        "initiatedAt",
        vec![Term::compound("moving", vec![Term::var("X0"), Term::var("X1")]), Term::var("T")],
    );
    let mut body = Vec::new();
    let (x, y, t) = (Term::var("X0"), Term::var("X1"), Term::var("T"));
    for act in ACTS {
        for v in [&x, &y] {
            body.push(Literal::new("happensAt", vec![Term::compound(act, vec![v.clone()]), t.clone()]));
        }
    }
    for (pred, consts) in TESTS {
        for c in consts {
            body.push(Literal::new(pred, vec![x.clone(), y.clone(), Term::Int(*c), t.clone()]));
        }
    }
    body.push(Literal::new("distanceLessThan", vec![y.clone(), x.clone(), Term::Int(20), t.clone()]));
    body.truncate(n);
    assert_eq!(body.len(), n);
    let inputs = body.iter().map(|l| l.vars().into_iter().map(Term::Var).collect()).collect();
    BottomClause {
        head,
        modes: vec![0; n],
        outputs: vec![Vec::new(); n],
        inputs,
        bindings: Default::default(),
        body,
    }
}
