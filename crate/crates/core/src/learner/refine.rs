use std::collections::BTreeSet;

use itertools::Itertools;

use crate::abduce::BottomClause;
use crate::logic::{Clause, Literal, Sym, Term};

/// The specialization operator ρ_d: `body(r) ∧ D` for every non-empty
/// `D ⊆ body(⊥) \ body(r)` with `|D| ≤ depth`, deduplicated up to variable
/// renaming. Candidates whose input variables are not supplied by the head
/// or by some output of the body are dropped.
pub fn specializations(clause: &Clause, bottom: &BottomClause, depth: usize) -> Vec<Clause> {
    let present: BTreeSet<&Literal> = clause.body.iter().collect();
    let free: Vec<usize> = bottom
        .body
        .iter()
        .enumerate()
        .filter(|(_, l)| !present.contains(l))
        .map(|(i, _)| i)
        .unique_by(|&i| &bottom.body[i])
        .collect();
    let mut seen = BTreeSet::new();
    seen.insert(clause.canonical_key());
    let mut out = Vec::new();
    for k in 1..=depth.min(free.len()) {
        for combo in free.iter().copied().combinations(k) {
            let mut body = clause.body.clone();
            body.extend(combo.iter().map(|&i| bottom.body[i].clone()));
            let cand = Clause::new(clause.head.clone(), body);
            if !linked(&cand, bottom) {
                continue;
            }
            if seen.insert(cand.canonical_key()) {
                out.push(cand);
            }
        }
    }
    out
}

fn vars_of(terms: &[Term]) -> Vec<Sym> {
    let mut out = Vec::new();
    terms.iter().for_each(|t| t.collect_vars(&mut out));
    out
}

/// Every body literal's input variables are reachable from the head
/// through outputs of other body literals.
pub(crate) fn linked(clause: &Clause, bottom: &BottomClause) -> bool {
    let mut available: BTreeSet<Sym> = clause.head.vars().into_iter().collect();
    let io: Vec<Option<usize>> = clause.body.iter().map(|l| bottom.body.iter().position(|b| b == l)).collect();
    let mut pending: Vec<usize> = (0..clause.body.len()).collect();
    loop {
        let before = pending.len();
        pending.retain(|&li| {
            let Some(bi) = io[li] else {
                return false;
            };
            if vars_of(&bottom.inputs[bi]).iter().all(|v| available.contains(v)) {
                available.extend(vars_of(&bottom.outputs[bi]));
                false
            } else {
                true
            }
        });
        if pending.is_empty() {
            return true;
        }
        if pending.len() == before {
            return false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_atom, parse_clause};
    use std::collections::BTreeMap;

    fn bottom(head: &str, body: &[&str], io: &[(&[&str], &[&str])]) -> BottomClause {
        let terms = |xs: &[&str]| xs.iter().map(|x| Term::var(x)).collect::<Vec<_>>();
        BottomClause {
            head: parse_atom(head).unwrap(),
            body: body.iter().map(|s| parse_atom(s).unwrap()).collect(),
            modes: vec![0; body.len()],
            inputs: io.iter().map(|(i, _)| terms(i)).collect(),
            outputs: io.iter().map(|(_, o)| terms(o)).collect(),
            bindings: BTreeMap::new(),
        }
    }

    fn flat(n: usize) -> BottomClause {
        let body: Vec<String> = (0..n).map(|i| format!("p{i}(X,T)")).collect();
        let refs: Vec<&str> = body.iter().map(String::as_str).collect();
        let io: Vec<(&[&str], &[&str])> = vec![(&["X", "T"][..], &[][..]); n];
        bottom("initiatedAt(f(X),T)", &refs, &io)
    }

    #[test]
    fn depth_one_and_two_counts() {
        let b = flat(15);
        let r = b.head_clause();
        assert_eq!(specializations(&r, &b, 1).len(), 15);
        assert_eq!(specializations(&r, &b, 2).len(), 120);
    }

    #[test]
    fn fully_specialized_has_no_candidates() {
        let b = flat(4);
        assert!(specializations(&b.as_clause(), &b, 2).is_empty());
    }

    #[test]
    fn partial_clause_adds_remaining_only() {
        let b = flat(5);
        let r = Clause::new(b.head.clone(), vec![b.body[2].clone()]);
        let c = specializations(&r, &b, 1);
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|c| c.body.len() == 2 && c.body[0] == b.body[2]));
    }

    #[test]
    fn unlinked_literals_need_their_producer() {
        let b = bottom(
            "initiatedAt(f(X),T)",
            &["near(X,Y,T)", "walking(Y,T)"],
            &[(&["X", "T"], &["Y"]), (&["Y", "T"], &[])],
        );
        let r = b.head_clause();
        let one: Vec<String> = specializations(&r, &b, 1).iter().map(|c| c.to_string()).collect();
        assert_eq!(one, vec!["initiatedAt(f(X),T) :- near(X,Y,T)."]);
        assert_eq!(specializations(&r, &b, 2).len(), 2);
    }

    #[test]
    fn duplicate_bottom_literals_count_once() {
        let mut b = flat(3);
        b.body.push(b.body[0].clone());
        b.inputs.push(b.inputs[0].clone());
        b.outputs.push(vec![]);
        assert_eq!(specializations(&b.head_clause(), &b, 1).len(), 3);
    }

    #[test]
    fn renaming_equivalent_candidates_collapse() {
        let b = bottom(
            "initiatedAt(f(X),T)",
            &["q(X,Y,T)", "q(X,Z,T)"],
            &[(&["X", "T"], &["Y"]), (&["X", "T"], &["Z"])],
        );
        assert_eq!(specializations(&b.head_clause(), &b, 1).len(), 1);
        let r = parse_clause("initiatedAt(f(X),T).").unwrap();
        assert_eq!(specializations(&r, &b, 2).len(), 2);
    }
}
