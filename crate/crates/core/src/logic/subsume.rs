use super::matching::Bindings;
use super::term::{Clause, Literal};

/// θ-subsumption: some θ maps `general`'s head onto `specific`'s head and
/// every body literal of `general` onto a body literal of `specific`.
/// Variables of `specific` are treated as rigid symbols.
pub fn theta_subsumes(general: &Clause, specific: &Clause) -> bool {
    let mut b = Bindings::default();
    if !b.match_literal(&general.head, &specific.head) || general.head.negated != specific.head.negated {
        return false;
    }
    // Literals with the fewest possible targets first.
    let mut order: Vec<(usize, &Literal)> = general
        .body
        .iter()
        .map(|l| (specific.body.iter().filter(|t| compatible(l, t)).count(), l))
        .collect();
    if order.iter().any(|(n, _)| *n == 0) {
        return false;
    }
    order.sort_by_key(|(n, _)| *n);
    let lits: Vec<&Literal> = order.into_iter().map(|(_, l)| l).collect();
    search(&lits, &specific.body, &mut b)
}

fn compatible(a: &Literal, b: &Literal) -> bool {
    a.pred == b.pred && a.negated == b.negated && a.args.len() == b.args.len()
}

fn search(lits: &[&Literal], targets: &[Literal], b: &mut Bindings) -> bool {
    let Some((first, rest)) = lits.split_first() else {
        return true;
    };
    for t in targets.iter().filter(|t| compatible(first, t)) {
        let mark = b.mark();
        if b.match_literal(first, t) && search(rest, targets, b) {
            return true;
        }
        b.undo(mark);
    }
    false
}
