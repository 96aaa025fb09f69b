//! Generators for test inputs: random terms, a family with quadratic
//! graph size, and large graphs with much redundancy.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::fograph::{GraphBuilder, Label, TermGraph};
use crate::syntax::{term_size, Binding, Term};

const LAM_NAMES: [&str; 4] = ["x", "y", "z", "w"];
const REC_NAMES: [&str; 4] = ["f", "g", "h", "k"];

/// A random closed term of size at most `max_size`. Names come from small
/// pools, so shadowing and recursion are frequent.
pub fn random_term<R: Rng>(rng: &mut R, max_size: usize) -> Term {
    assert!(max_size >= 2, "the smallest closed term has size 2");
    loop {
        let budget = rng.random_range(2..=max_size);
        let t = grow(rng, budget, &mut Vec::new());
        if term_size(&t) <= max_size {
            return t;
        }
    }
}

fn leaf<R: Rng>(rng: &mut R, scope: &[String]) -> Term {
    match scope.choose(rng) {
        Some(x) => Term::var(x.clone()),
        None if rng.random_bool(0.1) => Term::BlackHole,
        None => {
            let x = *LAM_NAMES.choose(rng).expect("nonempty pool");
            Term::abs(x, Term::var(x))
        }
    }
}

fn grow<R: Rng>(rng: &mut R, budget: usize, scope: &mut Vec<String>) -> Term {
    if budget <= 1 {
        return leaf(rng, scope);
    }
    match rng.random_range(0..100) {
        0..30 => {
            let x = *LAM_NAMES.choose(rng).expect("nonempty pool");
            scope.push(x.to_string());
            let body = grow(rng, budget - 1, scope);
            scope.pop();
            Term::abs(x, body)
        }
        30..65 => {
            let left = rng.random_range(1..budget);
            let f = grow(rng, left, scope);
            let a = grow(rng, budget - left, scope);
            Term::app(f, a)
        }
        65..88 if budget >= 4 => {
            let count = rng.random_range(1..=(budget / 3).min(3));
            let names: Vec<&str> = REC_NAMES.choose_multiple(rng, count).copied().collect();
            scope.extend(names.iter().map(|s| s.to_string()));
            let share = (budget - 1) / (count + 1);
            let bindings = names
                .iter()
                .map(|f| Binding::new(*f, grow(rng, share.max(1), scope)))
                .collect();
            let body = grow(rng, share.max(1), scope);
            scope.truncate(scope.len() - count);
            Term::let_in(bindings, body)
        }
        _ => leaf(rng, scope),
    }
}

/// The family `λx0 x1. (x0 x1) (λx2. (x0 x1) (λx1. (x0 x2) (... λx2. (x0 x1) x2)))`
/// with `n` abstractions of `x2`. Its size is linear in `n`, while its
/// eager scope-delimited graph grows quadratically.
pub fn scope_ladder(n: usize) -> Term {
    assert!(n >= 1, "the ladder has at least one rung");
    let m = 2 * n - 1;
    let binder = |i: usize| match i {
        0 => "x1",
        i if i % 2 == 1 => "x2",
        _ => "x1",
    };
    let head = |i: usize| Term::app(Term::var("x0"), Term::var(binder(i)));
    let mut t = Term::abs(binder(m), Term::app(head(m - 1), Term::var(binder(m))));
    for i in (1..m).rev() {
        t = Term::abs(binder(i), Term::app(head(i - 1), t));
    }
    Term::abs("x0", Term::abs("x1", Term::app(head(0), t)))
}

/// The graph of `λf. let r = λx. f (r x) in r` unrolled into `units`
/// copies of the recursive abstraction, 7 vertices each, plus the root.
/// Its collapse has 8 vertices.
pub fn unrolled_comb(units: usize) -> TermGraph {
    assert!(units >= 1, "at least one unit");
    let mut b = GraphBuilder::new();
    let root = b.add(Label::Lam);
    let lams: Vec<_> = (0..units).map(|_| b.add(Label::Lam)).collect();
    b.set_arg(root, 0, lams[0]);
    for (i, &lam) in lams.iter().enumerate() {
        let next = lams[(i + 1).min(units - 1)];
        let f = b.add_with(Label::Var0, &[root]);
        let close_f = b.add_with(Label::S, &[f, lam]);
        let close_next = b.add_with(Label::S, &[next, lam]);
        let x = b.add_with(Label::Var0, &[lam]);
        let inner = b.add_with(Label::App, &[close_next, x]);
        let outer = b.add_with(Label::App, &[close_f, inner]);
        b.set_arg(lam, 0, outer);
    }
    b.finish(root)
}
