//! Unfolding of letrec terms: single rewrite steps of the unfolding system
//! and depth-bounded unfolding into finite trees.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::syntax::{all_names, free_vars, fresh_name, rename_free, Binding, Term};

/// A finite prefix of an infinite unfolding. `Cut` marks the truncation
/// frontier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteTree {
    Abs(String, Box<FiniteTree>),
    App(Box<FiniteTree>, Box<FiniteTree>),
    Var(String),
    BlackHole,
    Cut,
}

impl FiniteTree {
    /// Length of the longest root-to-leaf path, counting edges.
    pub fn depth(&self) -> usize {
        match self {
            FiniteTree::Abs(_, b) => 1 + b.depth(),
            FiniteTree::App(f, a) => 1 + f.depth().max(a.depth()),
            _ => 0,
        }
    }

    pub fn contains_cut(&self) -> bool {
        match self {
            FiniteTree::Cut => true,
            FiniteTree::Abs(_, b) => b.contains_cut(),
            FiniteTree::App(f, a) => f.contains_cut() || a.contains_cut(),
            _ => false,
        }
    }

    /// Depths at which `Cut` nodes occur.
    pub fn cut_depths(&self) -> BTreeSet<usize> {
        fn go(t: &FiniteTree, d: usize, out: &mut BTreeSet<usize>) {
            match t {
                FiniteTree::Cut => {
                    out.insert(d);
                }
                FiniteTree::Abs(_, b) => go(b, d + 1, out),
                FiniteTree::App(f, a) => {
                    go(f, d + 1, out);
                    go(a, d + 1, out);
                }
                _ => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, 0, &mut out);
        out
    }

    /// α-equivalence; `Cut` equals only `Cut`.
    pub fn alpha_eq(&self, other: &FiniteTree) -> bool {
        self.compare(other, false)
    }

    /// True if replacing each `Cut` of `self` by a suitable subtree yields a
    /// tree α-equivalent to `other`.
    pub fn is_prefix_of(&self, other: &FiniteTree) -> bool {
        self.compare(other, true)
    }

    fn compare(&self, other: &FiniteTree, cut_matches_all: bool) -> bool {
        fn go(
            a: &FiniteTree,
            b: &FiniteTree,
            ea: &mut Vec<String>,
            eb: &mut Vec<String>,
            wild: bool,
        ) -> bool {
            match (a, b) {
                (FiniteTree::Cut, _) if wild => true,
                (FiniteTree::Cut, FiniteTree::Cut) => true,
                (FiniteTree::BlackHole, FiniteTree::BlackHole) => true,
                (FiniteTree::Var(x), FiniteTree::Var(y)) => {
                    match (
                        ea.iter().rposition(|n| n == x),
                        eb.iter().rposition(|n| n == y),
                    ) {
                        (Some(i), Some(j)) => i == j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (FiniteTree::App(f1, a1), FiniteTree::App(f2, a2)) => {
                    go(f1, f2, ea, eb, wild) && go(a1, a2, ea, eb, wild)
                }
                (FiniteTree::Abs(x, b1), FiniteTree::Abs(y, b2)) => {
                    ea.push(x.clone());
                    eb.push(y.clone());
                    let r = go(b1, b2, ea, eb, wild);
                    ea.pop();
                    eb.pop();
                    r
                }
                _ => false,
            }
        }
        go(
            self,
            other,
            &mut Vec::new(),
            &mut Vec::new(),
            cut_matches_all,
        )
    }
}

fn write_tree(t: &FiniteTree, arg: bool, fun: bool, out: &mut String) {
    match t {
        FiniteTree::Var(x) => out.push_str(x),
        FiniteTree::BlackHole => out.push_str("_|_"),
        FiniteTree::Cut => out.push_str("..."),
        FiniteTree::App(f, a) => {
            if arg {
                out.push('(');
            }
            write_tree(f, false, true, out);
            out.push(' ');
            write_tree(a, true, false, out);
            if arg {
                out.push(')');
            }
        }
        FiniteTree::Abs(x, b) => {
            let paren = arg || fun;
            if paren {
                out.push('(');
            }
            out.push('\\');
            out.push_str(x);
            out.push_str(". ");
            write_tree(b, false, false, out);
            if paren {
                out.push(')');
            }
        }
    }
}

impl fmt::Display for FiniteTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_tree(self, false, false, &mut out);
        f.write_str(&out)
    }
}

/// Applies one unfolding step at the leftmost-outermost redex. Redexes of
/// the (tighten) and (•) rules take priority over all others. Returns
/// `None` iff the term contains no let-expression.
pub fn unfold_step(t: &Term) -> Option<Term> {
    rewrite_first(t, &priority_redex).or_else(|| rewrite_first(t, &ordinary_redex))
}

fn rewrite_first(t: &Term, rule: &dyn Fn(&Term) -> Option<Term>) -> Option<Term> {
    if let Some(r) = rule(t) {
        return Some(r);
    }
    match t {
        Term::Var(_) | Term::BlackHole => None,
        Term::Abs(x, b) => rewrite_first(b, rule).map(|b| Term::abs(x.clone(), b)),
        Term::App(f, a) => {
            if let Some(f2) = rewrite_first(f, rule) {
                Some(Term::app(f2, (**a).clone()))
            } else {
                rewrite_first(a, rule).map(|a2| Term::app((**f).clone(), a2))
            }
        }
        Term::Let(bs, body) => {
            for (i, b) in bs.iter().enumerate() {
                if let Some(r) = rewrite_first(&b.rhs, rule) {
                    let mut bs2 = bs.clone();
                    bs2[i].rhs = r;
                    return Some(Term::let_in(bs2, (**body).clone()));
                }
            }
            rewrite_first(body, rule).map(|b2| Term::let_in(bs.clone(), b2))
        }
    }
}

/// Rules (•) and (tighten) at the root of `t`.
fn priority_redex(t: &Term) -> Option<Term> {
    let Term::Let(bs, body) = t else { return None };
    for (i, b) in bs.iter().enumerate() {
        let Term::Var(g) = &b.rhs else { continue };
        if *g == b.var {
            let mut bs2 = bs.clone();
            bs2[i].rhs = Term::BlackHole;
            return Some(Term::let_in(bs2, (**body).clone()));
        }
        if bs.iter().any(|c| c.var == *g) {
            let f = &b.var;
            let rest: Vec<Binding> = bs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| Binding::new(c.var.clone(), rename_free(&c.rhs, f, g)))
                .collect();
            return Some(Term::let_in(rest, rename_free(body, f, g)));
        }
    }
    None
}

/// Rules (gc), (let-rec), (let_in), (λ) and (@) at the root of `t`.
fn ordinary_redex(t: &Term) -> Option<Term> {
    let Term::Let(bs, body) = t else { return None };
    let body_fv = free_vars(body);
    if !bs.iter().any(|b| body_fv.contains(&b.var)) {
        return Some((**body).clone());
    }
    match &**body {
        Term::Var(f) => {
            let b = bs.iter().find(|b| b.var == *f)?;
            Some(Term::let_in(bs.clone(), b.rhs.clone()))
        }
        Term::Let(inner, inner_body) => {
            let outer_names: HashSet<String> = bs
                .iter()
                .flat_map(|b| free_vars(&b.rhs).into_iter().chain([b.var.clone()]))
                .collect();
            let mut inner = inner.clone();
            let mut inner_body = (**inner_body).clone();
            let mut avoid = all_names(t);
            for i in 0..inner.len() {
                if outer_names.contains(&inner[i].var) {
                    let old = inner[i].var.clone();
                    let new = fresh_name(&old, |n| avoid.contains(n));
                    avoid.insert(new.clone());
                    for b in inner.iter_mut() {
                        b.rhs = rename_free(&b.rhs, &old, &new);
                    }
                    inner_body = rename_free(&inner_body, &old, &new);
                    inner[i].var = new;
                }
            }
            let mut merged = bs.clone();
            merged.extend(inner);
            Some(Term::let_in(merged, inner_body))
        }
        Term::Abs(x, inner) => {
            let clash = bs
                .iter()
                .any(|b| b.var == *x || free_vars(&b.rhs).contains(x));
            if clash {
                let avoid = all_names(t);
                let y = fresh_name(x, |n| avoid.contains(n));
                let inner = rename_free(inner, x, &y);
                Some(Term::abs(y, Term::let_in(bs.clone(), inner)))
            } else {
                Some(Term::abs(
                    x.clone(),
                    Term::let_in(bs.clone(), (**inner).clone()),
                ))
            }
        }
        Term::App(f, a) => Some(Term::app(
            Term::let_in(bs.clone(), (**f).clone()),
            Term::let_in(bs.clone(), (**a).clone()),
        )),
        Term::BlackHole => Some((**body).clone()),
    }
}

enum Frame<'a> {
    Lam { name: &'a str, out: Rc<str> },
    Group(&'a [Binding]),
}

struct Env<'a> {
    frame: Frame<'a>,
    next: Option<Rc<Env<'a>>>,
}

type EnvRef<'a> = Option<Rc<Env<'a>>>;

enum Head<'a> {
    Abs(String, &'a Term, EnvRef<'a>),
    App(&'a Term, &'a Term, EnvRef<'a>),
    Var(String),
    BlackHole,
}

struct Unfolder {
    reserved: BTreeSet<String>,
}

impl Unfolder {
    /// Rewrites the closure `(t, env)` at its root until its head symbol is
    /// known. Re-entering a binding without producing a constructor means
    /// the binding is meaningless.
    fn head<'a>(&self, mut t: &'a Term, mut env: EnvRef<'a>, scope: &[String]) -> Head<'a> {
        let mut entered: HashSet<(*const Binding, usize)> = HashSet::new();
        loop {
            match t {
                Term::BlackHole => return Head::BlackHole,
                Term::App(f, a) => return Head::App(f, a, env),
                Term::Abs(x, b) => {
                    let name = fresh_name(x, |n| {
                        self.reserved.contains(n) || scope.iter().any(|s| s == n)
                    });
                    let out: Rc<str> = Rc::from(name.as_str());
                    let env = Some(Rc::new(Env {
                        frame: Frame::Lam { name: x, out },
                        next: env,
                    }));
                    return Head::Abs(name, b, env);
                }
                Term::Let(bs, body) => {
                    env = Some(Rc::new(Env {
                        frame: Frame::Group(bs),
                        next: env,
                    }));
                    t = body;
                }
                Term::Var(x) => {
                    let mut cur = env.clone();
                    let mut found = None;
                    while let Some(e) = cur {
                        match &e.frame {
                            Frame::Lam { name, out } if name == x => {
                                found = Some(Err(out.to_string()));
                                break;
                            }
                            Frame::Group(bs) => {
                                let bs: &'a [Binding] = bs;
                                if let Some(i) = bs.iter().position(|b| b.var == *x) {
                                    found = Some(Ok((e.clone(), bs, i)));
                                    break;
                                }
                            }
                            _ => {}
                        }
                        cur = e.next.clone();
                    }
                    match found {
                        None => return Head::Var(x.clone()),
                        Some(Err(out)) => return Head::Var(out),
                        Some(Ok((group, bs, i))) => {
                            if !entered.insert((bs.as_ptr(), i)) {
                                return Head::BlackHole;
                            }
                            t = &bs[i].rhs;
                            env = Some(group);
                        }
                    }
                }
            }
        }
    }

    fn unfold(
        &self,
        t: &Term,
        env: EnvRef<'_>,
        depth: usize,
        scope: &mut Vec<String>,
    ) -> FiniteTree {
        match self.head(t, env, scope) {
            Head::Var(x) => FiniteTree::Var(x),
            Head::BlackHole => FiniteTree::BlackHole,
            _ if depth == 0 => FiniteTree::Cut,
            Head::App(f, a, env) => FiniteTree::App(
                Box::new(self.unfold(f, env.clone(), depth - 1, scope)),
                Box::new(self.unfold(a, env, depth - 1, scope)),
            ),
            Head::Abs(x, b, env) => {
                scope.push(x.clone());
                let body = self.unfold(b, env, depth - 1, scope);
                scope.pop();
                FiniteTree::Abs(x, Box::new(body))
            }
        }
    }
}

/// The truncation of the infinite unfolding of `t` at `depth`: nodes at
/// depth below the bound are fully shown; at the bound, leaves are shown
/// and every other node becomes `Cut`.
pub fn bounded_unfold(t: &Term, depth: usize) -> FiniteTree {
    let u = Unfolder {
        reserved: free_vars(t),
    };
    u.unfold(t, None, depth, &mut Vec::new())
}

/// Whether the unfoldings of `a` and `b` agree down to `depth`.
pub fn oracle_equiv(a: &Term, b: &Term, depth: usize) -> bool {
    bounded_unfold(a, depth).alpha_eq(&bounded_unfold(b, depth))
}

/// Default depth for oracle comparisons in tests.
pub const DEFAULT_ORACLE_DEPTH: usize = 10;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse};

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn step_rules() {
        let s = unfold_step(&p("\\f. let r = f r in r")).unwrap();
        assert!(alpha_eq(&s, &p("\\f. let r = f r in f r")));
        let s = unfold_step(&s).unwrap();
        assert!(alpha_eq(
            &s,
            &p("\\f. (let r = f r in f) (let r = f r in r)")
        ));
        let s = unfold_step(&p("\\x. let f = f in f x")).unwrap();
        assert!(alpha_eq(&s, &p("\\x. let f = _|_ in f x")));
        assert!(unfold_step(&p("\\x. x x")).is_none());
    }

    #[test]
    fn lambda_rule_renames_captured_binder() {
        let s = unfold_step(&p("\\x. let f = x in \\x. f x")).unwrap();
        assert!(alpha_eq(&s, &p("\\x. \\y. let f = x in f y")));
    }

    #[test]
    fn let_in_merge_renames_clashes() {
        let s = unfold_step(&p("\\y. let f = y g, g = y in let f = f g in f")).unwrap();
        assert!(alpha_eq(&s, &p("\\y. let f = y g, g = y, h = h g in h")));
    }

    #[test]
    fn tighten_substitutes() {
        let s = unfold_step(&p("let f = g, g = \\x. f x in f")).unwrap();
        assert!(alpha_eq(&s, &p("let g = \\x. g x in g")));
    }

    #[test]
    fn bounded_unfold_examples() {
        let t = bounded_unfold(&p("\\f. let r = f r in r"), 4);
        assert_eq!(t.to_string(), "\\f. f (f (f ...))");
        assert_eq!(t.cut_depths().into_iter().collect::<Vec<_>>(), vec![4]);
        let t = bounded_unfold(&p("\\x. let f = f in f x"), 2);
        assert_eq!(t.to_string(), "\\x. _|_ x");
        let t = bounded_unfold(&p("\\x. x"), 99);
        assert!(!t.contains_cut());
    }

    #[test]
    fn unfolding_keeps_binders_apart() {
        let t = bounded_unfold(&p("\\x. let f = x in \\x. f x"), 5);
        assert!(t.alpha_eq(&bounded_unfold(&p("\\a. \\b. a b"), 5)));
        assert_eq!(t.to_string(), "\\x. \\x_1. x x_1");
    }

    #[test]
    fn meaningless_through_nested_lets() {
        let t = bounded_unfold(&p("\\x. let f = let c = x in f in f x"), 3);
        assert_eq!(t.to_string(), "\\x. _|_ x");
        let t = bounded_unfold(&p("let f = g, g = f in f"), 3);
        assert_eq!(t, FiniteTree::BlackHole);
    }
}
