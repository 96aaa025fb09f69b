//! Readback of λ-term-graphs into terms, and the maximal-sharing pipeline.
//!
//! Shared vertices get indirection vertices in front of them. A
//! depth-first spanning tree from a new top vertex then drives a bottom-up
//! labelling of edges with prefixed terms: every prefix entry collects the
//! bindings that will be declared directly under its abstraction.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bisim::{bisimilar, collapse, unshare_s, unshare_variables};
use crate::fograph::{
    canonical, infer_abspre, GraphBuilder, GraphError, Label, PrefixTrie, TermGraph, VertexId,
};
use crate::syntax::{free_vars, garbage_collect, rename_free, Binding, Term};
use crate::translate::translate_fo_max;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReadbackError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("arguments of vertex {vertex} carry different prefixes")]
    PrefixMismatch { vertex: VertexId },
    #[error("binding {name} is left unfinished at vertex {vertex}")]
    Unfinished { vertex: VertexId, name: String },
}

/// Stems of generated names: abstraction variables and let variables.
struct Names {
    lam: String,
    rec: String,
}

impl Names {
    /// The first stem pair whose generated names miss every name in `avoid`.
    fn avoiding(avoid: &BTreeSet<String>) -> Names {
        let hits = |stem: &str| {
            avoid.iter().any(|n| {
                n.strip_prefix(stem)
                    .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            })
        };
        (0..)
            .map(|k| {
                let suffix = "_".repeat(k);
                Names {
                    lam: format!("x{suffix}"),
                    rec: format!("f{suffix}"),
                }
            })
            .find(|n| !hits(&n.lam) && !hits(&n.rec))
            .expect("unbounded stem supply")
    }

    fn lam(&self, v: VertexId) -> String {
        format!("{}{}", self.lam, v.0)
    }

    fn rec(&self, j: u32) -> String {
        format!("{}{j}", self.rec)
    }
}

/// One prefix entry: bindings by number, `None` while unfinished.
type Entry = BTreeMap<u32, Option<Term>>;

/// A term with a prefix: entry 0 is the top entry, entry i belongs to the
/// i-th abstraction of the edge's abstraction prefix.
struct Prefixed {
    entries: Vec<Entry>,
    body: Term,
}

impl Prefixed {
    fn empty(len: usize, body: Term) -> Prefixed {
        Prefixed {
            entries: vec![Entry::new(); len],
            body,
        }
    }
}

fn bindings(entry: Entry, names: &Names, vertex: VertexId) -> Result<Vec<Binding>, ReadbackError> {
    entry
        .into_iter()
        .map(|(j, rhs)| match rhs {
            Some(rhs) => Ok(Binding::new(names.rec(j), rhs)),
            None => Err(ReadbackError::Unfinished {
                vertex,
                name: names.rec(j),
            }),
        })
        .collect()
}

fn wrap(bs: Vec<Binding>, body: Term) -> Term {
    if bs.is_empty() {
        body
    } else {
        Term::let_in(bs, body)
    }
}

/// Reads back a term whose interpretation is isomorphic to `g`.
pub fn readback(g: &TermGraph) -> Result<Term, ReadbackError> {
    readback_avoiding(g, &BTreeSet::new())
}

/// [`readback`] with generated names kept apart from `avoid`.
pub fn readback_avoiding(g: &TermGraph, avoid: &BTreeSet<String>) -> Result<Term, ReadbackError> {
    let names = Names::avoiding(avoid);
    let p = infer_abspre(g)?;
    let n = g.len();
    let mut indegree = g.non_backlink_indegree();
    indegree[g.root().index()] += 1;

    // Indirections in front of shared vertices, a top vertex above the root.
    let mut b = GraphBuilder::from(g);
    let mut prefix: Vec<_> = g.vertices().map(|v| p.id(v)).collect();
    let mut number = vec![u32::MAX; n];
    let mut indir_of = vec![None; n];
    let mut count = 0;
    for w in g.vertices() {
        if indegree[w.index()] >= 2 {
            let i = b.add_with(Label::Indir, &[w]);
            prefix.push(p.id(w));
            number.push(count);
            count += 1;
            indir_of[w.index()] = Some(i);
        }
    }
    for w in g.vertices() {
        if g.label(w) == Label::BlackHole {
            number[w.index()] = count;
            count += 1;
        }
    }
    let redirect = |v: VertexId| indir_of[v.index()].unwrap_or(v);
    for u in g.vertices() {
        for (i, &c) in g.args(u).iter().enumerate() {
            if !g.label(u).is_backlink(i) {
                b.set_arg(u, i, redirect(c));
            }
        }
    }
    let top = b.add_with(Label::Top, &[redirect(g.root())]);
    prefix.push(PrefixTrie::EMPTY);
    number.push(u32::MAX);

    let total = b.len();
    let depth = |v: VertexId| p.trie().depth(prefix[v.index()]);
    let mut visited = vec![false; total];
    let mut tree = vec![[false; 2]; total];
    let mut label: Vec<Option<Prefixed>> = (0..total).map(|_| None).collect();
    let mut stack = vec![(top, 0usize)];
    visited[top.index()] = true;
    while let Some(&mut (v, ref mut next)) = stack.last_mut() {
        let l = b.label(v);
        if *next < l.arity() {
            let i = *next;
            *next += 1;
            if l.is_backlink(i) {
                continue;
            }
            let c = b.arg(v, i).expect("complete graph");
            if !visited[c.index()] {
                visited[c.index()] = true;
                tree[v.index()][i] = true;
                stack.push((c, 0));
            }
            continue;
        }
        stack.pop();
        // Labels of the outgoing edges, then the label of the incoming tree edge.
        let mut out = Vec::with_capacity(2);
        for (i, &is_tree) in tree[v.index()].iter().enumerate().take(l.arity()) {
            if l.is_backlink(i) {
                continue;
            }
            let c = b.arg(v, i).expect("complete graph");
            if is_tree {
                out.push(label[c.index()].take().expect("children labelled first"));
            } else {
                // Only indirection vertices are shared, so this is a
                // back-edge into one of them.
                debug_assert_eq!(b.label(c), Label::Indir);
                let mut lbl =
                    Prefixed::empty(depth(c) + 1, Term::var(names.rec(number[c.index()])));
                lbl.entries
                    .last_mut()
                    .expect("nonempty")
                    .insert(number[c.index()], None);
                out.push(lbl);
            }
        }
        let mut out = out.into_iter();
        let mut arg = || out.next().expect("one label per outgoing edge");
        let synthesised = match l {
            Label::Top => {
                let mut below = arg();
                let bs = bindings(below.entries.pop().expect("top entry"), &names, v)?;
                return Ok(wrap(bs, below.body));
            }
            Label::Lam => {
                let mut below = arg();
                let bs = bindings(below.entries.pop().expect("own entry"), &names, v)?;
                Prefixed {
                    entries: below.entries,
                    body: Term::abs(names.lam(v), wrap(bs, below.body)),
                }
            }
            Label::App => {
                let (mut f, a) = (arg(), arg());
                if f.entries.len() != a.entries.len() {
                    return Err(ReadbackError::PrefixMismatch { vertex: v });
                }
                for (mine, theirs) in f.entries.iter_mut().zip(a.entries) {
                    for (j, rhs) in theirs {
                        let slot = mine.entry(j).or_insert(None);
                        if rhs.is_some() {
                            *slot = rhs;
                        }
                    }
                }
                Prefixed {
                    entries: f.entries,
                    body: Term::app(f.body, a.body),
                }
            }
            Label::Var0 => {
                let lam = b.arg(v, 0).expect("backlink");
                Prefixed::empty(depth(v) + 1, Term::var(names.lam(lam)))
            }
            Label::S => {
                let mut below = arg();
                below.entries.push(Entry::new());
                below
            }
            Label::BlackHole => {
                let j = number[v.index()];
                let f = names.rec(j);
                let mut lbl = Prefixed::empty(1, Term::var(f.clone()));
                lbl.entries[0].insert(j, Some(Term::var(f)));
                lbl
            }
            Label::Indir => {
                let mut below = arg();
                let j = number[v.index()];
                below
                    .entries
                    .last_mut()
                    .expect("nonempty")
                    .insert(j, Some(below.body));
                Prefixed {
                    entries: below.entries,
                    body: Term::var(names.rec(j)),
                }
            }
        };
        label[v.index()] = Some(synthesised);
    }
    unreachable!("the top vertex is finished last")
}

/// Pipeline options for [`maximal_shared_form`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SharingOptions {
    /// Give every variable occurrence its own vertex before readback.
    pub unshare_vars: bool,
    /// Give every edge into a scope delimiter its own delimiter chain.
    pub unshare_s: bool,
}

impl Default for SharingOptions {
    fn default() -> SharingOptions {
        SharingOptions {
            unshare_vars: true,
            unshare_s: false,
        }
    }
}

/// Closes `t` by abstracting `names`, the first one outermost.
fn close_over(t: &Term, names: &[String]) -> Term {
    names
        .iter()
        .rev()
        .fold(t.clone(), |body, x| Term::abs(x.clone(), body))
}

/// The most compact term with the same unfolding as `t`.
pub fn maximal_shared_form(t: &Term, opts: SharingOptions) -> Term {
    try_maximal_shared_form(t, opts).expect("readback of a translated graph succeeds")
}

/// [`maximal_shared_form`], reporting internal invariant violations.
pub fn try_maximal_shared_form(t: &Term, opts: SharingOptions) -> Result<Term, ReadbackError> {
    let t = garbage_collect(t);
    let free: Vec<String> = free_vars(&t).into_iter().collect();
    let mut g = collapse(&translate_fo_max(&close_over(&t, &free)));
    if opts.unshare_vars {
        g = unshare_variables(&g);
    }
    if opts.unshare_s {
        g = unshare_s(&g);
    }
    let avoid: BTreeSet<String> = free.iter().cloned().collect();
    let closed = readback_avoiding(&canonical(&g), &avoid)?;
    Ok(open(closed, &free))
}

/// Removes the `free.len()` outermost abstractions of `t` by floating
/// bindings inward and unfolding head variables, then names the released
/// variables after `free`.
fn open(t: Term, free: &[String]) -> Term {
    let mut outer: Vec<Binding> = Vec::new();
    let mut released = Vec::with_capacity(free.len());
    let mut cur = t;
    while released.len() < free.len() {
        cur = match cur {
            Term::Abs(x, body) => {
                released.push(x);
                *body
            }
            Term::Let(bs, body) => {
                outer.extend(bs);
                *body
            }
            Term::Var(f) => outer
                .iter()
                .find(|b| b.var == f)
                .map(|b| b.rhs.clone())
                .expect("head variable bound by a floated binding"),
            Term::App(..) | Term::BlackHole => unreachable!("closing abstractions come first"),
        };
    }
    let mut t = garbage_collect(&wrap(outer, cur));
    for (x, name) in released.iter().zip(free) {
        t = rename_free(&t, x, name);
    }
    t
}

/// Whether `a` and `b` have the same infinite unfolding.
pub fn unfolding_equivalent(a: &Term, b: &Term) -> bool {
    let (a, b) = (garbage_collect(a), garbage_collect(b));
    let free: Vec<String> = free_vars(&a).union(&free_vars(&b)).cloned().collect();
    bisimilar(
        &translate_fo_max(&close_over(&a, &free)),
        &translate_fo_max(&close_over(&b, &free)),
    )
}
