//! Interpretation of terms as λ-ho-term-graphs and λ-term-graphs.
//!
//! Translation boxes are processed from an explicit work stack. Each box
//! holds a subterm, its abstraction prefix and the edge slot awaiting its
//! root. Recursion variables live in the prefix entry chosen for their
//! binding; an entry may only be closed when none of its bindings is used
//! below. Indirection vertices stand for bindings until a final erasure.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::fograph::{AbsPrefix, GraphBuilder, Label, PrefixId, PrefixTrie, TermGraph, VertexId};
use crate::hograph::{check_ho, HoTermGraph};
use crate::syntax::{free_vars, garbage_collect, Term};

/// Choice of binding levels in the first-order interpretation.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum Semantics {
    /// Every binding sits at the innermost abstraction it requires.
    Min,
    /// Bindings stay as deep as eager scope-closure allows.
    #[default]
    Max,
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Semantics, String> {
        match s {
            "min" => Ok(Semantics::Min),
            "max" => Ok(Semantics::Max),
            _ => Err(format!("unknown semantics `{s}` (expected min or max)")),
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Semantics::Min => "min",
            Semantics::Max => "max",
        })
    }
}

/// Closes `t` by abstracting its free variables in sorted order.
pub fn close(t: &Term) -> Term {
    free_vars(t)
        .into_iter()
        .rev()
        .fold(t.clone(), |body, x| Term::abs(x, body))
}

/// The λ-ho-term-graph of `t` with minimal prefixes.
pub fn translate_ho(t: &Term) -> HoTermGraph {
    let (g, p) = translate(t, Mode::Ho);
    check_ho(g, p).expect("translation yields a λ-ho-term-graph")
}

/// The first-order interpretation with minimal prefixes.
pub fn translate_fo_min(t: &Term) -> TermGraph {
    translate_fo(t, Semantics::Min)
}

/// The first-order interpretation with maximal eager prefixes.
pub fn translate_fo_max(t: &Term) -> TermGraph {
    translate_fo(t, Semantics::Max)
}

pub fn translate_fo(t: &Term, semantics: Semantics) -> TermGraph {
    translate_with_prefix(t, semantics).0
}

/// The first-order interpretation together with the prefixes carried by
/// the translation boxes.
pub fn translate_with_prefix(t: &Term, semantics: Semantics) -> (TermGraph, AbsPrefix) {
    translate(t, Mode::Fo(semantics))
}

#[derive(Copy, Clone, PartialEq, Eq)]
enum Mode {
    Ho,
    Fo(Semantics),
}

#[derive(Clone)]
enum Node {
    Lam {
        lam: usize,
        body: usize,
    },
    App(usize, usize),
    LamVar(usize),
    RecVar(usize),
    Let {
        first: usize,
        count: usize,
        body: usize,
    },
    Hole,
}

/// Binding-resolved term with free-variable and required-variable sets.
struct Resolved {
    nodes: Vec<Node>,
    root: usize,
    /// Nesting depth of each abstraction, counted from 1.
    lam_depth: Vec<u32>,
    rhs: Vec<usize>,
    free_rec: Vec<FixedBitSet>,
    required: Vec<FixedBitSet>,
    required_by_binding: Vec<FixedBitSet>,
}

enum Scope {
    Lam(String, usize),
    Rec(String, usize),
}

struct Resolver {
    nodes: Vec<Node>,
    lam_depth: Vec<u32>,
    rhs: Vec<usize>,
    scopes: Vec<Scope>,
    depth: u32,
}

impl Resolver {
    fn node(&mut self, n: Node) -> usize {
        self.nodes.push(n);
        self.nodes.len() - 1
    }

    fn resolve(&mut self, t: &Term) -> usize {
        match t {
            Term::Var(x) => {
                let scope = self.scopes.iter().rev().find(|s| match s {
                    Scope::Lam(y, _) | Scope::Rec(y, _) => y == x,
                });
                match scope.expect("closed term") {
                    Scope::Lam(_, l) => {
                        let l = *l;
                        self.node(Node::LamVar(l))
                    }
                    Scope::Rec(_, b) => {
                        let b = *b;
                        self.node(Node::RecVar(b))
                    }
                }
            }
            Term::BlackHole => self.node(Node::Hole),
            Term::App(f, a) => {
                let f = self.resolve(f);
                let a = self.resolve(a);
                self.node(Node::App(f, a))
            }
            Term::Abs(x, body) => {
                let lam = self.lam_depth.len();
                self.depth += 1;
                self.lam_depth.push(self.depth);
                self.scopes.push(Scope::Lam(x.clone(), lam));
                let body = self.resolve(body);
                self.scopes.pop();
                self.depth -= 1;
                self.node(Node::Lam { lam, body })
            }
            Term::Let(bs, body) => {
                let first = self.rhs.len();
                for (i, b) in bs.iter().enumerate() {
                    self.rhs.push(usize::MAX);
                    self.scopes.push(Scope::Rec(b.var.clone(), first + i));
                }
                for (i, b) in bs.iter().enumerate() {
                    self.rhs[first + i] = self.resolve(&b.rhs);
                }
                let body = self.resolve(body);
                self.scopes.truncate(self.scopes.len() - bs.len());
                self.node(Node::Let {
                    first,
                    count: bs.len(),
                    body,
                })
            }
        }
    }
}

impl Resolved {
    fn new(t: &Term) -> Resolved {
        let mut r = Resolver {
            nodes: Vec::new(),
            lam_depth: Vec::new(),
            rhs: Vec::new(),
            scopes: Vec::new(),
            depth: 0,
        };
        let root = r.resolve(t);
        let (nl, nb) = (r.lam_depth.len(), r.rhs.len());
        // Children precede parents in the arena, so one forward sweep
        // computes the free-variable sets bottom-up.
        let mut free_lam: Vec<FixedBitSet> = Vec::with_capacity(r.nodes.len());
        let mut free_rec: Vec<FixedBitSet> = Vec::with_capacity(r.nodes.len());
        for n in &r.nodes {
            let mut fl = FixedBitSet::with_capacity(nl);
            let mut fr = FixedBitSet::with_capacity(nb);
            match *n {
                Node::Lam { lam, body } => {
                    fl.union_with(&free_lam[body]);
                    fr.union_with(&free_rec[body]);
                    fl.set(lam, false);
                }
                Node::App(a, b) => {
                    for c in [a, b] {
                        fl.union_with(&free_lam[c]);
                        fr.union_with(&free_rec[c]);
                    }
                }
                Node::LamVar(l) => fl.insert(l),
                Node::RecVar(b) => fr.insert(b),
                Node::Let { first, count, body } => {
                    for c in (first..first + count).map(|b| r.rhs[b]).chain([body]) {
                        fl.union_with(&free_lam[c]);
                        fr.union_with(&free_rec[c]);
                    }
                    for b in first..first + count {
                        fr.set(b, false);
                    }
                }
                Node::Hole => {}
            }
            free_lam.push(fl);
            free_rec.push(fr);
        }
        let mut required_by_binding: Vec<FixedBitSet> =
            r.rhs.iter().map(|&n| free_lam[n].clone()).collect();
        loop {
            let mut changed = false;
            for b in 0..nb {
                let mut acc = required_by_binding[b].clone();
                for g in free_rec[r.rhs[b]].ones() {
                    acc.union_with(&required_by_binding[g]);
                }
                if acc != required_by_binding[b] {
                    required_by_binding[b] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let required = free_lam
            .into_iter()
            .zip(&free_rec)
            .map(|(mut req, fr)| {
                for g in fr.ones() {
                    req.union_with(&required_by_binding[g]);
                }
                req
            })
            .collect();
        Resolved {
            nodes: r.nodes,
            root,
            lam_depth: r.lam_depth,
            rhs: r.rhs,
            free_rec,
            required,
            required_by_binding,
        }
    }
}

#[derive(Copy, Clone)]
enum Slot {
    Root,
    Arg(VertexId, usize),
}

struct Task {
    node: usize,
    prefix: PrefixId,
    slot: Slot,
}

/// One generation pass under fixed binding levels.
struct Run<'r> {
    r: &'r Resolved,
    emit_s: bool,
    b: GraphBuilder,
    trie: PrefixTrie,
    prefix: Vec<PrefixId>,
    lam_of_vertex: Vec<usize>,
    indir: Vec<VertexId>,
    level_top: Vec<Option<VertexId>>,
    root: Option<VertexId>,
    /// Bindings found blocking an eager scope closure, with the depth
    /// they must sink to.
    violations: Vec<(usize, u32)>,
}

impl<'r> Run<'r> {
    fn add(&mut self, label: Label, prefix: PrefixId) -> VertexId {
        let v = self.b.add(label);
        self.prefix.push(prefix);
        self.lam_of_vertex.push(usize::MAX);
        v
    }

    fn connect(&mut self, slot: Slot, v: VertexId) {
        match slot {
            Slot::Root => self.root = Some(v),
            Slot::Arg(u, i) => self.b.set_arg(u, i, v),
        }
    }

    fn depth_of(&self, p: PrefixId) -> u32 {
        self.trie
            .last(p)
            .map_or(0, |v| self.r.lam_depth[self.lam_of_vertex[v.index()]])
    }

    fn generate(&mut self, levels: &[u32]) {
        let r = self.r;
        let mut work = vec![Task {
            node: r.root,
            prefix: PrefixTrie::EMPTY,
            slot: Slot::Root,
        }];
        while let Some(Task {
            node,
            mut prefix,
            mut slot,
        }) = work.pop()
        {
            // Scope closure: drop the innermost entry while it is not
            // required and holds no binding used below.
            while let Some(top) = self.trie.last(prefix) {
                if r.required[node].contains(self.lam_of_vertex[top.index()]) {
                    break;
                }
                let blockers: Vec<usize> = r.free_rec[node]
                    .ones()
                    .filter(|&f| self.level_top[f] == Some(top))
                    .collect();
                if !blockers.is_empty() {
                    if matches!(r.nodes[node], Node::Lam { .. } | Node::App(..)) {
                        let below = self.depth_of(self.trie.parent(prefix).expect("nonempty"));
                        self.violations
                            .extend(blockers.into_iter().map(|f| (f, below)));
                    }
                    break;
                }
                if self.emit_s {
                    let s = self.add(Label::S, prefix);
                    self.b.set_arg(s, 1, top);
                    self.connect(slot, s);
                    slot = Slot::Arg(s, 0);
                }
                prefix = self.trie.parent(prefix).expect("nonempty");
            }
            match r.nodes[node] {
                Node::Lam { lam, body } => {
                    let v = self.add(Label::Lam, prefix);
                    self.lam_of_vertex[v.index()] = lam;
                    self.connect(slot, v);
                    let inner = self.trie.extend(prefix, v);
                    work.push(Task {
                        node: body,
                        prefix: inner,
                        slot: Slot::Arg(v, 0),
                    });
                }
                Node::App(f, a) => {
                    let v = self.add(Label::App, prefix);
                    self.connect(slot, v);
                    for (i, c) in [(1, a), (0, f)] {
                        work.push(Task {
                            node: c,
                            prefix,
                            slot: Slot::Arg(v, i),
                        });
                    }
                }
                Node::LamVar(lam) => {
                    let top = self.trie.last(prefix).expect("variable in scope");
                    debug_assert_eq!(self.lam_of_vertex[top.index()], lam);
                    let v = self.add(Label::Var0, prefix);
                    self.b.set_arg(v, 0, top);
                    self.connect(slot, v);
                }
                Node::RecVar(f) => {
                    debug_assert_eq!(self.level_top[f], self.trie.last(prefix));
                    self.connect(slot, self.indir[f]);
                }
                Node::Hole => {
                    debug_assert_eq!(prefix, PrefixTrie::EMPTY);
                    let v = self.add(Label::BlackHole, prefix);
                    self.connect(slot, v);
                }
                Node::Let { first, count, body } => {
                    let word = self.trie.word(prefix);
                    for (f, &lvl) in levels.iter().enumerate().skip(first).take(count) {
                        let keep = word
                            .iter()
                            .take_while(|v| r.lam_depth[self.lam_of_vertex[v.index()]] <= lvl)
                            .count();
                        let level = self.trie.truncate(prefix, keep);
                        let v = self.add(Label::Indir, level);
                        self.indir[f] = v;
                        self.level_top[f] = self.trie.last(level);
                    }
                    for f in (first..first + count).rev() {
                        let v = self.indir[f];
                        work.push(Task {
                            node: r.rhs[f],
                            prefix: self.prefix[v.index()],
                            slot: Slot::Arg(v, 0),
                        });
                    }
                    work.push(Task {
                        node: body,
                        prefix,
                        slot,
                    });
                }
            }
        }
    }

    /// Erases indirection vertices. Cycles of indirections become a black
    /// hole, preceded by scope delimiters closing its prefix when S vertices
    /// are emitted.
    fn erase(mut self) -> (TermGraph, AbsPrefix) {
        let n = self.b.len();
        let is_indir =
            |b: &GraphBuilder, v: usize| b.label(VertexId::from_index(v)) == Label::Indir;
        let mut target: Vec<Option<VertexId>> = vec![None; n];
        for v in 0..n {
            if !is_indir(&self.b, v) || target[v].is_some() {
                continue;
            }
            let mut path = vec![v];
            let end = loop {
                let last = *path.last().expect("nonempty");
                let next = self.b.arg(VertexId::from_index(last), 0).expect("set");
                if !is_indir(&self.b, next.index()) {
                    break next;
                }
                if let Some(t) = target[next.index()] {
                    break t;
                }
                if let Some(pos) = path.iter().position(|&u| u == next.index()) {
                    let member = *path[pos..].iter().max().expect("nonempty");
                    break self.black_hole(VertexId::from_index(member));
                }
                path.push(next.index());
            };
            for u in path {
                target[u] = Some(end);
            }
        }
        let resolve = |v: VertexId| target.get(v.index()).copied().flatten().unwrap_or(v);
        for v in 0..self.b.len() {
            let v = VertexId::from_index(v);
            if self.b.label(v) == Label::Indir {
                continue;
            }
            for i in 0..self.b.label(v).arity() {
                let a = self.b.arg(v, i).expect("set");
                self.b.set_arg(v, i, resolve(a));
            }
        }
        let root = resolve(self.root.expect("root generated"));
        let (graph, map) = self.b.finish_with_map(root);
        let mut words = vec![Vec::new(); graph.len()];
        for (old, new) in map.iter().enumerate() {
            if let Some(new) = new {
                words[new.index()] = self
                    .trie
                    .word(self.prefix[old])
                    .into_iter()
                    .map(|x| map[x.index()].expect("abstractions survive"))
                    .collect();
            }
        }
        (graph, AbsPrefix::from_words(&words))
    }

    /// Turns the indirection `v` into a black hole, with one delimiter per
    /// prefix entry in front when S vertices are emitted.
    fn black_hole(&mut self, v: VertexId) -> VertexId {
        let mut p = self.prefix[v.index()];
        if !self.emit_s || p == PrefixTrie::EMPTY {
            self.b.set_label(v, Label::BlackHole);
            self.prefix[v.index()] = PrefixTrie::EMPTY;
            return v;
        }
        self.b.set_label(v, Label::S);
        let mut cur = v;
        loop {
            self.b.set_arg(cur, 1, self.trie.last(p).expect("nonempty"));
            p = self.trie.parent(p).expect("nonempty");
            let next = if p == PrefixTrie::EMPTY {
                self.add(Label::BlackHole, p)
            } else {
                self.add(Label::S, p)
            };
            self.b.set_arg(cur, 0, next);
            if p == PrefixTrie::EMPTY {
                return v;
            }
            cur = next;
        }
    }
}

fn translate(t: &Term, mode: Mode) -> (TermGraph, AbsPrefix) {
    let closed = close(&garbage_collect(t));
    let r = Resolved::new(&closed);
    let nb = r.rhs.len();
    // Levels are nesting depths: a binding sits at the innermost prefix
    // entry whose abstraction is nested at most that deep.
    let mut levels: Vec<u32> = match mode {
        Mode::Fo(Semantics::Max) => vec![u32::MAX; nb],
        _ => r
            .required_by_binding
            .iter()
            .map(|req| req.ones().map(|l| r.lam_depth[l]).max().unwrap_or(0))
            .collect(),
    };
    loop {
        let mut run = Run {
            r: &r,
            emit_s: mode != Mode::Ho,
            b: GraphBuilder::new(),
            trie: PrefixTrie::new(),
            prefix: Vec::new(),
            lam_of_vertex: Vec::new(),
            indir: vec![VertexId::from_index(0); nb],
            level_top: vec![None; nb],
            root: None,
            violations: Vec::new(),
        };
        run.generate(&levels);
        if run.violations.is_empty() {
            return run.erase();
        }
        debug_assert!(mode == Mode::Fo(Semantics::Max), "minimal levels are eager");
        let mut work = Vec::new();
        for &(f, depth) in &run.violations {
            if levels[f] > depth {
                levels[f] = depth;
                work.push(f);
            }
        }
        // A binding may only use bindings placed at or below its own level.
        while let Some(f) = work.pop() {
            for g in r.free_rec[r.rhs[f]].ones() {
                if levels[g] > levels[f] {
                    levels[g] = levels[f];
                    work.push(g);
                }
            }
        }
    }
}
