//! λ-ho-term-graphs: graphs over {@, λ, 0, •} paired with an intrinsic
//! abstraction-prefix function, and the correspondences with λ-term-graphs.

use crate::bisim::bisimilar;
use crate::fograph::{
    infer_abspre, isomorphism, AbsPrefix, Clause, GraphBuilder, GraphError, Label, PrefixId,
    TermGraph, VertexId,
};

/// A term graph over {@, λ, 0, •} with a correct abstraction-prefix
/// function in the higher-order sense.
#[derive(Clone, Debug, PartialEq)]
pub struct HoTermGraph {
    graph: TermGraph,
    prefix: AbsPrefix,
}

impl HoTermGraph {
    pub fn graph(&self) -> &TermGraph {
        &self.graph
    }

    pub fn prefix(&self) -> &AbsPrefix {
        &self.prefix
    }

    pub fn into_parts(self) -> (TermGraph, AbsPrefix) {
        (self.graph, self.prefix)
    }

    /// Graph dump with the prefix of each vertex appended after `|`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for line in self.graph.dump().lines() {
            let id: u32 = line
                .split(':')
                .next()
                .and_then(|s| s.parse().ok())
                .expect("dump lines start with an id");
            out.push_str(&format!("{line} | {}\n", self.prefix.render(VertexId(id))));
        }
        out
    }
}

/// Whether the word of `a` is a prefix of the word `P(w)·w`.
fn below_extension(p: &AbsPrefix, a: PrefixId, w: VertexId) -> bool {
    p.is_prefix(a, p.id(w)) || p.trie().lookup(p.id(w), w) == Some(a)
}

/// Validates `p` as a higher-order abstraction-prefix function for `g`.
pub fn check_ho(g: TermGraph, p: AbsPrefix) -> Result<HoTermGraph, GraphError> {
    let fail = |vertex: VertexId, clause: Clause| GraphError::NotAHoTermGraph { vertex, clause };
    if p.len() < g.len() {
        return Err(fail(VertexId::from_index(p.len()), Clause::Reach));
    }
    let empty = crate::fograph::PrefixTrie::EMPTY;
    for w in g.vertices() {
        let pw = p.id(w);
        if w == g.root() && pw != empty {
            return Err(fail(w, Clause::Root));
        }
        let args = g.args(w);
        match g.label(w) {
            Label::BlackHole if pw != empty => return Err(fail(w, Clause::BlackHole)),
            Label::BlackHole => {}
            Label::Lam => {
                if !below_extension(&p, p.id(args[0]), w) {
                    return Err(fail(w, Clause::Lam));
                }
            }
            Label::App => {
                if args.iter().any(|&c| !p.is_prefix(p.id(c), pw)) {
                    return Err(fail(w, Clause::App));
                }
            }
            Label::Var0 => {
                let t = args[0];
                let ok = g.label(t) == Label::Lam
                    && p.trie().last(pw) == Some(t)
                    && p.trie().parent(pw) == Some(p.id(t));
                if !ok {
                    return Err(fail(w, Clause::Var0));
                }
            }
            Label::S | Label::Indir | Label::Top => return Err(fail(w, Clause::Label)),
        }
    }
    Ok(HoTermGraph {
        graph: g,
        prefix: p,
    })
}

/// Inserts scope delimiters wherever the prefix shrinks along an edge.
pub fn ht(h: &HoTermGraph) -> TermGraph {
    let g = &h.graph;
    let p = &h.prefix;
    let mut b = GraphBuilder::from(g);
    for u in g.vertices() {
        for (i, &c) in g.args(u).iter().enumerate() {
            if g.label(u).is_backlink(i) {
                continue;
            }
            let mut out = p.word(u);
            if g.label(u) == Label::Lam {
                out.push(u);
            }
            let keep = p.depth(c);
            if out.len() <= keep {
                continue;
            }
            let mut slot = (u, i);
            while out.len() > keep {
                let closes = out.pop().expect("longer than target prefix");
                let s = b.add(Label::S);
                b.set_arg(s, 1, closes);
                b.set_arg(slot.0, slot.1, s);
                slot = (s, 0);
            }
            b.set_arg(slot.0, slot.1, c);
        }
    }
    b.finish(g.root())
}

/// Removes every scope delimiter, rewiring incoming edges to its successor.
pub fn th(g: &TermGraph) -> Result<HoTermGraph, GraphError> {
    let p = infer_abspre(g)?;
    let mut b = GraphBuilder::from(g);
    for u in g.vertices() {
        if g.label(u) == Label::S {
            continue;
        }
        for (i, &c) in g.args(u).iter().enumerate() {
            if g.label(u).is_backlink(i) {
                continue;
            }
            let mut t = c;
            while g.label(t) == Label::S {
                t = g.args(t)[0];
            }
            b.set_arg(u, i, t);
        }
    }
    let (graph, map) = b.finish_with_map(g.root());
    let mut words = vec![Vec::new(); graph.len()];
    for v in g.vertices() {
        if let Some(nv) = map[v.index()] {
            words[nv.index()] = p
                .word(v)
                .into_iter()
                .map(|x| map[x.index()].expect("abstractions survive"))
                .collect();
        }
    }
    check_ho(graph, AbsPrefix::from_words(&words))
}

/// Bisimilarity of λ-ho-term-graphs, decided on their first-order images.
pub fn ho_bisimilar(a: &HoTermGraph, b: &HoTermGraph) -> bool {
    bisimilar(&ht(a), &ht(b))
}

/// Isomorphism of the graphs that also maps prefixes onto prefixes.
pub fn ho_isomorphic(a: &HoTermGraph, b: &HoTermGraph) -> bool {
    let Some(map) = isomorphism(&a.graph, &b.graph) else {
        return false;
    };
    a.graph.vertices().all(|v| {
        let mapped: Vec<VertexId> = a.prefix.word(v).iter().map(|x| map[x.index()]).collect();
        mapped == b.prefix.word(map[v.index()])
    })
}
