//! First-order λ-term-graphs over the signature {@, λ, 0, S, •}, their
//! abstraction-prefix functions, eager-scope checking, isomorphism and
//! export formats.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

/// Dense vertex identifier.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    const UNSET: VertexId = VertexId(u32::MAX);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(i: usize) -> VertexId {
        VertexId(u32::try_from(i).expect("vertex count exceeds u32"))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Vertex labels. `Indir` and `Top` only occur in transient graphs.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    App,
    Lam,
    Var0,
    S,
    BlackHole,
    Indir,
    Top,
}

impl Label {
    pub const ALL: [Label; 7] = [
        Label::App,
        Label::Lam,
        Label::Var0,
        Label::S,
        Label::BlackHole,
        Label::Indir,
        Label::Top,
    ];

    pub fn arity(self) -> usize {
        match self {
            Label::App | Label::S => 2,
            Label::Lam | Label::Var0 | Label::Indir | Label::Top => 1,
            Label::BlackHole => 0,
        }
    }

    /// Whether argument `i` is a backlink to an abstraction vertex.
    pub fn is_backlink(self, i: usize) -> bool {
        matches!((self, i), (Label::Var0, 0) | (Label::S, 1))
    }

    pub fn dump_name(self) -> &'static str {
        match self {
            Label::App => "APP",
            Label::Lam => "LAM",
            Label::Var0 => "VAR0",
            Label::S => "S",
            Label::BlackHole => "BH",
            Label::Indir => "INDIR",
            Label::Top => "TOP",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Label::App => "@",
            Label::Lam => "λ",
            Label::Var0 => "0",
            Label::S => "S",
            Label::BlackHole => "•",
            Label::Indir => "|",
            Label::Top => "⊤",
        }
    }

    fn from_dump_name(s: &str) -> Option<Label> {
        Label::ALL.into_iter().find(|l| l.dump_name() == s)
    }
}

/// A finite rooted term graph in which every vertex is reachable from the
/// root. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermGraph {
    labels: Vec<Label>,
    args: Vec<[VertexId; 2]>,
    root: VertexId,
}

impl TermGraph {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v.index()]
    }

    pub fn args(&self, v: VertexId) -> &[VertexId] {
        &self.args[v.index()][..self.labels[v.index()].arity()]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).map(VertexId::from_index)
    }

    /// Number of vertices labelled `label`.
    pub fn count(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// Edges `(source, argument index, target)` in id and argument order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, usize, VertexId)> + '_ {
        self.vertices().flat_map(move |v| {
            self.args(v)
                .iter()
                .enumerate()
                .map(move |(i, &t)| (v, i, t))
        })
    }

    /// Number of incoming edges that are not backlinks, per vertex.
    pub fn non_backlink_indegree(&self) -> Vec<usize> {
        let mut deg = vec![0; self.len()];
        for (v, i, t) in self.edges() {
            if !self.label(v).is_backlink(i) {
                deg[t.index()] += 1;
            }
        }
        deg
    }

    /// Plain-text dump, one vertex per line as `id: LABEL -> a,b`, root first.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let order = std::iter::once(self.root).chain(self.vertices().filter(|&v| v != self.root));
        for v in order {
            out.push_str(&self.dump_line(v));
            out.push('\n');
        }
        out
    }

    fn dump_line(&self, v: VertexId) -> String {
        let args: Vec<String> = self.args(v).iter().map(|a| a.to_string()).collect();
        if args.is_empty() {
            format!("{v}: {}", self.label(v).dump_name())
        } else {
            format!("{v}: {} -> {}", self.label(v).dump_name(), args.join(","))
        }
    }

    /// Reads the format written by [`TermGraph::dump`]. Ids need not be
    /// dense; they are renumbered in increasing order and unreachable
    /// vertices are dropped.
    pub fn from_dump(text: &str) -> Result<TermGraph, DumpError> {
        let mut entries: Vec<(u64, Label, Vec<u64>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| DumpError {
                line: lineno + 1,
                message: message.to_string(),
            };
            let (id, rest) = line.split_once(':').ok_or_else(|| err("missing ':'"))?;
            let id: u64 = id.trim().parse().map_err(|_| err("bad vertex id"))?;
            let (label, targets) = match rest.split_once("->") {
                Some((l, t)) => (l.trim(), t.trim()),
                None => (rest.trim(), ""),
            };
            let label = Label::from_dump_name(label).ok_or_else(|| err("unknown label"))?;
            let targets: Vec<u64> = if targets.is_empty() {
                Vec::new()
            } else {
                targets
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| err("bad argument id")))
                    .collect::<Result<_, _>>()?
            };
            if targets.len() != label.arity() {
                return Err(err("argument count does not match label arity"));
            }
            entries.push((id, label, targets));
        }
        if entries.is_empty() {
            return Err(DumpError {
                line: 0,
                message: "empty graph".into(),
            });
        }
        let root_id = entries[0].0;
        let mut ids: Vec<u64> = entries.iter().map(|e| e.0).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(DumpError {
                line: 0,
                message: "duplicate vertex id".into(),
            });
        }
        let index: HashMap<u64, VertexId> = ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, VertexId::from_index(i)))
            .collect();
        let mut b = GraphBuilder::new();
        for _ in &ids {
            b.add(Label::BlackHole);
        }
        for (id, label, targets) in &entries {
            let v = index[id];
            b.labels[v.index()] = *label;
            for (i, t) in targets.iter().enumerate() {
                let t = *index.get(t).ok_or(DumpError {
                    line: 0,
                    message: format!("argument {t} of vertex {id} is undefined"),
                })?;
                b.set_arg(v, i, t);
            }
        }
        Ok(b.finish(index[&root_id]))
    }
}

impl fmt::Display for TermGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("graph dump line {line}: {message}")]
pub struct DumpError {
    pub line: usize,
    pub message: String,
}

/// Single-owner builder for [`TermGraph`].
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    labels: Vec<Label>,
    args: Vec<[VertexId; 2]>,
}

impl GraphBuilder {
    pub fn new() -> GraphBuilder {
        GraphBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn add(&mut self, label: Label) -> VertexId {
        let v = VertexId::from_index(self.labels.len());
        self.labels.push(label);
        self.args.push([VertexId::UNSET; 2]);
        v
    }

    pub fn add_with(&mut self, label: Label, args: &[VertexId]) -> VertexId {
        assert_eq!(args.len(), label.arity(), "arity mismatch for {label:?}");
        let v = self.add(label);
        for (i, &a) in args.iter().enumerate() {
            self.set_arg(v, i, a);
        }
        v
    }

    pub fn set_arg(&mut self, v: VertexId, i: usize, target: VertexId) {
        assert!(
            i < self.labels[v.index()].arity(),
            "argument index out of range"
        );
        self.args[v.index()][i] = target;
    }

    pub fn label(&self, v: VertexId) -> Label {
        self.labels[v.index()]
    }

    pub fn set_label(&mut self, v: VertexId, label: Label) {
        self.labels[v.index()] = label;
    }

    /// Argument `i` of `v`, if it has been set.
    pub fn arg(&self, v: VertexId, i: usize) -> Option<VertexId> {
        let a = self.args[v.index()][i];
        (a != VertexId::UNSET).then_some(a)
    }

    /// The root-connected part, renumbered densely in id order.
    ///
    /// Panics if a reachable vertex has an unset argument.
    pub fn finish(self, root: VertexId) -> TermGraph {
        self.finish_with_map(root).0
    }

    /// Like [`GraphBuilder::finish`], also returning the map from builder
    /// ids to final ids (`None` for dropped vertices).
    pub fn finish_with_map(self, root: VertexId) -> (TermGraph, Vec<Option<VertexId>>) {
        let n = self.labels.len();
        let mut reached = vec![false; n];
        let mut stack = vec![root];
        reached[root.index()] = true;
        while let Some(v) = stack.pop() {
            let arity = self.labels[v.index()].arity();
            for &a in &self.args[v.index()][..arity] {
                assert!(a != VertexId::UNSET, "vertex {v} has an unset argument");
                if !reached[a.index()] {
                    reached[a.index()] = true;
                    stack.push(a);
                }
            }
        }
        let mut map = vec![None; n];
        let mut next = 0;
        for (i, r) in reached.iter().enumerate() {
            if *r {
                map[i] = Some(VertexId::from_index(next));
                next += 1;
            }
        }
        let mut labels = Vec::with_capacity(next);
        let mut args = Vec::with_capacity(next);
        for i in 0..n {
            if reached[i] {
                labels.push(self.labels[i]);
                let mut a = [VertexId::UNSET; 2];
                for k in 0..self.labels[i].arity() {
                    a[k] = map[self.args[i][k].index()].expect("reachable");
                }
                args.push(a);
            }
        }
        let root = map[root.index()].expect("root reachable");
        (TermGraph { labels, args, root }, map)
    }
}

impl From<&TermGraph> for GraphBuilder {
    fn from(g: &TermGraph) -> GraphBuilder {
        GraphBuilder {
            labels: g.labels.clone(),
            args: g.args.clone(),
        }
    }
}

/// Handle of a word in a [`PrefixTrie`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrefixId(u32);

/// Hash-consed words of abstraction vertices; equal words share one id.
#[derive(Clone, Debug)]
pub struct PrefixTrie {
    parent: Vec<u32>,
    lam: Vec<VertexId>,
    depth: Vec<u32>,
    index: HashMap<(u32, VertexId), u32>,
}

impl Default for PrefixTrie {
    fn default() -> Self {
        PrefixTrie::new()
    }
}

impl PrefixTrie {
    /// The empty word.
    pub const EMPTY: PrefixId = PrefixId(0);

    pub fn new() -> PrefixTrie {
        PrefixTrie {
            parent: vec![u32::MAX],
            lam: vec![VertexId::UNSET],
            depth: vec![0],
            index: HashMap::new(),
        }
    }

    /// The word `p·v`.
    pub fn extend(&mut self, p: PrefixId, v: VertexId) -> PrefixId {
        if let Some(&id) = self.index.get(&(p.0, v)) {
            return PrefixId(id);
        }
        let id = self.parent.len() as u32;
        self.parent.push(p.0);
        self.lam.push(v);
        self.depth.push(self.depth[p.0 as usize] + 1);
        self.index.insert((p.0, v), id);
        PrefixId(id)
    }

    /// The word `p·v` if it has been interned.
    pub fn lookup(&self, p: PrefixId, v: VertexId) -> Option<PrefixId> {
        self.index.get(&(p.0, v)).map(|&i| PrefixId(i))
    }

    pub fn intern(&mut self, word: &[VertexId]) -> PrefixId {
        word.iter().fold(Self::EMPTY, |p, &v| self.extend(p, v))
    }

    /// The word without its last entry.
    pub fn parent(&self, p: PrefixId) -> Option<PrefixId> {
        let q = self.parent[p.0 as usize];
        (q != u32::MAX).then_some(PrefixId(q))
    }

    pub fn last(&self, p: PrefixId) -> Option<VertexId> {
        (p != Self::EMPTY).then(|| self.lam[p.0 as usize])
    }

    pub fn depth(&self, p: PrefixId) -> usize {
        self.depth[p.0 as usize] as usize
    }

    pub fn word(&self, p: PrefixId) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.depth(p));
        let mut cur = p;
        while let Some(v) = self.last(cur) {
            out.push(v);
            cur = self.parent(cur).expect("non-empty word has a parent");
        }
        out.reverse();
        out
    }

    /// The prefix of `p` of length `len` (`len ≤ depth(p)`).
    pub fn truncate(&self, p: PrefixId, len: usize) -> PrefixId {
        let mut cur = p;
        while self.depth(cur) > len {
            cur = self.parent(cur).expect("non-empty word has a parent");
        }
        cur
    }

    fn node_count(&self) -> usize {
        self.parent.len()
    }
}

/// An abstraction-prefix function: a word of abstraction vertices per
/// vertex of a host graph.
#[derive(Clone, Debug)]
pub struct AbsPrefix {
    trie: PrefixTrie,
    of: Vec<PrefixId>,
    enter: Vec<u32>,
    exit: Vec<u32>,
}

impl AbsPrefix {
    /// Assembles a prefix function from a trie and one handle per vertex.
    pub fn new(trie: PrefixTrie, of: Vec<PrefixId>) -> AbsPrefix {
        // Trie nodes are created after their parents, so subtree sizes and
        // nested intervals can be assigned by two linear sweeps.
        let n = trie.node_count();
        let mut size = vec![1u32; n];
        for i in (1..n).rev() {
            size[trie.parent[i] as usize] += size[i];
        }
        let (mut enter, mut exit) = (vec![0u32; n], vec![0u32; n]);
        let mut next_free = vec![0u32; n];
        exit[0] = size[0];
        next_free[0] = 1;
        for i in 1..n {
            let parent = trie.parent[i] as usize;
            enter[i] = next_free[parent];
            next_free[parent] += size[i];
            exit[i] = enter[i] + size[i];
            next_free[i] = enter[i] + 1;
        }
        AbsPrefix {
            trie,
            of,
            enter,
            exit,
        }
    }

    pub fn from_words(words: &[Vec<VertexId>]) -> AbsPrefix {
        let mut trie = PrefixTrie::new();
        let of = words.iter().map(|w| trie.intern(w)).collect();
        AbsPrefix::new(trie, of)
    }

    /// Number of vertices covered.
    pub fn len(&self) -> usize {
        self.of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.of.is_empty()
    }

    pub fn trie(&self) -> &PrefixTrie {
        &self.trie
    }

    pub fn id(&self, v: VertexId) -> PrefixId {
        self.of[v.index()]
    }

    pub fn word(&self, v: VertexId) -> Vec<VertexId> {
        self.trie.word(self.id(v))
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.trie.depth(self.id(v))
    }

    pub fn last(&self, v: VertexId) -> Option<VertexId> {
        self.trie.last(self.id(v))
    }

    /// `a ≤ b` in the prefix order.
    pub fn is_prefix(&self, a: PrefixId, b: PrefixId) -> bool {
        let (a, b) = (a.0 as usize, b.0 as usize);
        self.enter[a] <= self.enter[b] && self.enter[b] < self.exit[a]
    }

    pub fn words(&self) -> Vec<Vec<VertexId>> {
        (0..self.len())
            .map(|i| self.word(VertexId::from_index(i)))
            .collect()
    }

    /// Space-separated rendering of the word of `v`, `ε` when empty.
    pub fn render(&self, v: VertexId) -> String {
        let w = self.word(v);
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
    }
}

impl PartialEq for AbsPrefix {
    fn eq(&self, other: &AbsPrefix) -> bool {
        self.len() == other.len() && self.words() == other.words()
    }
}

/// A clause of the prefix-correctness conditions.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Clause {
    Root,
    BlackHole,
    Lam,
    App,
    Var0,
    S1,
    S2,
    /// No prefix is derivable for the vertex.
    Reach,
    /// The vertex label is not allowed in this graph class.
    Label,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::Root => "(root)",
            Clause::BlackHole => "(black hole)",
            Clause::Lam => "(λ)",
            Clause::App => "(@)",
            Clause::Var0 => "(0)",
            Clause::S1 => "(S)1",
            Clause::S2 => "(S)2",
            Clause::Reach => "(reach)",
            Clause::Label => "(label)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("not a λ-term-graph: clause {clause} fails at vertex {vertex}")]
    NotALambdaTermGraph { vertex: VertexId, clause: Clause },
    #[error("not a λ-ho-term-graph: clause {clause} fails at vertex {vertex}")]
    NotAHoTermGraph { vertex: VertexId, clause: Clause },
}

/// Visiting order for prefix propagation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Traversal {
    BreadthFirst,
    DepthFirst,
}

/// The unique correct abstraction-prefix function of `g`.
pub fn infer_abspre(g: &TermGraph) -> Result<AbsPrefix, GraphError> {
    infer_abspre_with(g, Traversal::BreadthFirst)
}

/// [`infer_abspre`] with an explicit propagation order; the result does not
/// depend on it.
pub fn infer_abspre_with(g: &TermGraph, order: Traversal) -> Result<AbsPrefix, GraphError> {
    let n = g.len();
    let mut trie = PrefixTrie::new();
    let mut of: Vec<Option<PrefixId>> = vec![None; n];
    of[g.root().index()] = Some(PrefixTrie::EMPTY);
    let mut work: VecDeque<VertexId> = VecDeque::from([g.root()]);
    while let Some(w) = match order {
        Traversal::BreadthFirst => work.pop_front(),
        Traversal::DepthFirst => work.pop_back(),
    } {
        let p = of[w.index()].expect("queued vertices have a prefix");
        let mut assign = |c: VertexId, q: PrefixId, work: &mut VecDeque<VertexId>| {
            if of[c.index()].is_none() {
                of[c.index()] = Some(q);
                work.push_back(c);
            }
        };
        match g.label(w) {
            Label::Lam => {
                let q = trie.extend(p, w);
                assign(g.args(w)[0], q, &mut work);
            }
            Label::App => {
                for &c in g.args(w) {
                    assign(c, p, &mut work);
                }
            }
            Label::S => {
                if let Some(q) = trie.parent(p) {
                    assign(g.args(w)[0], q, &mut work);
                }
            }
            _ => {}
        }
    }
    let fail =
        |vertex: VertexId, clause: Clause| GraphError::NotALambdaTermGraph { vertex, clause };
    let closes = |trie: &PrefixTrie, of: &[Option<PrefixId>], target: VertexId, p: PrefixId| {
        g.label(target) == Label::Lam
            && trie.last(p) == Some(target)
            && of[target.index()].is_some()
            && trie.parent(p) == of[target.index()]
    };
    for w in g.vertices() {
        let Some(p) = of[w.index()] else {
            return Err(fail(w, Clause::Reach));
        };
        if w == g.root() && p != PrefixTrie::EMPTY {
            return Err(fail(w, Clause::Root));
        }
        let args = g.args(w);
        match g.label(w) {
            Label::BlackHole if p != PrefixTrie::EMPTY => return Err(fail(w, Clause::BlackHole)),
            Label::BlackHole => {}
            Label::Lam => {
                if of[args[0].index()] != trie.lookup(p, w) {
                    return Err(fail(w, Clause::Lam));
                }
            }
            Label::App => {
                if args.iter().any(|c| of[c.index()] != Some(p)) {
                    return Err(fail(w, Clause::App));
                }
            }
            Label::Var0 => {
                if !closes(&trie, &of, args[0], p) {
                    return Err(fail(w, Clause::Var0));
                }
            }
            Label::S => {
                if p == PrefixTrie::EMPTY || of[args[0].index()] != trie.parent(p) {
                    return Err(fail(w, Clause::S1));
                }
                if !closes(&trie, &of, args[1], p) {
                    return Err(fail(w, Clause::S2));
                }
            }
            Label::Indir | Label::Top => return Err(fail(w, Clause::Label)),
        }
    }
    let of = of.into_iter().map(|p| p.expect("checked above")).collect();
    Ok(AbsPrefix::new(trie, of))
}

/// Whether every non-delimiter vertex `w` with prefix `p·v` reaches an
/// occurrence of `v` along a path staying inside the scope `p·v`.
///
/// Scope delimiters (S vertices) are exempt: their prefix is fixed by the
/// abstraction they close, and a delimiter in front of a black hole or of
/// the body of an abstraction with an unused variable has no such path.
pub fn is_eager_scope(g: &TermGraph, p: &AbsPrefix) -> bool {
    let n = g.len();
    let mut preds: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    let mut occurrences: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for (v, _, t) in g.edges() {
        preds[t.index()].push(v);
    }
    for v in g.vertices() {
        if g.label(v) == Label::Var0 {
            occurrences[g.args(v)[0].index()].push(v);
        }
    }
    let mut scoped: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for w in g.vertices() {
        if g.label(w) == Label::S {
            continue;
        }
        if let Some(v) = p.last(w) {
            scoped[v.index()].push(w);
        }
    }
    let mut stamp = vec![u32::MAX; n];
    for v in g.vertices() {
        if scoped[v.index()].is_empty() {
            continue;
        }
        let Some(scope) = p.trie().lookup(p.id(v), v) else {
            return false;
        };
        let mut work: Vec<VertexId> = Vec::new();
        for &u in &occurrences[v.index()] {
            if p.is_prefix(scope, p.id(u)) && stamp[u.index()] != v.0 {
                stamp[u.index()] = v.0;
                work.push(u);
            }
        }
        while let Some(u) = work.pop() {
            for &x in &preds[u.index()] {
                if stamp[x.index()] != v.0 && p.is_prefix(scope, p.id(x)) {
                    stamp[x.index()] = v.0;
                    work.push(x);
                }
            }
        }
        if scoped[v.index()].iter().any(|w| stamp[w.index()] != v.0) {
            return false;
        }
    }
    true
}

/// The vertex bijection witnessing `a ≅ b`, if one exists.
pub fn isomorphism(a: &TermGraph, b: &TermGraph) -> Option<Vec<VertexId>> {
    if a.len() != b.len() {
        return None;
    }
    let mut map = vec![VertexId::UNSET; a.len()];
    let mut rev = vec![VertexId::UNSET; b.len()];
    let mut stack = vec![(a.root(), b.root())];
    while let Some((x, y)) = stack.pop() {
        if map[x.index()] != VertexId::UNSET {
            if map[x.index()] != y {
                return None;
            }
            continue;
        }
        if rev[y.index()] != VertexId::UNSET || a.label(x) != b.label(y) {
            return None;
        }
        map[x.index()] = y;
        rev[y.index()] = x;
        stack.extend(a.args(x).iter().copied().zip(b.args(y).iter().copied()));
    }
    map.iter().all(|&m| m != VertexId::UNSET).then_some(map)
}

pub fn isomorphic(a: &TermGraph, b: &TermGraph) -> bool {
    isomorphism(a, b).is_some()
}

/// Renumbers `g` in depth-first preorder from the root, arguments in
/// order. Isomorphic graphs get identical canonical forms.
pub fn canonical(g: &TermGraph) -> TermGraph {
    let mut order = vec![VertexId::UNSET; g.len()];
    let mut next = 0;
    let mut stack = vec![g.root()];
    while let Some(v) = stack.pop() {
        if order[v.index()] != VertexId::UNSET {
            continue;
        }
        order[v.index()] = VertexId::from_index(next);
        next += 1;
        stack.extend(g.args(v).iter().rev());
    }
    let mut labels = vec![Label::App; g.len()];
    let mut args = vec![[VertexId::UNSET; 2]; g.len()];
    for v in g.vertices() {
        let w = order[v.index()].index();
        labels[w] = g.label(v);
        for (i, a) in g.args(v).iter().enumerate() {
            args[w][i] = order[a.index()];
        }
    }
    TermGraph {
        labels,
        args,
        root: VertexId(0),
    }
}

/// Number of vertices.
pub fn graph_size(g: &TermGraph) -> usize {
    g.len()
}

/// Graphviz rendering; prefixes, when given, become vertex xlabels.
pub fn to_dot(g: &TermGraph, prefix: Option<&AbsPrefix>) -> String {
    let mut out = String::from("digraph G {\n  node [shape=circle];\n");
    out.push_str("  entry [shape=point];\n");
    for v in g.vertices() {
        let mut attrs = format!("label=\"{}\"", g.label(v).symbol());
        if let Some(p) = prefix {
            attrs.push_str(&format!(", xlabel=\"{}\"", p.render(v)));
        }
        out.push_str(&format!("  n{v} [{attrs}];\n"));
    }
    out.push_str(&format!("  entry -> n{};\n", g.root()));
    for (v, i, t) in g.edges() {
        let style = if g.label(v).is_backlink(i) {
            ", style=dashed"
        } else {
            ""
        };
        out.push_str(&format!("  n{v} -> n{t} [label=\"{i}\"{style}];\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id_graph() -> TermGraph {
        TermGraph::from_dump("0: LAM -> 1\n1: VAR0 -> 0\n").unwrap()
    }

    #[test]
    fn dump_round_trip() {
        let g = TermGraph::from_dump("5: LAM -> 7\n7: APP -> 9,7\n9: VAR0 -> 5\n").unwrap();
        assert_eq!(g.dump(), "0: LAM -> 1\n1: APP -> 2,1\n2: VAR0 -> 0\n");
        assert_eq!(TermGraph::from_dump(&g.dump()).unwrap(), g);
    }

    #[test]
    fn dump_rejects_bad_arity() {
        assert!(TermGraph::from_dump("0: LAM -> 1,1\n1: BH\n").is_err());
        assert!(TermGraph::from_dump("0: LAM -> 3\n").is_err());
    }

    #[test]
    fn prefixes_of_identity() {
        let p = infer_abspre(&id_graph()).unwrap();
        assert_eq!(p.words(), vec![vec![], vec![VertexId(0)]]);
        assert!(is_eager_scope(&id_graph(), &p));
    }

    #[test]
    fn infer_reports_failing_clause() {
        let g = TermGraph::from_dump("0: APP -> 1,2\n1: LAM -> 2\n2: VAR0 -> 1\n").unwrap();
        assert_eq!(
            infer_abspre(&g).unwrap_err(),
            GraphError::NotALambdaTermGraph {
                vertex: VertexId(1),
                clause: Clause::Lam
            }
        );
        let g = TermGraph::from_dump("0: S -> 1,1\n1: BH\n").unwrap();
        assert!(matches!(
            infer_abspre(&g),
            Err(GraphError::NotALambdaTermGraph {
                clause: Clause::S1,
                ..
            })
        ));
    }

    #[test]
    fn prefix_order() {
        let p = AbsPrefix::from_words(&[
            vec![],
            vec![VertexId(0)],
            vec![VertexId(0), VertexId(1)],
            vec![VertexId(2)],
        ]);
        let id = |i| p.id(VertexId(i));
        assert!(p.is_prefix(id(0), id(2)));
        assert!(p.is_prefix(id(1), id(2)));
        assert!(p.is_prefix(id(2), id(2)));
        assert!(!p.is_prefix(id(2), id(1)));
        assert!(!p.is_prefix(id(1), id(3)));
    }

    #[test]
    fn canonical_form_identifies_isomorphic_graphs() {
        let a = TermGraph::from_dump("0: LAM -> 1\n1: APP -> 2,3\n2: VAR0 -> 0\n3: VAR0 -> 0\n")
            .unwrap();
        let b = TermGraph::from_dump("3: LAM -> 0\n0: APP -> 2,1\n1: VAR0 -> 3\n2: VAR0 -> 3\n")
            .unwrap();
        assert_eq!(canonical(&a), canonical(&b));
        assert!(isomorphic(&canonical(&b), &b));
    }

    #[test]
    fn isomorphism_ignores_numbering() {
        let a = TermGraph::from_dump("0: LAM -> 1\n1: APP -> 2,1\n2: VAR0 -> 0\n").unwrap();
        let b = TermGraph::from_dump("0: LAM -> 2\n2: APP -> 1,2\n1: VAR0 -> 0\n").unwrap();
        assert!(isomorphic(&a, &b));
        let c = TermGraph::from_dump("0: LAM -> 1\n1: APP -> 2,2\n2: VAR0 -> 0\n").unwrap();
        assert!(!isomorphic(&a, &c));
    }

    #[test]
    fn dot_marks_backlinks() {
        let dot = to_dot(&id_graph(), None);
        assert!(dot.contains("n1 -> n0 [label=\"0\", style=dashed]"));
        assert!(dot.contains("label=\"λ\""));
    }
}
