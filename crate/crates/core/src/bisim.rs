//! Bisimilarity, bisimulation collapse and the unsharing post-passes.

use crate::fograph::{GraphBuilder, Label, TermGraph, VertexId};

struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`; false if they were already merged.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
        true
    }
}

/// Whether a bisimulation relates the roots of `a` and `b`.
///
/// Pairs are merged coinductively in a union-find structure over the
/// disjoint union; a label clash between merged vertices refutes.
pub fn bisimilar(a: &TermGraph, b: &TermGraph) -> bool {
    let off = a.len() as u32;
    let label = |x: u32| {
        if x < off {
            a.label(VertexId(x))
        } else {
            b.label(VertexId(x - off))
        }
    };
    let args = |x: u32| -> Vec<u32> {
        if x < off {
            a.args(VertexId(x)).iter().map(|v| v.0).collect()
        } else {
            b.args(VertexId(x - off))
                .iter()
                .map(|v| v.0 + off)
                .collect()
        }
    };
    let mut uf = UnionFind::new(a.len() + b.len());
    let mut work = vec![(a.root().0, b.root().0 + off)];
    while let Some((x, y)) = work.pop() {
        if label(x) != label(y) {
            return false;
        }
        if uf.union(x, y) {
            work.extend(args(x).into_iter().zip(args(y)));
        }
    }
    true
}

/// Refinable partition of `0..n` (Valmari–Lehtinen layout): elements of a
/// set are contiguous in `elems`, marked ones at the front of their set.
struct Partition {
    elems: Vec<u32>,
    loc: Vec<u32>,
    set_of: Vec<u32>,
    first: Vec<u32>,
    end: Vec<u32>,
    mid: Vec<u32>,
    touched: Vec<u32>,
}

impl Partition {
    /// One set per distinct key, sets ordered by key.
    fn by_key(keys: &[u8]) -> Partition {
        let n = keys.len();
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&e| keys[e as usize]);
        let mut loc = vec![0; n];
        let mut set_of = vec![0; n];
        let (mut first, mut end) = (Vec::new(), Vec::new());
        for (i, &e) in elems.iter().enumerate() {
            if i == 0 || keys[e as usize] != keys[elems[i - 1] as usize] {
                if i > 0 {
                    end.push(i as u32);
                }
                first.push(i as u32);
            }
            loc[e as usize] = i as u32;
            set_of[e as usize] = first.len() as u32 - 1;
        }
        if n > 0 {
            end.push(n as u32);
        }
        let mid = first.clone();
        Partition {
            elems,
            loc,
            set_of,
            first,
            end,
            mid,
            touched: Vec::new(),
        }
    }

    fn set_count(&self) -> usize {
        self.first.len()
    }

    fn members(&self, s: u32) -> &[u32] {
        &self.elems[self.first[s as usize] as usize..self.end[s as usize] as usize]
    }

    fn mark(&mut self, e: u32) {
        let s = self.set_of[e as usize] as usize;
        let i = self.loc[e as usize];
        let j = self.mid[s];
        if i < j {
            return;
        }
        if j == self.first[s] {
            self.touched.push(s as u32);
        }
        let other = self.elems[j as usize];
        self.elems.swap(i as usize, j as usize);
        self.loc[e as usize] = j;
        self.loc[other as usize] = i;
        self.mid[s] = j + 1;
    }

    /// Splits every touched set into marked and unmarked parts; the smaller
    /// part becomes a new set. Returns the new set ids.
    fn split(&mut self) -> Vec<u32> {
        let mut created = Vec::new();
        for s in std::mem::take(&mut self.touched) {
            let s = s as usize;
            let (f, m, e) = (self.first[s], self.mid[s], self.end[s]);
            if m == e {
                self.mid[s] = f;
                continue;
            }
            let new = self.first.len() as u32;
            if m - f <= e - m {
                self.first.push(f);
                self.end.push(m);
                self.first[s] = m;
            } else {
                self.first.push(m);
                self.end.push(e);
                self.end[s] = m;
            }
            self.mid[s] = self.first[s];
            self.mid.push(self.first[new as usize]);
            for k in self.first[new as usize]..self.end[new as usize] {
                let x = self.elems[k as usize];
                self.set_of[x as usize] = new;
            }
            created.push(new);
        }
        created
    }
}

/// Class index of every vertex under the largest self-bisimulation,
/// computed by Hopcroft's partition refinement with the smaller-half rule.
pub fn bisimulation_classes(g: &TermGraph) -> Vec<u32> {
    let n = g.len();
    let keys: Vec<u8> = g.vertices().map(|v| g.label(v) as u8).collect();
    let mut part = Partition::by_key(&keys);
    // Inverse transitions per argument index, in CSR form.
    let mut pred_start = [vec![0u32; n + 1], vec![0u32; n + 1]];
    for (_, i, t) in g.edges() {
        pred_start[i][t.index() + 1] += 1;
    }
    for starts in pred_start.iter_mut() {
        for k in 0..n {
            starts[k + 1] += starts[k];
        }
    }
    let mut pred = [
        vec![0u32; pred_start[0][n] as usize],
        vec![0u32; pred_start[1][n] as usize],
    ];
    let mut fill = [pred_start[0].clone(), pred_start[1].clone()];
    for (v, i, t) in g.edges() {
        let slot = &mut fill[i][t.index()];
        pred[i][*slot as usize] = v.0;
        *slot += 1;
    }
    let mut work: Vec<(u32, usize)> = Vec::new();
    for s in 0..part.set_count() as u32 {
        work.push((s, 0));
        work.push((s, 1));
    }
    let mut splitter: Vec<u32> = Vec::new();
    while let Some((s, letter)) = work.pop() {
        splitter.clear();
        splitter.extend_from_slice(part.members(s));
        for &t in &splitter {
            let (lo, hi) = (
                pred_start[letter][t as usize],
                pred_start[letter][t as usize + 1],
            );
            for k in lo..hi {
                part.mark(pred[letter][k as usize]);
            }
        }
        // A new set is the smaller half, so it suffices to enqueue it:
        // if its parent is pending, both halves are; if not, the smaller
        // half is the right one to add.
        for new in part.split() {
            work.push((new, 0));
            work.push((new, 1));
        }
    }
    part.set_of
}

/// The maximally shared image of `g`: the factor graph by the largest
/// bisimulation, restricted to its root-connected part. Each class is
/// represented by its minimal member and numbered in that order.
pub fn collapse(g: &TermGraph) -> TermGraph {
    collapse_with_map(g).0
}

/// [`collapse`] together with the homomorphism from `g` to the result.
pub fn collapse_with_map(g: &TermGraph) -> (TermGraph, Vec<VertexId>) {
    let class = bisimulation_classes(g);
    let classes = class.iter().max().map_or(0, |&m| m as usize + 1);
    let mut rep = vec![u32::MAX; classes];
    for v in 0..g.len() as u32 {
        let c = class[v as usize] as usize;
        if rep[c] == u32::MAX {
            rep[c] = v;
        }
    }
    let mut order: Vec<usize> = (0..classes).collect();
    order.sort_by_key(|&c| rep[c]);
    let mut vertex_of_class = vec![VertexId(0); classes];
    let mut b = GraphBuilder::new();
    for &c in &order {
        vertex_of_class[c] = b.add(g.label(VertexId(rep[c])));
    }
    for &c in &order {
        let r = VertexId(rep[c]);
        for (i, &a) in g.args(r).iter().enumerate() {
            b.set_arg(
                vertex_of_class[c],
                i,
                vertex_of_class[class[a.index()] as usize],
            );
        }
    }
    let root = vertex_of_class[class[g.root().index()] as usize];
    let (q, map) = b.finish_with_map(root);
    let hom = (0..g.len())
        .map(|v| {
            map[vertex_of_class[class[v] as usize].index()].expect("image of a reachable vertex")
        })
        .collect();
    (q, hom)
}

/// Whether `h` maps `g` onto `target` preserving root, labels and arguments.
pub fn is_homomorphism(g: &TermGraph, target: &TermGraph, h: &[VertexId]) -> bool {
    h.len() == g.len()
        && h[g.root().index()] == target.root()
        && g.vertices().all(|v| {
            let w = h[v.index()];
            g.label(v) == target.label(w)
                && g.args(v)
                    .iter()
                    .zip(target.args(w))
                    .all(|(a, b)| h[a.index()] == *b)
        })
}

/// Rebuilds `g` so that each non-backlink edge into a vertex selected by
/// `split` gets its own copy; copies of S vertices recursively copy their
/// successor chains.
fn unshare(g: &TermGraph, split: impl Fn(Label) -> bool) -> TermGraph {
    let indegree = g.non_backlink_indegree();
    let mut b = GraphBuilder::from(g);
    let mut claimed = vec![false; g.len()];
    fn copy_of(
        g: &TermGraph,
        b: &mut GraphBuilder,
        claimed: &mut [bool],
        indegree: &[usize],
        split: &dyn Fn(Label) -> bool,
        t: VertexId,
    ) -> VertexId {
        if !split(g.label(t)) || indegree[t.index()] <= 1 || !claimed[t.index()] {
            claimed[t.index()] = true;
            return t;
        }
        fresh(g, b, t)
    }
    // The original keeps its chain, so every S below a copy is copied too.
    fn fresh(g: &TermGraph, b: &mut GraphBuilder, t: VertexId) -> VertexId {
        let mut args = g.args(t).to_vec();
        if g.label(t) == Label::S && g.label(args[0]) == Label::S {
            args[0] = fresh(g, b, args[0]);
        }
        b.add_with(g.label(t), &args)
    }
    claimed[g.root().index()] = true;
    for u in g.vertices() {
        for (i, &c) in g.args(u).iter().enumerate() {
            if g.label(u).is_backlink(i) {
                continue;
            }
            let t = copy_of(g, &mut b, &mut claimed, &indegree, &split, c);
            b.set_arg(u, i, t);
        }
    }
    b.finish(g.root())
}

/// Duplicates every S vertex with several incoming non-backlink edges, one
/// copy per edge, recursively along S-chains.
pub fn unshare_s(g: &TermGraph) -> TermGraph {
    unshare(g, |l| l == Label::S)
}

/// Splits every variable vertex with several incoming non-backlink edges.
pub fn unshare_variables(g: &TermGraph) -> TermGraph {
    unshare(g, |l| l == Label::Var0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fograph::isomorphic;

    fn g(s: &str) -> TermGraph {
        TermGraph::from_dump(s).unwrap()
    }

    #[test]
    fn unrolled_fixpoint_collapses() {
        let p = g("0: LAM -> 1\n1: APP -> 2,3\n2: VAR0 -> 0\n3: APP -> 4,1\n4: VAR0 -> 0\n");
        let l = g("0: LAM -> 1\n1: APP -> 2,1\n2: VAR0 -> 0\n");
        assert!(bisimilar(&p, &l));
        let (c, h) = collapse_with_map(&p);
        assert!(isomorphic(&c, &l));
        assert!(is_homomorphism(&p, &c, &h));
        assert!(isomorphic(&collapse(&c), &c));
    }

    #[test]
    fn label_clash_refutes() {
        let a = g("0: LAM -> 1\n1: VAR0 -> 0\n");
        let b = g("0: LAM -> 1\n1: BH\n");
        assert!(!bisimilar(&a, &b));
    }

    #[test]
    fn variables_split_per_edge() {
        let shared = g("0: LAM -> 1\n1: APP -> 2,2\n2: VAR0 -> 0\n");
        let split = unshare_variables(&shared);
        assert_eq!(split.len(), 4);
        assert!(bisimilar(&split, &shared));
        assert!(isomorphic(&collapse(&split), &shared));
    }

    #[test]
    fn s_chains_split_recursively() {
        let shared = g("0: LAM -> 1\n1: LAM -> 2\n2: APP -> 3,3\n3: S -> 4,1\n4: VAR0 -> 0\n");
        let split = unshare_s(&shared);
        assert_eq!(split.len(), 6);
        let indegree = split.non_backlink_indegree();
        assert!(split
            .vertices()
            .all(|v| split.label(v) != Label::S || indegree[v.index()] <= 1));
        assert!(isomorphic(&unshare_s(&split), &split));
        assert!(bisimilar(&split, &shared));
    }
}
