//! Minimum spanning forests of undirected graphs: Prim on the shortest-path
//! engines, Kruskal on the write-efficient sort, and a two-phase Borůvka.
//!
//! Edges are identified by the lower index of their twin arc pair, and
//! equal weights are ordered by that id, so every algorithm returns the same
//! edge set.
//!
//! Borůvka keeps each component's vertices on a circular linked list so a
//! round can visit a component's members and write its best edge once. During
//! the first `ceil(log2 log2 n)` rounds components are merged by hooking the
//! absorbed roots under the group root, with no shortcutting, so finding a
//! vertex's component follows a chain at most as long as the round index.
//! After that every vertex is shortcut once to its phase-one component, and
//! later rounds only repoint phase-one components to their current root.

use crate::costmodel::{CostMeter, CostParams, MeterSnapshot, SlowArray, Word, INF};
use crate::error::{AramError, Result};
use crate::graph::{Graph, GraphView};
use crate::heaps::we_sort;
use crate::sssp::{run_engine, KeyRule, SsspVariant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MstAlgo {
    Prim(SsspVariant),
    Kruskal,
    Boruvka,
}

#[derive(Clone, Debug)]
pub struct MstResult {
    /// Chosen edge ids, ascending.
    pub edges: Vec<usize>,
    pub total_weight: Word,
    pub meter: MeterSnapshot,
    /// Borůvka rounds, when applicable.
    pub rounds: Option<usize>,
}

/// Multiplier that packs `(weight, edge id)` into one ordered word.
fn edge_mult(g: &Graph) -> Result<Word> {
    if !g.is_symmetric() {
        return Err(AramError::Domain(
            "minimum spanning tree needs an undirected graph".into(),
        ));
    }
    let mult = g.m() as Word + 1;
    let max_w = (0..g.m()).map(|e| g.weight(e)).max().unwrap_or(0);
    match max_w.checked_mul(mult).and_then(|x| x.checked_add(mult)) {
        Some(top) if top < INF => Ok(mult),
        _ => Err(AramError::Domain(format!(
            "weights up to {max_w} with {} arcs overflow the packed edge key",
            g.m()
        ))),
    }
}

pub fn mst_metered(g: &Graph, algo: MstAlgo, meter: &CostMeter) -> Result<(Vec<usize>, Option<usize>)> {
    let mult = edge_mult(g)?;
    let (mut edges, rounds) = match algo {
        MstAlgo::Prim(variant) => (prim(g, variant, meter, mult)?, None),
        MstAlgo::Kruskal => (kruskal(g, meter, mult)?, None),
        MstAlgo::Boruvka => {
            let mut st = BoruvkaState::new(g, meter, mult);
            while !st.is_done() {
                st.round()?;
            }
            let rounds = st.round_index();
            (st.into_edges(), Some(rounds))
        }
    };
    edges.sort_unstable();
    Ok((edges, rounds))
}

pub fn mst(g: &Graph, algo: MstAlgo, params: CostParams) -> Result<MstResult> {
    if g.n() == 0 {
        return Err(AramError::Argument("empty graph".into()));
    }
    let meter = CostMeter::new(params);
    let (edges, rounds) = mst_metered(g, algo, &meter)?;
    let total_weight = edges.iter().map(|&e| g.weight(e)).sum();
    Ok(MstResult {
        edges,
        total_weight,
        meter: meter.snapshot(),
        rounds,
    })
}

fn prim(g: &Graph, variant: SsspVariant, meter: &CostMeter, mult: Word) -> Result<Vec<usize>> {
    if g.n() == 0 {
        return Ok(vec![]);
    }
    let out = run_engine(g, 0, variant, meter, KeyRule::Edge { mult }, true)?;
    let keys = out.keys.into_inner();
    Ok(keys
        .into_iter()
        .filter(|&k| k != 0)
        .map(|k| ((k - 1) % mult) as usize)
        .collect())
}

/// Root of `v` in a forest without path compression.
fn find_root(parent: &SlowArray<'_>, mut v: usize) -> usize {
    loop {
        let p = parent.read(v);
        if p == INF {
            return v;
        }
        v = p as usize;
    }
}

fn kruskal(g: &Graph, meter: &CostMeter, mult: Word) -> Result<Vec<usize>> {
    let n = g.n();
    let view = g.view(meter);
    let mut keys = SlowArray::with_capacity(meter, g.m() / 2);
    for u in 0..n {
        for e in view.arcs_of(u) {
            if e < view.twin(e) {
                let (_, w) = view.arc(e);
                keys.push(w * mult + e as Word);
            }
        }
    }
    let sorted = we_sort(meter, &keys);
    drop(keys);
    let mut parent = SlowArray::new(meter, n, INF);
    let mut rank = SlowArray::new(meter, n, 0);
    let mut chosen = vec![];
    for i in 0..sorted.len() {
        if chosen.len() + 1 == n {
            break;
        }
        let e = (sorted.read(i) % mult) as usize;
        let (a, b) = (view.target(e), view.target(view.twin(e)));
        let (ra, rb) = (find_root(&parent, a), find_root(&parent, b));
        meter.fast(1);
        if ra == rb {
            continue;
        }
        let (ka, kb) = (rank.read(ra), rank.read(rb));
        let (hi, lo) = if ka >= kb { (ra, rb) } else { (rb, ra) };
        parent.write(lo, hi as Word);
        if ka == kb {
            rank.write(hi, ka + 1);
        }
        chosen.push(e);
    }
    Ok(chosen)
}

/// Number of first-phase rounds for `n` vertices: `ceil(log2 log2 n)`, and
/// none below 16 vertices.
pub fn phase_one_rounds(n: usize) -> usize {
    if n < 16 {
        return 0;
    }
    let lg = (n as f64).log2();
    lg.log2().ceil() as usize
}

/// Slow writes per vertex allowed to Borůvka across all rounds.
pub const BORUVKA_WRITES_PER_VERTEX: u64 = 14;

/// Borůvka state between rounds.
pub struct BoruvkaState<'g, 'm> {
    view: GraphView<'g, 'm>,
    mult: Word,
    round: usize,
    phase_one: usize,
    /// Phase-one union forest: absorbed root -> group root.
    parent: SlowArray<'m>,
    /// Circular vertex lists, one per phase-one component.
    next: SlowArray<'m>,
    /// Vertex -> phase-one component, filled at the phase boundary.
    comp1: SlowArray<'m>,
    /// Phase-one component -> current component.
    cur: SlowArray<'m>,
    /// Circular lists of phase-one components per current component.
    p1next: SlowArray<'m>,
    active: SlowArray<'m>,
    active_len: usize,
    best: SlowArray<'m>,
    to: SlowArray<'m>,
    child: SlowArray<'m>,
    sibling: SlowArray<'m>,
    edges: SlowArray<'m>,
}

impl<'g, 'm> BoruvkaState<'g, 'm> {
    pub fn new(g: &'g Graph, meter: &'m CostMeter, mult: Word) -> Self {
        let n = g.n();
        let phase_one = phase_one_rounds(n);
        let mut next = SlowArray::uninit(meter, n);
        for v in 0..n {
            next.write(v, v as Word);
        }
        let mut st = BoruvkaState {
            view: g.view(meter),
            mult,
            round: 0,
            phase_one,
            parent: SlowArray::new(meter, if phase_one > 0 { n } else { 0 }, INF),
            next,
            comp1: SlowArray::uninit(meter, n),
            cur: SlowArray::uninit(meter, n),
            p1next: SlowArray::uninit(meter, n),
            active: SlowArray::uninit(meter, n),
            active_len: n,
            best: SlowArray::uninit(meter, n),
            to: SlowArray::uninit(meter, n),
            child: SlowArray::new(meter, n, 0),
            sibling: SlowArray::uninit(meter, n),
            edges: SlowArray::with_capacity(meter, n.saturating_sub(1)),
        };
        if phase_one == 0 {
            st.enter_phase_two();
        }
        st
    }

    pub fn round_index(&self) -> usize {
        self.round
    }

    pub fn in_phase_one(&self) -> bool {
        self.round < self.phase_one
    }

    pub fn is_done(&self) -> bool {
        self.active_len == 0
    }

    /// Components that may still have outgoing edges.
    pub fn active_components(&self) -> usize {
        self.active_len
    }

    pub fn edges_so_far(&self) -> usize {
        self.edges.len()
    }

    pub fn into_edges(self) -> Vec<usize> {
        self.edges.into_inner().into_iter().map(|e| e as usize).collect()
    }

    /// Current component of `v`.
    pub fn find(&self, v: usize) -> usize {
        if self.in_phase_one() {
            find_root(&self.parent, v)
        } else {
            self.cur.read(self.comp1.read(v) as usize) as usize
        }
    }

    /// Longest phase-one chain from any vertex (test helper, reads only).
    pub fn max_chain(&self) -> usize {
        (0..self.view.n())
            .map(|mut v| {
                let mut len = 0;
                while !self.parent.is_empty() && self.parent.read(v) != INF {
                    v = self.parent.read(v) as usize;
                    len += 1;
                }
                len
            })
            .max()
            .unwrap_or(0)
    }

    fn enter_phase_two(&mut self) {
        let n = self.view.n();
        for v in 0..n {
            let c = if self.parent.is_empty() {
                v
            } else {
                find_root(&self.parent, v)
            };
            self.comp1.write(v, c as Word);
        }
        for i in 0..self.active_len {
            let c = self.active_at(i);
            self.cur.write(c, c as Word);
            self.p1next.write(c, c as Word);
        }
    }

    /// Lightest outgoing edge of component `c`, as `(packed key, other component)`.
    fn best_edge(&self, c: usize) -> (Word, usize) {
        let mut best = (INF, usize::MAX);
        let scan_vertices = |start: usize, best: &mut (Word, usize)| {
            let mut v = start;
            loop {
                for e in self.view.arcs_of(v) {
                    let (t, w) = self.view.arc(e);
                    let ct = self.find(t);
                    self.view.meter().fast(1);
                    if ct == c {
                        continue;
                    }
                    let key = w * self.mult + e.min(self.view.twin(e)) as Word;
                    if key < best.0 {
                        *best = (key, ct);
                    }
                }
                v = self.next.read(v) as usize;
                if v == start {
                    break;
                }
            }
        };
        if self.in_phase_one() {
            scan_vertices(c, &mut best);
        } else {
            let mut x = c;
            loop {
                scan_vertices(x, &mut best);
                x = self.p1next.read(x) as usize;
                if x == c {
                    break;
                }
            }
        }
        best
    }

    /// One round: every active component picks its lightest outgoing edge and
    /// the resulting trees of components are merged into their roots.
    /// Returns the number of components absorbed.
    pub fn round(&mut self) -> Result<usize> {
        let k = self.active_len;
        if k == 0 {
            return Err(AramError::Contract("no active components left".into()));
        }
        for i in 0..k {
            let c = self.active_at(i);
            let (key, d) = self.best_edge(c);
            self.best.write(c, key);
            if key != INF {
                self.to.write(c, d as Word);
            }
        }
        // hang each non-root under the component it chose; in a mutual pair
        // the smaller id is the root
        for i in 0..k {
            let c = self.active_at(i);
            if self.best.read(c) == INF || self.is_root(c) {
                continue;
            }
            let d = self.to.read(c) as usize;
            let head = self.child.read(d);
            self.sibling.write(c, head);
            let link = self.stamp(c);
            self.child.write(d, link);
        }
        let mut merged = 0;
        let mut survivors = 0;
        for i in 0..k {
            let c = self.active_at(i);
            let key = self.best.read(c);
            if key != INF && !self.is_root(c) {
                continue;
            }
            merged += self.absorb_tree(c);
            // the active list is rewritten in place; slot survivors <= i
            if key != INF {
                self.active.write(survivors, c as Word);
                survivors += 1;
            }
        }
        self.active_len = survivors;
        self.round += 1;
        if self.round == self.phase_one {
            self.enter_phase_two();
        }
        Ok(merged)
    }

    /// Before the first round every vertex is active, in order.
    fn active_at(&self, i: usize) -> usize {
        if self.round == 0 {
            i
        } else {
            self.active.read(i) as usize
        }
    }

    /// Whether `c`, which has an outgoing edge, is the smaller end of the
    /// mutually chosen edge of its tree.
    fn is_root(&self, c: usize) -> bool {
        let d = self.to.read(c) as usize;
        c < d && self.to.read(d) as usize == c && self.best.read(d) == self.best.read(c)
    }

    /// Child and sibling links carry the round that wrote them, so stale
    /// links from earlier rounds read as empty without being cleared.
    fn stamp(&self, c: usize) -> Word {
        ((self.round as Word + 1) << LINK_BITS) | c as Word
    }

    fn link(&self, word: Word) -> Option<usize> {
        (word >> LINK_BITS == self.round as Word + 1).then_some((word & LINK_MASK) as usize)
    }

    /// Walk the component tree under `root` (children via the stamped links,
    /// parents via `to`), merging every component in it into `root`.
    fn absorb_tree(&mut self, root: usize) -> usize {
        let phase_one = self.in_phase_one();
        let mut merged = 0;
        let mut x = self.link(self.child.read(root));
        while let Some(c) = x {
            let e = self.best.read(c) % self.mult;
            self.edges.push(e);
            merged += 1;
            if phase_one {
                self.parent.write(c, root as Word);
                splice(&mut self.next, root, c);
            } else {
                let mut y = c;
                loop {
                    self.cur.write(y, root as Word);
                    y = self.p1next.read(y) as usize;
                    if y == c {
                        break;
                    }
                }
                splice(&mut self.p1next, root, c);
            }
            x = self.link(self.child.read(c));
            let mut up = c;
            while x.is_none() {
                x = self.link(self.sibling.read(up));
                if x.is_some() {
                    break;
                }
                up = self.to.read(up) as usize;
                if up == root {
                    break;
                }
            }
        }
        merged
    }
}

const LINK_BITS: u32 = 40;
const LINK_MASK: Word = (1 << LINK_BITS) - 1;

/// Join two circular lists by swapping successors.
fn splice(next: &mut SlowArray<'_>, a: usize, b: usize) {
    let (na, nb) = (next.read(a), next.read(b));
    next.write(a, nb);
    next.write(b, na);
}

/// Unmetered Kruskal with path compression: total weight and edge ids.
pub fn oracle_mst(g: &Graph) -> (Word, Vec<usize>) {
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut edges: Vec<(Word, usize)> = (0..g.m())
        .filter(|&e| g.twin(e).is_some_and(|t| e < t))
        .map(|e| (g.weight(e), e))
        .collect();
    edges.sort_unstable();
    let mut p: Vec<usize> = (0..g.n()).collect();
    let mut total = 0;
    let mut chosen = vec![];
    for (w, e) in edges {
        let (a, b) = (find(&mut p, g.target(e)), find(&mut p, g.source(e)));
        if a != b {
            p[a] = b;
            total += w;
            chosen.push(e);
        }
    }
    chosen.sort_unstable();
    (total, chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random;

    fn params() -> CostParams {
        CostParams::new(1024, 10).unwrap()
    }

    const ALGOS: [MstAlgo; 5] = [
        MstAlgo::Prim(SsspVariant::Phased),
        MstAlgo::Prim(SsspVariant::BstQueue),
        MstAlgo::Prim(SsspVariant::FibHeap),
        MstAlgo::Kruskal,
        MstAlgo::Boruvka,
    ];

    #[test]
    fn triangle() {
        let g = Graph::undirected_from_edges(3, &[(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap();
        let (w, edges) = oracle_mst(&g);
        assert_eq!(w, 3);
        for a in ALGOS {
            let r = mst(&g, a, params()).unwrap();
            assert_eq!((r.total_weight, &r.edges), (3, &edges), "{a:?}");
        }
    }

    #[test]
    fn tree_and_forest() {
        let tree = Graph::undirected_from_edges(4, &[(0, 1, 5), (1, 2, 5), (1, 3, 1)]).unwrap();
        let forest = Graph::undirected_from_edges(5, &[(0, 1, 2), (3, 4, 7)]).unwrap();
        for a in ALGOS {
            assert_eq!(mst(&tree, a, params()).unwrap().edges.len(), 3);
            let r = mst(&forest, a, params()).unwrap();
            assert_eq!((r.total_weight, r.edges.len()), (9, 2), "{a:?}");
        }
    }

    #[test]
    fn directed_rejected() {
        let g = Graph::from_arcs(2, &[(0, 1, 1)]).unwrap();
        assert!(matches!(mst(&g, MstAlgo::Kruskal, params()), Err(AramError::Domain(_))));
    }

    /// Brute-force one round: each singleton picks its lightest incident edge.
    #[test]
    fn first_round_on_path() {
        let g = Graph::undirected_from_edges(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3)]).unwrap();
        let mut expect: Vec<usize> = (0..4)
            .map(|v| {
                g.arcs_of(v)
                    .map(|e| (g.weight(e), e.min(g.twin(e).unwrap())))
                    .min()
                    .unwrap()
                    .1
            })
            .collect();
        expect.sort_unstable();
        expect.dedup();
        let mt = CostMeter::new(params());
        let mut st = BoruvkaState::new(&g, &mt, edge_mult(&g).unwrap());
        assert_eq!(st.round().unwrap(), 3);
        let mut got = st.into_edges();
        got.sort_unstable();
        assert_eq!(got, expect);
    }

    #[test]
    fn parallel_edges_lowest_id_wins() {
        let g = Graph::undirected_from_edges(2, &[(0, 1, 4), (0, 1, 4), (1, 0, 4)]).unwrap();
        for a in ALGOS {
            assert_eq!(mst(&g, a, params()).unwrap().edges, vec![0], "{a:?}");
        }
    }

    #[test]
    fn random_agreement_and_boruvka_budgets() {
        for seed in 0..4 {
            let n = 1000;
            let g = gen_random(n, 5 * n, 50, seed).unwrap().to_undirected();
            let (w, edges) = oracle_mst(&g);
            for a in ALGOS {
                let r = mst(&g, a, params()).unwrap();
                assert_eq!((r.total_weight, &r.edges), (w, &edges), "{a:?}");
            }
            let mt = CostMeter::new(params());
            let mut st = BoruvkaState::new(&g, &mt, edge_mult(&g).unwrap());
            let mut comps = n;
            while !st.is_done() {
                if st.in_phase_one() {
                    assert!(st.max_chain() <= st.round_index());
                }
                let active = st.active_components();
                let merged = st.round().unwrap();
                assert!(merged * 2 >= active || st.is_done());
                comps -= merged;
                if st.round_index() == phase_one_rounds(n) {
                    assert!(comps as f64 <= n as f64 / (n as f64).log2());
                }
            }
            assert!(st.round_index() <= (n as f64).log2().ceil() as usize);
            assert!(
                mt.slow_writes() <= BORUVKA_WRITES_PER_VERTEX * n as u64,
                "{}",
                mt.slow_writes()
            );
            let lg = (n as f64).log2();
            assert!((mt.slow_reads() as f64) <= 16.0 * g.m() as f64 * lg);
        }
    }
}
