//! Compressed sparse row graphs resident in slow memory, edge-list I/O,
//! seeded generators, and metered BFS/DFS.
//!
//! A [`Graph`] is plain data so it can be shared across runs; algorithms read
//! it through a [`GraphView`], which charges one slow read per word touched.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::costmodel::{CostMeter, SlowArray, Word, INF};
use crate::error::{AramError, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    offsets: Vec<Word>,
    targets: Vec<Word>,
    weights: Vec<Word>,
    /// For symmetric graphs, `twin[e]` is the reverse arc of `e`.
    twin: Option<Vec<Word>>,
}

impl Graph {
    /// Build a CSR graph from arcs, keeping input order within each source.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize, Word)]) -> Result<Graph> {
        let mut offsets = vec![0 as Word; n + 1];
        for &(u, v, w) in arcs {
            if u >= n || v >= n {
                return Err(AramError::Argument(format!("arc ({u},{v}) out of range for n={n}")));
            }
            if w == INF {
                return Err(AramError::Domain("edge weight equals the infinity sentinel".into()));
            }
            offsets[u + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor: Vec<usize> = offsets[..n].iter().map(|&o| o as usize).collect();
        let mut targets = vec![0; arcs.len()];
        let mut weights = vec![0; arcs.len()];
        for &(u, v, w) in arcs {
            let e = cursor[u];
            cursor[u] += 1;
            targets[e] = v as Word;
            weights[e] = w;
        }
        Ok(Graph {
            n,
            offsets,
            targets,
            weights,
            twin: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored arcs.
    pub fn m(&self) -> usize {
        self.targets.len()
    }

    pub fn arcs_of(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u] as usize..self.offsets[u + 1] as usize
    }

    pub fn target(&self, e: usize) -> usize {
        self.targets[e] as usize
    }

    pub fn weight(&self, e: usize) -> Word {
        self.weights[e]
    }

    /// Source vertex of arc `e` (binary search over offsets).
    pub fn source(&self, e: usize) -> usize {
        self.offsets.partition_point(|&o| o as usize <= e) - 1
    }

    pub fn twin(&self, e: usize) -> Option<usize> {
        self.twin.as_ref().map(|t| t[e] as usize)
    }

    pub fn is_symmetric(&self) -> bool {
        self.twin.is_some()
    }

    /// All arcs in CSR order.
    pub fn arcs(&self) -> Vec<(usize, usize, Word)> {
        (0..self.n)
            .flat_map(|u| self.arcs_of(u).map(move |e| (u, e)))
            .map(|(u, e)| (u, self.target(e), self.weight(e)))
            .collect()
    }

    /// Each arc becomes an undirected edge, stored as a pair of twin arcs.
    /// Self-loops are dropped.
    pub fn to_undirected(&self) -> Graph {
        let edges: Vec<_> = self.arcs().into_iter().filter(|&(u, v, _)| u != v).collect();
        Graph::undirected_from_edges(self.n, &edges).expect("arcs already validated")
    }

    pub fn undirected_from_edges(n: usize, edges: &[(usize, usize, Word)]) -> Result<Graph> {
        let mut arcs = Vec::with_capacity(2 * edges.len());
        for &(u, v, w) in edges {
            arcs.push((u, v, w));
            arcs.push((v, u, w));
        }
        let mut g = Graph::from_arcs(n, &arcs)?;
        // recover the position of each input arc, then pair them
        let mut cursor: Vec<usize> = g.offsets[..n].iter().map(|&o| o as usize).collect();
        let mut pos = Vec::with_capacity(arcs.len());
        for &(u, _, _) in &arcs {
            pos.push(cursor[u]);
            cursor[u] += 1;
        }
        let mut twin = vec![0 as Word; arcs.len()];
        for k in 0..edges.len() {
            let (a, b) = (pos[2 * k], pos[2 * k + 1]);
            twin[a] = b as Word;
            twin[b] = a as Word;
        }
        g.twin = Some(twin);
        Ok(g)
    }

    /// Undirected edges `(u, v, w)` with `u`'s arc the lower-indexed twin.
    pub fn undirected_edges(&self) -> Vec<(usize, usize, Word)> {
        let mut out = vec![];
        for u in 0..self.n {
            for e in self.arcs_of(u) {
                if self.twin(e).is_some_and(|t| e < t) {
                    out.push((u, self.target(e), self.weight(e)));
                }
            }
        }
        out
    }

    pub fn view<'g, 'm>(&'g self, meter: &'m CostMeter) -> GraphView<'g, 'm> {
        GraphView { g: self, meter }
    }
}

/// Metered read access to a [`Graph`].
#[derive(Clone, Copy)]
pub struct GraphView<'g, 'm> {
    g: &'g Graph,
    meter: &'m CostMeter,
}

impl<'g, 'm> GraphView<'g, 'm> {
    pub fn graph(&self) -> &'g Graph {
        self.g
    }

    pub fn meter(&self) -> &'m CostMeter {
        self.meter
    }

    pub fn n(&self) -> usize {
        self.g.n
    }

    /// Two slow reads: the two bounding offsets.
    pub fn arcs_of(&self, u: usize) -> std::ops::Range<usize> {
        self.meter.charge_read();
        self.meter.charge_read();
        self.g.arcs_of(u)
    }

    /// Two slow reads: target and weight.
    pub fn arc(&self, e: usize) -> (usize, Word) {
        self.meter.charge_read();
        self.meter.charge_read();
        (self.g.target(e), self.g.weight(e))
    }

    pub fn target(&self, e: usize) -> usize {
        self.meter.charge_read();
        self.g.target(e)
    }

    pub fn twin(&self, e: usize) -> usize {
        self.meter.charge_read();
        self.g.twin(e).expect("twin lookup on a directed graph")
    }
}

/// Parse the `n m` header plus `u v w` lines format; `#` starts a comment.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs = vec![];
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let perr = |msg: String| AramError::Parse { line: line_no, msg };
        match header {
            None => {
                if fields.len() != 2 {
                    return Err(perr(format!("expected header `n m`, got {line:?}")));
                }
                let n = fields[0]
                    .parse()
                    .map_err(|_| perr(format!("bad vertex count {:?}", fields[0])))?;
                let m = fields[1]
                    .parse()
                    .map_err(|_| perr(format!("bad edge count {:?}", fields[1])))?;
                header = Some((n, m));
            }
            Some((n, _)) => {
                if fields.len() != 3 {
                    return Err(perr(format!("expected `u v w`, got {line:?}")));
                }
                let mut vals = [0i128; 3];
                for (slot, f) in vals.iter_mut().zip(&fields) {
                    *slot = f.parse().map_err(|_| perr(format!("not an integer: {f:?}")))?;
                }
                let [u, v, w] = vals;
                if w < 0 {
                    return Err(AramError::Domain(format!("line {line_no}: negative weight {w}")));
                }
                if u < 0 || v < 0 || u >= n as i128 || v >= n as i128 {
                    return Err(perr(format!("vertex out of range 0..{n}")));
                }
                if w >= INF as i128 {
                    return Err(perr(format!("weight {w} does not fit below the infinity sentinel")));
                }
                arcs.push((u as usize, v as usize, w as Word));
            }
        }
    }
    let (n, m) = header.ok_or(AramError::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if arcs.len() != m {
        return Err(AramError::Parse {
            line: 0,
            msg: format!("header promises {m} edges, found {}", arcs.len()),
        });
    }
    Graph::from_arcs(n, &arcs)
}

/// Inverse of [`parse_edge_list`], arcs in CSR order.
pub fn serialize_edge_list(g: &Graph) -> String {
    let mut s = format!("{} {}\n", g.n(), g.m());
    for (u, v, w) in g.arcs() {
        writeln!(s, "{u} {v} {w}").unwrap();
    }
    s
}

/// `m` random arcs, the first `n-1` forming a random arborescence rooted at 0.
pub fn gen_random(n: usize, m: usize, max_w: Word, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(AramError::Argument("graph needs at least one vertex".into()));
    }
    if m < n - 1 {
        return Err(AramError::Argument(format!("m={m} < n-1={} cannot span", n - 1)));
    }
    if max_w == 0 || max_w == INF {
        return Err(AramError::Argument("max weight must be in 1..INF".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(&mut rng);
    order.insert(0, 0);
    let mut arcs = Vec::with_capacity(m);
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        arcs.push((parent, order[i], rng.gen_range(1..=max_w)));
    }
    while arcs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v || n == 1 {
            arcs.push((u, v, rng.gen_range(1..=max_w)));
        }
    }
    Graph::from_arcs(n, &arcs)
}

/// A `rows x cols` grid with each undirected edge stored as twin arcs.
pub fn gen_grid(rows: usize, cols: usize, max_w: Word, seed: u64) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(AramError::Argument("grid needs positive dimensions".into()));
    }
    if max_w == 0 || max_w == INF {
        return Err(AramError::Argument("max weight must be in 1..INF".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = vec![];
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1), rng.gen_range(1..=max_w)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c), rng.gen_range(1..=max_w)));
            }
        }
    }
    Graph::undirected_from_edges(rows * cols, &edges)
}

/// Slow writes per vertex charged by [`bfs`]: dist init, dist, queue slot.
pub const BFS_WRITES_PER_VERTEX: u64 = 3;
/// Slow writes per vertex charged by [`dfs`]: mark init, mark, output,
/// two frame words, one resume position.
pub const DFS_WRITES_PER_VERTEX: u64 = 6;

/// Hop distances from `s`; every vertex is written once when it first joins
/// the frontier.
pub fn bfs<'m>(g: &Graph, s: usize, meter: &'m CostMeter) -> Result<SlowArray<'m>> {
    check_source(g, s)?;
    let view = g.view(meter);
    let mut dist = SlowArray::new(meter, g.n(), INF);
    let mut queue = SlowArray::uninit(meter, g.n());
    let (mut head, mut tail) = (0, 0);
    dist.write(s, 0);
    queue.write(tail, s as Word);
    tail += 1;
    while head < tail {
        let u = queue.read(head) as usize;
        head += 1;
        let du = dist.read(u);
        for e in view.arcs_of(u) {
            let v = view.target(e);
            meter.fast(1);
            if dist.read(v) == INF {
                dist.write(v, du + 1);
                queue.write(tail, v as Word);
                tail += 1;
            }
        }
    }
    Ok(dist)
}

/// Preorder of the vertices reachable from `s`, exploring arcs in adjacency
/// order. The stack frame of a vertex records where to resume its scan, and
/// is rewritten only when a descent discovers a new vertex.
pub fn dfs<'m>(g: &Graph, s: usize, meter: &'m CostMeter) -> Result<SlowArray<'m>> {
    check_source(g, s)?;
    let view = g.view(meter);
    let n = g.n();
    let mut seen = SlowArray::new(meter, n, 0);
    let mut order = SlowArray::with_capacity(meter, n);
    // frames: (vertex, next arc to try)
    let mut stack = SlowArray::uninit(meter, 2 * n);
    let mut depth = 0;
    let push = |stack: &mut SlowArray<'m>, depth: &mut usize, v: usize, e: usize| {
        stack.write(2 * *depth, v as Word);
        stack.write(2 * *depth + 1, e as Word);
        *depth += 1;
    };
    seen.write(s, 1);
    order.push(s as Word);
    push(&mut stack, &mut depth, s, view.arcs_of(s).start);
    while depth > 0 {
        let top = depth - 1;
        let u = stack.read(2 * top) as usize;
        let mut e = stack.read(2 * top + 1) as usize;
        let end = view.arcs_of(u).end;
        let mut descended = false;
        while e < end {
            let v = view.target(e);
            e += 1;
            meter.fast(1);
            if seen.read(v) == 0 {
                seen.write(v, 1);
                order.push(v as Word);
                stack.write(2 * top + 1, e as Word);
                let start = view.arcs_of(v).start;
                push(&mut stack, &mut depth, v, start);
                descended = true;
                break;
            }
        }
        if !descended {
            depth -= 1;
        }
    }
    Ok(order)
}

fn check_source(g: &Graph, s: usize) -> Result<()> {
    if s >= g.n() {
        return Err(AramError::Argument(format!("source {s} out of range 0..{}", g.n())));
    }
    Ok(())
}

/// Unmetered queue-based BFS.
pub fn oracle_bfs(g: &Graph, s: usize) -> Vec<Word> {
    let mut dist = vec![INF; g.n()];
    let mut q = VecDeque::from([s]);
    dist[s] = 0;
    while let Some(u) = q.pop_front() {
        for e in g.arcs_of(u) {
            let v = g.target(e);
            if dist[v] == INF {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
        }
    }
    dist
}

/// Unmetered recursive-order DFS.
pub fn oracle_dfs(g: &Graph, s: usize) -> Vec<Word> {
    fn go(g: &Graph, u: usize, seen: &mut [bool], out: &mut Vec<Word>) {
        seen[u] = true;
        out.push(u as Word);
        for e in g.arcs_of(u) {
            let v = g.target(e);
            if !seen[v] {
                go(g, v, seen, out);
            }
        }
    }
    let mut seen = vec![false; g.n()];
    let mut out = vec![];
    // recursion depth is bounded by n; tests keep n small enough for the stack
    go(g, s, &mut seen, &mut out);
    out
}
