//! Single-source shortest paths with non-negative weights, three ways:
//!
//! * `FibHeap`: textbook Dijkstra with a Fibonacci heap kept in slow memory.
//! * `BstQueue`: Dijkstra with a red-black tree in slow memory and lazy
//!   deletion of stale entries.
//! * `Phased`: the priority queue lives entirely in fast memory and holds at
//!   most `2M'` entries (`M' = M / 32`). Each phase rescans all edges out of
//!   visited vertices to rebuild the frontier, then runs Dijkstra until the
//!   queue empties. Only final distances are written to slow memory.
//!
//! The same engines also drive Prim's algorithm (see [`crate::mst`]) by
//! swapping the key rule.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::costmodel::{sat_add, CostMeter, CostParams, MeterSnapshot, SlowArray, Word, INF};
use crate::error::{AramError, Result};
use crate::graph::{Graph, GraphView};
use crate::heaps::fib::{degree_table_len, NODE_WORDS as FIB_NODE_WORDS};
use crate::heaps::{FibHeap, RbQueue, TruncatingHeap};

/// Fast memory is divided by this to get the heap capacity `M'`.
pub const PHASED_DIVISOR: usize = 32;
/// Smallest fast memory that leaves `M' >= 4`.
pub const MIN_PHASED_M: usize = PHASED_DIVISOR * 4;
/// Slow writes allowed to the phased variant beyond `2n`.
pub const PHASED_WRITE_SLACK: u64 = 16;
/// Documented constant of the BST variant: slow writes per arc.
pub const BST_WRITES_PER_ARC: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SsspVariant {
    FibHeap,
    BstQueue,
    Phased,
}

impl SsspVariant {
    pub const ALL: [SsspVariant; 3] = [SsspVariant::FibHeap, SsspVariant::BstQueue, SsspVariant::Phased];

    pub fn name(self) -> &'static str {
        match self {
            SsspVariant::FibHeap => "fib",
            SsspVariant::BstQueue => "bst",
            SsspVariant::Phased => "phased",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhaseStats {
    pub phases: usize,
    pub visited: Vec<usize>,
    /// Admission threshold at the end of each phase (`INF` if never truncated).
    pub d_max: Vec<Word>,
    pub truncations: u64,
}

#[derive(Clone, Debug)]
pub struct DistResult {
    pub dist: Vec<Word>,
    pub meter: MeterSnapshot,
    pub phases: Option<PhaseStats>,
}

/// How a relaxation turns the settled key of `u` and the arc `e` into a key
/// for its head.
#[derive(Clone, Copy, Debug)]
pub(crate) enum KeyRule {
    /// Path length: `key(u) + w`.
    Path,
    /// Prim: `w * mult + canonical arc id + 1`, so equal weights are broken by
    /// arc id and the settled key identifies the tree edge. Roots get key 0.
    Edge { mult: Word },
}

impl KeyRule {
    #[inline]
    fn key(self, view: &GraphView<'_, '_>, du: Word, e: usize, w: Word) -> Word {
        match self {
            KeyRule::Path => sat_add(du, w),
            KeyRule::Edge { mult } => {
                let t = view.twin(e);
                w * mult + e.min(t) as Word + 1
            }
        }
    }
}

pub(crate) struct EngineOut<'m> {
    pub keys: SlowArray<'m>,
    pub stats: Option<PhaseStats>,
}

/// Run one of the three engines. With `restart`, the search is reseeded at
/// the lowest unsettled vertex whenever the frontier empties, covering every
/// component.
pub(crate) fn run_engine<'m>(
    g: &Graph,
    s: usize,
    variant: SsspVariant,
    meter: &'m CostMeter,
    rule: KeyRule,
    restart: bool,
) -> Result<EngineOut<'m>> {
    if s >= g.n() {
        return Err(AramError::Argument(format!("source {s} out of range 0..{}", g.n())));
    }
    match variant {
        SsspVariant::FibHeap => fib_engine(g, s, meter, rule, restart),
        SsspVariant::BstQueue => bst_engine(g, s, meter, rule, restart),
        SsspVariant::Phased => phased_engine(g, s, meter, rule, restart),
    }
}

/// Next unsettled vertex at or after `*cursor`, advancing the cursor.
fn next_root(keys: &SlowArray<'_>, cursor: &mut usize) -> Option<usize> {
    while *cursor < keys.len() {
        let v = *cursor;
        *cursor += 1;
        if keys.read(v) == INF {
            return Some(v);
        }
    }
    None
}

fn fib_engine<'m>(g: &Graph, s: usize, meter: &'m CostMeter, rule: KeyRule, restart: bool) -> Result<EngineOut<'m>> {
    let n = g.n();
    let view = g.view(meter);
    let mut keys = SlowArray::new(meter, n, INF);
    let mut handle = SlowArray::new(meter, n, INF);
    let nodes = SlowArray::uninit(meter, n * FIB_NODE_WORDS);
    let table = SlowArray::new(meter, degree_table_len(n), INF);
    let mut heap = FibHeap::new(nodes, table);
    let mut cursor = 0;
    let mut root = Some(s);
    while let Some(r) = root {
        let h = heap.insert(0, r as Word);
        handle.write(r, h as Word);
        while let Some((k, u)) = heap.delete_min() {
            let u = u as usize;
            keys.write(u, k);
            for e in view.arcs_of(u) {
                let (v, w) = view.arc(e);
                if keys.read(v) != INF {
                    continue;
                }
                let key = rule.key(&view, k, e, w);
                let h = handle.read(v);
                // a handle is live only while the vertex is unsettled
                if h == INF {
                    let h = heap.insert(key, v as Word);
                    handle.write(v, h as Word);
                } else {
                    heap.decrease_key(h as usize, key);
                }
            }
        }
        root = if restart { next_root(&keys, &mut cursor) } else { None };
    }
    Ok(EngineOut { keys, stats: None })
}

fn bst_engine<'m>(g: &Graph, s: usize, meter: &'m CostMeter, rule: KeyRule, restart: bool) -> Result<EngineOut<'m>> {
    let n = g.n();
    let view = g.view(meter);
    let mut keys = SlowArray::new(meter, n, INF);
    let mut tentative = SlowArray::new(meter, n, INF);
    let mut tree = RbQueue::new(meter);
    let mut cursor = 0;
    let mut root = Some(s);
    while let Some(r) = root {
        tentative.write(r, 0);
        tree.insert(0, r as Word);
        while !tree.is_empty() {
            let (k, u) = tree.delete_min()?;
            let u = u as usize;
            if keys.read(u) != INF {
                continue;
            }
            keys.write(u, k);
            for e in view.arcs_of(u) {
                let (v, w) = view.arc(e);
                if keys.read(v) != INF {
                    continue;
                }
                let key = rule.key(&view, k, e, w);
                if key < tentative.read(v) {
                    tentative.write(v, key);
                    tree.insert(key, v as Word);
                }
            }
        }
        root = if restart { next_root(&keys, &mut cursor) } else { None };
    }
    Ok(EngineOut { keys, stats: None })
}

fn phased_engine<'m>(g: &Graph, s: usize, meter: &'m CostMeter, rule: KeyRule, restart: bool) -> Result<EngineOut<'m>> {
    let params = meter.params();
    if params.m < MIN_PHASED_M {
        return Err(AramError::Config(format!(
            "phased variant needs M >= {MIN_PHASED_M} fast words, got M = {}",
            params.m
        )));
    }
    let n = g.n();
    let view = g.view(meter);
    let cap = params.m / PHASED_DIVISOR;
    let mut heap = TruncatingHeap::new(meter, cap)?;
    // u, key(u), arc cursor, root cursor
    let _registers = meter.alloc_fast("sssp::Phased", 4)?;
    let mut keys = SlowArray::new(meter, n, INF);
    let mut stats = PhaseStats::default();
    let mut cursor = 0;
    let mut seed = Some(s);
    loop {
        heap.reset_threshold();
        // part 1: rebuild the frontier from every settled vertex
        if let Some(r) = seed.take() {
            heap.relax(r as Word, 0)?;
        } else {
            for u in 0..n {
                let du = keys.read(u);
                if du == INF {
                    continue;
                }
                for e in view.arcs_of(u) {
                    let (v, w) = view.arc(e);
                    if keys.read(v) == INF {
                        heap.relax(v as Word, rule.key(&view, du, e, w))?;
                    }
                }
            }
        }
        if heap.is_empty() {
            match restart.then(|| next_root(&keys, &mut cursor)).flatten() {
                Some(r) => heap.relax(r as Word, 0)?,
                None => break,
            }
        }
        // part 2: Dijkstra inside the admitted window
        let mut visited = 0;
        while !heap.is_empty() {
            let (k, u) = heap.delete_min()?;
            let u = u as usize;
            keys.write(u, k);
            visited += 1;
            for e in view.arcs_of(u) {
                let (v, w) = view.arc(e);
                if keys.read(v) == INF {
                    heap.relax(v as Word, rule.key(&view, k, e, w))?;
                }
            }
        }
        stats.phases += 1;
        stats.visited.push(visited);
        stats.d_max.push(heap.d_max());
    }
    stats.truncations = heap.truncations();
    Ok(EngineOut {
        keys,
        stats: Some(stats),
    })
}

/// Shortest-path distances from `s` charged to `meter`.
pub fn sssp_metered(
    g: &Graph,
    s: usize,
    variant: SsspVariant,
    meter: &CostMeter,
) -> Result<(Vec<Word>, Option<PhaseStats>)> {
    let out = run_engine(g, s, variant, meter, KeyRule::Path, false)?;
    Ok((out.keys.into_inner(), out.stats))
}

/// Shortest-path distances from `s` on a fresh meter.
pub fn sssp(g: &Graph, s: usize, variant: SsspVariant, params: CostParams) -> Result<DistResult> {
    let meter = CostMeter::new(params);
    let (dist, phases) = sssp_metered(g, s, variant, &meter)?;
    Ok(DistResult {
        dist,
        meter: meter.snapshot(),
        phases,
    })
}

/// Closed-form cost estimates `(fib, bst, phased)` with unit constants.
pub fn estimates(n: usize, m: usize, params: CostParams) -> [f64; 3] {
    let (n, m) = (n as f64, m as f64);
    let omega = params.omega as f64;
    let lg = n.log2().max(1.0);
    [
        omega * (m + n * lg),
        m * (omega + lg),
        n * (omega + m / params.m as f64),
    ]
}

/// Pick the variant with the smallest estimate; ties go to `Phased`, then
/// `BstQueue`. `Phased` is not eligible below [`MIN_PHASED_M`]. This is an
/// asymptotic heuristic, not a minimiser of measured cost.
pub fn select_variant(n: usize, m: usize, params: CostParams) -> SsspVariant {
    let [fib, bst, phased] = estimates(n, m, params);
    if params.m >= MIN_PHASED_M && phased <= bst && phased <= fib {
        SsspVariant::Phased
    } else if bst <= fib {
        SsspVariant::BstQueue
    } else {
        SsspVariant::FibHeap
    }
}

/// Unmetered binary-heap Dijkstra.
pub fn oracle_sssp(g: &Graph, s: usize) -> Vec<Word> {
    let mut dist = vec![INF; g.n()];
    let mut pq = BinaryHeap::from([Reverse((0, s))]);
    dist[s] = 0;
    while let Some(Reverse((d, u))) = pq.pop() {
        if d > dist[u] {
            continue;
        }
        for e in g.arcs_of(u) {
            let (v, nd) = (g.target(e), sat_add(d, g.weight(e)));
            if nd < dist[v] {
                dist[v] = nd;
                pq.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_random, parse_edge_list};

    fn params(m: usize, omega: u64) -> CostParams {
        CostParams::new(m, omega).unwrap()
    }

    #[test]
    fn triangle_and_trivial() {
        let tri = parse_edge_list("3 3\n0 1 1\n1 2 1\n0 2 3").unwrap();
        assert_eq!(oracle_sssp(&tri, 0), vec![0, 1, 2]);
        let one = parse_edge_list("1 0").unwrap();
        let two = parse_edge_list("2 1\n0 1 7").unwrap();
        for v in SsspVariant::ALL {
            assert_eq!(sssp(&tri, 0, v, params(128, 10)).unwrap().dist, vec![0, 1, 2]);
            assert_eq!(sssp(&one, 0, v, params(128, 10)).unwrap().dist, vec![0]);
            assert_eq!(sssp(&two, 1, v, params(128, 10)).unwrap().dist, vec![INF, 0]);
        }
    }

    #[test]
    fn phased_needs_fast_memory() {
        let g = parse_edge_list("1 0").unwrap();
        let err = sssp(&g, 0, SsspVariant::Phased, params(127, 10)).unwrap_err();
        assert!(err.to_string().contains("128"));
    }

    #[test]
    fn variants_agree_and_respect_budgets() {
        for seed in 0..4 {
            let (n, m) = (1000, 10_000);
            let g = gen_random(n, m, 100, seed).unwrap();
            let want = oracle_sssp(&g, 0);
            let p = params(1024, 100);

            let r = sssp(&g, 0, SsspVariant::Phased, p).unwrap();
            assert_eq!(r.dist, want);
            let st = r.phases.unwrap();
            assert!(r.meter.slow_writes <= 2 * n as u64 + PHASED_WRITE_SLACK);
            assert!(st.phases <= n.div_ceil(p.m / PHASED_DIVISOR));
            assert_eq!(st.visited.iter().sum::<usize>(), n);
            assert!(r.meter.peak_fast <= p.m);

            let r = sssp(&g, 0, SsspVariant::FibHeap, p).unwrap();
            assert_eq!(r.dist, want);
            assert!(r.meter.slow_writes >= m as u64 / 2);

            let r = sssp(&g, 0, SsspVariant::BstQueue, p).unwrap();
            assert_eq!(r.dist, want);
            assert!(r.meter.slow_writes <= BST_WRITES_PER_ARC * m as u64);
            assert!(r.meter.slow_reads <= 16 * m as u64 * 10);
        }
    }

    #[test]
    fn phased_with_tiny_heap_many_phases() {
        let g = gen_random(300, 1500, 50, 9).unwrap();
        let r = sssp(&g, 0, SsspVariant::Phased, params(MIN_PHASED_M, 4)).unwrap();
        assert_eq!(r.dist, oracle_sssp(&g, 0));
        let st = r.phases.unwrap();
        assert!(st.phases > 1 && st.phases <= 300usize.div_ceil(4));
        assert!(st.truncations > 0);
    }

    #[test]
    fn selector() {
        assert_eq!(select_variant(1000, 10_000, params(1024, 100)), SsspVariant::Phased);
        let p = params(2, 1);
        let [fib, bst, _] = estimates(1000, 10_000, p);
        let want = if bst <= fib {
            SsspVariant::BstQueue
        } else {
            SsspVariant::FibHeap
        };
        assert_eq!(select_variant(1000, 10_000, p), want);
        assert_eq!(select_variant(1, 1, params(128, 1)), SsspVariant::Phased);
    }
}
