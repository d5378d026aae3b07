//! Edit distance and longest common subsequence as shortest paths through an
//! implicit grid with diagonal edges, computed with few slow-memory writes.
//!
//! The grid is cut into `hM' x kM'` rectangles with `M' = M / 11`. Only the
//! bottom and right boundaries of each rectangle are written to slow memory.
//! Inside a rectangle, every `M'`-th row (a superrow) is split into segments
//! of at most `M'` nodes, and each segment carries a path sketch: the chain of
//! segments in earlier superrows that some shortest path to it runs through.
//! Re-evaluating a sketch recomputes a segment's distances from the inputs
//! with reads only, so interior distances never need to be stored.
//!
//! Both problems share one grid: horizontal and vertical edges cost 1 and a
//! matching diagonal costs 0. A mismatching diagonal costs 1 for edit
//! distance and is absent for LCS, where the stored value at `(i, j)` is
//! `i + j - 2 * lcs(i, j)`, i.e. the LCS distance shifted by the potential
//! `i + j` so that every edge weight is non-negative.

mod engine;
mod trace;

use std::fmt;

use crate::costmodel::{CostMeter, CostParams, MeterSnapshot, Word, INF};
use crate::error::{AramError, Result};

pub use engine::{AlignStats, EvalProbe};

/// Divisor of fast memory giving the working width `M'`.
pub const MPRIME_DIVISOR: usize = 11;
/// Fast words used beyond `10 M'`: column heads and sweep registers.
pub const FAST_OVERHEAD: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Policy {
    EditDistance,
    Lcs,
}

impl Policy {
    fn mismatch(self) -> Word {
        match self {
            Policy::EditDistance => 1,
            Policy::Lcs => INF,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    /// Diagonal: consume one character of each string.
    D,
    /// Down: consume a character of the first string only.
    V,
    /// Right: consume a character of the second string only.
    H,
}

impl Move {
    pub fn letter(self) -> char {
        match self {
            Move::D => 'D',
            Move::V => 'V',
            Move::H => 'H',
        }
    }
}

pub fn moves_to_string(path: &[Move]) -> String {
    path.iter().map(|m| m.letter()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TileParams {
    pub h: usize,
    pub k: usize,
}

impl TileParams {
    pub fn new(h: usize, k: usize) -> Result<Self> {
        if h == 0 || k == 0 {
            return Err(AramError::Argument("tile dimensions must be positive".into()));
        }
        if h > k {
            return Err(AramError::Argument(format!("tile needs h <= k, got h={h}, k={k}")));
        }
        Ok(TileParams { h, k })
    }
}

impl fmt::Display for TileParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.h, self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    MinimizeWork,
    MinimizeQ,
}

pub fn m_prime(fast_words: usize) -> usize {
    fast_words / MPRIME_DIVISOR
}

/// Smallest fast memory the aligner accepts.
pub fn min_fast_memory() -> usize {
    (1..)
        .find(|&m| m_prime(m) > 0 && 10 * m_prime(m) + FAST_OVERHEAD <= m)
        .unwrap()
}

fn ceil_tol(x: f64) -> usize {
    // cube roots of exact cubes come out a hair above the integer
    ((x - 1e-9).ceil().max(1.0)) as usize
}

/// Tile shape for strings of lengths `m <= n`. Long strings get squares of
/// side `k_T` (work) or `k_Q` (I/O cost); a first string shorter than one
/// such square gets a single band of height `m` and a wider `k`; a first
/// string that fits in fast memory gets the `1 x 1` tiling.
pub fn choose_tile(m: usize, n: usize, params: CostParams, objective: Objective) -> TileParams {
    let (m, n) = (m.min(n), m.max(n));
    let big_m = params.m as f64;
    let omega = params.omega as f64;
    let mp = m_prime(params.m).max(1);
    let k_obj = match objective {
        Objective::MinimizeWork => (omega / big_m).cbrt().min(big_m.sqrt()),
        Objective::MinimizeQ => omega.cbrt().min(big_m.sqrt()),
    };
    let unit = TileParams { h: 1, k: 1 };
    if m <= params.m || k_obj <= 1.0 + 1e-9 {
        return unit;
    }
    let max_h = m.div_ceil(mp);
    let max_k = n.div_ceil(mp);
    let (h, k) = if m as f64 >= k_obj * mp as f64 {
        let s = ceil_tol(k_obj);
        (s, s)
    } else {
        let h = max_h;
        let hf = h as f64;
        let kp = match objective {
            Objective::MinimizeWork => (omega / (hf * big_m)).sqrt().min(big_m / hf),
            Objective::MinimizeQ => (omega / hf).sqrt().min(big_m / hf),
        };
        (h, ceil_tol(kp).max(h))
    };
    let k = k.min(max_k).max(1);
    let h = h.min(max_h).min(k).max(1);
    TileParams { h, k }
}

#[derive(Clone, Debug)]
pub struct AlignResult {
    /// Edit distance, or minus the LCS length.
    pub distance: i64,
    pub path: Option<Vec<Move>>,
    pub meter: MeterSnapshot,
    pub stats: AlignStats,
}

/// Align on a fresh meter; `trace` also recovers a path.
pub fn align(
    a: &[u8],
    b: &[u8],
    policy: Policy,
    tile: TileParams,
    params: CostParams,
    trace: bool,
) -> Result<AlignResult> {
    let meter = CostMeter::new(params);
    let (distance, path, stats) = align_metered(a, b, policy, tile, &meter, trace)?;
    Ok(AlignResult {
        distance,
        path,
        meter: meter.snapshot(),
        stats,
    })
}

/// Align, charging `meter`. The shorter string runs down the grid; a
/// recovered path is reported in the caller's orientation.
pub fn align_metered(
    a: &[u8],
    b: &[u8],
    policy: Policy,
    tile: TileParams,
    meter: &CostMeter,
    trace: bool,
) -> Result<(i64, Option<Vec<Move>>, AlignStats)> {
    TileParams::new(tile.h, tile.k)?;
    let swapped = a.len() > b.len();
    let (x, y) = if swapped { (b, a) } else { (a, b) };
    let mut run = engine::Run::new(x, y, policy, tile, meter, trace)?;
    let raw = run.solve()?;
    let path = if trace {
        let mut p = trace::traceback(&mut run, raw)?;
        if swapped {
            for mv in &mut p {
                *mv = match *mv {
                    Move::V => Move::H,
                    Move::H => Move::V,
                    Move::D => Move::D,
                };
            }
        }
        Some(p)
    } else {
        None
    };
    let stats = run.into_stats();
    Ok((decode(policy, x.len(), y.len(), raw), path, stats))
}

fn decode(policy: Policy, m: usize, n: usize, raw: Word) -> i64 {
    match policy {
        Policy::EditDistance => raw as i64,
        Policy::Lcs => -(((m + n) as i64 - raw as i64) / 2),
    }
}

/// Evaluate the `seg`-th superrow-one segment of the first rectangle on its
/// own, with reads only. Distances are in the shifted grid of [`Policy`].
pub fn probe_segment(
    a: &[u8],
    b: &[u8],
    policy: Policy,
    tile: TileParams,
    meter: &CostMeter,
    seg: usize,
) -> Result<EvalProbe> {
    TileParams::new(tile.h, tile.k)?;
    if a.len() > b.len() || seg >= tile.k {
        return Err(AramError::Argument("probe needs m <= n and seg < k".into()));
    }
    let mut run = engine::Run::new(a, b, policy, tile, meter, false)?;
    Ok(run.probe(seg))
}

/// Weight of a path under `policy`, or `None` if it is not a monotone
/// corner-to-corner path using only existing edges.
pub fn path_weight(a: &[u8], b: &[u8], policy: Policy, path: &[Move]) -> Option<i64> {
    let (mut i, mut j, mut w) = (0usize, 0usize, 0i64);
    for mv in path {
        match mv {
            Move::D => {
                let (ca, cb) = (*a.get(i)?, *b.get(j)?);
                w += match (policy, ca == cb) {
                    (Policy::EditDistance, eq) => i64::from(!eq),
                    (Policy::Lcs, true) => -1,
                    (Policy::Lcs, false) => return None,
                };
                i += 1;
                j += 1;
            }
            Move::V => {
                a.get(i)?;
                i += 1;
                w += i64::from(policy == Policy::EditDistance);
            }
            Move::H => {
                b.get(j)?;
                j += 1;
                w += i64::from(policy == Policy::EditDistance);
            }
        }
    }
    (i == a.len() && j == b.len()).then_some(w)
}

/// Unmetered quadratic DP (linear space) distance.
pub fn oracle_align(a: &[u8], b: &[u8], policy: Policy) -> i64 {
    let mut row: Vec<i64> = (0..=b.len()).map(|j| j as i64).collect();
    let mut lcs = vec![0i64; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        let mut diag_l = lcs[0];
        row[0] = i as i64 + 1;
        for (j, &cb) in b.iter().enumerate() {
            let (up, up_l) = (row[j + 1], lcs[j + 1]);
            row[j + 1] = (diag + i64::from(ca != cb)).min(up + 1).min(row[j] + 1);
            lcs[j + 1] = if ca == cb { diag_l + 1 } else { up_l.max(lcs[j]) };
            diag = up;
            diag_l = up_l;
        }
    }
    match policy {
        Policy::EditDistance => row[b.len()],
        Policy::Lcs => -lcs[b.len()],
    }
}

/// Unmetered full-table DP with backpointers: distance and one optimal path.
pub fn oracle_path(a: &[u8], b: &[u8], policy: Policy) -> (i64, Vec<Move>) {
    let (m, n) = (a.len(), b.len());
    let w = n + 1;
    // shifted weights as in the fast grid; INF marks an absent diagonal
    let mis = policy.mismatch();
    let mut d = vec![0 as Word; (m + 1) * w];
    for i in 0..=m {
        for j in 0..=n {
            d[i * w + j] = if i == 0 {
                j as Word
            } else if j == 0 {
                i as Word
            } else {
                let dc = if a[i - 1] == b[j - 1] { 0 } else { mis };
                crate::costmodel::sat_add(d[(i - 1) * w + j - 1], dc)
                    .min(d[(i - 1) * w + j] + 1)
                    .min(d[i * w + j - 1] + 1)
            };
        }
    }
    let mut path = vec![];
    let (mut i, mut j) = (m, n);
    while i > 0 || j > 0 {
        let here = d[i * w + j];
        if i > 0 && j > 0 {
            let dc = if a[i - 1] == b[j - 1] { 0 } else { mis };
            if crate::costmodel::sat_add(d[(i - 1) * w + j - 1], dc) == here {
                path.push(Move::D);
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && d[(i - 1) * w + j] + 1 == here {
            path.push(Move::V);
            i -= 1;
        } else {
            path.push(Move::H);
            j -= 1;
        }
    }
    path.reverse();
    (decode(policy, m, n, d[m * w + n]), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    /// Independent top-down recursion with memoisation.
    fn memo(a: &[u8], b: &[u8], policy: Policy) -> i64 {
        fn go(a: &[u8], b: &[u8], i: usize, j: usize, p: Policy, t: &mut HashMap<(usize, usize), i64>) -> i64 {
            if let Some(&v) = t.get(&(i, j)) {
                return v;
            }
            let v = match p {
                Policy::EditDistance if i == 0 => j as i64,
                Policy::EditDistance if j == 0 => i as i64,
                Policy::Lcs if i == 0 || j == 0 => 0,
                Policy::EditDistance => {
                    let sub = go(a, b, i - 1, j - 1, p, t) + i64::from(a[i - 1] != b[j - 1]);
                    sub.min(go(a, b, i - 1, j, p, t) + 1).min(go(a, b, i, j - 1, p, t) + 1)
                }
                Policy::Lcs => {
                    if a[i - 1] == b[j - 1] {
                        go(a, b, i - 1, j - 1, p, t) + 1
                    } else {
                        go(a, b, i - 1, j, p, t).max(go(a, b, i, j - 1, p, t))
                    }
                }
            };
            t.insert((i, j), v);
            v
        }
        let v = go(a, b, a.len(), b.len(), policy, &mut HashMap::new());
        if policy == Policy::Lcs {
            -v
        } else {
            v
        }
    }

    #[test]
    fn classics() {
        assert_eq!(oracle_align(b"kitten", b"sitting", Policy::EditDistance), 3);
        assert_eq!(oracle_align(b"ABCBDAB", b"BDCABA", Policy::Lcs), -4);
        assert_eq!(oracle_align(b"", b"abc", Policy::EditDistance), 3);
        assert_eq!(oracle_align(b"", b"", Policy::EditDistance), 0);
        assert_eq!(oracle_align(b"abc", b"abc", Policy::EditDistance), 0);
        let (d, p) = oracle_path(b"kitten", b"sitting", Policy::EditDistance);
        assert_eq!(d, 3);
        assert_eq!(path_weight(b"kitten", b"sitting", Policy::EditDistance, &p), Some(3));
    }

    #[test]
    fn oracles_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..30 {
            let la = rng.gen_range(0..60);
            let lb = rng.gen_range(0..60);
            let a: Vec<u8> = (0..la).map(|_| rng.gen_range(b'a'..b'e')).collect();
            let b: Vec<u8> = (0..lb).map(|_| rng.gen_range(b'a'..b'e')).collect();
            for p in [Policy::EditDistance, Policy::Lcs] {
                let d = oracle_align(&a, &b, p);
                assert_eq!(d, memo(&a, &b, p));
                let (d2, path) = oracle_path(&a, &b, p);
                assert_eq!(d2, d);
                assert_eq!(path_weight(&a, &b, p, &path), Some(d));
            }
        }
    }

    #[test]
    fn oracle_500() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<u8> = (0..500).map(|_| rng.gen_range(b'a'..b'e')).collect();
        let b: Vec<u8> = (0..500).map(|_| rng.gen_range(b'a'..b'e')).collect();
        for p in [Policy::EditDistance, Policy::Lcs] {
            assert_eq!(oracle_align(&a, &b, p), oracle_path(&a, &b, p).0);
        }
    }

    #[test]
    fn tile_choice() {
        let p = |m, w| CostParams::new(m, w).unwrap();
        assert_eq!(
            choose_tile(100_000, 100_000, p(64, 512), Objective::MinimizeWork),
            TileParams { h: 2, k: 2 }
        );
        assert_eq!(
            choose_tile(100_000, 100_000, p(64, 1), Objective::MinimizeWork),
            TileParams { h: 1, k: 1 }
        );
        assert_eq!(
            choose_tile(1_000_000, 1_000_000, p(100, 1_000_000), Objective::MinimizeQ),
            TileParams { h: 10, k: 10 }
        );
        assert_eq!(
            choose_tile(50, 100_000, p(64, 512), Objective::MinimizeQ),
            TileParams { h: 1, k: 1 }
        );
        // a short first string: one band, wider tiles
        let t = choose_tile(1000, 1_000_000, p(704, 1 << 20), Objective::MinimizeQ);
        assert_eq!(t.h, 1000usize.div_ceil(64));
        assert!(t.k >= t.h);
        assert!(TileParams::new(3, 2).is_err());
    }

    fn rand_str(rng: &mut ChaCha8Rng, len: usize, sigma: u8) -> Vec<u8> {
        (0..len).map(|_| b'a' + rng.gen_range(0..sigma)).collect()
    }

    fn check(a: &[u8], b: &[u8], tile: TileParams, m: usize, trace: bool) {
        let params = CostParams::new(m, 64).unwrap();
        for p in [Policy::EditDistance, Policy::Lcs] {
            let want = oracle_align(a, b, p);
            let r = align(a, b, p, tile, params, trace).unwrap();
            assert_eq!(r.distance, want, "{p:?} tile {tile} |a|={} |b|={}", a.len(), b.len());
            assert_eq!(r.stats.max_eval_writes, 0);
            assert_eq!(r.stats.segment_violations, 0);
            if let Some(path) = r.path {
                assert_eq!(path_weight(a, b, p, &path), Some(want), "{p:?} tile {tile}");
            }
        }
    }

    #[test]
    fn matches_oracle_across_tiles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = min_fast_memory();
        for (la, lb) in [(1, 1), (5, 300), (150, 170), (301, 257), (0, 40), (90, 90)] {
            for sigma in [2, 4] {
                let a = rand_str(&mut rng, la, sigma);
                let b = rand_str(&mut rng, lb, sigma);
                for (h, k) in [(1, 1), (1, 3), (2, 2), (3, 4), (4, 4)] {
                    check(&a, &b, TileParams { h, k }, m, false);
                }
            }
        }
    }

    #[test]
    fn traced_paths_are_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (la, lb) in [(3, 7), (120, 200), (260, 230), (64, 64)] {
            let a = rand_str(&mut rng, la, 3);
            let b = rand_str(&mut rng, lb, 3);
            for (h, k) in [(1, 1), (2, 2), (3, 5)] {
                check(&a, &b, TileParams { h, k }, 264, true);
            }
        }
        let r = align(
            b"kitten",
            b"sitting",
            Policy::EditDistance,
            TileParams { h: 1, k: 1 },
            CostParams::new(704, 8).unwrap(),
            true,
        )
        .unwrap();
        assert_eq!(r.distance, 3);
        assert_eq!(
            path_weight(b"kitten", b"sitting", Policy::EditDistance, &r.path.unwrap()),
            Some(3)
        );
    }

    #[test]
    fn probe_matches_direct_dp() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = rand_str(&mut rng, 100, 4);
        let b = rand_str(&mut rng, 130, 4);
        let meter = CostMeter::new(CostParams::new(264, 16).unwrap());
        let mp = m_prime(264);
        for seg in 0..3 {
            let p1 = probe_segment(&a, &b, Policy::EditDistance, TileParams { h: 3, k: 3 }, &meter, seg).unwrap();
            let p2 = probe_segment(&a, &b, Policy::EditDistance, TileParams { h: 3, k: 3 }, &meter, seg).unwrap();
            assert_eq!(p1, p2);
            assert_eq!(p1.writes, 0);
            assert_eq!((p1.l, p1.r), (seg * mp + 1, (seg + 1) * mp));
            for (x, &v) in p1.values.iter().enumerate() {
                let j = p1.l + x;
                assert_eq!(v as i64, oracle_align(&a[..mp], &b[..j], Policy::EditDistance));
            }
        }
    }

    #[test]
    fn small_fast_memory_is_rejected() {
        let p = CostParams::new(min_fast_memory() - 1, 4).unwrap();
        assert!(align(b"ab", b"abc", Policy::Lcs, TileParams { h: 1, k: 1 }, p, false).is_err());
    }

    #[test]
    fn minimum_fast_memory() {
        let m = min_fast_memory();
        assert!(10 * m_prime(m) + FAST_OVERHEAD <= m);
        assert!(m <= 264);
    }
}
