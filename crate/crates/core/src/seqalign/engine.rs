//! Rectangle-by-rectangle sketch building and sketch evaluation.
//!
//! Coordinates inside a rectangle are local: row 0 and column 0 are the input
//! nodes (outputs of the rectangles above and to the left, or the global
//! boundary), rows `1..=hM'` and columns `1..=kM'` are the rectangle's own
//! nodes. Slab `s` spans rows `sM'..=(s+1)M'`; its top row is superrow `s`
//! (the input row when `s = 0`).
//!
//! Segment ids: superrow 1 always has exactly `k` segments of `M'` nodes, so
//! ids `0..k` are implicit. Later segments are stored as two-word records
//! `[l << 32 | r, origin]`, with id `k + index`; `origin` is `1 + id` of the
//! segment in the previous superrow that the sketch extends, or 0 when the
//! sketch starts at this superrow from the left boundary.

use std::mem;

use super::{m_prime, Policy, TileParams, FAST_OVERHEAD};
use crate::costmodel::{sat_add, CostMeter, FastGrant, SlowArray, Word, INF};
use crate::error::{AramError, Result};

const PAD_A: Word = 256;
const PAD_B: Word = 257;
/// Fast-memory charge per grid node computed in a column step.
const OPS_PER_NODE: u64 = 5;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlignStats {
    pub m_prime: usize,
    pub rectangles: u64,
    pub evaluations: u64,
    /// Largest number of slow writes observed during a single evaluation.
    pub max_eval_writes: u64,
    /// (rectangle, superrow) pairs whose segment count was checked.
    pub superrows_checked: u64,
    /// Superrows holding more than `i * k` segments.
    pub segment_violations: u64,
    /// Largest `segments / (i * k)` seen.
    pub max_segment_ratio: f64,
    pub records_written: u64,
}

/// One evaluation of a superrow-one segment of the first rectangle, for
/// checking evaluation against a direct DP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalProbe {
    pub l: usize,
    pub r: usize,
    pub values: Vec<Word>,
    pub reads: u64,
    pub writes: u64,
}

pub(crate) struct EvalBufs {
    pub(crate) prev: Vec<Word>,
    pub(crate) cur: Vec<Word>,
    pub(crate) seg: [Vec<Word>; 2],
    pub(crate) vch: Vec<Word>,
}

pub(crate) struct BuildBufs {
    vch: Vec<Word>,
    pd: Vec<Word>,
    po: Vec<Word>,
    cd: Vec<Word>,
    co: Vec<Word>,
}

pub(crate) struct Run<'m> {
    pub(crate) meter: &'m CostMeter,
    a: SlowArray<'m>,
    b: SlowArray<'m>,
    pub(crate) m: usize,
    pub(crate) n: usize,
    mis: Word,
    pub(crate) mp: usize,
    pub(crate) h: usize,
    pub(crate) k: usize,
    pub(crate) rr: usize,
    pub(crate) cc: usize,
    pub(crate) ri: usize,
    pub(crate) ci: usize,
    rows: usize,
    cols: usize,
    keep_all: bool,
    hb: SlowArray<'m>,
    vb: SlowArray<'m>,
    rec: SlowArray<'m>,
    nrec: usize,
    /// First segment id of each superrow, kept only when tracing.
    sr_start: SlowArray<'m>,
    pub(crate) rect: (usize, usize),
    pub(crate) ev: EvalBufs,
    bd: BuildBufs,
    _grants: [FastGrant<'m>; 3],
    stats: AlignStats,
    answer: Word,
}

#[inline]
fn dcost(ca: Word, cb: Word, mis: Word) -> Word {
    if ca == cb {
        0
    } else {
        mis
    }
}

/// One column of the grid DP: `cur[0] = top`, the rest from `prev`.
#[inline]
pub(crate) fn step(prev: &[Word], cur: &mut [Word], top: Word, vch: &[Word], cb: Word, mis: Word) {
    cur[0] = top;
    for r in 1..cur.len() {
        let d = sat_add(prev[r - 1], dcost(vch[r - 1], cb, mis));
        let v = sat_add(cur[r - 1], 1);
        let h = sat_add(prev[r], 1);
        cur[r] = d.min(v).min(h);
    }
}

impl<'m> Run<'m> {
    pub fn new(
        a: &[u8],
        b: &[u8],
        policy: Policy,
        tile: TileParams,
        meter: &'m CostMeter,
        keep_all: bool,
    ) -> Result<Self> {
        let params = meter.params();
        let mp = m_prime(params.m);
        if mp == 0 || 10 * mp + FAST_OVERHEAD > params.m {
            return Err(AramError::Config(format!(
                "alignment needs M >= {} fast words, got M = {}",
                super::min_fast_memory(),
                params.m
            )));
        }
        let (h, k) = (tile.h, tile.k);
        let (m, n) = (a.len(), b.len());
        let (rr, cc) = (h * mp, k * mp);
        let ri = m.div_ceil(rr).max(1);
        let ci = n.div_ceil(cc).max(1);
        let (rows, cols) = (ri * rr, ci * cc);
        let eval_words = 4 * (mp + 1) + mp;
        let build_words = mp + 4 * (mp + 1);
        let grants = [
            meter.alloc_fast("seqalign::evaluate", eval_words)?,
            meter.alloc_fast("seqalign::build", build_words)?,
            meter.alloc_fast("seqalign::registers", FAST_OVERHEAD - 8)?,
        ];
        let to_words = |s: &[u8]| s.iter().map(|&c| c as Word).collect::<Vec<_>>();
        let hslots = if keep_all { ri } else { 2 };
        let vslots = if keep_all { ci } else { 2 };
        Ok(Run {
            meter,
            a: SlowArray::from_setup(meter, to_words(a)),
            b: SlowArray::from_setup(meter, to_words(b)),
            m,
            n,
            mis: policy.mismatch(),
            mp,
            h,
            k,
            rr,
            cc,
            ri,
            ci,
            rows,
            cols,
            keep_all,
            hb: SlowArray::uninit(meter, hslots * (cols + 1)),
            vb: SlowArray::uninit(meter, vslots * (rows + 1)),
            rec: SlowArray::uninit(meter, 2 * (h * h * k + k)),
            nrec: 0,
            sr_start: SlowArray::uninit(meter, h + 2),
            rect: (0, 0),
            ev: EvalBufs {
                prev: vec![INF; mp + 1],
                cur: vec![INF; mp + 1],
                seg: [vec![INF; mp + 1], vec![INF; mp + 1]],
                vch: vec![0; mp],
            },
            bd: BuildBufs {
                vch: vec![0; mp],
                pd: vec![INF; mp + 1],
                po: vec![0; mp + 1],
                cd: vec![INF; mp + 1],
                co: vec![0; mp + 1],
            },
            _grants: grants,
            stats: AlignStats {
                m_prime: mp,
                ..AlignStats::default()
            },
            answer: INF,
        })
    }

    pub fn into_stats(self) -> AlignStats {
        self.stats
    }

    pub(crate) fn mis(&self) -> Word {
        self.mis
    }

    /// Character of the first string used by edges into global row `gi`.
    pub(crate) fn a_char(&self, gi: usize) -> Word {
        if gi <= self.m {
            self.a.read(gi - 1)
        } else {
            PAD_A
        }
    }

    pub(crate) fn b_char(&self, gj: usize) -> Word {
        if gj <= self.n {
            self.b.read(gj - 1)
        } else {
            PAD_B
        }
    }

    fn hslot(&self, i: usize) -> usize {
        if self.keep_all {
            i
        } else {
            i % 2
        }
    }

    fn vslot(&self, j: usize) -> usize {
        if self.keep_all {
            j
        } else {
            j % 2
        }
    }

    /// Top input of the current rectangle at local column `c`.
    pub(crate) fn top(&self, c: usize) -> Word {
        let (i, j) = self.rect;
        let (gi, gj) = (i * self.rr, j * self.cc + c);
        if gi == 0 {
            gj as Word
        } else if gj == 0 {
            gi as Word
        } else {
            self.hb.read(self.hslot(i) * (self.cols + 1) + gj)
        }
    }

    /// Left input of the current rectangle at local row `r`.
    pub(crate) fn left(&self, r: usize) -> Word {
        let (i, j) = self.rect;
        let (gi, gj) = (i * self.rr + r, j * self.cc);
        if r == 0 {
            self.top(0)
        } else if gj == 0 {
            gi as Word
        } else {
            self.vb.read(self.vslot(j) * (self.rows + 1) + gi)
        }
    }

    fn write_bottom(&mut self, c: usize, v: Word) {
        let (i, j) = self.rect;
        if i + 1 < self.ri {
            let idx = self.hslot(i + 1) * (self.cols + 1) + j * self.cc + c;
            self.hb.write(idx, v);
        }
    }

    fn write_right(&mut self, r: usize, v: Word) {
        let (i, j) = self.rect;
        if j + 1 < self.ci {
            let idx = self.vslot(j + 1) * (self.rows + 1) + i * self.rr + r;
            self.vb.write(idx, v);
        }
    }

    /// Load the first-string characters of slab `s` into `buf`.
    pub(crate) fn load_slab_chars(&self, s: usize, buf: &mut [Word]) {
        let base = self.rect.0 * self.rr + s * self.mp;
        for (q, slot) in buf.iter_mut().enumerate() {
            *slot = self.a_char(base + q + 1);
        }
        self.meter.fast(buf.len() as u64);
    }

    pub(crate) fn prev_of(&self, id: usize) -> Option<usize> {
        if id < self.k {
            return None;
        }
        let o = self.rec.read(2 * (id - self.k) + 1);
        (o != 0).then(|| o as usize - 1)
    }

    pub(crate) fn bounds(&self, id: usize) -> (usize, usize) {
        if id < self.k {
            return (id * self.mp + 1, (id + 1) * self.mp);
        }
        let w = self.rec.read(2 * (id - self.k));
        ((w >> 32) as usize, (w & 0xffff_ffff) as usize)
    }

    /// Ids `[start, end)` of the segments of superrow `s` in the current
    /// rectangle (tracing runs only).
    pub(crate) fn superrow_ids(&self, s: usize) -> (usize, usize) {
        if s == 1 {
            return (0, self.k);
        }
        (self.sr_start.read(s) as usize, self.sr_start.read(s + 1) as usize)
    }

    /// Distances to the nodes of segment `id` in superrow `i`, left in
    /// `self.ev.seg[returned index]`. Reads only.
    pub(crate) fn evaluate(&mut self, i: usize, id: usize) -> (usize, usize, usize) {
        let writes_before = self.meter.slow_writes();
        let mp = self.mp;
        let mis = self.mis;
        let mut len = 1;
        let mut x = id;
        while let Some(p) = self.prev_of(x) {
            len += 1;
            x = p;
        }
        let s0 = i + 1 - len;
        let mut ev = mem::replace(
            &mut self.ev,
            EvalBufs {
                prev: vec![],
                cur: vec![],
                seg: [vec![], vec![]],
                vch: vec![],
            },
        );
        let mut dst = 0;
        let mut prev_lr = (0, 0);
        for t in s0..=i {
            let mut idt = id;
            for _ in 0..(i - t) {
                idt = self.prev_of(idt).expect("sketch chain shorter than measured");
            }
            let (l, r) = self.bounds(idt);
            let slab = t - 1;
            self.load_slab_chars(slab, &mut ev.vch);
            let start = if t == s0 {
                for q in 0..=mp {
                    ev.prev[q] = self.left(slab * mp + q);
                }
                1
            } else {
                ev.prev.fill(INF);
                prev_lr.0
            };
            let (src_seg, dst_seg) = {
                let [s0b, s1b] = &mut ev.seg;
                if dst == 0 {
                    (&*s1b, s0b)
                } else {
                    (&*s0b, s1b)
                }
            };
            for c in start..=r {
                let top = if t == s0 {
                    if t == 1 {
                        self.top(c)
                    } else {
                        INF
                    }
                } else if c <= prev_lr.1 {
                    src_seg[c - prev_lr.0]
                } else {
                    INF
                };
                let cb = self.b_char(self.rect.1 * self.cc + c);
                step(&ev.prev, &mut ev.cur, top, &ev.vch, cb, mis);
                if c >= l {
                    dst_seg[c - l] = ev.cur[mp];
                }
                mem::swap(&mut ev.prev, &mut ev.cur);
            }
            self.meter.fast(OPS_PER_NODE * mp as u64 * (r + 1 - start) as u64);
            prev_lr = (l, r);
            dst = 1 - dst;
        }
        self.ev = ev;
        self.stats.evaluations += 1;
        let delta = self.meter.slow_writes() - writes_before;
        self.stats.max_eval_writes = self.stats.max_eval_writes.max(delta);
        (prev_lr.0, prev_lr.1, 1 - dst)
    }

    fn push_record(&mut self, l: usize, r: usize, origin: Word) {
        let idx = 2 * self.nrec;
        self.rec.write(idx, ((l as Word) << 32) | r as Word);
        self.rec.write(idx + 1, origin);
        self.nrec += 1;
        self.stats.records_written += 1;
    }

    fn capture(&mut self, s: usize, c: usize, col: &[Word]) {
        let (i, j) = self.rect;
        if j * self.cc + c != self.n {
            return;
        }
        let base = i * self.rr + s * self.mp;
        if self.m > base && self.m <= base + self.mp {
            self.answer = col[self.m - base];
        }
    }

    /// Build all sketches of rectangle `(i, j)`, writing its outputs when
    /// `outputs` is set.
    pub(crate) fn build_rect(&mut self, i: usize, j: usize, outputs: bool) {
        self.rect = (i, j);
        self.nrec = 0;
        let (mp, k, h, cc) = (self.mp, self.k, self.h, self.cc);
        let mis = self.mis;
        let mut bd = mem::replace(
            &mut self.bd,
            BuildBufs {
                vch: vec![],
                pd: vec![],
                po: vec![],
                cd: vec![],
                co: vec![],
            },
        );

        // slab 0: plain sweep from the inputs; superrow 1 is cut into k
        // fixed segments, so no origins are needed
        self.load_slab_chars(0, &mut bd.vch);
        for q in 0..=mp {
            bd.pd[q] = self.left(q);
        }
        for c in 1..=cc {
            let top = self.top(c);
            let cb = self.b_char(j * cc + c);
            step(&bd.pd, &mut bd.cd, top, &bd.vch, cb, mis);
            if outputs {
                if c == cc {
                    for r in 1..=mp {
                        self.write_right(r, bd.cd[r]);
                    }
                }
                if h == 1 {
                    self.write_bottom(c, bd.cd[mp]);
                }
            }
            self.capture(0, c, &bd.cd);
            mem::swap(&mut bd.pd, &mut bd.cd);
        }
        self.meter.fast(OPS_PER_NODE * (mp * cc) as u64);
        if self.keep_all {
            self.sr_start.write(2, k as Word);
        }

        let mut sr_first = 0;
        for s in 1..h {
            let builds_next = s + 1 < h;
            let first_new = k + self.nrec;
            self.load_slab_chars(s, &mut bd.vch);
            for q in 0..=mp {
                bd.pd[q] = self.left(s * mp + q);
                bd.po[q] = 0;
            }
            let mut next_id = sr_first;
            let (mut seg_l, mut seg_r, mut buf) = (1, 0, 0);
            let (mut cut_l, mut cut_o) = (1, 0);
            let mut made = 0u64;
            for c in 1..=cc {
                if c > seg_r {
                    let (l, r, b) = self.evaluate(s, next_id);
                    debug_assert_eq!(l, c);
                    (seg_l, seg_r, buf) = (l, r, b);
                    next_id += 1;
                }
                let top = self.ev.seg[buf][c - seg_l];
                let top_o = next_id as Word; // 1 + id of the segment just evaluated
                let cb = self.b_char(j * cc + c);
                bd.cd[0] = top;
                bd.co[0] = top_o;
                for r in 1..=mp {
                    let mut best = (sat_add(bd.pd[r - 1], dcost(bd.vch[r - 1], cb, mis)), bd.po[r - 1]);
                    let v = (sat_add(bd.cd[r - 1], 1), bd.co[r - 1]);
                    if v < best {
                        best = v;
                    }
                    let hz = (sat_add(bd.pd[r], 1), bd.po[r]);
                    if hz < best {
                        best = hz;
                    }
                    bd.cd[r] = best.0;
                    bd.co[r] = best.1;
                }
                if builds_next {
                    let o = bd.co[mp];
                    if c == 1 {
                        (cut_l, cut_o) = (1, o);
                    } else if o != cut_o || c - cut_l == mp {
                        self.push_record(cut_l, c - 1, cut_o);
                        made += 1;
                        (cut_l, cut_o) = (c, o);
                    }
                    if c == cc {
                        self.push_record(cut_l, cc, cut_o);
                        made += 1;
                    }
                }
                if outputs {
                    if c == cc {
                        for r in 1..=mp {
                            self.write_right(s * mp + r, bd.cd[r]);
                        }
                    }
                    if !builds_next {
                        self.write_bottom(c, bd.cd[mp]);
                    }
                }
                self.capture(s, c, &bd.cd);
                mem::swap(&mut bd.pd, &mut bd.cd);
                mem::swap(&mut bd.po, &mut bd.co);
            }
            self.meter.fast((OPS_PER_NODE + 2) * (mp * cc) as u64);
            if builds_next {
                let bound = ((s + 1) * k) as u64;
                self.stats.superrows_checked += 1;
                if made > bound {
                    self.stats.segment_violations += 1;
                }
                self.stats.max_segment_ratio = self.stats.max_segment_ratio.max(made as f64 / bound as f64);
                if self.keep_all {
                    self.sr_start.write(s + 2, (k + self.nrec) as Word);
                }
            }
            sr_first = first_new;
        }
        self.bd = bd;
    }

    pub(crate) fn solve(&mut self) -> Result<Word> {
        if self.m == 0 {
            return Ok(self.n as Word);
        }
        for i in 0..self.ri {
            for j in 0..self.ci {
                self.build_rect(i, j, true);
                self.stats.rectangles += 1;
            }
        }
        debug_assert_ne!(self.answer, INF);
        Ok(self.answer)
    }

    /// Sweep slab `s` of the current rectangle from its inputs up to local
    /// column `c` and report where a shortest path to slab row `q`, column `c`
    /// enters the slab: `Ok(c')` for the top row at column `c' >= 1`, `Err(q')`
    /// for the left column at slab row `q'`. Superrow `s >= 1` values come from
    /// its sketches, so the rectangle's records must be current.
    pub(crate) fn entry_sweep(&mut self, s: usize, q: usize, c: usize) -> std::result::Result<usize, usize> {
        let (mp, cc, mis) = (self.mp, self.cc, self.mis);
        let left_code = |q: usize| (cc + 1 + q) as Word;
        let mut bd = mem::replace(
            &mut self.bd,
            BuildBufs {
                vch: vec![],
                pd: vec![],
                po: vec![],
                cd: vec![],
                co: vec![],
            },
        );
        self.load_slab_chars(s, &mut bd.vch);
        for r in 0..=mp {
            bd.pd[r] = self.left(s * mp + r);
            bd.po[r] = left_code(r);
        }
        let mut next_id = if s >= 1 { self.superrow_ids(s).0 } else { 0 };
        let (mut seg_l, mut seg_r, mut buf) = (1, 0, 0);
        for col in 1..=c {
            let top = if s == 0 {
                self.top(col)
            } else {
                if col > seg_r {
                    (seg_l, seg_r, buf) = self.evaluate(s, next_id);
                    next_id += 1;
                }
                self.ev.seg[buf][col - seg_l]
            };
            let cb = self.b_char(self.rect.1 * cc + col);
            bd.cd[0] = top;
            bd.co[0] = col as Word;
            for r in 1..=mp {
                let mut best = (sat_add(bd.pd[r - 1], dcost(bd.vch[r - 1], cb, mis)), bd.po[r - 1]);
                let v = sat_add(bd.cd[r - 1], 1);
                if v < best.0 {
                    best = (v, bd.co[r - 1]);
                }
                let hz = sat_add(bd.pd[r], 1);
                if hz < best.0 {
                    best = (hz, bd.po[r]);
                }
                bd.cd[r] = best.0;
                bd.co[r] = best.1;
            }
            mem::swap(&mut bd.pd, &mut bd.cd);
            mem::swap(&mut bd.po, &mut bd.co);
        }
        self.meter.fast((OPS_PER_NODE + 2) * (mp * c) as u64);
        let e = bd.po[q] as usize;
        self.bd = bd;
        if e <= cc {
            Ok(e)
        } else {
            Err(e - cc - 1)
        }
    }

    /// Evaluate superrow-one segment `seg` of the first rectangle in isolation.
    pub(crate) fn probe(&mut self, seg: usize) -> EvalProbe {
        self.rect = (0, 0);
        let (r0, w0) = (self.meter.slow_reads(), self.meter.slow_writes());
        let (l, r, b) = self.evaluate(1, seg);
        EvalProbe {
            l,
            r,
            values: self.ev.seg[b][..=r - l].to_vec(),
            reads: self.meter.slow_reads() - r0,
            writes: self.meter.slow_writes() - w0,
        }
    }
}
