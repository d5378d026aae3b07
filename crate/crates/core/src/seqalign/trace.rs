//! Path recovery. Walks back from the sink one slab at a time: a sweep of the
//! slab finds where an optimal path enters it, then a divide-and-conquer on
//! columns recovers the moves inside the slab using four fast columns.

use std::mem;

use super::engine::{EvalBufs, Run};
use super::Move;
use crate::costmodel::{sat_add, SlowArray, Word, INF};
use crate::error::Result;

const MOVE_D: Word = 0;
const MOVE_V: Word = 1;
const MOVE_H: Word = 2;

struct Slab<'a, 'm> {
    run: &'a Run<'m>,
    /// Global row of slab row 0 and global column of local column 0.
    g_row: usize,
    g_col: usize,
}

impl Slab<'_, '_> {
    fn dc(&self, vch: &[Word], q: usize, col: usize) -> Word {
        let cb = self.run.b_char(self.g_col + col);
        if vch[q - 1] == cb {
            0
        } else {
            self.run.mis()
        }
    }

    /// Distances from `(q0, c0)` to column `cm`, rows `q0..=q1`, into `out`.
    fn forward(&self, ev: &mut EvalBufs, out: usize, src: (usize, usize), q1: usize, cm: usize) {
        let (q0, c0) = src;
        for q in q0..=q1 {
            ev.prev[q] = (q - q0) as Word;
        }
        for col in c0 + 1..=cm {
            ev.cur[q0] = sat_add(ev.prev[q0], 1);
            for q in q0 + 1..=q1 {
                let d = sat_add(ev.prev[q - 1], self.dc(&ev.vch, q, col));
                ev.cur[q] = d.min(sat_add(ev.cur[q - 1], 1)).min(sat_add(ev.prev[q], 1));
            }
            mem::swap(&mut ev.prev, &mut ev.cur);
        }
        self.run.meter.fast(5 * ((q1 - q0 + 1) * (cm - c0)) as u64);
        let (p, s) = (&ev.prev, &mut ev.seg[out]);
        s[q0..=q1].copy_from_slice(&p[q0..=q1]);
    }

    /// Distances from column `cm`, rows `q0..=q1`, to `(q1, c1)`, into `out`.
    fn backward(&self, ev: &mut EvalBufs, out: usize, q0: usize, sink: (usize, usize), cm: usize) {
        let (q1, c1) = sink;
        for q in q0..=q1 {
            ev.prev[q] = (q1 - q) as Word;
        }
        for col in (cm..c1).rev() {
            ev.cur[q1] = sat_add(ev.prev[q1], 1);
            for q in (q0..q1).rev() {
                let d = sat_add(ev.prev[q + 1], self.dc(&ev.vch, q + 1, col + 1));
                ev.cur[q] = d.min(sat_add(ev.cur[q + 1], 1)).min(sat_add(ev.prev[q], 1));
            }
            mem::swap(&mut ev.prev, &mut ev.cur);
        }
        self.run.meter.fast(5 * ((q1 - q0 + 1) * (c1 - cm)) as u64);
        let (p, s) = (&ev.prev, &mut ev.seg[out]);
        s[q0..=q1].copy_from_slice(&p[q0..=q1]);
    }

    /// Moves of an optimal path `(q0, c0) -> (q1, c1)` with `c1 <= c0 + 1`,
    /// pushed sink first.
    fn base(&self, ev: &mut EvalBufs, src: (usize, usize), sink: (usize, usize), moves: &mut SlowArray<'_>) {
        let ((q0, c0), (q1, c1)) = (src, sink);
        let mut q = q1;
        if c1 > c0 {
            for r in q0..=q1 {
                ev.prev[r] = (r - q0) as Word;
            }
            ev.cur[q0] = ev.prev[q0] + 1;
            for r in q0 + 1..=q1 {
                let d = sat_add(ev.prev[r - 1], self.dc(&ev.vch, r, c1));
                ev.cur[r] = d.min(ev.cur[r - 1] + 1).min(ev.prev[r] + 1);
            }
            self.run.meter.fast(5 * (q1 - q0 + 1) as u64);
            loop {
                if q > q0 && sat_add(ev.prev[q - 1], self.dc(&ev.vch, q, c1)) == ev.cur[q] {
                    moves.push(MOVE_D);
                    q -= 1;
                    break;
                }
                if q > q0 && ev.cur[q - 1] + 1 == ev.cur[q] {
                    moves.push(MOVE_V);
                    q -= 1;
                    continue;
                }
                debug_assert_eq!(ev.prev[q] + 1, ev.cur[q]);
                moves.push(MOVE_H);
                break;
            }
        }
        for _ in q0..q {
            moves.push(MOVE_V);
        }
    }

    /// Moves of an optimal path from `src` to `sink` inside the slab.
    fn recover(&self, ev: &mut EvalBufs, src: (usize, usize), sink: (usize, usize), moves: &mut SlowArray<'_>) {
        let meter = self.run.meter;
        let mut stack = SlowArray::with_capacity(meter, 64);
        let mut depth = 0usize;
        let push = |stack: &mut SlowArray<'_>, depth: &mut usize, t: [usize; 4]| {
            for (x, &v) in t.iter().enumerate() {
                let idx = 4 * *depth + x;
                if idx < stack.len() {
                    stack.write(idx, v as Word);
                } else {
                    stack.push(v as Word);
                }
            }
            *depth += 1;
        };
        push(&mut stack, &mut depth, [src.0, src.1, sink.0, sink.1]);
        while depth > 0 {
            depth -= 1;
            let t: Vec<usize> = (0..4).map(|x| stack.read(4 * depth + x) as usize).collect();
            let (q0, c0, q1, c1) = (t[0], t[1], t[2], t[3]);
            if c1 <= c0 + 1 {
                self.base(ev, (q0, c0), (q1, c1), moves);
                continue;
            }
            let cm = (c0 + c1) / 2;
            self.forward(ev, 0, (q0, c0), q1, cm);
            self.backward(ev, 1, q0, (q1, c1), cm);
            let mut best = (INF, q0);
            for q in q0..=q1 {
                let v = sat_add(ev.seg[0][q], ev.seg[1][q]);
                if v < best.0 {
                    best = (v, q);
                }
            }
            let qm = best.1;
            // the right half is popped, and so emitted, first
            push(&mut stack, &mut depth, [q0, c0, qm, cm]);
            push(&mut stack, &mut depth, [qm, cm, q1, c1]);
        }
    }
}

/// One optimal path from `(0, 0)` to `(m, n)`, in forward order.
pub(crate) fn traceback(run: &mut Run<'_>, raw: Word) -> Result<Vec<Move>> {
    let meter = run.meter;
    let mut moves = SlowArray::with_capacity(meter, run.m + run.n);
    let (mut gi, mut gj) = (run.m, run.n);
    let mut built: Option<(usize, usize)> = None;
    debug_assert_ne!(raw, INF);
    while gi > 0 && gj > 0 {
        let (ri, ci) = ((gi - 1) / run.rr, (gj - 1) / run.cc);
        if built != Some((ri, ci)) {
            if run.h > 1 {
                run.build_rect(ri, ci, false);
            }
            run.rect = (ri, ci);
            built = Some((ri, ci));
        }
        let r = gi - ri * run.rr;
        let c = gj - ci * run.cc;
        let s = (r - 1) / run.mp;
        let q = r - s * run.mp;
        let src = match run.entry_sweep(s, q, c) {
            Ok(c0) => (0, c0),
            Err(q0) => (q0, 0),
        };
        let mut ev = mem::replace(
            &mut run.ev,
            EvalBufs {
                prev: vec![],
                cur: vec![],
                seg: [vec![], vec![]],
                vch: vec![],
            },
        );
        run.load_slab_chars(s, &mut ev.vch);
        let slab = Slab {
            run: &*run,
            g_row: ri * run.rr + s * run.mp,
            g_col: ci * run.cc,
        };
        slab.recover(&mut ev, src, (q, c), &mut moves);
        let (ng, nc) = (slab.g_row + src.0, slab.g_col + src.1);
        run.ev = ev;
        (gi, gj) = (ng, nc);
    }
    for _ in 0..gi {
        moves.push(MOVE_V);
    }
    for _ in 0..gj {
        moves.push(MOVE_H);
    }
    let len = moves.len();
    Ok((0..len)
        .rev()
        .map(|i| match moves.read(i) {
            MOVE_D => Move::D,
            MOVE_V => Move::V,
            _ => Move::H,
        })
        .collect())
}
