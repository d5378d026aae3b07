//! Red-black tree priority queue resident in slow memory.
//!
//! Searching only reads; rebalancing after an insert or a delete-min touches
//! an amortized constant number of nodes, and colour writes are skipped when
//! the colour is unchanged, so the amortized slow writes per update are O(1).

use crate::costmodel::{CostMeter, SlowArray, Word, INF};
use crate::error::{AramError, Result};

const KEY: usize = 0;
const PAY: usize = 1;
const LEFT: usize = 2;
const RIGHT: usize = 3;
const PARENT: usize = 4;
const COLOR: usize = 5;
pub const NODE_WORDS: usize = 6;
/// Amortized slow writes per insert or delete-min, node creation included.
pub const WRITES_PER_UPDATE: u64 = 12;

const NIL: usize = usize::MAX;
const RED: Word = 0;
const BLACK: Word = 1;

pub struct RbQueue<'m> {
    nodes: SlowArray<'m>,
    root: usize,
    len: usize,
    free: usize,
}

#[inline]
fn w(x: usize) -> Word {
    if x == NIL {
        INF
    } else {
        x as Word
    }
}

#[inline]
fn p(x: Word) -> usize {
    if x == INF {
        NIL
    } else {
        x as usize
    }
}

impl<'m> RbQueue<'m> {
    pub fn new(meter: &'m CostMeter) -> Self {
        RbQueue {
            nodes: SlowArray::with_capacity(meter, 0),
            root: NIL,
            len: 0,
            free: NIL,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn get(&self, x: usize, f: usize) -> Word {
        self.nodes.read(x * NODE_WORDS + f)
    }

    #[inline]
    fn set(&mut self, x: usize, f: usize, v: Word) {
        // a read is cheaper than a write; skip writes that change nothing
        if self.nodes.read(x * NODE_WORDS + f) != v {
            self.nodes.write(x * NODE_WORDS + f, v)
        }
    }

    #[inline]
    fn left(&self, x: usize) -> usize {
        p(self.get(x, LEFT))
    }

    #[inline]
    fn right(&self, x: usize) -> usize {
        p(self.get(x, RIGHT))
    }

    #[inline]
    fn parent(&self, x: usize) -> usize {
        p(self.get(x, PARENT))
    }

    #[inline]
    fn color(&self, x: usize) -> Word {
        if x == NIL {
            BLACK
        } else {
            self.get(x, COLOR)
        }
    }

    fn set_color(&mut self, x: usize, c: Word) {
        self.set(x, COLOR, c);
    }

    fn alloc(&mut self, key: Word, pay: Word, parent: usize) -> usize {
        let fields = [key, pay, INF, INF, w(parent), RED];
        if self.free != NIL {
            let x = self.free;
            self.free = self.left(x);
            for (f, v) in fields.into_iter().enumerate() {
                self.set(x, f, v);
            }
            x
        } else {
            for v in fields {
                self.nodes.push(v);
            }
            self.nodes.len() / NODE_WORDS - 1
        }
    }

    pub fn insert(&mut self, key: Word, pay: Word) {
        let mut y = NIL;
        let mut x = self.root;
        let mut go_left = false;
        while x != NIL {
            y = x;
            go_left = (key, pay) < (self.get(x, KEY), self.get(x, PAY));
            x = if go_left { self.left(x) } else { self.right(x) };
        }
        let z = self.alloc(key, pay, y);
        if y == NIL {
            self.root = z;
        } else if go_left {
            self.set(y, LEFT, w(z));
        } else {
            self.set(y, RIGHT, w(z));
        }
        self.len += 1;
        self.insert_fixup(z);
    }

    fn rotate_left(&mut self, x: usize) {
        let y = self.right(x);
        let yl = self.left(y);
        self.set(x, RIGHT, w(yl));
        if yl != NIL {
            self.set(yl, PARENT, w(x));
        }
        let xp = self.parent(x);
        self.set(y, PARENT, w(xp));
        if xp == NIL {
            self.root = y;
        } else if self.left(xp) == x {
            self.set(xp, LEFT, w(y));
        } else {
            self.set(xp, RIGHT, w(y));
        }
        self.set(y, LEFT, w(x));
        self.set(x, PARENT, w(y));
    }

    fn rotate_right(&mut self, x: usize) {
        let y = self.left(x);
        let yr = self.right(y);
        self.set(x, LEFT, w(yr));
        if yr != NIL {
            self.set(yr, PARENT, w(x));
        }
        let xp = self.parent(x);
        self.set(y, PARENT, w(xp));
        if xp == NIL {
            self.root = y;
        } else if self.right(xp) == x {
            self.set(xp, RIGHT, w(y));
        } else {
            self.set(xp, LEFT, w(y));
        }
        self.set(y, RIGHT, w(x));
        self.set(x, PARENT, w(y));
    }

    fn insert_fixup(&mut self, mut z: usize) {
        while z != self.root && self.color(self.parent(z)) == RED {
            let zp = self.parent(z);
            let g = self.parent(zp);
            if zp == self.left(g) {
                let u = self.right(g);
                if self.color(u) == RED {
                    self.set_color(zp, BLACK);
                    self.set_color(u, BLACK);
                    self.set_color(g, RED);
                    z = g;
                } else {
                    if z == self.right(zp) {
                        z = zp;
                        self.rotate_left(z);
                    }
                    let zp = self.parent(z);
                    let g = self.parent(zp);
                    self.set_color(zp, BLACK);
                    self.set_color(g, RED);
                    self.rotate_right(g);
                }
            } else {
                let u = self.left(g);
                if self.color(u) == RED {
                    self.set_color(zp, BLACK);
                    self.set_color(u, BLACK);
                    self.set_color(g, RED);
                    z = g;
                } else {
                    if z == self.left(zp) {
                        z = zp;
                        self.rotate_right(z);
                    }
                    let zp = self.parent(z);
                    let g = self.parent(zp);
                    self.set_color(zp, BLACK);
                    self.set_color(g, RED);
                    self.rotate_left(g);
                }
            }
        }
        let r = self.root;
        self.set_color(r, BLACK);
    }

    fn leftmost(&self, mut x: usize) -> usize {
        loop {
            let l = self.left(x);
            if l == NIL {
                return x;
            }
            x = l;
        }
    }

    pub fn peek_min(&self) -> Option<(Word, Word)> {
        if self.root == NIL {
            return None;
        }
        let z = self.leftmost(self.root);
        Some((self.get(z, KEY), self.get(z, PAY)))
    }

    pub fn delete_min(&mut self) -> Result<(Word, Word)> {
        if self.root == NIL {
            return Err(AramError::EmptyHeap);
        }
        let z = self.leftmost(self.root);
        let out = (self.get(z, KEY), self.get(z, PAY));
        let x = self.right(z);
        let xp = self.parent(z);
        // transplant z -> x; z has no left child
        if xp == NIL {
            self.root = x;
        } else {
            self.set(xp, LEFT, w(x));
        }
        if x != NIL {
            self.set(x, PARENT, w(xp));
        }
        if self.get(z, COLOR) == BLACK {
            self.delete_fixup(x, xp);
        }
        self.set(z, LEFT, w(self.free));
        self.free = z;
        self.len -= 1;
        Ok(out)
    }

    fn delete_fixup(&mut self, mut x: usize, mut xp: usize) {
        while x != self.root && self.color(x) == BLACK {
            if x == self.left(xp) {
                let mut s = self.right(xp);
                if self.color(s) == RED {
                    self.set_color(s, BLACK);
                    self.set_color(xp, RED);
                    self.rotate_left(xp);
                    s = self.right(xp);
                }
                if self.color(self.left(s)) == BLACK && self.color(self.right(s)) == BLACK {
                    self.set_color(s, RED);
                    x = xp;
                    xp = self.parent(x);
                } else {
                    if self.color(self.right(s)) == BLACK {
                        let sl = self.left(s);
                        self.set_color(sl, BLACK);
                        self.set_color(s, RED);
                        self.rotate_right(s);
                        s = self.right(xp);
                    }
                    let c = self.color(xp);
                    self.set_color(s, c);
                    self.set_color(xp, BLACK);
                    let sr = self.right(s);
                    self.set_color(sr, BLACK);
                    self.rotate_left(xp);
                    x = self.root;
                    xp = NIL;
                }
            } else {
                let mut s = self.left(xp);
                if self.color(s) == RED {
                    self.set_color(s, BLACK);
                    self.set_color(xp, RED);
                    self.rotate_right(xp);
                    s = self.left(xp);
                }
                if self.color(self.left(s)) == BLACK && self.color(self.right(s)) == BLACK {
                    self.set_color(s, RED);
                    x = xp;
                    xp = self.parent(x);
                } else {
                    if self.color(self.left(s)) == BLACK {
                        let sr = self.right(s);
                        self.set_color(sr, BLACK);
                        self.set_color(s, RED);
                        self.rotate_left(s);
                        s = self.left(xp);
                    }
                    let c = self.color(xp);
                    self.set_color(s, c);
                    self.set_color(xp, BLACK);
                    let sl = self.left(s);
                    self.set_color(sl, BLACK);
                    self.rotate_right(xp);
                    x = self.root;
                    xp = NIL;
                }
            }
        }
        if x != NIL {
            self.set_color(x, BLACK);
        }
    }

    /// In-order traversal using parent links: reads only.
    pub fn for_each_in_order(&self, mut f: impl FnMut(Word, Word)) {
        if self.root == NIL {
            return;
        }
        let mut x = self.leftmost(self.root);
        loop {
            f(self.get(x, KEY), self.get(x, PAY));
            let r = self.right(x);
            if r != NIL {
                x = self.leftmost(r);
                continue;
            }
            // climb until we come up from a left child
            loop {
                let xp = self.parent(x);
                if xp == NIL {
                    return;
                }
                if self.left(xp) == x {
                    x = xp;
                    break;
                }
                x = xp;
            }
        }
    }

    /// Verify BST order, red-red freedom and equal black heights.
    pub fn check_invariants(&self) -> bool {
        fn walk(t: &RbQueue<'_>, x: usize, lo: Option<(Word, Word)>, hi: Option<(Word, Word)>) -> Option<usize> {
            if x == NIL {
                return Some(1);
            }
            let e = (t.get(x, KEY), t.get(x, PAY));
            if lo.is_some_and(|l| e < l) || hi.is_some_and(|h| e > h) {
                return None;
            }
            let c = t.get(x, COLOR);
            let (l, r) = (t.left(x), t.right(x));
            if c == RED && (t.color(l) == RED || t.color(r) == RED) {
                return None;
            }
            for ch in [l, r] {
                if ch != NIL && t.parent(ch) != x {
                    return None;
                }
            }
            let bl = walk(t, l, lo, Some(e))?;
            let br = walk(t, r, Some(e), hi)?;
            (bl == br).then_some(bl + usize::from(c == BLACK))
        }
        self.color(self.root) == BLACK && walk(self, self.root, None, None).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::CostParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn meter() -> CostMeter {
        CostMeter::new(CostParams::new(8, 10).unwrap())
    }

    #[test]
    fn sorted_drain() {
        let mt = meter();
        let mut q = RbQueue::new(&mt);
        for k in 1..=8 {
            q.insert(k, 0);
        }
        let out: Vec<_> = (0..8).map(|_| q.delete_min().unwrap().0).collect();
        assert_eq!(out, (1..=8).collect::<Vec<_>>());
        assert_eq!(q.delete_min(), Err(AramError::EmptyHeap));
    }

    #[test]
    fn random_drain_matches_sort() {
        let mt = meter();
        let mut q = RbQueue::new(&mt);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut keys: Vec<(Word, Word)> = (0..1000).map(|i| (rng.gen_range(0..500), i)).collect();
        for &(k, i) in &keys {
            q.insert(k, i);
            assert!(i % 97 != 0 || q.check_invariants());
        }
        assert!(q.check_invariants());
        keys.sort_unstable();
        let mut seen = vec![];
        q.for_each_in_order(|k, p| seen.push((k, p)));
        assert_eq!(seen, keys);
        let out: Vec<_> = (0..1000).map(|_| q.delete_min().unwrap()).collect();
        assert_eq!(out, keys);
    }

    #[test]
    fn amortized_writes_per_update() {
        let mt = meter();
        let mut q = RbQueue::new(&mt);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut max_size = 1usize;
        let ops = 10_000u64;
        for i in 0..ops {
            if q.is_empty() || rng.gen_bool(0.6) {
                q.insert(rng.gen_range(0..1_000_000), i);
            } else {
                q.delete_min().unwrap();
            }
            max_size = max_size.max(q.len());
            if i % 1000 == 0 {
                assert!(q.check_invariants());
            }
        }
        let writes = mt.slow_writes();
        let reads = mt.slow_reads();
        let lg = (max_size as f64).log2().ceil() as u64;
        assert!(writes <= WRITES_PER_UPDATE * ops, "writes {writes}");
        assert!(reads <= 8 * ops * lg, "reads {reads}");
    }
}
