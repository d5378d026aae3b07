//! Fibonacci heap over an arbitrary [`WordStore`].
//!
//! Nodes are fixed-width word records in a store, so the same code runs in
//! fast memory (the truncating heap of phased Dijkstra) and in slow memory
//! (the classical Fibonacci-heap Dijkstra, where every pointer update is a
//! metered write). Entries are ordered by `(key, id)`.

use crate::costmodel::{Word, WordStore, INF};

pub const NIL: usize = usize::MAX;

const KEY: usize = 0;
const ID: usize = 1;
const PARENT: usize = 2;
const CHILD: usize = 3;
const LEFT: usize = 4;
const RIGHT: usize = 5;
/// `degree << 1 | mark`
const DEG: usize = 6;

/// Words per heap node.
pub const NODE_WORDS: usize = 7;

/// Size of the consolidation table needed for a heap of at most `cap` nodes.
pub fn degree_table_len(cap: usize) -> usize {
    // max degree <= log_phi(cap) ~ 1.4405 log2(cap)
    let lg = usize::BITS - cap.max(1).leading_zeros();
    (lg as usize * 3).div_ceil(2) + 3
}

#[derive(Debug)]
pub struct FibHeap<S: WordStore> {
    nodes: S,
    table: S,
    slots: usize,
    min: usize,
    len: usize,
    free: usize,
    fresh: usize,
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

impl<S: WordStore> FibHeap<S> {
    /// `nodes` must hold `slots * NODE_WORDS` words; `table` must hold
    /// [`degree_table_len`]`(slots)` words, all initialised to `INF`.
    pub fn new(nodes: S, table: S) -> Self {
        let slots = nodes.words() / NODE_WORDS;
        debug_assert!(table.words() >= degree_table_len(slots));
        FibHeap {
            nodes,
            table,
            slots,
            min: NIL,
            len: 0,
            free: NIL,
            fresh: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    #[inline]
    fn get(&self, x: usize, f: usize) -> Word {
        self.nodes.load(x * NODE_WORDS + f)
    }

    #[inline]
    fn set(&mut self, x: usize, f: usize, v: Word) {
        self.nodes.store(x * NODE_WORDS + f, v)
    }

    #[inline]
    fn ptr(&self, x: usize, f: usize) -> usize {
        p(self.get(x, f))
    }

    #[inline]
    fn set_ptr(&mut self, x: usize, f: usize, y: usize) {
        self.set(x, f, w(y))
    }

    pub fn key(&self, h: usize) -> Word {
        self.get(h, KEY)
    }

    pub fn id(&self, h: usize) -> Word {
        self.get(h, ID)
    }

    fn entry(&self, x: usize) -> (Word, Word) {
        (self.get(x, KEY), self.get(x, ID))
    }

    /// Smallest entry without removing it.
    pub fn peek_min(&self) -> Option<(Word, Word)> {
        (self.min != NIL).then(|| self.entry(self.min))
    }

    /// Splice a single node (or a whole circular list starting at `x`) into
    /// the root list.
    fn add_root_list(&mut self, x: usize) {
        if self.min == NIL {
            self.min = x;
            return;
        }
        let m = self.min;
        let m_right = self.ptr(m, RIGHT);
        let x_left = self.ptr(x, LEFT);
        self.set_ptr(m, RIGHT, x);
        self.set_ptr(x, LEFT, m);
        self.set_ptr(x_left, RIGHT, m_right);
        self.set_ptr(m_right, LEFT, x_left);
    }

    fn alloc_slot(&mut self) -> usize {
        if self.free != NIL {
            let x = self.free;
            self.free = self.ptr(x, LEFT);
            x
        } else {
            assert!(self.fresh < self.slots, "fibonacci heap store is full");
            self.fresh += 1;
            self.fresh - 1
        }
    }

    /// Insert an entry; returns its handle.
    pub fn insert(&mut self, key: Word, id: Word) -> usize {
        let x = self.alloc_slot();
        self.set(x, KEY, key);
        self.set(x, ID, id);
        self.set_ptr(x, PARENT, NIL);
        self.set_ptr(x, CHILD, NIL);
        self.set(x, DEG, 0);
        self.set_ptr(x, LEFT, x);
        self.set_ptr(x, RIGHT, x);
        let old_min = self.min;
        self.add_root_list(x);
        if old_min != NIL && (key, id) < self.entry(old_min) {
            self.min = x;
        }
        self.len += 1;
        x
    }

    /// Lower the key of handle `h`. Returns false (and does nothing) when
    /// `key` is not smaller than the current key.
    pub fn decrease_key(&mut self, h: usize, key: Word) -> bool {
        let cur = self.get(h, KEY);
        if key >= cur {
            return false;
        }
        self.set(h, KEY, key);
        let id = self.get(h, ID);
        let parent = self.ptr(h, PARENT);
        if parent != NIL && (key, id) < self.entry(parent) {
            self.cut(h, parent);
            self.cascading_cut(parent);
        }
        if (key, id) < self.entry(self.min) {
            self.min = h;
        }
        true
    }

    fn cut(&mut self, x: usize, parent: usize) {
        let right = self.ptr(x, RIGHT);
        if right == x {
            self.set_ptr(parent, CHILD, NIL);
        } else {
            let left = self.ptr(x, LEFT);
            self.set_ptr(left, RIGHT, right);
            self.set_ptr(right, LEFT, left);
            if self.ptr(parent, CHILD) == x {
                self.set_ptr(parent, CHILD, right);
            }
        }
        let deg = self.get(parent, DEG);
        self.set(parent, DEG, deg - 2);
        self.set_ptr(x, LEFT, x);
        self.set_ptr(x, RIGHT, x);
        self.set_ptr(x, PARENT, NIL);
        let dx = self.get(x, DEG);
        if dx & 1 == 1 {
            self.set(x, DEG, dx & !1);
        }
        self.add_root_list(x);
    }

    fn cascading_cut(&mut self, mut y: usize) {
        loop {
            let z = self.ptr(y, PARENT);
            if z == NIL {
                return;
            }
            let d = self.get(y, DEG);
            if d & 1 == 0 {
                self.set(y, DEG, d | 1);
                return;
            }
            self.cut(y, z);
            y = z;
        }
    }

    /// Remove and return the smallest `(key, id)`.
    pub fn delete_min(&mut self) -> Option<(Word, Word)> {
        let z = self.min;
        if z == NIL {
            return None;
        }
        let out = self.entry(z);
        // promote children to roots
        let child = self.ptr(z, CHILD);
        if child != NIL {
            let mut c = child;
            loop {
                self.set_ptr(c, PARENT, NIL);
                c = self.ptr(c, RIGHT);
                if c == child {
                    break;
                }
            }
            self.add_root_list(child);
        }
        let right = self.ptr(z, RIGHT);
        if right == z {
            self.min = NIL;
        } else {
            let left = self.ptr(z, LEFT);
            self.set_ptr(left, RIGHT, right);
            self.set_ptr(right, LEFT, left);
            self.min = right;
            self.consolidate();
        }
        // release the slot
        self.set(z, ID, INF);
        self.set_ptr(z, LEFT, self.free);
        self.free = z;
        self.len -= 1;
        Some(out)
    }

    fn consolidate(&mut self) {
        let start = self.min;
        let mut cur = start;
        let mut max_deg = 0usize;
        loop {
            let next = self.ptr(cur, RIGHT);
            let mut x = cur;
            let mut d = (self.get(x, DEG) >> 1) as usize;
            loop {
                let y = p(self.table.load(d));
                if y == NIL {
                    break;
                }
                let (x2, y2) = if self.entry(y) < self.entry(x) { (y, x) } else { (x, y) };
                x = x2;
                self.link(y2, x);
                self.table.store(d, INF);
                d += 1;
            }
            self.table.store(d, w(x));
            max_deg = max_deg.max(d);
            if next == start {
                break;
            }
            cur = next;
        }
        self.min = NIL;
        for d in 0..=max_deg {
            let x = p(self.table.load(d));
            if x == NIL {
                continue;
            }
            self.table.store(d, INF);
            self.set_ptr(x, LEFT, x);
            self.set_ptr(x, RIGHT, x);
            let old_min = self.min;
            self.add_root_list(x);
            if old_min != NIL && self.entry(x) < self.entry(old_min) {
                self.min = x;
            }
        }
    }

    /// Make `y` a child of `x` (both already detached from any root list).
    fn link(&mut self, y: usize, x: usize) {
        let child = self.ptr(x, CHILD);
        if child == NIL {
            self.set_ptr(x, CHILD, y);
            self.set_ptr(y, LEFT, y);
            self.set_ptr(y, RIGHT, y);
        } else {
            let cr = self.ptr(child, RIGHT);
            self.set_ptr(y, LEFT, child);
            self.set_ptr(y, RIGHT, cr);
            self.set_ptr(child, RIGHT, y);
            self.set_ptr(cr, LEFT, y);
        }
        self.set_ptr(y, PARENT, x);
        let d = self.get(y, DEG);
        if d & 1 == 1 {
            self.set(y, DEG, d & !1);
        }
        let dx = self.get(x, DEG);
        self.set(x, DEG, dx + 2);
    }

    /// All live `(key, id, handle)` triples, in slot order.
    pub fn for_each_live(&self, mut f: impl FnMut(Word, Word, usize)) {
        for x in 0..self.fresh {
            let id = self.get(x, ID);
            if id != INF {
                f(self.get(x, KEY), id, x);
            }
        }
    }

    /// Forget every entry. O(1): slots are reused from scratch.
    pub fn clear(&mut self) {
        self.min = NIL;
        self.len = 0;
        self.free = NIL;
        self.fresh = 0;
    }

    /// Check heap order along every parent link (test helper).
    pub fn check_heap_order(&self) -> bool {
        let mut ok = true;
        self.for_each_live(|key, id, x| {
            let parent = self.ptr(x, PARENT);
            if parent != NIL && self.entry(parent) > (key, id) {
                ok = false;
            }
        });
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::{CostMeter, CostParams, SlowArray};
    use proptest::prelude::*;

    fn heap(meter: &CostMeter, slots: usize) -> FibHeap<SlowArray<'_>> {
        FibHeap::new(
            SlowArray::new(meter, slots * NODE_WORDS, 0),
            SlowArray::new(meter, degree_table_len(slots), INF),
        )
    }

    #[test]
    fn drains_sorted() {
        let mt = CostMeter::new(CostParams::new(16, 1).unwrap());
        let mut h = heap(&mt, 16);
        for (k, id) in [(5, 0), (3, 1), (9, 2), (1, 3), (3, 0)] {
            h.insert(k, id);
        }
        let out: Vec<_> = std::iter::from_fn(|| h.delete_min()).collect();
        assert_eq!(out, vec![(1, 3), (3, 0), (3, 1), (5, 0), (9, 2)]);
    }

    #[test]
    fn decrease_moves_to_front() {
        let mt = CostMeter::new(CostParams::new(16, 1).unwrap());
        let mut h = heap(&mt, 16);
        let hs: Vec<_> = (0..10).map(|i| h.insert(10 + i, i)).collect();
        h.delete_min();
        assert!(h.decrease_key(hs[7], 4));
        assert!(!h.decrease_key(hs[7], 4));
        assert_eq!(h.delete_min(), Some((4, 7)));
        assert!(h.check_heap_order());
    }

    proptest! {
        #[test]
        fn random_ops_match_model(ops in proptest::collection::vec((0u8..3, 0u64..100, 0usize..64), 1..300)) {
            let mt = CostMeter::new(CostParams::new(16, 1).unwrap());
            let mut h = heap(&mt, 64);
            let mut model: std::collections::BTreeMap<u64, u64> = Default::default(); // id -> key
            let mut handles = std::collections::HashMap::new();
            for (op, key, id) in ops {
                let id = id as u64;
                match op {
                    0 if !model.contains_key(&id) && model.len() < 64 => {
                        handles.insert(id, h.insert(key, id));
                        model.insert(id, key);
                    }
                    1 if model.contains_key(&id) => {
                        let cur = model[&id];
                        let nk = key.min(cur);
                        h.decrease_key(handles[&id], nk);
                        model.insert(id, nk);
                    }
                    _ => {
                        let expect = model.iter().map(|(&i, &k)| (k, i)).min();
                        let got = h.delete_min();
                        prop_assert_eq!(got, expect);
                        if let Some((_, i)) = got {
                            model.remove(&i);
                            handles.remove(&i);
                        }
                    }
                }
                prop_assert!(h.check_heap_order());
                prop_assert_eq!(h.len(), model.len());
            }
        }
    }
}
