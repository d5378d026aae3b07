//! The fast-memory priority queue of phased Dijkstra.
//!
//! A Fibonacci heap holding at most `2 * cap` entries. When it fills up, the
//! entries are flattened into an array, the `cap` smallest are found by
//! deterministic selection, the heap is rebuilt from them and the smallest
//! discarded key becomes the admission threshold `d_max`: from then until
//! [`TruncatingHeap::reset_threshold`], keys `>= d_max` are dropped.

use super::fib::{degree_table_len, FibHeap, NODE_WORDS};
use super::member::{MemberMap, SLOT_WORDS};
use super::select::select_nth;
use crate::costmodel::{CostMeter, FastBuf, FastGrant, Word, INF};
use crate::error::{AramError, Result};

const MODULE: &str = "heaps::TruncatingHeap";

/// Fast-memory words used by a truncating heap with the given cap, including
/// the transient flatten buffer.
pub fn footprint_words(cap: usize) -> usize {
    let entries = 2 * cap;
    entries * NODE_WORDS + degree_table_len(entries) + 2 * entries * SLOT_WORDS + 2 * entries
}

pub struct TruncatingHeap<'m> {
    meter: &'m CostMeter,
    heap: FibHeap<FastBuf<'m>>,
    members: MemberMap<'m>,
    cap: usize,
    d_max: Word,
    truncations: u64,
    _registers: FastGrant<'m>,
}

impl<'m> TruncatingHeap<'m> {
    pub fn new(meter: &'m CostMeter, cap: usize) -> Result<Self> {
        if cap == 0 {
            return Err(AramError::Argument("truncating heap cap must be positive".into()));
        }
        let entries = 2 * cap;
        let nodes = FastBuf::new(meter, MODULE, entries * NODE_WORDS, 0)?;
        let table = FastBuf::new(meter, MODULE, degree_table_len(entries), INF)?;
        let members = MemberMap::new(meter, entries)?;
        // min, len, free, fresh, cap, d_max
        let registers = meter.alloc_fast(MODULE, 6)?;
        Ok(TruncatingHeap {
            meter,
            heap: FibHeap::new(nodes, table),
            members,
            cap,
            d_max: INF,
            truncations: 0,
            _registers: registers,
        })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn d_max(&self) -> Word {
        self.d_max
    }

    pub fn truncations(&self) -> u64 {
        self.truncations
    }

    pub fn contains(&self, v: Word) -> bool {
        self.members.contains(v)
    }

    pub fn key_of(&self, v: Word) -> Option<Word> {
        self.members.get(v).map(|h| self.heap.key(h))
    }

    /// Lift the admission threshold. Only valid on an empty heap (phase start).
    pub fn reset_threshold(&mut self) {
        debug_assert!(self.is_empty());
        self.d_max = INF;
    }

    /// Insert a non-member. Keys `>= d_max` are silently dropped; reaching
    /// `2 * cap` entries triggers [`truncate_to_cap`](Self::truncate_to_cap).
    pub fn insert(&mut self, key: Word, v: Word) -> Result<()> {
        if self.members.contains(v) {
            return Err(AramError::Contract(format!("vertex {v} is already in the heap")));
        }
        if key >= self.d_max {
            return Ok(());
        }
        let h = self.heap.insert(key, v);
        self.members.insert(v, h);
        if self.heap.len() == 2 * self.cap {
            self.truncate_to_cap()?;
        }
        Ok(())
    }

    /// Decrease the key of a member; a non-smaller key is a no-op.
    pub fn decrease(&mut self, v: Word, key: Word) -> Result<()> {
        let h = self
            .members
            .get(v)
            .ok_or_else(|| AramError::Contract(format!("vertex {v} is not in the heap")))?;
        self.heap.decrease_key(h, key);
        Ok(())
    }

    /// Insert-or-decrease, the relaxation primitive.
    pub fn relax(&mut self, v: Word, key: Word) -> Result<()> {
        match self.members.get(v) {
            Some(h) => {
                self.heap.decrease_key(h, key);
                Ok(())
            }
            None => self.insert(key, v),
        }
    }

    pub fn delete_min(&mut self) -> Result<(Word, Word)> {
        let (key, v) = self.heap.delete_min().ok_or(AramError::EmptyHeap)?;
        self.members.remove(v);
        Ok((key, v))
    }

    /// Keep the `cap` smallest `(key, id)` entries, set `d_max` to the
    /// smallest discarded key and rebuild. Linear in the entry count.
    pub fn truncate_to_cap(&mut self) -> Result<()> {
        let n = self.heap.len();
        if n <= self.cap {
            return Ok(());
        }
        let _flat = self.meter.alloc_fast(MODULE, 2 * n)?;
        let mut entries: Vec<(Word, Word)> = Vec::with_capacity(n);
        self.heap.for_each_live(|key, id, _| entries.push((key, id)));
        self.meter.fast(2 * n as u64);
        let touches = select_nth(&mut entries, self.cap);
        self.meter.fast(2 * touches);
        self.d_max = entries[self.cap].0;
        self.heap.clear();
        self.members.clear();
        for &(key, id) in &entries[..self.cap] {
            let h = self.heap.insert(key, id);
            self.members.insert(id, h);
        }
        self.meter.fast(2 * self.cap as u64);
        self.truncations += 1;
        Ok(())
    }

    /// Retained `(key, id)` entries in ascending order (test helper, charges
    /// reads of every live node).
    pub fn entries_sorted(&self) -> Vec<(Word, Word)> {
        let mut out = Vec::with_capacity(self.len());
        self.heap.for_each_live(|k, id, _| out.push((k, id)));
        out.sort_unstable();
        out
    }

    pub fn check_heap_order(&self) -> bool {
        self.heap.check_heap_order()
    }
}
