//! Fixed-capacity open-addressing map from vertex id to heap handle, kept in
//! fast memory. Linear probing with backward-shift deletion; load factor is
//! held at or below one half by sizing the table to twice the entry limit.

use crate::costmodel::{CostMeter, FastBuf, Word, WordStore, INF};
use crate::error::Result;

const EMPTY: Word = INF;

pub struct MemberMap<'m> {
    table: FastBuf<'m>,
    slots: usize,
    len: usize,
}

/// Words per map slot: (vertex, handle).
pub const SLOT_WORDS: usize = 2;

impl<'m> MemberMap<'m> {
    /// A map able to hold `max_entries` keys at load factor <= 1/2.
    pub fn new(meter: &'m CostMeter, max_entries: usize) -> Result<Self> {
        let slots = (2 * max_entries).max(2);
        let table = FastBuf::new(meter, "heaps::MemberMap", slots * SLOT_WORDS, EMPTY)?;
        Ok(MemberMap { table, slots, len: 0 })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn home(&self, v: Word) -> usize {
        (v.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 32) as usize % self.slots
    }

    fn find_slot(&self, v: Word) -> (usize, bool) {
        let mut i = self.home(v);
        loop {
            let k = self.table.load(i * SLOT_WORDS);
            if k == EMPTY {
                return (i, false);
            }
            if k == v {
                return (i, true);
            }
            i = (i + 1) % self.slots;
        }
    }

    pub fn get(&self, v: Word) -> Option<usize> {
        let (i, found) = self.find_slot(v);
        found.then(|| self.table.load(i * SLOT_WORDS + 1) as usize)
    }

    pub fn contains(&self, v: Word) -> bool {
        self.find_slot(v).1
    }

    /// Insert or overwrite.
    pub fn insert(&mut self, v: Word, handle: usize) {
        let (i, found) = self.find_slot(v);
        if !found {
            assert!(self.len < self.slots / 2, "member map over capacity");
            self.table.store(i * SLOT_WORDS, v);
            self.len += 1;
        }
        self.table.store(i * SLOT_WORDS + 1, handle as Word);
    }

    pub fn remove(&mut self, v: Word) -> bool {
        let (mut hole, found) = self.find_slot(v);
        if !found {
            return false;
        }
        self.table.store(hole * SLOT_WORDS, EMPTY);
        self.len -= 1;
        let mut j = hole;
        loop {
            j = (j + 1) % self.slots;
            let k = self.table.load(j * SLOT_WORDS);
            if k == EMPTY {
                return true;
            }
            let h = self.home(k);
            // move k back into the hole unless its home lies cyclically in (hole, j]
            let stays = if hole <= j {
                hole < h && h <= j
            } else {
                hole < h || h <= j
            };
            if !stays {
                let handle = self.table.load(j * SLOT_WORDS + 1);
                self.table.store(hole * SLOT_WORDS, k);
                self.table.store(hole * SLOT_WORDS + 1, handle);
                self.table.store(j * SLOT_WORDS, EMPTY);
                hole = j;
            }
        }
    }

    pub fn clear(&mut self) {
        for i in 0..self.slots {
            self.table.store(i * SLOT_WORDS, EMPTY);
        }
        self.len = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::CostParams;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn behaves_like_hashmap(ops in proptest::collection::vec((any::<bool>(), 0u64..40, 0usize..1000), 0..400)) {
            let mt = CostMeter::new(CostParams::new(1024, 1).unwrap());
            let mut map = MemberMap::new(&mt, 40).unwrap();
            let mut model = std::collections::HashMap::new();
            for (ins, v, h) in ops {
                if ins {
                    map.insert(v, h);
                    model.insert(v, h);
                } else {
                    prop_assert_eq!(map.remove(v), model.remove(&v).is_some());
                }
                prop_assert_eq!(map.len(), model.len());
            }
            for v in 0..40u64 {
                prop_assert_eq!(map.get(v), model.get(&v).copied());
            }
        }
    }

    #[test]
    fn charges_its_arena() {
        let mt = CostMeter::new(CostParams::new(64, 1).unwrap());
        let map = MemberMap::new(&mt, 16).unwrap();
        assert_eq!(mt.arena().in_use(), 64);
        drop(map);
        assert!(MemberMap::new(&mt, 17).is_err());
    }
}
