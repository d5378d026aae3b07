//! Cost accounting for the asymmetric RAM.
//!
//! A run owns one [`CostMeter`]. Slow memory is only reachable through
//! [`SlowArray`], whose every element access bumps the meter, and fast memory
//! is granted word-by-word by the meter's [`FastArena`].

use std::cell::Cell;
use std::fmt;

use crate::error::{AramError, Result};

/// One memory word. Vertex ids, weights, distances and handles all fit in one.
pub type Word = u64;

/// Sentinel for "unreachable" / "no value". Additions saturate at this value.
pub const INF: Word = Word::MAX;

/// Saturating word addition; anything involving [`INF`] stays [`INF`].
#[inline]
pub fn sat_add(a: Word, b: Word) -> Word {
    a.saturating_add(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CostParams {
    /// Fast-memory capacity in words.
    pub m: usize,
    /// Cost multiplier of one slow-memory write.
    pub omega: u64,
}

impl CostParams {
    pub fn new(m: usize, omega: u64) -> Result<Self> {
        if m == 0 {
            return Err(AramError::Config("fast memory size M must be at least 1".into()));
        }
        if omega == 0 {
            return Err(AramError::Config("write cost omega must be at least 1".into()));
        }
        Ok(CostParams { m, omega })
    }
}

/// Capacity-bounded fast memory. Grants are RAII: dropping a [`FastGrant`]
/// returns its words.
#[derive(Debug)]
pub struct FastArena {
    capacity: usize,
    in_use: Cell<usize>,
    peak: Cell<usize>,
}

impl FastArena {
    pub fn new(capacity: usize) -> Self {
        FastArena {
            capacity,
            in_use: Cell::new(0),
            peak: Cell::new(0),
        }
    }

    pub fn alloc(&self, module: &'static str, words: usize) -> Result<FastGrant<'_>> {
        let in_use = self.in_use.get();
        if in_use + words > self.capacity {
            return Err(AramError::FastMemoryExceeded {
                module,
                requested: words,
                in_use,
                capacity: self.capacity,
            });
        }
        self.in_use.set(in_use + words);
        if in_use + words > self.peak.get() {
            self.peak.set(in_use + words);
        }
        Ok(FastGrant { arena: self, words })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn in_use(&self) -> usize {
        self.in_use.get()
    }

    pub fn peak(&self) -> usize {
        self.peak.get()
    }

    pub fn available(&self) -> usize {
        self.capacity - self.in_use.get()
    }
}

/// A live fast-memory reservation.
#[must_use = "dropping a grant releases its fast memory immediately"]
pub struct FastGrant<'a> {
    arena: &'a FastArena,
    words: usize,
}

impl FastGrant<'_> {
    pub fn words(&self) -> usize {
        self.words
    }
}

impl Drop for FastGrant<'_> {
    fn drop(&mut self) {
        self.arena.in_use.set(self.arena.in_use.get() - self.words);
    }
}

impl fmt::Debug for FastGrant<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FastGrant").field("words", &self.words).finish()
    }
}

/// Counters for one run. Interior mutability lets every metered structure
/// share a plain `&CostMeter`.
#[derive(Debug)]
pub struct CostMeter {
    params: CostParams,
    slow_reads: Cell<u64>,
    slow_writes: Cell<u64>,
    fast_ops: Cell<u64>,
    arena: FastArena,
}

impl CostMeter {
    pub fn new(params: CostParams) -> Self {
        CostMeter {
            params,
            slow_reads: Cell::new(0),
            slow_writes: Cell::new(0),
            fast_ops: Cell::new(0),
            arena: FastArena::new(params.m),
        }
    }

    pub fn params(&self) -> CostParams {
        self.params
    }

    pub fn arena(&self) -> &FastArena {
        &self.arena
    }

    pub fn alloc_fast(&self, module: &'static str, words: usize) -> Result<FastGrant<'_>> {
        self.arena.alloc(module, words)
    }

    #[inline]
    pub fn charge_read(&self) {
        self.slow_reads.set(self.slow_reads.get() + 1);
    }

    #[inline]
    pub fn charge_write(&self) {
        self.slow_writes.set(self.slow_writes.get() + 1);
    }

    /// Charge `k` fast-memory word touches.
    #[inline]
    pub fn fast(&self, k: u64) {
        self.fast_ops.set(self.fast_ops.get() + k);
    }

    pub fn slow_reads(&self) -> u64 {
        self.slow_reads.get()
    }

    pub fn slow_writes(&self) -> u64 {
        self.slow_writes.get()
    }

    pub fn fast_ops(&self) -> u64 {
        self.fast_ops.get()
    }

    pub fn q(&self) -> u64 {
        q_cost(self.slow_reads(), self.slow_writes(), self.params.omega)
    }

    pub fn work(&self) -> u64 {
        work_cost(self.q(), self.fast_ops())
    }

    pub fn snapshot(&self) -> MeterSnapshot {
        MeterSnapshot {
            m: self.params.m,
            omega: self.params.omega,
            slow_reads: self.slow_reads(),
            slow_writes: self.slow_writes(),
            fast_ops: self.fast_ops(),
            peak_fast: self.arena.peak(),
        }
    }
}

/// `Q = reads + omega * writes`.
pub fn q_cost(slow_reads: u64, slow_writes: u64, omega: u64) -> u64 {
    slow_reads + omega * slow_writes
}

/// `W = Q + fast-memory touches`.
pub fn work_cost(q: u64, fast_ops: u64) -> u64 {
    q + fast_ops
}

/// Frozen counter values of a finished run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MeterSnapshot {
    pub m: usize,
    pub omega: u64,
    pub slow_reads: u64,
    pub slow_writes: u64,
    pub fast_ops: u64,
    pub peak_fast: usize,
}

pub const CSV_HEADER: &str = "algo,n,m,M,omega,slow_reads,slow_writes,fast_ops,q,work,peak_fast,extra";

impl MeterSnapshot {
    pub fn q(&self) -> u64 {
        q_cost(self.slow_reads, self.slow_writes, self.omega)
    }

    pub fn work(&self) -> u64 {
        work_cost(self.q(), self.fast_ops)
    }

    /// One row matching [`CSV_HEADER`]. `extra` must not contain commas or
    /// newlines; callers use `;`-separated `key=value` pairs.
    pub fn csv_row(&self, algo: &str, n: usize, m: usize, extra: &str) -> String {
        format!(
            "{algo},{n},{m},{},{},{},{},{},{},{},{},{extra}",
            self.m,
            self.omega,
            self.slow_reads,
            self.slow_writes,
            self.fast_ops,
            self.q(),
            self.work(),
            self.peak_fast
        )
    }
}

/// A word array resident in slow memory.
///
/// The backing vector is private; the only way to touch an element is through
/// [`read`](Self::read) / [`write`](Self::write), which charge the meter.
pub struct SlowArray<'m> {
    data: Vec<Word>,
    meter: &'m CostMeter,
}

impl<'m> SlowArray<'m> {
    /// Allocate and initialise; every initialised word is a counted write.
    pub fn new(meter: &'m CostMeter, len: usize, fill: Word) -> Self {
        meter.slow_writes.set(meter.slow_writes.get() + len as u64);
        SlowArray {
            data: vec![fill; len],
            meter,
        }
    }

    /// Allocate without initialisation cost. Contents are unspecified until
    /// written; callers must write a cell before reading it.
    pub fn uninit(meter: &'m CostMeter, len: usize) -> Self {
        SlowArray {
            data: vec![0; len],
            meter,
        }
    }

    /// Wrap input data that was loaded before the run started. Loading is
    /// charged to the setup phase, not to this meter.
    pub fn from_setup(meter: &'m CostMeter, data: Vec<Word>) -> Self {
        SlowArray { data, meter }
    }

    pub fn with_capacity(meter: &'m CostMeter, cap: usize) -> Self {
        SlowArray {
            data: Vec::with_capacity(cap),
            meter,
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn meter(&self) -> &'m CostMeter {
        self.meter
    }

    pub fn try_read(&self, index: usize) -> Result<Word> {
        match self.data.get(index) {
            Some(&v) => {
                self.meter.charge_read();
                Ok(v)
            }
            None => Err(AramError::OutOfBounds {
                index,
                len: self.data.len(),
            }),
        }
    }

    pub fn try_write(&mut self, index: usize, value: Word) -> Result<()> {
        let len = self.data.len();
        match self.data.get_mut(index) {
            Some(cell) => {
                *cell = value;
                self.meter.charge_write();
                Ok(())
            }
            None => Err(AramError::OutOfBounds { index, len }),
        }
    }

    /// Metered read. Panics with the out-of-bounds fault on a bad index.
    #[inline]
    #[track_caller]
    pub fn read(&self, index: usize) -> Word {
        match self.try_read(index) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }

    #[inline]
    #[track_caller]
    pub fn write(&mut self, index: usize, value: Word) {
        if let Err(e) = self.try_write(index, value) {
            panic!("{e}");
        }
    }

    /// Append one word (one counted write).
    pub fn push(&mut self, value: Word) -> usize {
        self.meter.charge_write();
        self.data.push(value);
        self.data.len() - 1
    }

    /// Release the contents after the run; not a metered access.
    pub fn into_inner(self) -> Vec<Word> {
        self.data
    }
}

impl fmt::Debug for SlowArray<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SlowArray").field("len", &self.data.len()).finish()
    }
}

/// A word array resident in fast memory. Holds its arena grant for its
/// lifetime; each element access is one fast op.
pub struct FastBuf<'m> {
    data: Vec<Word>,
    meter: &'m CostMeter,
    _grant: FastGrant<'m>,
}

impl<'m> FastBuf<'m> {
    pub fn new(meter: &'m CostMeter, module: &'static str, len: usize, fill: Word) -> Result<Self> {
        let grant = meter.alloc_fast(module, len)?;
        meter.fast(len as u64);
        Ok(FastBuf {
            data: vec![fill; len],
            meter,
            _grant: grant,
        })
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> Word {
        self.meter.fast(1);
        self.data[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, v: Word) {
        self.meter.fast(1);
        self.data[i] = v;
    }
}

impl fmt::Debug for FastBuf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FastBuf").field("len", &self.data.len()).finish()
    }
}

/// Uniform element access over fast and slow word arrays, so one data
/// structure implementation can live in either memory.
pub trait WordStore {
    fn load(&self, i: usize) -> Word;
    fn store(&mut self, i: usize, v: Word);
    fn words(&self) -> usize;
}

impl WordStore for SlowArray<'_> {
    #[inline]
    fn load(&self, i: usize) -> Word {
        self.read(i)
    }
    #[inline]
    fn store(&mut self, i: usize, v: Word) {
        self.write(i, v)
    }
    fn words(&self) -> usize {
        self.len()
    }
}

impl WordStore for FastBuf<'_> {
    #[inline]
    fn load(&self, i: usize) -> Word {
        self.get(i)
    }
    #[inline]
    fn store(&mut self, i: usize, v: Word) {
        self.set(i, v)
    }
    fn words(&self) -> usize {
        self.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meter(m: usize, omega: u64) -> CostMeter {
        CostMeter::new(CostParams::new(m, omega).unwrap())
    }

    #[test]
    fn read_counts_every_access() {
        let mt = meter(4, 10);
        let arr = SlowArray::from_setup(&mt, vec![5, 6, 7, 8]);
        assert_eq!(arr.read(3), 8);
        assert_eq!(mt.slow_reads(), 1);
        arr.read(0);
        arr.read(0);
        assert_eq!(mt.slow_reads(), 3);
    }

    #[test]
    fn read_after_write() {
        let mt = meter(4, 10);
        let mut arr = SlowArray::uninit(&mt, 4);
        arr.write(2, 42);
        assert_eq!(arr.read(2), 42);
    }

    #[test]
    fn out_of_bounds_reports_index_and_len() {
        let mt = meter(4, 10);
        let mut arr = SlowArray::uninit(&mt, 4);
        assert_eq!(arr.try_read(9), Err(AramError::OutOfBounds { index: 9, len: 4 }));
        assert!(arr.try_write(4, 1).is_err());
        assert_eq!(mt.slow_reads() + mt.slow_writes(), 0);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn read_panics_on_fault() {
        let mt = meter(4, 10);
        let arr = SlowArray::uninit(&mt, 1);
        arr.read(1);
    }

    #[test]
    fn writes_scale_by_omega() {
        let mt = meter(4, 10);
        let mut arr = SlowArray::uninit(&mt, 8);
        arr.write(0, 1);
        assert_eq!(mt.q(), 10);
        for i in 0..8 {
            arr.write(i, 3);
        }
        assert_eq!(mt.slow_writes(), 9);
        assert_eq!(mt.q(), 90);
        arr.write(5, 1);
        arr.write(5, 2);
        assert_eq!(mt.slow_writes(), 11);
    }

    #[test]
    fn q_and_work_formulas() {
        assert_eq!(q_cost(5, 2, 10), 25);
        assert_eq!(q_cost(0, 0, 77), 0);
        assert_eq!(q_cost(7, 0, 1000), 7);
        assert_eq!(work_cost(25, 100), 125);
        assert_eq!(work_cost(25, 0), 25);
        assert_eq!(work_cost(0, 12), 12);
    }

    #[test]
    fn arena_boundary() {
        let mt = meter(64, 1);
        let g = mt.alloc_fast("test", 64).unwrap();
        let err = mt.alloc_fast("test", 1).unwrap_err();
        assert!(matches!(err, AramError::FastMemoryExceeded { module: "test", .. }));
        drop(g);
        assert_eq!(mt.arena().in_use(), 0);
    }

    #[test]
    fn arena_high_water_mark() {
        let mt = meter(64, 1);
        drop(mt.alloc_fast("t", 10).unwrap());
        let _g = mt.alloc_fast("t", 64).unwrap();
        assert_eq!(mt.arena().peak(), 64);
    }

    #[test]
    fn arena_zero_alloc() {
        let mt = meter(8, 1);
        let _g = mt.alloc_fast("t", 0).unwrap();
        assert_eq!(mt.arena().in_use(), 0);
        assert_eq!(mt.arena().peak(), 0);
    }

    #[test]
    fn params_validation() {
        assert!(CostParams::new(0, 1).is_err());
        assert!(CostParams::new(1, 0).is_err());
        assert!(CostParams::new(1, 1).is_ok());
    }

    #[test]
    fn snapshot_csv_row() {
        let mt = meter(16, 10);
        let mut a = SlowArray::uninit(&mt, 2);
        a.write(0, 1);
        a.read(0);
        mt.fast(3);
        let row = mt.snapshot().csv_row("x", 2, 0, "seed=1");
        assert_eq!(row, "x,2,0,16,10,1,1,3,11,14,0,seed=1");
    }
}
