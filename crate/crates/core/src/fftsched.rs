//! Evaluating the butterfly (FFT) DAG with few slow writes.
//!
//! Vertex `(i + 1, j)` combines `(i, j)` and `(i, j ^ 2^i)`: the row with bit
//! `i` clear gets the sum, the other the difference, modulo [`P`]. The DAG is
//! cut into layers of `L = floor(log2(omega M'))` levels and only the last
//! level of each layer goes to slow memory. Each layer is covered by groups
//! of `M'` outputs forming a sub-butterfly over its last `log2 M'` levels; the
//! group's inputs to that sub-butterfly are recomputed depth-first from the
//! layer's input level, using fast memory proportional to the depth.

use crate::costmodel::{CostMeter, CostParams, MeterSnapshot, SlowArray, Word};
use crate::error::{AramError, Result};

pub const P: Word = 2_147_483_647;
pub const MPRIME_DIVISOR: usize = 4;
const REGISTERS: usize = 4;

#[inline]
fn combine(x: Word, y: Word, upper: bool) -> Word {
    if upper {
        (x + P - y) % P
    } else {
        (x + y) % P
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerPlan {
    pub log2n: u32,
    pub m_prime: usize,
    pub levels_per_layer: u32,
    pub group_levels: u32,
    /// Level ranges `[l0, l1)` of transitions covered by each layer.
    pub layers: Vec<(u32, u32)>,
}

impl LayerPlan {
    pub fn new(log2n: u32, params: CostParams) -> Result<Self> {
        let m_prime = params.m / MPRIME_DIVISOR;
        if m_prime < 2 {
            return Err(AramError::Config(format!(
                "fft needs M >= {} fast words, got M = {}",
                2 * MPRIME_DIVISOR,
                params.m
            )));
        }
        let wm = (params.omega as u128) * m_prime as u128;
        let group_levels = m_prime.ilog2();
        // the recursion stack must fit next to the group
        let stack_room = ((params.m - (1usize << group_levels) - REGISTERS) / 2) as u32;
        let levels_per_layer = (127 - wm.leading_zeros()).min(stack_room).max(1);
        let group_levels = group_levels.min(levels_per_layer);
        let mut layers = vec![];
        let mut l0 = 0;
        while l0 < log2n {
            let l1 = (l0 + levels_per_layer).min(log2n);
            layers.push((l0, l1));
            l0 = l1;
        }
        Ok(LayerPlan {
            log2n,
            m_prime,
            levels_per_layer,
            group_levels,
            layers,
        })
    }

    /// Fast words the evaluation holds: one group, the recursion stack and
    /// a few registers.
    pub fn fast_words(&self) -> usize {
        (1usize << self.group_levels) + 2 * self.levels_per_layer as usize + REGISTERS
    }
}

fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(AramError::Argument(format!("fft size must be a power of two, got {n}")));
    }
    Ok(n.ilog2())
}

/// Value of vertex `(l, j)` from the slow level `l0`, reads only.
fn value(inp: &SlowArray<'_>, meter: &CostMeter, l0: u32, l: u32, j: usize) -> Word {
    if l == l0 {
        return inp.read(j) % P;
    }
    let b = 1usize << (l - 1);
    let x = value(inp, meter, l0, l - 1, j & !b);
    let y = value(inp, meter, l0, l - 1, j | b);
    meter.fast(3);
    combine(x, y, j & b != 0)
}

pub fn eval_fft_metered(values: &[Word], meter: &CostMeter) -> Result<Vec<Word>> {
    let n = values.len();
    let log2n = log2_exact(n)?;
    let plan = LayerPlan::new(log2n, meter.params())?;
    let _grant = meter.alloc_fast("fftsched::group", plan.fast_words())?;
    let mut cur = SlowArray::from_setup(meter, values.to_vec());
    if log2n == 0 {
        let v = cur.read(0) % P;
        return Ok(vec![v]);
    }
    let mut buf = vec![0 as Word; 1 << plan.group_levels];
    for &(l0, l1) in &plan.layers {
        let g = plan.group_levels.min(l1 - l0);
        let lg = l1 - g;
        let mask = ((1usize << g) - 1) << lg;
        let mut out = SlowArray::uninit(meter, n);
        for base in (0..n).filter(|&j| j & mask == 0) {
            let size = 1usize << g;
            for (t, slot) in buf[..size].iter_mut().enumerate() {
                *slot = value(&cur, meter, l0, lg, base | (t << lg));
            }
            for bit in 0..g {
                let b = 1usize << bit;
                for t in (0..size).filter(|&t| t & b == 0) {
                    let (x, y) = (buf[t], buf[t | b]);
                    buf[t] = combine(x, y, false);
                    buf[t | b] = combine(x, y, true);
                }
                meter.fast(3 * size as u64);
            }
            for (t, &v) in buf[..size].iter().enumerate() {
                out.write(base | (t << lg), v);
            }
        }
        cur = out;
    }
    Ok(cur.into_inner())
}

pub fn eval_fft(values: &[Word], params: CostParams) -> Result<(Vec<Word>, MeterSnapshot)> {
    let meter = CostMeter::new(params);
    let out = eval_fft_metered(values, &meter)?;
    Ok((out, meter.snapshot()))
}

/// Level-by-level evaluation of the whole DAG.
pub fn oracle_fft(values: &[Word]) -> Result<Vec<Word>> {
    let n = values.len();
    let log2n = log2_exact(n)?;
    let mut cur: Vec<Word> = values.iter().map(|v| v % P).collect();
    for i in 0..log2n {
        let b = 1usize << i;
        cur = (0..n).map(|j| combine(cur[j & !b], cur[j | b], j & b != 0)).collect();
    }
    Ok(cur)
}

/// Closed-form slow-write budget `4 n log2 n / log2(omega M') + n`.
pub fn write_budget(n: usize, params: CostParams) -> f64 {
    let mp = (params.m / MPRIME_DIVISOR) as f64;
    let lg = (n as f64).log2();
    4.0 * n as f64 * lg / (params.omega as f64 * mp).log2() + n as f64
}
