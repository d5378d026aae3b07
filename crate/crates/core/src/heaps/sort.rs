//! Write-efficient comparison sort: insert into a slow-memory red-black tree,
//! then read the keys off in order.

use super::rbtree::RbQueue;
use crate::costmodel::{CostMeter, SlowArray};

/// Bound on slow writes per key: six node words, one parent link, amortized
/// rebalancing (worst on presorted input, about 11), one output word.
pub const SORT_WRITES_PER_KEY: u64 = 20;
/// Documented bound on slow reads per key per `log2 n`.
pub const SORT_READS_PER_KEY_LOG: u64 = 16;

/// Stable ascending sort; ties keep input order.
pub fn we_sort<'m>(meter: &'m CostMeter, input: &SlowArray<'_>) -> SlowArray<'m> {
    let n = input.len();
    let mut tree = RbQueue::new(meter);
    for i in 0..n {
        let key = input.read(i);
        tree.insert(key, i as u64);
    }
    let mut out = SlowArray::uninit(meter, n);
    let mut j = 0;
    tree.for_each_in_order(|key, _| {
        out.write(j, key);
        j += 1;
    });
    meter.fast(2 * n as u64);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmodel::CostParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn run(keys: Vec<u64>) -> (Vec<u64>, u64, u64) {
        let setup = CostMeter::new(CostParams::new(8, 10).unwrap());
        let mt = CostMeter::new(CostParams::new(8, 10).unwrap());
        let input = SlowArray::from_setup(&setup, keys);
        let out = we_sort(&mt, &input);
        (out.into_inner(), mt.slow_writes(), mt.slow_reads())
    }

    #[test]
    fn small() {
        assert_eq!(run(vec![3, 1, 2]).0, vec![1, 2, 3]);
        assert_eq!(run(vec![]).0, Vec::<u64>::new());
    }

    #[test]
    fn sorted_input_same_bound() {
        let keys: Vec<u64> = (0..2000).collect();
        let (out, writes, _) = run(keys.clone());
        assert_eq!(out, keys);
        assert!(writes <= SORT_WRITES_PER_KEY * 2000, "writes {writes}");
    }

    #[test]
    fn random_against_library_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10_000u64;
        let keys: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1_000_000)).collect();
        let mut expect = keys.clone();
        expect.sort();
        let (out, writes, reads) = run(keys);
        assert_eq!(out, expect);
        assert!(writes <= SORT_WRITES_PER_KEY * n, "writes/n = {}", writes / n);
        let lg = (n as f64).log2().ceil() as u64;
        assert!(reads <= SORT_READS_PER_KEY_LOG * n * lg, "reads {reads}");
    }
}
