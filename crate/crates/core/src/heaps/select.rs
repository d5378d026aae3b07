//! Deterministic linear-time selection (median of medians).

/// Rearranges `v` so that `v[k]` is the element that would sit at index `k`
/// after sorting, everything before it is `<= v[k]` and everything after is
/// `>= v[k]`. Returns the number of element touches (reads and moves), which
/// callers charge as fast-memory operations.
///
/// Panics if `k >= v.len()`.
pub fn select_nth<T: Ord + Copy>(v: &mut [T], k: usize) -> u64 {
    assert!(k < v.len(), "select index {k} out of range for {}", v.len());
    let mut touches = 0u64;
    let mut lo = 0usize;
    let mut hi = v.len();
    loop {
        let len = hi - lo;
        if len <= 10 {
            insertion_sort(&mut v[lo..hi], &mut touches);
            return touches;
        }
        let pivot = median_of_medians(&mut v[lo..hi], &mut touches);
        let (lt, gt) = partition3(&mut v[lo..hi], pivot, &mut touches);
        let (lt, gt) = (lo + lt, lo + gt);
        if k < lt {
            hi = lt;
        } else if k >= gt {
            lo = gt;
        } else {
            return touches;
        }
    }
}

fn insertion_sort<T: Ord + Copy>(v: &mut [T], touches: &mut u64) {
    for i in 1..v.len() {
        let x = v[i];
        let mut j = i;
        while j > 0 && v[j - 1] > x {
            v[j] = v[j - 1];
            j -= 1;
            *touches += 2;
        }
        v[j] = x;
        *touches += 2;
    }
}

/// Median of the group medians, computed recursively. Groups of five are
/// sorted in place and their medians moved to the front of the slice.
fn median_of_medians<T: Ord + Copy>(v: &mut [T], touches: &mut u64) -> T {
    let groups = v.len().div_ceil(5);
    for g in 0..groups {
        let start = g * 5;
        let end = (start + 5).min(v.len());
        insertion_sort(&mut v[start..end], touches);
        let mid = start + (end - start - 1) / 2;
        v.swap(g, mid);
        *touches += 2;
    }
    let mid = (groups - 1) / 2;
    *touches += select_nth(&mut v[..groups], mid);
    v[mid]
}

/// Three-way partition around `pivot`; returns `(lt, gt)` such that
/// `v[..lt] < pivot`, `v[lt..gt] == pivot`, `v[gt..] > pivot`.
fn partition3<T: Ord + Copy>(v: &mut [T], pivot: T, touches: &mut u64) -> (usize, usize) {
    let mut lt = 0;
    let mut i = 0;
    let mut gt = v.len();
    while i < gt {
        *touches += 1;
        match v[i].cmp(&pivot) {
            std::cmp::Ordering::Less => {
                v.swap(lt, i);
                *touches += 2;
                lt += 1;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                gt -= 1;
                v.swap(i, gt);
                *touches += 2;
            }
            std::cmp::Ordering::Equal => i += 1,
        }
    }
    (lt, gt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_cases() {
        let mut v = [5, 1, 4, 2, 3];
        select_nth(&mut v, 2);
        assert_eq!(v[2], 3);
        let mut one = [7];
        select_nth(&mut one, 0);
        assert_eq!(one[0], 7);
    }

    #[test]
    fn linear_touches() {
        let mut v: Vec<u64> = (0..10_000u64).map(|i| (i * 7919) % 10_007).collect();
        let t = select_nth(&mut v, 5000);
        assert!(t < 60 * 10_000, "touches {t}");
    }

    proptest! {
        #[test]
        fn matches_sort(mut v in proptest::collection::vec(0u32..50, 1..300), k in 0usize..300) {
            let k = k % v.len();
            let mut sorted = v.clone();
            sorted.sort();
            select_nth(&mut v, k);
            prop_assert_eq!(v[k], sorted[k]);
            prop_assert!(v[..k].iter().all(|&x| x <= v[k]));
            prop_assert!(v[k + 1..].iter().all(|&x| x >= v[k]));
        }
    }
}
