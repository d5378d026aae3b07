//! All-pairs shortest paths by Floyd–Warshall, reorganised so that every
//! slow-memory cell is written once.
//!
//! `A(i, k)` is the shortest `i -> k` distance through vertices `< k`, and
//! `B(k, j)` the shortest `k -> j` distance through vertices `< k`. Both are
//! filled in increasing `k`, each as a min accumulated in a register, and the
//! final distances come from `D(i, j) = min(w(i, j), min_k A(i, k) + B(k, j))`.

use crate::costmodel::{sat_add, CostMeter, CostParams, MeterSnapshot, SlowArray, Word, INF};
use crate::error::Result;
use crate::graph::Graph;

#[derive(Clone, Debug)]
pub struct ApspTables {
    pub n: usize,
    pub a: Vec<Word>,
    pub b: Vec<Word>,
    pub d: Vec<Word>,
}

impl ApspTables {
    pub fn dist(&self, i: usize, j: usize) -> Word {
        self.d[i * self.n + j]
    }
}

/// Dense weight matrix: smallest parallel arc, 0 on the diagonal.
pub fn weight_matrix(g: &Graph) -> Vec<Word> {
    let n = g.n();
    let mut w = vec![INF; n * n];
    for i in 0..n {
        w[i * n + i] = 0;
    }
    for (u, v, x) in g.arcs() {
        let c = &mut w[u * n + v];
        *c = (*c).min(x);
    }
    w
}

pub fn apsp_metered(g: &Graph, meter: &CostMeter) -> Result<ApspTables> {
    let n = g.n();
    let _regs = meter.alloc_fast("apsp::registers", 8)?;
    let w = SlowArray::from_setup(meter, weight_matrix(g));
    let mut a = SlowArray::uninit(meter, n * n);
    let mut b = SlowArray::uninit(meter, n * n);
    let mut d = SlowArray::uninit(meter, n * n);
    for k in 0..n {
        for i in 0..n {
            let mut acc = w.read(i * n + k);
            for kp in 0..k {
                acc = acc.min(sat_add(a.read(i * n + kp), b.read(kp * n + k)));
            }
            meter.fast(2 * k as u64 + 1);
            a.write(i * n + k, acc);
        }
        for j in 0..n {
            let mut acc = w.read(k * n + j);
            for kp in 0..k {
                acc = acc.min(sat_add(a.read(k * n + kp), b.read(kp * n + j)));
            }
            meter.fast(2 * k as u64 + 1);
            b.write(k * n + j, acc);
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut acc = if i == j { 0 } else { w.read(i * n + j) };
            for k in 0..n {
                acc = acc.min(sat_add(a.read(i * n + k), b.read(k * n + j)));
            }
            meter.fast(2 * n as u64 + 1);
            d.write(i * n + j, acc);
        }
    }
    Ok(ApspTables {
        n,
        a: a.into_inner(),
        b: b.into_inner(),
        d: d.into_inner(),
    })
}

pub fn apsp(g: &Graph, params: CostParams) -> Result<(ApspTables, MeterSnapshot)> {
    let meter = CostMeter::new(params);
    let t = apsp_metered(g, &meter)?;
    Ok((t, meter.snapshot()))
}

/// Textbook triple loop on a slow matrix, writing every relaxation.
pub fn apsp_naive_metered(g: &Graph, meter: &CostMeter) -> Result<Vec<Word>> {
    let n = g.n();
    let _regs = meter.alloc_fast("apsp::registers", 8)?;
    let w = weight_matrix(g);
    let mut d = SlowArray::uninit(meter, n * n);
    for (x, &v) in w.iter().enumerate() {
        d.write(x, v);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d.read(i * n + k);
            for j in 0..n {
                let v = d.read(i * n + j).min(sat_add(dik, d.read(k * n + j)));
                d.write(i * n + j, v);
            }
            meter.fast(2 * n as u64);
        }
    }
    Ok(d.into_inner())
}

pub fn oracle_apsp(g: &Graph) -> Vec<Word> {
    let n = g.n();
    let mut d = weight_matrix(g);
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == INF {
                continue;
            }
            for j in 0..n {
                let v = sat_add(dik, d[k * n + j]);
                if v < d[i * n + j] {
                    d[i * n + j] = v;
                }
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_random;

    fn p() -> CostParams {
        CostParams::new(64, 16).unwrap()
    }

    #[test]
    fn tiny() {
        let g = Graph::from_arcs(3, &[(0, 1, 2), (1, 2, 3), (0, 2, 10)]).unwrap();
        let (t, _) = apsp(&g, p()).unwrap();
        assert_eq!(t.dist(0, 2), 5);
        assert_eq!(t.dist(2, 0), INF);
        assert_eq!(t.d, oracle_apsp(&g));
        let one = Graph::from_arcs(1, &[]).unwrap();
        assert_eq!(apsp(&one, p()).unwrap().0.d, vec![0]);
    }

    #[test]
    fn random_graphs_match_and_write_once() {
        for seed in 0..10 {
            let g = gen_random(40, 200, 50, seed).unwrap();
            let meter = CostMeter::new(p());
            let t = apsp_metered(&g, &meter).unwrap();
            assert_eq!(t.d, oracle_apsp(&g));
            assert_eq!(meter.slow_writes(), 3 * 40 * 40);
            let n = 40;
            for i in 0..n {
                assert_eq!(t.dist(i, i), 0);
                for j in 0..n {
                    for k in 0..n {
                        assert!(t.dist(i, j) <= sat_add(t.dist(i, k), t.dist(k, j)));
                    }
                }
            }
            for (u, v, w) in g.arcs() {
                assert!(t.dist(u, v) <= w);
            }
            let naive = CostMeter::new(p());
            assert_eq!(apsp_naive_metered(&g, &naive).unwrap(), t.d);
        }
    }
}
