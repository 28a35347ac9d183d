//! Squaring-trick computation of the direction of A^p·1.
//!
//! A^p is assembled by binary exponentiation over the chain A², A⁴, …,
//! A^(2^⌊log p⌋), rescaling after every matrix product (only the direction
//! matters). Exactly ⌊log₂ p⌋ squarings and popcount(p)−1 combining
//! multiplies.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Result of [`power_by_squaring`]: the unit-L2 direction of A^p·1 plus the
/// matrix-multiplication counts.
#[derive(Debug, Clone)]
pub struct PowerVector {
    pub vector: Vec<f64>,
    pub squarings: usize,
    pub multiplies: usize,
}

struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn from_graph(graph: &Graph) -> Self {
        let n = graph.num_vertices();
        let mut data = vec![0.0; n * n];
        for &(i, j) in graph.arcs() {
            data[i * n + j] = 1.0;
        }
        Dense { n, data }
    }

    fn mul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Dense { n, data: out }
    }

    fn rescale(&mut self) {
        let max = self.data.iter().cloned().fold(0.0, f64::max);
        if max > 0.0 {
            for x in &mut self.data {
                *x /= max;
            }
        }
    }

    fn apply_ones(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().sum())
            .collect()
    }
}

fn unit_l2(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    for x in &mut v {
        *x /= norm;
    }
    Some(v)
}

/// Unit-L2 vector proportional to A^p·1 on a symmetric graph.
pub fn power_by_squaring(graph: &Graph, p: usize) -> Result<PowerVector> {
    if !graph.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = graph.num_vertices();
    if n == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if p == 0 {
        return Ok(PowerVector {
            vector: vec![1.0 / (n as f64).sqrt(); n],
            squarings: 0,
            multiplies: 0,
        });
    }
    let mut cur = Dense::from_graph(graph);
    let mut acc: Option<Dense> = None;
    let mut squarings = 0;
    let mut multiplies = 0;
    let mut bit = 0;
    loop {
        if (p >> bit) & 1 == 1 {
            acc = Some(match acc {
                None => Dense {
                    n,
                    data: cur.data.clone(),
                },
                Some(a) => {
                    multiplies += 1;
                    let mut prod = a.mul(&cur);
                    prod.rescale();
                    prod
                }
            });
        }
        if p >> (bit + 1) == 0 {
            break;
        }
        let mut sq = cur.mul(&cur);
        sq.rescale();
        cur = sq;
        squarings += 1;
        bit += 1;
    }
    let acc = acc.expect("p ≥ 1 sets at least one bit");
    let vector = unit_l2(acc.apply_ones()).ok_or(Error::DegenerateScoreVector { step: p })?;
    Ok(PowerVector {
        vector,
        squarings,
        multiplies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{pebble_run, EngineCaps};
    use crate::gamma::{build_gamma_bar, GammaLayout};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * y.abs().max(1e-300), "{x} vs {y}");
        }
    }

    #[test]
    fn p1_is_degree_direction() {
        let g = Graph::undirected(3, vec![(0, 1), (0, 2)], None).unwrap();
        let pv = power_by_squaring(&g, 1).unwrap();
        let degs: Vec<f64> = (0..3).map(|v| g.degree(v) as f64).collect();
        let expected = unit_l2(degs).unwrap();
        assert_close(&pv.vector, &expected, 1e-15);
        assert_eq!((pv.squarings, pv.multiplies), (0, 0));
    }

    #[test]
    fn bar_3_3_p3_matches_exact_counts() {
        let g = build_gamma_bar(3, 3).unwrap();
        let l = GammaLayout::bar(3, 3);
        let pv = power_by_squaring(&g, 3).unwrap();
        // counts at t=3: v_2=12, v_3=30, v_4=16
        let r = pv.vector[l.bar_v(2)] / pv.vector[l.bar_v(4)];
        assert!((r - 12.0 / 16.0).abs() < 1e-12);
        let r = pv.vector[l.bar_v(3)] / pv.vector[l.bar_v(4)];
        assert!((r - 30.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn path_p4_matches_pebbles() {
        let g = Graph::undirected(3, vec![(0, 1), (1, 2)], None).unwrap();
        let pv = power_by_squaring(&g, 4).unwrap();
        let exact = pebble_run(&g, 4, &EngineCaps::default()).unwrap();
        assert_close(&pv.vector, &exact.normalized_row(4), 1e-12);
    }

    #[test]
    fn multiplication_counts() {
        let g = Graph::undirected(3, vec![(0, 1), (1, 2)], None).unwrap();
        for (p, sq, mu) in [(1, 0, 0), (2, 1, 0), (3, 1, 1), (8, 3, 0), (1000, 9, 5)] {
            let pv = power_by_squaring(&g, p).unwrap();
            assert_eq!((pv.squarings, pv.multiplies), (sq, mu), "p={p}");
            assert!(pv.squarings <= p.ilog2() as usize);
            assert!(pv.multiplies <= p.ilog2() as usize);
        }
    }

    #[test]
    fn rejects_directed() {
        let g = Graph::directed(2, vec![(0, 1)], None).unwrap();
        assert!(matches!(power_by_squaring(&g, 2), Err(Error::NotSymmetric)));
    }

    #[test]
    fn p0_uniform() {
        let g = Graph::undirected(4, vec![(0, 1), (2, 3)], None).unwrap();
        let pv = power_by_squaring(&g, 0).unwrap();
        for &x in &pv.vector {
            assert!((x - 0.5).abs() < 1e-15);
        }
    }
}
