//! Exact pebble-process simulation.
//!
//! One pebble starts on every vertex. At odd timesteps each pebble on `v`
//! sires a pebble on every `u` with `v → u`; at even timesteps on every `u`
//! with `u → v` (the siring pebble is removed). On symmetric graphs both
//! parities are the plain neighbor sum, and the count on `v` at time `2k−1`
//! is the un-normalized HITS authority score of iteration `k`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bignum;
use crate::engine::EngineCaps;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Exact per-vertex pebble counts for timesteps `0..=horizon`.
#[derive(Debug, Clone)]
pub struct PebbleTrace {
    horizon: usize,
    num_vertices: usize,
    counts: Vec<Vec<BigUint>>,
}

impl PebbleTrace {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn count(&self, t: usize, v: usize) -> &BigUint {
        &self.counts[t][v]
    }

    pub fn row(&self, t: usize) -> &[BigUint] {
        &self.counts[t]
    }

    pub fn total(&self, t: usize) -> BigUint {
        self.counts[t].iter().sum()
    }

    /// Counts at `t` scaled to a unit-L2 f64 vector.
    pub fn normalized_row(&self, t: usize) -> Vec<f64> {
        bignum::normalized_unit_l2(&self.counts[t])
    }

    /// Long-format CSV: `t,vertex,label,count` with exact decimal counts.
    pub fn to_csv(&self, graph: &Graph) -> String {
        let mut s = String::from("t,vertex,label,count\n");
        for t in 0..=self.horizon {
            for v in 0..self.num_vertices {
                let _ = writeln!(s, "{t},{v},{},{}", graph.label(v), self.counts[t][v]);
            }
        }
        s
    }
}

fn decimal_digits(bits: u64) -> usize {
    // digits = ⌊bits·log10(2)⌋ + 1, an upper-accurate count for cap checks
    (bits as f64 * std::f64::consts::LOG10_2) as usize + 1
}

/// Runs the pebble process for `t_max` timesteps.
pub fn pebble_run(graph: &Graph, t_max: usize, caps: &EngineCaps) -> Result<PebbleTrace> {
    if graph.num_vertices() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if t_max > caps.max_steps_exact {
        return Err(Error::StepCapExceeded {
            requested: t_max,
            cap: caps.max_steps_exact,
        });
    }
    let n = graph.num_vertices();
    let mut counts = Vec::with_capacity(t_max + 1);
    counts.push(vec![BigUint::one(); n]);
    for t in 1..=t_max {
        let prev = &counts[t - 1];
        let mut next = vec![BigUint::zero(); n];
        for (v, slot) in next.iter_mut().enumerate() {
            // odd steps follow arcs forward (authority side), even steps back
            let neighbors = if t % 2 == 1 {
                graph.in_neighbors(v)
            } else {
                graph.out_neighbors(v)
            };
            for &u in neighbors {
                *slot += &prev[u];
            }
        }
        let max_bits = next.iter().map(BigUint::bits).max().unwrap_or(0);
        let digits = decimal_digits(max_bits);
        if digits > caps.max_digits {
            return Err(Error::DigitCapExceeded {
                step: t,
                digits,
                cap: caps.max_digits,
            });
        }
        counts.push(next);
    }
    Ok(PebbleTrace {
        horizon: t_max,
        num_vertices: n,
        counts,
    })
}
