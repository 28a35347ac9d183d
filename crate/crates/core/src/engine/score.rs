//! Floating-point HITS iteration with L2 normalization per half-step.
//!
//! Summation order is fixed (ascending neighbor index) so runs are bitwise
//! reproducible and structurally equal vertices stay exactly tied.

use std::fmt::Write as _;

use crate::engine::EngineCaps;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Unit-L2 score vectors per pebble timestep `0..=horizon`. Authority vectors
/// of HITS iteration `k` sit at `t = 2k−1`, hub vectors at `t = 2k`.
#[derive(Debug, Clone)]
pub struct ScoreTrace {
    rows: Vec<Vec<f64>>,
}

impl ScoreTrace {
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.rows[0].len()
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t]
    }

    /// Authority vector a^(k), k ≥ 1.
    pub fn authority(&self, k: usize) -> &[f64] {
        &self.rows[2 * k - 1]
    }

    /// Hub vector h^(k), k ≥ 1.
    pub fn hub(&self, k: usize) -> &[f64] {
        &self.rows[2 * k]
    }

    /// Long-format CSV: `t,vertex,label,count` with 17 significant digits.
    pub fn to_csv(&self, graph: &Graph) -> String {
        let mut s = String::from("t,vertex,label,count\n");
        for (t, row) in self.rows.iter().enumerate() {
            for (v, x) in row.iter().enumerate() {
                let _ = writeln!(s, "{t},{v},{},{:.16e}", graph.label(v), x);
            }
        }
        s
    }
}

/// Runs `steps` pebble timesteps of the normalized iteration, starting from
/// the all-ones direction.
pub fn float_run(graph: &Graph, steps: usize, caps: &EngineCaps) -> Result<ScoreTrace> {
    if graph.num_vertices() == 0 {
        return Err(Error::InvalidParameter("empty graph".into()));
    }
    if steps > caps.max_steps_float {
        return Err(Error::StepCapExceeded {
            requested: steps,
            cap: caps.max_steps_float,
        });
    }
    let n = graph.num_vertices();
    let init = 1.0 / (n as f64).sqrt();
    let mut rows = Vec::with_capacity(steps + 1);
    rows.push(vec![init; n]);
    for t in 1..=steps {
        let prev = &rows[t - 1];
        let mut next = vec![0.0; n];
        for (v, slot) in next.iter_mut().enumerate() {
            let neighbors = if t % 2 == 1 {
                graph.in_neighbors(v)
            } else {
                graph.out_neighbors(v)
            };
            for &u in neighbors {
                *slot += prev[u];
            }
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateScoreVector { step: t });
        }
        for x in &mut next {
            *x /= norm;
        }
        rows.push(next);
    }
    Ok(ScoreTrace { rows })
}

/// HITS per the update rules: `iterations` full iterations, two normalized
/// half-steps each.
pub fn hits_float_run(graph: &Graph, iterations: usize, caps: &EngineCaps) -> Result<ScoreTrace> {
    if iterations < 1 {
        return Err(Error::InvalidParameter("iterations must be ≥ 1".into()));
    }
    float_run(graph, 2 * iterations, caps)
}
