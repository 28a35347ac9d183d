//! The adversarial family Γ_{h,k,n}: a subgraph Γ̄_{m,n} (chain of 2n+1
//! vertices whose two ends both attach to m hub vertices) plus ℓ isomorphic
//! copies with the chain's center vertex deleted.
//!
//! Vertex numbering is fixed: Γ̄ occupies indices `0..=2n+m` in label order
//! v_{−n}…v_{n+m}, then the copies follow consecutively, each in order
//! u_{−n}…u_{−1}, u_1…u_{n+m}. The numbering is part of the format so that
//! traces are comparable across runs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Validated generator parameters with derived quantities.
///
/// `m = h−3` hubs per component, `ell = ⌈(k−h+1)/m⌉` copies, and total vertex
/// count `N = ⌈(k−2)/m⌉(2n+m)+1`, which always equals
/// `(2n+m+1) + ell·(2n+m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GammaParams {
    pub h: u64,
    pub k: u64,
    pub n: u64,
    pub m: u64,
    pub ell: u64,
    pub num_vertices: u64,
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Checks `k > h > 5`, `n` odd, `n ≥ max(3, (k−h+2)/2)` and derives the rest.
/// The error names the first failed constraint.
pub fn validate_params(h: i64, k: i64, n: i64) -> Result<GammaParams> {
    if k <= h {
        return Err(Error::ConstraintViolation { name: "k > h" });
    }
    if h <= 5 {
        return Err(Error::ConstraintViolation { name: "h > 5" });
    }
    if n.rem_euclid(2) != 1 {
        return Err(Error::ConstraintViolation { name: "n odd" });
    }
    if n < 3 {
        return Err(Error::ConstraintViolation { name: "n ≥ 3" });
    }
    // n ≥ (k−h+2)/2 compared exactly as 2n ≥ k−h+2.
    if 2 * n < k - h + 2 {
        return Err(Error::ConstraintViolation {
            name: "n ≥ (k−h+2)/2",
        });
    }
    let (h, k, n) = (h as u64, k as u64, n as u64);
    let m = h - 3;
    let ell = ceil_div(k - h + 1, m);
    let num_vertices = ceil_div(k - 2, m) * (2 * n + m) + 1;
    let params = GammaParams {
        h,
        k,
        n,
        m,
        ell,
        num_vertices,
    };
    debug_assert_eq!(params.vertex_count_components(), num_vertices);
    debug_assert!(ell * m > k - h); // ℓm ≥ k−h+1: enough copy hubs to spoil the top k
    Ok(params)
}

impl GammaParams {
    /// `⌈(k−2)/(h−3)⌉(2n+h−3)+1`.
    pub fn vertex_count_theorem(&self) -> u64 {
        ceil_div(self.k - 2, self.m) * (2 * self.n + self.m) + 1
    }

    /// `(2n+m+1) + ell·(2n+m)`.
    pub fn vertex_count_components(&self) -> u64 {
        (2 * self.n + self.m + 1) + self.ell * (2 * self.n + self.m)
    }

    pub fn layout(&self) -> GammaLayout {
        GammaLayout {
            m: self.m as usize,
            n: self.n as usize,
            ell: self.ell as usize,
        }
    }
}

/// Index arithmetic for the fixed Γ vertex numbering. `ell = 0` describes a
/// bare Γ̄_{m,n}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GammaLayout {
    pub m: usize,
    pub n: usize,
    pub ell: usize,
}

impl GammaLayout {
    pub fn bar(m: usize, n: usize) -> Self {
        GammaLayout { m, n, ell: 0 }
    }

    /// Vertices in Γ̄: `2n+m+1`.
    pub fn bar_len(&self) -> usize {
        2 * self.n + self.m + 1
    }

    /// Vertices per copy: `2n+m`.
    pub fn copy_len(&self) -> usize {
        2 * self.n + self.m
    }

    pub fn total(&self) -> usize {
        self.bar_len() + self.ell * self.copy_len()
    }

    /// Index of v_i, i ∈ [−n, n+m].
    pub fn bar_v(&self, i: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(-n <= i && i <= n + self.m as i64);
        (i + n) as usize
    }

    /// Index of u_i in copy `c` (1-based), i ∈ [−n, n+m], i ≠ 0.
    pub fn copy_u(&self, c: usize, i: i64) -> usize {
        let n = self.n as i64;
        debug_assert!(1 <= c && c <= self.ell);
        debug_assert!(i != 0 && -n <= i && i <= n + self.m as i64);
        let offset = if i < 0 { i + n } else { n + i - 1 } as usize;
        self.bar_len() + (c - 1) * self.copy_len() + offset
    }

    /// True when index `v` belongs to Γ̄.
    pub fn in_bar(&self, v: usize) -> bool {
        v < self.bar_len()
    }

    /// Distance from v_0 to v_i within Γ̄ (chain hops; hubs sit at n+1).
    pub fn dist_from_center(&self, i: i64) -> usize {
        let n = self.n as i64;
        if i.unsigned_abs() as usize <= self.n {
            i.unsigned_abs() as usize
        } else {
            debug_assert!(i > n);
            self.n + 1
        }
    }
}

/// A generated Γ_{h,k,n} with its parameters and role-label index.
#[derive(Debug, Clone)]
pub struct GammaGraph {
    graph: Graph,
    params: GammaParams,
    role_index: BTreeMap<String, usize>,
}

impl GammaGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn params(&self) -> &GammaParams {
        &self.params
    }

    pub fn layout(&self) -> GammaLayout {
        self.params.layout()
    }

    pub fn role_index(&self) -> &BTreeMap<String, usize> {
        &self.role_index
    }

    pub fn bar_v(&self, i: i64) -> usize {
        self.layout().bar_v(i)
    }

    pub fn copy_u(&self, c: usize, i: i64) -> usize {
        self.layout().copy_u(c, i)
    }
}

fn bar_label(i: i64) -> String {
    format!("bar:v:{i}")
}

fn copy_label(c: usize, i: i64) -> String {
    format!("copy{c}:u:{i}")
}

/// Edges of the Γ̄ pattern over signed vertex ids, optionally with v_0 removed.
fn pattern_edges(m: usize, n: usize, skip_center: bool) -> Vec<(i64, i64)> {
    let n_i = n as i64;
    let mut edges = Vec::new();
    for i in (-n_i + 1)..=n_i {
        if skip_center && (i == 0 || i - 1 == 0) {
            continue;
        }
        edges.push((i - 1, i));
    }
    for j in 1..=m as i64 {
        edges.push((-n_i, n_i + j));
        edges.push((n_i, n_i + j));
    }
    edges
}

/// Builds Γ̄_{m,n}: a 2n+1 chain v_{−n}…v_n whose ends v_{±n} each attach to
/// all m hubs v_{n+1}…v_{n+m}. 2n+m+1 vertices, 2n+2m edges.
pub fn build_gamma_bar(m: usize, n: usize) -> Result<Graph> {
    if m < 3 {
        return Err(Error::InvalidParameter(format!("m = {m}, need m ≥ 3")));
    }
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("n = {n}, need odd n ≥ 3")));
    }
    let layout = GammaLayout::bar(m, n);
    let labels = (-(n as i64)..=(n + m) as i64).map(bar_label).collect();
    let edges = pattern_edges(m, n, false)
        .into_iter()
        .map(|(a, b)| (layout.bar_v(a), layout.bar_v(b)))
        .collect();
    Graph::undirected(layout.bar_len(), edges, Some(labels))
}

/// Builds the full Γ_{h,k,n}: Γ̄ followed by `ell` center-deleted copies, with
/// no arcs between components.
pub fn build_gamma(params: &GammaParams) -> GammaGraph {
    let layout = params.layout();
    let n_i = layout.n as i64;
    let m_i = layout.m as i64;

    let mut labels = Vec::with_capacity(layout.total());
    for i in -n_i..=(n_i + m_i) {
        labels.push(bar_label(i));
    }
    for c in 1..=layout.ell {
        for i in -n_i..=(n_i + m_i) {
            if i != 0 {
                labels.push(copy_label(c, i));
            }
        }
    }

    let mut edges = Vec::new();
    for (a, b) in pattern_edges(layout.m, layout.n, false) {
        edges.push((layout.bar_v(a), layout.bar_v(b)));
    }
    for c in 1..=layout.ell {
        for (a, b) in pattern_edges(layout.m, layout.n, true) {
            edges.push((layout.copy_u(c, a), layout.copy_u(c, b)));
        }
    }

    let graph = Graph::undirected(layout.total(), edges, Some(labels))
        .expect("validated params produce a well-formed graph");
    let role_index = graph
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), i))
        .collect();
    GammaGraph {
        graph,
        params: *params,
        role_index,
    }
}

/// Canonical role labels for Γ_{h,k,n}, in index order. Used to recognize a
/// generated graph when loading from disk.
pub fn canonical_labels(params: &GammaParams) -> Vec<String> {
    build_gamma(params).graph.labels().to_vec()
}
