//! Per-component dominant eigenvectors by power iteration.
//!
//! Iteration runs on A² (one authority plus one hub half-step), which is the
//! HITS operator AᵀA on a symmetric graph; this sidesteps the ±λ sign
//! oscillation of bipartite components. From the all-ones start the iterate
//! converges to the hub-parity limit direction, and the Rayleigh value
//! ‖A·x‖₂ recovers the component's Perron eigenvalue.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Relative eigenvalue separation below which dominance between components is
/// reported as ambiguous rather than decided numerically.
pub const AMBIGUITY_REL_TOL: f64 = 1e-9;

const MAX_POWER_ITERATIONS: usize = 500_000;

/// Dominant eigenpair of one connected component. `vector` is global-length,
/// zero off the component, unit L2 on it.
#[derive(Debug, Clone)]
pub struct ComponentEigen {
    pub vertices: Vec<usize>,
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
}

/// All component eigenpairs plus the winning component's limit vector.
#[derive(Debug, Clone)]
pub struct LimitSpectrum {
    pub components: Vec<ComponentEigen>,
    pub winner: usize,
    pub limit: Vec<f64>,
}

fn component_eigen(graph: &Graph, vertices: &[usize], tol: f64) -> Result<ComponentEigen> {
    let n = graph.num_vertices();
    let size = vertices.len();
    let mut global = vec![0.0; n];
    if size == 1 {
        global[vertices[0]] = 1.0;
        return Ok(ComponentEigen {
            vertices: vertices.to_vec(),
            eigenvalue: 0.0,
            vector: global,
        });
    }
    // local adjacency, ascending order preserved so symmetric ties stay exact
    let mut local_of = vec![usize::MAX; n];
    for (li, &v) in vertices.iter().enumerate() {
        local_of[v] = li;
    }
    let adj: Vec<Vec<usize>> = vertices
        .iter()
        .map(|&v| {
            graph
                .out_neighbors(v)
                .iter()
                .map(|&u| local_of[u])
                .collect()
        })
        .collect();

    let apply = |x: &[f64]| -> Vec<f64> {
        adj.iter()
            .map(|nbrs| nbrs.iter().map(|&u| x[u]).sum())
            .collect()
    };
    let normalize = |mut v: Vec<f64>| -> Option<Vec<f64>> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        for x in &mut v {
            *x /= norm;
        }
        Some(v)
    };

    let mut x = vec![1.0 / (size as f64).sqrt(); size];
    let mut iterations = 0;
    loop {
        let y = apply(&apply(&x));
        let y = normalize(y).ok_or(Error::DegenerateScoreVector { step: iterations })?;
        let diff = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = y;
        iterations += 1;
        if diff <= tol {
            break;
        }
        if iterations >= MAX_POWER_ITERATIONS {
            return Err(Error::EigenIterationLimit { iterations });
        }
    }
    let eigenvalue = apply(&x).iter().map(|v| v * v).sum::<f64>().sqrt();
    for (li, &v) in vertices.iter().enumerate() {
        global[v] = x[li];
    }
    Ok(ComponentEigen {
        vertices: vertices.to_vec(),
        eigenvalue,
        vector: global,
    })
}

/// Dominant eigenpair of every connected component. Symmetric graphs only.
pub fn component_spectra(graph: &Graph, tol: f64) -> Result<Vec<ComponentEigen>> {
    if !graph.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be > 0".into()));
    }
    graph
        .connected_components()
        .iter()
        .map(|c| component_eigen(graph, c, tol))
        .collect()
}

fn build_limit(components: &[ComponentEigen], winner: usize, n: usize) -> Vec<f64> {
    let mut limit = vec![0.0; n];
    for &v in &components[winner].vertices {
        limit[v] = components[winner].vector[v];
    }
    limit
}

/// Per-component eigenpairs plus the global limit vector: the strictly
/// dominant component keeps its eigenvector, everything else is 0.
///
/// Errors with [`Error::AmbiguousDominance`] when the top two component
/// eigenvalues are within [`AMBIGUITY_REL_TOL`] relative — the caller must
/// decide (for Γ graphs Γ̄ wins structurally; see [`gamma_limit_vector`]).
pub fn dominant_eigenvector_per_component(graph: &Graph, tol: f64) -> Result<LimitSpectrum> {
    let components = component_spectra(graph, tol)?;
    let winner = pick_winner(&components)?;
    let limit = build_limit(&components, winner, graph.num_vertices());
    Ok(LimitSpectrum {
        components,
        winner,
        limit,
    })
}

fn pick_winner(components: &[ComponentEigen]) -> Result<usize> {
    let winner = components
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.eigenvalue.total_cmp(&b.1.eigenvalue))
        .map(|(i, _)| i)
        .expect("at least one component");
    if components.len() > 1 {
        let top = components[winner].eigenvalue;
        let second = components
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != winner)
            .map(|(_, c)| c.eigenvalue)
            .fold(f64::NEG_INFINITY, f64::max);
        if top == 0.0 || (top - second) / top < AMBIGUITY_REL_TOL {
            return Err(Error::AmbiguousDominance {
                top,
                second,
                rel_tol: AMBIGUITY_REL_TOL,
            });
        }
    }
    Ok(winner)
}

/// Limit vector for a Γ graph: Γ̄ strictly contains each copy as a connected
/// proper subgraph, so its Perron eigenvalue is strictly larger even when the
/// numerical estimates tie. The component holding vertex 0 (Γ̄) wins.
pub fn gamma_limit_vector(graph: &Graph, bar_len: usize, tol: f64) -> Result<LimitSpectrum> {
    let components = component_spectra(graph, tol)?;
    let winner = components
        .iter()
        .position(|c| c.vertices.contains(&0))
        .ok_or_else(|| Error::NotGammaGraph("no component contains vertex 0".into()))?;
    if components[winner].vertices.len() != bar_len {
        return Err(Error::NotGammaGraph(format!(
            "component of vertex 0 has {} vertices, Γ̄ needs {bar_len}",
            components[winner].vertices.len()
        )));
    }
    let limit = build_limit(&components, winner, graph.num_vertices());
    Ok(LimitSpectrum {
        components,
        winner,
        limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::{build_gamma, validate_params};

    #[test]
    fn single_edge_eigenpair() {
        let g = Graph::undirected(2, vec![(0, 1)], None).unwrap();
        let s = dominant_eigenvector_per_component(&g, 1e-12).unwrap();
        assert!((s.components[0].eigenvalue - 1.0).abs() < 1e-12);
        for &x in &s.limit {
            assert!((x - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_disjoint_edges_ambiguous() {
        let g = Graph::undirected(4, vec![(0, 1), (2, 3)], None).unwrap();
        let err = dominant_eigenvector_per_component(&g, 1e-12).unwrap_err();
        assert!(matches!(err, Error::AmbiguousDominance { .. }));
    }

    #[test]
    fn gamma_8_13_7_bar_wins_numerically() {
        let p = validate_params(8, 13, 7).unwrap();
        let g = build_gamma(&p);
        let s = dominant_eigenvector_per_component(g.graph(), 1e-12).unwrap();
        // winning component is Γ̄ = indices 0..=19
        assert_eq!(s.components[s.winner].vertices, (0..20).collect::<Vec<_>>());
        assert!(s.limit[20..].iter().all(|&x| x == 0.0));
        assert!(s.limit[..20].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn gamma_8_13_15_needs_structural_resolution() {
        let p = validate_params(8, 13, 15).unwrap();
        let g = build_gamma(&p);
        let err = dominant_eigenvector_per_component(g.graph(), 1e-12).unwrap_err();
        assert!(matches!(err, Error::AmbiguousDominance { .. }));
        let bar_len = g.layout().bar_len();
        let s = gamma_limit_vector(g.graph(), bar_len, 1e-12).unwrap();
        assert_eq!(s.components[s.winner].vertices.len(), bar_len);
        assert!(s.limit[bar_len..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn directed_rejected() {
        let g = Graph::directed(2, vec![(0, 1)], None).unwrap();
        assert!(matches!(
            component_spectra(&g, 1e-12),
            Err(Error::NotSymmetric)
        ));
    }
}
