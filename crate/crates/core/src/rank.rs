//! Rank-convergence measurement: weak top-k sets, limit rankings, and the
//! convergence step τ.
//!
//! The weak top-k set at step t is `T^t_k = {v_i : |{v_j : s_j > s_i}| < k}` —
//! every boundary tie is included, so `|T^t_k| ≥ min(k, N)`. An algorithm
//! converges on h of the top k ranks in τ steps when the suffix intersection
//! `∩_{t=τ}^∞ T^t_k` keeps at least h members; the infinite tail is
//! approximated by the run's horizon anchored to the eigenvector limit set.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::engine::{
    dominant_eigenvector_per_component, gamma_limit_vector, PebbleTrace, ScoreTrace,
};
use crate::error::{Error, Result};
use crate::gamma::GammaGraph;
use crate::graph::Graph;

/// Relative tolerance used to re-group ties when ranking a *numerical* limit
/// vector. Exact structural ties (mirror pairs, hubs) survive the float
/// eigensolver only up to its resolution, so distinctions below this level
/// are treated as ties. Per-step scores from the engines are ranked strictly.
pub const LIMIT_TIE_REL_TOL: f64 = 1e-9;

/// Which score snapshot a top-k set was taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Snapshot {
    Step(usize),
    Limit,
}

/// A weak top-k set: `k`, the member indices, and the snapshot it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopKSet {
    pub k: usize,
    pub members: BTreeSet<usize>,
    pub snapshot: Option<Snapshot>,
}

impl TopKSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.contains(&v)
    }

    pub fn overlap(&self, other: &BTreeSet<usize>) -> usize {
        self.members.intersection(other).count()
    }
}

fn check_top_k_args<T>(scores: &[T], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be ≥ 1".into()));
    }
    if scores.is_empty() {
        return Err(Error::InvalidParameter("empty score vector".into()));
    }
    Ok(())
}

/// `T_k = {i : |{j : s_j > s_i}| < k}`, computed via the k-th largest score:
/// `i` is in exactly when `s_i ≥` that threshold.
pub fn weak_top_k<T: PartialOrd>(scores: &[T], k: usize) -> Result<TopKSet> {
    check_top_k_args(scores, k)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("scores must be totally ordered")
    });
    let threshold = &scores[order[k.min(scores.len()) - 1]];
    let members = (0..scores.len())
        .filter(|&i| scores[i] >= *threshold)
        .collect();
    Ok(TopKSet {
        k,
        members,
        snapshot: None,
    })
}

/// Weak top-k over float scores with near-ties (within `rel_tol` of the
/// boundary score) counted as ties. Used for numerical limit vectors.
pub fn weak_top_k_with_tol(scores: &[f64], k: usize, rel_tol: f64) -> Result<TopKSet> {
    check_top_k_args(scores, k)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let threshold = scores[order[k.min(scores.len()) - 1]];
    let cut = threshold - rel_tol * threshold.abs();
    let members = (0..scores.len()).filter(|&i| scores[i] >= cut).collect();
    Ok(TopKSet {
        k,
        members,
        snapshot: None,
    })
}

/// Relative score gap across the k-boundary, 0.0 when fewer than k+1 scores.
/// Strict float top-k sets are only trustworthy when this gap is comfortably
/// above the engine's accumulation error (~1e−6).
pub fn k_boundary_relative_gap(scores: &[f64], k: usize) -> f64 {
    if k >= scores.len() {
        return 0.0;
    }
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let hi = sorted[k - 1];
    let lo = sorted[k];
    if hi == 0.0 {
        0.0
    } else {
        (hi - lo) / hi.abs()
    }
}

/// Anything that yields a ranked score row per pebble timestep.
pub trait ScoreSeries {
    fn horizon(&self) -> usize;
    fn top_k(&self, t: usize, k: usize) -> Result<TopKSet>;
}

impl ScoreSeries for PebbleTrace {
    fn horizon(&self) -> usize {
        self.horizon()
    }

    fn top_k(&self, t: usize, k: usize) -> Result<TopKSet> {
        let mut set = weak_top_k(self.row(t), k)?;
        set.snapshot = Some(Snapshot::Step(t));
        Ok(set)
    }
}

impl ScoreSeries for ScoreTrace {
    fn horizon(&self) -> usize {
        self.horizon()
    }

    fn top_k(&self, t: usize, k: usize) -> Result<TopKSet> {
        let mut set = weak_top_k(self.row(t), k)?;
        set.snapshot = Some(Snapshot::Step(t));
        Ok(set)
    }
}

/// Weak top-k of the limit score vector (per-component dominant eigenvectors,
/// strictly dominant component wins). Propagates `AmbiguousDominance`.
pub fn limit_top_k(graph: &Graph, k: usize, tol: f64) -> Result<TopKSet> {
    let spectrum = dominant_eigenvector_per_component(graph, tol)?;
    let mut set = weak_top_k_with_tol(&spectrum.limit, k, LIMIT_TIE_REL_TOL)?;
    set.snapshot = Some(Snapshot::Limit);
    Ok(set)
}

/// Limit top-k for a Γ graph, with dominance resolved structurally (Γ̄ wins).
/// Asserts the spec'd localization: every member lies in Γ̄'s index range.
pub fn limit_top_k_gamma(gamma: &GammaGraph, k: usize, tol: f64) -> Result<TopKSet> {
    let layout = gamma.layout();
    let spectrum = gamma_limit_vector(gamma.graph(), layout.bar_len(), tol)?;
    let mut set = weak_top_k_with_tol(&spectrum.limit, k, LIMIT_TIE_REL_TOL)?;
    set.snapshot = Some(Snapshot::Limit);
    if let Some(&out) = set.members.iter().find(|&&v| !layout.in_bar(v)) {
        return Err(Error::NotGammaGraph(format!(
            "limit top-{k} contains vertex {out} outside Γ̄"
        )));
    }
    Ok(set)
}

/// Result of a convergence-τ measurement.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub k: usize,
    pub h: usize,
    /// Minimal τ with `|∩_{t=τ}^{horizon} T^t_k ∩ limit| ≥ h`; `None` when the
    /// target is unreachable (h exceeds the limit set).
    pub tau: Option<usize>,
    pub horizon: usize,
    /// The infinite intersection tail is approximated by `[τ, horizon]`
    /// anchored to the limit set; always true.
    pub approximated: bool,
    /// Trailing steps over which the running intersection held ≥ h members.
    pub stable_window: Option<usize>,
    pub limit_set: TopKSet,
    /// `|T^t_k ∩ limit|` for t = 0..=horizon.
    pub overlap: Vec<usize>,
}

/// Per-step overlap `|T^t_k ∩ reference|` for t = 0..=horizon.
pub fn overlap_series<S: ScoreSeries>(
    series: &S,
    k: usize,
    reference: &TopKSet,
) -> Result<Vec<usize>> {
    (0..=series.horizon())
        .map(|t| Ok(series.top_k(t, k)?.overlap(&reference.members)))
        .collect()
}

/// Measures τ per the definition, horizon-approximated: walks the suffix
/// running intersection backwards from the horizon and returns the minimal τ
/// whose intersection (also intersected with the limit set) keeps ≥ h members.
///
/// Errors with `HorizonTooShort` when `|T^horizon_k ∩ limit| < h` — the run
/// has not entered its limit regime, so τ (if finite) exceeds the horizon.
pub fn convergence_tau<S: ScoreSeries>(
    series: &S,
    k: usize,
    h: usize,
    limit_set: &TopKSet,
) -> Result<ConvergenceReport> {
    if h > k {
        return Err(Error::InvalidParameter(format!("h = {h} > k = {k}")));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("h must be ≥ 1".into()));
    }
    let horizon = series.horizon();
    if horizon < 1 {
        return Err(Error::HorizonTooShort {
            what: "convergence measurement".into(),
            required: 1,
            available: horizon,
        });
    }
    let sets: Vec<TopKSet> = (0..=horizon)
        .map(|t| series.top_k(t, k))
        .collect::<Result<_>>()?;
    let overlap: Vec<usize> = sets.iter().map(|s| s.overlap(&limit_set.members)).collect();

    if h > limit_set.len() {
        // Unreachable target: caller-driven exploration, not an error.
        return Ok(ConvergenceReport {
            k,
            h,
            tau: None,
            horizon,
            approximated: true,
            stable_window: None,
            limit_set: limit_set.clone(),
            overlap,
        });
    }
    if overlap[horizon] < h {
        return Err(Error::HorizonTooShort {
            what: format!(
                "limit regime (|T^{horizon}_{k} ∩ limit| = {} < h = {h})",
                overlap[horizon]
            ),
            required: h,
            available: overlap[horizon],
        });
    }

    let mut suffix: BTreeSet<usize> = sets[horizon].members.clone();
    let mut tau = horizon;
    for t in (0..horizon).rev() {
        let candidate: BTreeSet<usize> = suffix.intersection(&sets[t].members).copied().collect();
        let anchored = candidate.intersection(&limit_set.members).count();
        if candidate.len() >= h && anchored >= h {
            suffix = candidate;
            tau = t;
        } else {
            break;
        }
    }
    Ok(ConvergenceReport {
        k,
        h,
        tau: Some(tau),
        horizon,
        approximated: true,
        stable_window: Some(horizon - tau + 1),
        limit_set: limit_set.clone(),
        overlap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{float_run, pebble_run, EngineCaps};
    use crate::gamma::{build_gamma, build_gamma_bar, validate_params, GammaLayout};
    use proptest::prelude::*;

    #[test]
    fn tie_at_top_included() {
        let set = weak_top_k(&[5, 5, 3, 2], 1).unwrap();
        assert_eq!(set.members, BTreeSet::from([0, 1]));
    }

    #[test]
    fn boundary_tie_included() {
        let set = weak_top_k(&[5, 4, 3, 3, 1], 3).unwrap();
        assert_eq!(set.members, BTreeSet::from([0, 1, 2, 3]));
    }

    #[test]
    fn all_equal_gives_full_set() {
        let set = weak_top_k(&[7, 7, 7], 2).unwrap();
        assert_eq!(set.len(), 3);
    }

    #[test]
    fn k_at_least_one() {
        assert!(weak_top_k(&[1, 2], 0).is_err());
        assert!(weak_top_k::<i32>(&[], 1).is_err());
    }

    #[test]
    fn limit_top_k_single_component_matches_eigenvector() {
        let g = Graph::undirected(2, vec![(0, 1)], None).unwrap();
        let set = limit_top_k(&g, 1, 1e-12).unwrap();
        assert_eq!(set.members, BTreeSet::from([0, 1])); // exact tie
    }

    #[test]
    fn bar_3_3_limit_top_1_contains_chain_ends() {
        // mirror symmetry forces the v_{±3} tie; for m=3, n=3 the hub tier
        // ties the ends exactly (counts agree at every even step), so the
        // weak top-1 is a superset of {v_3, v_{−3}}
        let g = build_gamma_bar(3, 3).unwrap();
        let l = GammaLayout::bar(3, 3);
        let set = limit_top_k(&g, 1, 1e-12).unwrap();
        assert!(set.contains(l.bar_v(3)));
        assert!(set.contains(l.bar_v(-3)));
        // cross-check against a long exact run at even parity
        let trace = pebble_run(&g, 40, &EngineCaps::default()).unwrap();
        let exact_set = weak_top_k(trace.row(40), 1).unwrap();
        assert_eq!(set.members, exact_set.members);
    }

    #[test]
    fn gamma_limit_top_k_localizes_to_bar() {
        let p = validate_params(8, 13, 7).unwrap();
        let g = build_gamma(&p);
        let set = limit_top_k_gamma(&g, 13, 1e-12).unwrap();
        assert!(set.members.iter().all(|&v| v < g.layout().bar_len()));
        assert!(set.len() >= 13);
    }

    #[test]
    fn constant_scores_tau_zero() {
        let g = Graph::undirected(3, vec![(0, 1), (1, 2), (0, 2)], None).unwrap();
        let trace = float_run(&g, 10, &EngineCaps::default()).unwrap();
        let limit = limit_top_k(&g, 1, 1e-12).unwrap();
        let report = convergence_tau(&trace, 1, 1, &limit).unwrap();
        assert_eq!(report.tau, Some(0));
        assert_eq!(report.stable_window, Some(11));
    }

    #[test]
    fn flip_at_t1_gives_tau_one() {
        struct TwoStep;
        impl ScoreSeries for TwoStep {
            fn horizon(&self) -> usize {
                2
            }
            fn top_k(&self, t: usize, k: usize) -> Result<TopKSet> {
                let scores = if t == 0 { [2.0, 1.0] } else { [1.0, 2.0] };
                let mut s = weak_top_k(&scores, k)?;
                s.snapshot = Some(Snapshot::Step(t));
                Ok(s)
            }
        }
        let limit = TopKSet {
            k: 1,
            members: BTreeSet::from([1]),
            snapshot: Some(Snapshot::Limit),
        };
        let report = convergence_tau(&TwoStep, 1, 1, &limit).unwrap();
        assert_eq!(report.tau, Some(1));
    }

    #[test]
    fn h_above_limit_size_reports_not_converged() {
        let g = Graph::undirected(3, vec![(0, 1), (1, 2), (0, 2)], None).unwrap();
        let trace = float_run(&g, 4, &EngineCaps::default()).unwrap();
        let limit = TopKSet {
            k: 3,
            members: BTreeSet::from([0]),
            snapshot: Some(Snapshot::Limit),
        };
        let report = convergence_tau(&trace, 3, 2, &limit).unwrap();
        assert_eq!(report.tau, None);
    }

    #[test]
    fn exact_and_float_top_k_agree_when_gap_is_wide() {
        let g = build_gamma_bar(5, 7).unwrap();
        let caps = EngineCaps::default();
        let exact = pebble_run(&g, 40, &caps).unwrap();
        let float = float_run(&g, 40, &caps).unwrap();
        for t in 1..=40 {
            for k in 1..=g.num_vertices() {
                let gap = k_boundary_relative_gap(float.row(t), k);
                if gap > 1e-6 {
                    let e = weak_top_k(exact.row(t), k).unwrap();
                    let f = weak_top_k(float.row(t), k).unwrap();
                    assert_eq!(e.members, f.members, "t={t} k={k} gap={gap}");
                }
            }
        }
    }

    #[test]
    fn empty_reference_overlap_is_zero() {
        let g = Graph::undirected(3, vec![(0, 1), (1, 2), (0, 2)], None).unwrap();
        let trace = float_run(&g, 5, &EngineCaps::default()).unwrap();
        let empty = TopKSet {
            k: 1,
            members: BTreeSet::new(),
            snapshot: None,
        };
        assert_eq!(overlap_series(&trace, 1, &empty).unwrap(), vec![0; 6]);
    }

    #[test]
    fn converged_reference_overlap_is_constant() {
        // triangle: every step's weak top-1 is the full tied set, so the
        // overlap against it holds at 3 (more than k, by ties)
        let g = Graph::undirected(3, vec![(0, 1), (1, 2), (0, 2)], None).unwrap();
        let trace = float_run(&g, 8, &EngineCaps::default()).unwrap();
        let reference = trace.top_k(0, 1).unwrap();
        assert_eq!(overlap_series(&trace, 1, &reference).unwrap(), vec![3; 9]);
    }

    // brute-force oracle straight from the set-builder definition
    fn oracle_weak_top_k(scores: &[i64], k: usize) -> BTreeSet<usize> {
        (0..scores.len())
            .filter(|&i| scores.iter().filter(|&&s| s > scores[i]).count() < k)
            .collect()
    }

    proptest! {
        #[test]
        fn weak_top_k_matches_bruteforce(
            scores in prop::collection::vec(-20i64..20, 1..40),
            k in 1usize..45,
        ) {
            let set = weak_top_k(&scores, k).unwrap();
            prop_assert_eq!(&set.members, &oracle_weak_top_k(&scores, k));
            prop_assert!(set.len() >= k.min(scores.len()));
        }

        #[test]
        fn weak_top_k_nested_in_k_plus_one(
            scores in prop::collection::vec(-20i64..20, 1..40),
            k in 1usize..40,
        ) {
            let a = weak_top_k(&scores, k).unwrap();
            let b = weak_top_k(&scores, k + 1).unwrap();
            prop_assert!(a.members.is_subset(&b.members));
        }

        #[test]
        fn tie_closure(
            scores in prop::collection::vec(-5i64..5, 1..30),
            k in 1usize..30,
        ) {
            let set = weak_top_k(&scores, k).unwrap();
            for i in 0..scores.len() {
                if set.contains(i) {
                    for j in 0..scores.len() {
                        if scores[j] == scores[i] {
                            prop_assert!(set.contains(j));
                        }
                    }
                }
            }
        }

        #[test]
        fn convergence_tau_antitone_in_h(
            perms in prop::collection::vec(0usize..6, 2..12),
        ) {
            // synthetic three-vertex series, one score permutation per step
            struct Synth(Vec<usize>);
            impl ScoreSeries for Synth {
                fn horizon(&self) -> usize { self.0.len() - 1 }
                fn top_k(&self, t: usize, k: usize) -> Result<TopKSet> {
                    const PERMS: [[f64; 3]; 6] = [
                        [3.0, 2.0, 1.0], [3.0, 1.0, 2.0], [2.0, 3.0, 1.0],
                        [1.0, 3.0, 2.0], [2.0, 1.0, 3.0], [1.0, 2.0, 3.0],
                    ];
                    weak_top_k(&PERMS[self.0[t]], k)
                }
            }
            let series = Synth(perms);
            let limit = TopKSet { k: 2, members: BTreeSet::from([0, 1, 2]), snapshot: None };
            let mut prev = None;
            for h in 1..=2usize {
                let report = convergence_tau(&series, 2, h, &limit).unwrap();
                let tau = report.tau.expect("limit covers all vertices");
                if let Some(p) = prev {
                    prop_assert!(tau >= p, "tau must not decrease as h grows");
                }
                prev = Some(tau);
            }
        }
    }
}
