//! Command-line orchestration: generate graphs, run engines, verify lemmas,
//! measure rank convergence.
//!
//! Exit codes: 0 success / all checks pass, 1 verification failure,
//! 2 usage or parameter error, 3 resource cap exceeded.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::engine::{float_run, pebble_run, EngineCaps};
use crate::error::{Error, Result};
use crate::gamma::{build_gamma, validate_params, GammaParams};
use crate::graph::Graph;
use crate::rank::{
    convergence_tau, limit_top_k, limit_top_k_gamma, overlap_series, ConvergenceReport, TopKSet,
};
use crate::verify::{run_verification, theorem_quantities, VerifyConfig, FORMAT_VERSION};

#[derive(Debug, Parser)]
#[command(
    name = "hitslab",
    about = "HITS rank-convergence laboratory: adversarial graphs, exact pebble traces, lemma verification",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Arbitrary-precision pebble counts.
    Exact,
    /// IEEE double scores, normalized per half-step.
    Float,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate Γ_{h,k,n} and print its derived quantities.
    Generate {
        #[arg(long)]
        h: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        n: i64,
        /// Edge-list output path; labels go to `<out>.labels`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an engine on a graph file and emit the trace CSV.
    Run {
        #[arg(long)]
        graph: PathBuf,
        /// Pebble timesteps to simulate.
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Trace CSV path (stdout when omitted).
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Override the timestep cap.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Override the exact-count digit cap.
        #[arg(long)]
        max_digits: Option<usize>,
    },
    /// Verify the lemmas and theorem checkpoints on a generated Γ graph.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        h: i64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 2_000)]
        horizon: usize,
        /// Diagnostic threshold for slow lemma-2 shrink windows.
        #[arg(long, default_value_t = 1e-3)]
        epsilon: f64,
        /// JSON report path (stdout when omitted).
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        max_digits: Option<usize>,
    },
    /// Measure rank-convergence τ against the eigenvector limit ranking.
    Converge {
        #[arg(long)]
        graph: PathBuf,
        /// Top-set size k of the convergence definition.
        #[arg(long)]
        k: usize,
        /// Required stable members h of the convergence definition.
        #[arg(long)]
        h: usize,
        /// Timesteps to run (default: 100000 float, 2000 exact).
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Float)]
        mode: Mode,
        /// Γ chain length n: enables the t̄ comparison and resolves component
        /// dominance structurally (Γ̄ wins) for the limit ranking.
        #[arg(long)]
        n: Option<i64>,
        /// Eigenvector tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// JSON report path (stdout when omitted).
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::DigitCapExceeded { .. } | Error::StepCapExceeded { .. } => 3,
        _ => 2,
    }
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("hitslab: {err}");
            exit_code_for(&err)
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Generate { h, k, n, out } => cmd_generate(h, k, n, out.as_deref()),
        Command::Run {
            graph,
            steps,
            mode,
            trace_out,
            max_steps,
            max_digits,
        } => cmd_run(
            &graph,
            steps,
            mode,
            trace_out.as_deref(),
            max_steps,
            max_digits,
        ),
        Command::Verify {
            graph,
            h,
            k,
            n,
            horizon,
            epsilon,
            report_out,
            max_digits,
        } => cmd_verify(
            &graph,
            h,
            k,
            n,
            horizon,
            epsilon,
            report_out.as_deref(),
            max_digits,
        ),
        Command::Converge {
            graph,
            k,
            h,
            horizon,
            mode,
            n,
            tol,
            report_out,
            max_steps,
        } => cmd_converge(
            &graph,
            k,
            h,
            horizon,
            mode,
            n,
            tol,
            report_out.as_deref(),
            max_steps,
        ),
    }
}

fn cmd_generate(h: i64, k: i64, n: i64, out: Option<&Path>) -> Result<i32> {
    let params = validate_params(h, k, n)?;
    let q = theorem_quantities(&params);
    println!(
        "h={} k={} n={} m={} ell={} N={} t_bar≈{:.2}",
        params.h, params.k, params.n, params.m, params.ell, params.num_vertices, q.t_bar
    );
    if let Some(path) = out {
        let gamma = build_gamma(&params);
        gamma.graph().save(path)?;
    }
    Ok(0)
}

fn caps_with(max_steps: Option<usize>, max_digits: Option<usize>) -> EngineCaps {
    let mut caps = EngineCaps::default();
    if let Some(s) = max_steps {
        caps.max_steps_exact = s;
        caps.max_steps_float = s;
    }
    if let Some(d) = max_digits {
        caps.max_digits = d;
    }
    caps
}

fn cmd_run(
    graph_path: &Path,
    steps: usize,
    mode: Mode,
    trace_out: Option<&Path>,
    max_steps: Option<usize>,
    max_digits: Option<usize>,
) -> Result<i32> {
    let graph = Graph::load(graph_path)?;
    let caps = caps_with(max_steps, max_digits);
    let csv = match mode {
        Mode::Exact => pebble_run(&graph, steps, &caps)?.to_csv(&graph),
        Mode::Float => float_run(&graph, steps, &caps)?.to_csv(&graph),
    };
    emit(trace_out, &csv)?;
    Ok(0)
}

/// Loads a graph and checks it carries exactly the canonical Γ_{h,k,n} role
/// labels (arc mutations are allowed — the checks are there to catch them).
fn load_gamma_labeled(
    graph_path: &Path,
    params: &GammaParams,
) -> Result<(Graph, crate::gamma::GammaGraph)> {
    let graph = Graph::load(graph_path)?;
    let canonical = build_gamma(params);
    if graph.num_vertices() != canonical.graph().num_vertices() {
        return Err(Error::NotGammaGraph(format!(
            "graph has {} vertices, Γ_{{{},{},{}}} has {}",
            graph.num_vertices(),
            params.h,
            params.k,
            params.n,
            canonical.graph().num_vertices()
        )));
    }
    if graph.labels() != canonical.graph().labels() {
        return Err(Error::NotGammaGraph(
            "vertex labels do not match the canonical role labels (is the companion .labels file present?)".into(),
        ));
    }
    if !graph.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok((graph, canonical))
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    graph_path: &Path,
    h: i64,
    k: i64,
    n: i64,
    horizon: usize,
    epsilon: f64,
    report_out: Option<&Path>,
    max_digits: Option<usize>,
) -> Result<i32> {
    let params = validate_params(h, k, n)?;
    let (graph, _) = load_gamma_labeled(graph_path, &params)?;
    let mut caps = caps_with(None, max_digits);
    if horizon > caps.max_steps_exact {
        caps.max_steps_exact = horizon;
    }
    let cfg = VerifyConfig {
        horizon,
        epsilon,
        caps,
    };
    let report = run_verification(&graph, &params, &cfg)?;
    for check in &report.checks {
        let tag = if check.vacuous {
            "SKIP"
        } else if check.pass {
            "PASS"
        } else {
            "FAIL"
        };
        println!("[{tag}] {} — {}", check.name, check.range);
    }
    let json = serde_json::to_string_pretty(&report)?;
    emit(report_out, &(json + "\n"))?;
    Ok(if report.all_pass() { 0 } else { 1 })
}

#[derive(Debug, Serialize)]
struct GammaComparison {
    params: GammaParams,
    t_bar: f64,
    /// True when the measured τ (or its certified lower bound, for runs that
    /// have not converged by the horizon) exceeds t̄.
    tau_exceeds_t_bar: bool,
}

#[derive(Debug, Serialize)]
struct ConvergeOutput {
    format_version: u32,
    k: usize,
    h: usize,
    horizon: usize,
    mode: String,
    approximated: bool,
    converged: bool,
    tau: Option<usize>,
    /// When not converged by the horizon, τ is certified to exceed this.
    tau_lower_bound: Option<usize>,
    stable_window: Option<usize>,
    limit_set: TopKSet,
    overlap: Vec<usize>,
    gamma: Option<GammaComparison>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_converge(
    graph_path: &Path,
    k: usize,
    h: usize,
    horizon: Option<usize>,
    mode: Mode,
    n: Option<i64>,
    tol: f64,
    report_out: Option<&Path>,
    max_steps: Option<usize>,
) -> Result<i32> {
    let horizon = horizon.unwrap_or(match mode {
        Mode::Float => 100_000,
        Mode::Exact => 2_000,
    });
    let mut caps = caps_with(max_steps, None);
    if max_steps.is_none() && horizon > caps.max_steps_float {
        caps.max_steps_float = horizon;
    }

    // Γ-aware path: the graph must equal the canonical construction, the
    // limit ranking then resolves dominance structurally (Γ̄ wins). The
    // convergence arguments (h, k) double as the construction parameters.
    let (graph, limit_set, gamma_info) = match n {
        Some(n) => {
            let params = validate_params(h as i64, k as i64, n)?;
            let (graph, canonical) = load_gamma_labeled(graph_path, &params)?;
            if &graph != canonical.graph() {
                return Err(Error::NotGammaGraph(
                    "arc set differs from the canonical construction".into(),
                ));
            }
            let limit = limit_top_k_gamma(&canonical, k, tol)?;
            let q = theorem_quantities(&params);
            (graph, limit, Some((params, q)))
        }
        None => {
            let graph = Graph::load(graph_path)?;
            if !graph.is_symmetric() {
                return Err(Error::NotSymmetric);
            }
            let limit = limit_top_k(&graph, k, tol)?;
            (graph, limit, None)
        }
    };

    let mode_name = match mode {
        Mode::Exact => "exact",
        Mode::Float => "float",
    };
    let measurement = match mode {
        Mode::Float => {
            let trace = float_run(&graph, horizon, &caps)?;
            convergence_tau(&trace, k, h, &limit_set)
                .map(|r| (r, None))
                .or_else(|e| fall_back_overlap(e, &trace, k, h, &limit_set))
        }
        Mode::Exact => {
            let trace = pebble_run(&graph, horizon, &caps)?;
            convergence_tau(&trace, k, h, &limit_set)
                .map(|r| (r, None))
                .or_else(|e| fall_back_overlap(e, &trace, k, h, &limit_set))
        }
    }?;
    let (report, lower_bound) = measurement;

    let converged = report.tau.is_some() && lower_bound.is_none();
    let tau_exceeds = |t_bar: f64| match (report.tau, lower_bound) {
        (_, Some(lb)) => lb as f64 > t_bar,
        (Some(tau), None) => tau as f64 > t_bar,
        (None, None) => false,
    };
    let gamma = gamma_info.map(|(params, q)| GammaComparison {
        params,
        t_bar: q.t_bar,
        tau_exceeds_t_bar: tau_exceeds(q.t_bar),
    });

    match (report.tau, lower_bound) {
        (Some(tau), None) => println!("tau={tau} horizon={horizon}"),
        _ => {
            let lb = lower_bound.unwrap_or(horizon);
            println!("tau>{lb} (not converged by horizon {horizon})");
            eprintln!(
                "hitslab: the run has not entered its limit regime by t={horizon}; raise --horizon to measure a finite tau"
            );
        }
    }
    if let Some(g) = &gamma {
        println!(
            "t_bar={:.2} tau_exceeds_t_bar={}",
            g.t_bar, g.tau_exceeds_t_bar
        );
    }

    let out = ConvergeOutput {
        format_version: FORMAT_VERSION,
        k,
        h,
        horizon,
        mode: mode_name.to_string(),
        approximated: true,
        converged,
        tau: if converged { report.tau } else { None },
        tau_lower_bound: lower_bound,
        stable_window: report.stable_window,
        limit_set: report.limit_set.clone(),
        overlap: report.overlap.clone(),
        gamma,
    };
    let json = serde_json::to_string_pretty(&out)?;
    emit(report_out, &(json + "\n"))?;
    Ok(0)
}

/// Turns a `HorizonTooShort` from the τ measurement into a lower-bound
/// report: the suffix condition failed at the horizon itself, so a finite τ —
/// if it exists — exceeds the horizon. Exactly the regime Theorem 1 predicts
/// below t̄.
fn fall_back_overlap<S: crate::rank::ScoreSeries>(
    err: Error,
    trace: &S,
    k: usize,
    h: usize,
    limit_set: &TopKSet,
) -> Result<(ConvergenceReport, Option<usize>)> {
    match err {
        Error::HorizonTooShort { .. } => {
            let overlap = overlap_series(trace, k, limit_set)?;
            let horizon = trace.horizon();
            Ok((
                ConvergenceReport {
                    k,
                    h,
                    tau: None,
                    horizon,
                    approximated: true,
                    stable_window: None,
                    limit_set: limit_set.clone(),
                    overlap,
                },
                Some(horizon),
            ))
        }
        other => Err(other),
    }
}
