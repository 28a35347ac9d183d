//! Score engines: exact pebble simulation, floating HITS iteration, the
//! squaring-trick power accelerator, and per-component dominant eigenvectors.
//!
//! Two engines, one contract: the exact engine drives every lemma and theorem
//! check (ratios compared by cross-multiplication, no rounding); the float
//! engine runs long-horizon convergence measurements. The pebble timestep `t`
//! is the canonical clock — HITS iteration `k` reads the authority vector at
//! `t = 2k−1` and the hub vector at `t = 2k`.

mod eigen;
mod pebble;
mod power;
mod score;

pub use eigen::{
    component_spectra, dominant_eigenvector_per_component, gamma_limit_vector, ComponentEigen,
    LimitSpectrum, AMBIGUITY_REL_TOL,
};
pub use pebble::{pebble_run, PebbleTrace};
pub use power::{power_by_squaring, PowerVector};
pub use score::{float_run, hits_float_run, ScoreTrace};

/// Resource caps for engine runs. Exceeding a cap is a loud error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy)]
pub struct EngineCaps {
    /// Maximum pebble timesteps for the exact engine.
    pub max_steps_exact: usize,
    /// Maximum pebble timesteps for the float engine.
    pub max_steps_float: usize,
    /// Maximum decimal digits of any exact count.
    pub max_digits: usize,
}

impl Default for EngineCaps {
    fn default() -> Self {
        EngineCaps {
            max_steps_exact: 5_000,
            max_steps_float: 100_000,
            max_digits: 100_000,
        }
    }
}
