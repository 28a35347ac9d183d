//! hitslab: a laboratory for HITS rank convergence.
//!
//! The crate builds the adversarial graph family Γ_{h,k,n} — a hub-capped
//! chain Γ̄_{m,n} plus ℓ near-isomorphic copies with the chain's center
//! deleted — and measures how long the hubs-and-authorities iteration takes
//! to *converge in rank* on it. Scores converge at the usual power-method
//! rate; the top-k membership does not: the inter-component spectral gap is
//! tiny by construction, so copy vertices shadow their Γ̄ twins for
//! m^Ω(n) timesteps.
//!
//! Two engines share one contract. [`engine::pebble_run`] simulates the
//! un-normalized iteration exactly (arbitrary-precision pebble counts), which
//! lets [`verify`] check the growth lemmas and the proof's window inequalities
//! by integer cross-multiplication, with zero rounding. [`engine::float_run`]
//! is the IEEE-double twin for long horizons, normalized per half-step.
//! [`rank`] implements weak top-k sets and the convergence step τ;
//! [`gamma`] the deterministic construction; [`cli`] the command-line driver.

pub mod bignum;
pub mod cli;
pub mod engine;
pub mod error;
pub mod gamma;
pub mod graph;
pub mod rank;
pub mod verify;

pub use error::{Error, Result};
