//! Numerical laboratory for game dynamics under learning agents.
//!
//! The crate models finite games in mixed strategies and smooth
//! continuous-action games over box or simplex-product strategy spaces, runs
//! projected gradient dynamics against them (discrete ascent, global and
//! local projection flows), analyzes equilibria (enumeration, variational
//! gaps, Newton and fixed-point solvers, monotonicity probes), certifies
//! stability regions with quadratic Lyapunov scans, and drives bandit
//! learners in self-play.

pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod grid;
pub mod learning;
pub mod linalg;
pub mod projection;
pub mod rng;
pub mod stability;

pub use error::{GdlError, Result};
