//! Projected gradient ascent: the canonical discrete-time learning map.

use super::{Dynamics, SimulationConfig};
use crate::error::Result;
use crate::game::Game;
use crate::linalg::axpy;

/// One step of `x <- proj(x + eta F(x))` from a feasible point.
pub fn step_discrete(game: &dyn Game, x: &[f64], eta: f64) -> Result<Vec<f64>> {
    let f = game.gradient(x)?;
    Ok(game.feasible_set().project(&axpy(x, eta, &f)))
}

/// Simultaneous projected gradient ascent with a fixed learning rate.
pub struct DiscreteAscent;

impl Dynamics for DiscreteAscent {
    fn name(&self) -> &'static str {
        "discrete"
    }

    fn is_discrete(&self) -> bool {
        true
    }

    fn step(&self, game: &dyn Game, x: &[f64], cfg: &SimulationConfig) -> Result<Vec<f64>> {
        let f = game.gradient_unchecked(x);
        Ok(game.feasible_set().project(&axpy(x, cfg.eta, &f)))
    }

    fn dt(&self, _cfg: &SimulationConfig) -> f64 {
        1.0
    }
}
