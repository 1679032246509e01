//! Continuous-time projection dynamics, integrated by explicit Euler.
//!
//! The global flow moves along the difference between the projected ascent
//! target and the current point: `dx/dt = proj(x + eta F(x)) - x`. The local
//! flow follows the field projected onto the tangent cone of the feasible
//! set: `dx/dt = proj_{T_x}(F(x))`. Both re-snap onto the set after every
//! Euler step so integration error cannot accumulate off the constraint
//! surface.

use super::{Dynamics, SimulationConfig};
use crate::error::Result;
use crate::game::Game;
use crate::linalg::axpy;

pub struct GlobalProjectionFlow;

impl Dynamics for GlobalProjectionFlow {
    fn name(&self) -> &'static str {
        "gpds"
    }

    fn is_discrete(&self) -> bool {
        false
    }

    fn step(&self, game: &dyn Game, x: &[f64], cfg: &SimulationConfig) -> Result<Vec<f64>> {
        let set = game.feasible_set();
        let f = game.gradient_unchecked(x);
        let target = set.project(&axpy(x, cfg.eta, &f));
        let velocity: Vec<f64> = target.iter().zip(x).map(|(t, xi)| t - xi).collect();
        let mut next = axpy(x, cfg.h, &velocity);
        set.renormalize(&mut next);
        Ok(next)
    }

    fn dt(&self, cfg: &SimulationConfig) -> f64 {
        cfg.h
    }
}

pub struct LocalProjectionFlow;

impl Dynamics for LocalProjectionFlow {
    fn name(&self) -> &'static str {
        "lpds"
    }

    fn is_discrete(&self) -> bool {
        false
    }

    fn step(&self, game: &dyn Game, x: &[f64], cfg: &SimulationConfig) -> Result<Vec<f64>> {
        let set = game.feasible_set();
        let f = game.gradient_unchecked(x);
        let velocity = set.project_tangent(x, &f)?;
        Ok(set.project(&axpy(x, cfg.h, &velocity)))
    }

    fn dt(&self, cfg: &SimulationConfig) -> f64 {
        cfg.h
    }
}
