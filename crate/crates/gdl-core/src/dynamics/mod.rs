//! Gradient-driven strategy dynamics: the discrete projected ascent map and
//! two continuous-time projection flows, behind a common trait so front ends
//! pick integrators by name.

mod discrete;
mod flows;

pub use discrete::{step_discrete, DiscreteAscent};
pub use flows::{GlobalProjectionFlow, LocalProjectionFlow};

use crate::error::{GdlError, Result};
use crate::game::Game;
use crate::linalg::{dist, norm};
use serde::Serialize;

/// How long to run: a number of discrete steps, or a continuous time span
/// integrated at the configured step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horizon {
    Steps(usize),
    Time(f64),
}

#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Learning rate of the discrete map and the global flow.
    pub eta: f64,
    pub horizon: Horizon,
    /// Euler step for the continuous flows.
    pub h: f64,
    /// Step displacement below which the state counts as stationary.
    pub stop_tol: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            eta: 0.05,
            horizon: Horizon::Steps(10_000),
            h: 1e-3,
            stop_tol: 1e-8,
        }
    }
}

/// Where a trajectory ended up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClassification {
    /// Step displacement fell below `stop_tol`.
    ConvergedPoint,
    /// The state returned within 1e-6 of a strictly older stored snapshot.
    SuspectedCycle,
    /// Ran out of horizon while the distance from the start was still
    /// nondecreasing at every checkpoint — the orbit kept heading out.
    HorizonExhausted,
    /// Ran out of horizon with no convergence, revisit, or outward trend.
    NonConvergent,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryRecord {
    /// Discrete step index or accumulated continuous time per sample.
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub gradient_norms: Vec<f64>,
    /// Euclidean displacement from the previous sample (0 at the start).
    pub displacements: Vec<f64>,
    pub classification: LimitClassification,
    /// Final state when the run converged.
    pub limit_point: Option<Vec<f64>>,
}

/// A named integrator for game dynamics.
pub trait Dynamics: Send + Sync {
    fn name(&self) -> &'static str;

    fn is_discrete(&self) -> bool;

    /// Advance one step from a feasible state, returning a feasible state.
    fn step(&self, game: &dyn Game, x: &[f64], cfg: &SimulationConfig) -> Result<Vec<f64>>;

    /// Time advanced by one step.
    fn dt(&self, cfg: &SimulationConfig) -> f64;

    /// Run from `x0`, recording every state, with early stopping on
    /// convergence or suspected cycling.
    fn simulate(&self, game: &dyn Game, x0: &[f64], cfg: &SimulationConfig) -> Result<TrajectoryRecord> {
        validate_config(cfg)?;
        let set = game.feasible_set();
        let x0 = set.ingest(x0)?;
        let steps = match cfg.horizon {
            Horizon::Steps(n) => n,
            Horizon::Time(t) => {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(GdlError::input("time horizon must be positive and finite"));
                }
                (t / self.dt(cfg)).ceil() as usize
            }
        };
        if steps == 0 {
            return Err(GdlError::input("horizon must allow at least one step"));
        }
        let dt = self.dt(cfg);
        // Snapshots for revisit detection and the outward-trend check are
        // taken on a stride that caps memory comparisons at ~1000 probes.
        let stride = (steps / 1000).max(1);
        let mut snapshots: Vec<(usize, f64, Vec<f64>)> = Vec::new();
        let mut origin_distances: Vec<f64> = vec![0.0];
        let mut arc_length = 0.0f64;

        let mut times = Vec::with_capacity(steps.min(1 << 20) + 1);
        let mut states = Vec::with_capacity(steps.min(1 << 20) + 1);
        let mut gradient_norms = Vec::with_capacity(steps.min(1 << 20) + 1);
        let mut displacements = Vec::with_capacity(steps.min(1 << 20) + 1);

        let mut x = x0.clone();
        times.push(0.0);
        gradient_norms.push(norm(&game.gradient(&x)?));
        displacements.push(0.0);
        states.push(x.clone());

        let mut classification = None;
        for t in 0..steps {
            if t % stride == 0 {
                snapshots.push((t, arc_length, x.clone()));
            }
            let next = self.step(game, &x, cfg)?;
            let moved = dist(&next, &x);
            arc_length += moved;
            x = next;
            let t1 = t + 1;
            times.push(t1 as f64 * dt);
            gradient_norms.push(norm(&game.gradient(&x)?));
            displacements.push(moved);
            states.push(x.clone());
            if t1 % stride == 0 || t1 == steps {
                origin_distances.push(dist(&x, &x0));
            }
            if moved < cfg.stop_tol {
                classification = Some(LimitClassification::ConvergedPoint);
                break;
            }
            // A revisit only counts as a cycle when the trajectory made a
            // genuine excursion since the snapshot: at least 10 steps old
            // and at least 1e-3 of arc length traveled. Without the arc
            // condition every slowly converging orbit would look like a
            // cycle against its own recent history.
            if snapshots
                .iter()
                .take_while(|(st, _, _)| st + 10 <= t1)
                .any(|(_, sa, s)| arc_length - sa >= 1e-3 && dist(s, &x) < 1e-6)
            {
                classification = Some(LimitClassification::SuspectedCycle);
                break;
            }
        }

        let classification = classification.unwrap_or_else(|| {
            let outward = origin_distances
                .windows(2)
                .all(|w| w[1] - w[0] >= -1e-9);
            if outward {
                LimitClassification::HorizonExhausted
            } else {
                LimitClassification::NonConvergent
            }
        });
        let limit_point = if classification == LimitClassification::ConvergedPoint {
            Some(x)
        } else {
            None
        };
        Ok(TrajectoryRecord {
            times,
            states,
            gradient_norms,
            displacements,
            classification,
            limit_point,
        })
    }
}

fn validate_config(cfg: &SimulationConfig) -> Result<()> {
    if !(cfg.eta > 0.0 && cfg.eta.is_finite()) {
        return Err(GdlError::input("learning rate eta must be positive"));
    }
    if !(cfg.h > 0.0 && cfg.h.is_finite()) {
        return Err(GdlError::input("integration step h must be positive"));
    }
    if !(cfg.stop_tol >= 0.0) {
        return Err(GdlError::input("stop tolerance must be nonnegative"));
    }
    Ok(())
}

/// Integrator registry: `discrete`, `gpds`, `lpds`.
pub fn make_dynamics(name: &str) -> Result<Box<dyn Dynamics>> {
    match name {
        "discrete" => Ok(Box::new(DiscreteAscent)),
        "gpds" => Ok(Box::new(GlobalProjectionFlow)),
        "lpds" => Ok(Box::new(LocalProjectionFlow)),
        _ => Err(GdlError::input(format!(
            "unknown dynamics `{name}` (available: {})",
            dynamics_names().join(", ")
        ))),
    }
}

pub fn dynamics_names() -> &'static [&'static str] {
    &["discrete", "gpds", "lpds"]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_builtin;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn load(name: &str) -> Box<dyn Game> {
        load_builtin(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn registry_knows_all_integrators() {
        for name in dynamics_names() {
            assert_eq!(make_dynamics(name).unwrap().name(), *name);
        }
        assert!(make_dynamics("rk4").is_err());
    }

    #[test]
    fn defect_pull_in_prisoners_dilemma() {
        // One discrete step from uniform play raises both defect weights:
        // F = ((3/2, 3), (3/2, 3)) and projection keeps the ordering.
        let g = load("prisoners_dilemma");
        let cfg = SimulationConfig::default();
        let x = step_discrete(g.as_ref(), &[0.5, 0.5, 0.5, 0.5], cfg.eta).unwrap();
        assert!(x[1] > 0.5 && x[3] > 0.5);
        assert!(x[0] < 0.5 && x[2] < 0.5);
        assert_abs_diff_eq!(x[0] + x[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn discrete_map_reaches_the_coordination_vertex() {
        let g = load("battle_of_sexes");
        let d = make_dynamics("discrete").unwrap();
        let cfg = SimulationConfig {
            horizon: Horizon::Steps(2000),
            ..SimulationConfig::default()
        };
        let rec = d
            .simulate(g.as_ref(), &[0.9, 0.1, 0.9, 0.1], &cfg)
            .unwrap();
        assert_eq!(rec.classification, LimitClassification::ConvergedPoint);
        let lim = rec.limit_point.unwrap();
        assert_abs_diff_eq!(lim[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(lim[2], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn matching_pennies_keeps_drifting() {
        let g = load("matching_pennies");
        let d = make_dynamics("discrete").unwrap();
        let cfg = SimulationConfig {
            horizon: Horizon::Steps(100_000),
            ..SimulationConfig::default()
        };
        let rec = d
            .simulate(g.as_ref(), &[0.6, 0.4, 0.5, 0.5], &cfg)
            .unwrap();
        assert_eq!(rec.classification, LimitClassification::NonConvergent);
        // The first hundred steps move strictly away from the mixed point.
        let eq = [0.5, 0.5, 0.5, 0.5];
        let mut prev = dist(&rec.states[0], &eq);
        for s in &rec.states[1..100] {
            let d = dist(s, &eq);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn short_pennies_run_is_outward_bound() {
        let g = load("matching_pennies");
        let d = make_dynamics("discrete").unwrap();
        let cfg = SimulationConfig {
            horizon: Horizon::Steps(30),
            ..SimulationConfig::default()
        };
        let rec = d
            .simulate(g.as_ref(), &[0.6, 0.4, 0.5, 0.5], &cfg)
            .unwrap();
        assert_eq!(rec.classification, LimitClassification::HorizonExhausted);
        assert_eq!(rec.states.len(), 31);
    }

    #[test]
    fn contest_flow_reaches_the_interior_equilibrium() {
        let g = load("tullock");
        let d = make_dynamics("gpds").unwrap();
        let cfg = SimulationConfig {
            eta: 1.0,
            horizon: Horizon::Time(50.0),
            ..SimulationConfig::default()
        };
        let rec = d.simulate(g.as_ref(), &[0.6, 0.6], &cfg).unwrap();
        let last = rec.states.last().unwrap();
        assert!(dist(last, &[0.5, 0.5]) < 1e-4);
    }

    #[test]
    fn duopoly_local_flow_from_the_corner() {
        let g = load("cournot");
        let d = make_dynamics("lpds").unwrap();
        let cfg = SimulationConfig {
            horizon: Horizon::Time(50.0),
            ..SimulationConfig::default()
        };
        let rec = d.simulate(g.as_ref(), &[0.1, 0.9], &cfg).unwrap();
        let last = rec.states.last().unwrap();
        assert!(dist(last, &[2.0 / 3.0, 2.0 / 3.0]) < 1e-4);
    }

    #[test]
    fn trajectories_stay_feasible() {
        for (game, dyn_name) in [
            ("battle_of_sexes", "discrete"),
            ("matching_pennies", "gpds"),
            ("tullock", "lpds"),
        ] {
            let g = load(game);
            let d = make_dynamics(dyn_name).unwrap();
            let cfg = SimulationConfig {
                horizon: if d.is_discrete() {
                    Horizon::Steps(500)
                } else {
                    Horizon::Time(0.5)
                },
                ..SimulationConfig::default()
            };
            let x0 = g.feasible_set().center();
            let rec = d.simulate(g.as_ref(), &x0, &cfg).unwrap();
            for s in &rec.states {
                assert!(g.feasible_set().contains(s, 1e-9), "{game}/{dyn_name}");
            }
        }
    }
}
