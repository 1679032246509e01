//! `gdl simulate`: integrate one learning dynamic from a chosen start and
//! classify the trajectory tail.

use crate::commands::parse_x0;
use crate::manifest::Manifest;
use crate::output::{fmt_f64, indexed, write_csv, write_json};
use crate::spec_file::resolve_game;
use clap::Args;
use gdl_core::dynamics::{make_dynamics, Horizon, SimulationConfig};
use gdl_core::{GdlError, Result};
use serde_json::json;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Builtin game name or path to a TOML game file
    #[arg(long)]
    pub game: String,
    /// Override a game parameter (repeatable, KEY=VALUE)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Dynamic to integrate: discrete, gpds, or lpds
    #[arg(long)]
    pub dynamics: Option<String>,
    /// Learning rate of the step map
    #[arg(long)]
    pub eta: Option<f64>,
    /// Euler step for the flows
    #[arg(long)]
    pub h: Option<f64>,
    /// Horizon: iteration count for the discrete map, time units for flows
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Stop when a step moves less than this
    #[arg(long)]
    pub stop_tol: Option<f64>,
    /// Initial state: center, uniform, uniform-perturbed, vertex:K,
    /// csv:PATH, or a float list
    #[arg(long, default_value = "center")]
    pub x0: String,
    /// RNG seed for random starts
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &SimulateArgs, man: &mut Manifest) -> Result<()> {
    let loaded = resolve_game(&args.game, &args.params)?;
    let game = loaded.game.as_ref();
    let defaults = &loaded.defaults;
    let seed = args.seed.or(defaults.seed).unwrap_or(0);

    let dyn_name = args
        .dynamics
        .clone()
        .or_else(|| defaults.dynamics.clone())
        .unwrap_or_else(|| "discrete".to_string());
    let dynamics = make_dynamics(&dyn_name)?;
    let discrete = dyn_name == "discrete";

    let mut cfg = SimulationConfig::default();
    if let Some(eta) = args.eta.or(defaults.eta) {
        cfg.eta = eta;
    }
    if let Some(h) = args.h.or(defaults.h) {
        cfg.h = h;
    }
    if let Some(tol) = args.stop_tol.or(defaults.stop_tol) {
        cfg.stop_tol = tol;
    }
    let span = args.horizon.or(defaults.horizon);
    cfg.horizon = if discrete {
        let steps = span.unwrap_or(10_000.0);
        if !(steps.is_finite() && steps >= 1.0 && steps.fract() == 0.0) {
            return Err(GdlError::input(format!(
                "-T {steps} is not a positive iteration count"
            )));
        }
        Horizon::Steps(steps as usize)
    } else {
        let t = span.unwrap_or(10.0);
        if !(t.is_finite() && t > 0.0) {
            return Err(GdlError::input(format!("-T {t} is not a positive time span")));
        }
        Horizon::Time(t)
    };

    let x0 = parse_x0(&args.x0, game.feasible_set(), seed)?;

    man.game = Some(loaded.label.clone());
    man.seed = Some(seed);
    man.config = json!({
        "dynamics": dyn_name,
        "eta": cfg.eta,
        "h": cfg.h,
        "horizon": match cfg.horizon {
            Horizon::Steps(n) => json!({ "steps": n }),
            Horizon::Time(t) => json!({ "time": t }),
        },
        "stop_tol": cfg.stop_tol,
        "x0": x0,
    });

    let rec = dynamics.simulate(game, &x0, &cfg)?;

    let d = game.total_dim();
    let mut header = vec!["t".to_string()];
    header.extend(indexed("x", d));
    header.extend(["grad_norm", "displacement"].map(String::from));
    let rows = (0..rec.times.len()).map(|i| {
        let mut row = vec![fmt_f64(rec.times[i])];
        row.extend(rec.states[i].iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(rec.gradient_norms[i]));
        row.push(fmt_f64(rec.displacements[i]));
        row
    });
    write_csv(&args.out.join("trajectory.csv"), &header, rows)?;
    man.record_output("trajectory.csv");

    let summary = json!({
        "classification": rec.classification,
        "limit_point": rec.limit_point,
        "recorded_states": rec.states.len(),
        "final_time": rec.times.last(),
        "final_state": rec.states.last(),
        "final_gradient_norm": rec.gradient_norms.last(),
    });
    write_json(&args.out.join("summary.json"), &summary)?;
    man.record_output("summary.json");
    Ok(())
}
