//! `gdl regret`: bandit self-play on a finite game with external regret
//! accounting.

use crate::manifest::Manifest;
use crate::output::{fmt_f64, indexed, write_csv, write_json};
use crate::spec_file::resolve_game;
use clap::Args;
use gdl_core::learning::{external_regret, simulate_selfplay};
use gdl_core::{GdlError, Result};
use serde_json::json;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct RegretArgs {
    /// Builtin game name or path to a TOML game file (finite games only)
    #[arg(long)]
    pub game: String,
    /// Override a game parameter (repeatable, KEY=VALUE)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Number of self-play rounds
    #[arg(long = "T")]
    pub horizon: Option<usize>,
    /// RNG seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Record sampling distributions every this many rounds (0 = never)
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
}

pub fn run(args: &RegretArgs, man: &mut Manifest) -> Result<()> {
    let loaded = resolve_game(&args.game, &args.params)?;
    let game = loaded
        .game
        .as_finite()
        .ok_or_else(|| GdlError::input("regret runs need a finite game"))?;
    let horizon = args
        .horizon
        .or(loaded.defaults.horizon.map(|t| t as usize))
        .unwrap_or(10_000);
    let seed = args.seed.or(loaded.defaults.seed).unwrap_or(0);
    man.game = Some(loaded.label.clone());
    man.seed = Some(seed);
    man.config = json!({ "horizon": horizon, "snapshot_every": args.snapshot_every });

    let rec = simulate_selfplay(game, horizon, seed, args.snapshot_every)?;
    let reg = external_regret(game, &rec.history)?;
    let n = rec.history.actions.first().map_or(0, |a| a.len());

    let mut header = vec!["t".to_string()];
    header.extend(indexed("a", n));
    header.extend(indexed("u", n));
    let rows = (0..horizon).map(|t| {
        let mut row = vec![t.to_string()];
        row.extend(rec.history.actions[t].iter().map(|a| a.to_string()));
        row.extend(rec.history.payoffs[t].iter().map(|u| fmt_f64(*u)));
        row
    });
    write_csv(&args.out.join("history.csv"), &header, rows)?;
    man.record_output("history.csv");

    let mut header = vec!["t".to_string()];
    header.extend(indexed("r", n));
    let rows = (0..horizon).map(|t| {
        let mut row = vec![t.to_string()];
        row.extend(reg.curves.iter().map(|c| fmt_f64(c[t])));
        row
    });
    write_csv(&args.out.join("regret.csv"), &header, rows)?;
    man.record_output("regret.csv");

    let header: Vec<String> =
        ["player", "arm", "average", "final"].map(String::from).to_vec();
    let rows = (0..n).flat_map(|i| {
        let avg = &rec.average_strategies[i];
        let fin = &rec.final_strategies[i];
        (0..avg.len())
            .map(|k| vec![i.to_string(), k.to_string(), fmt_f64(avg[k]), fmt_f64(fin[k])])
            .collect::<Vec<_>>()
    });
    write_csv(&args.out.join("strategies.csv"), &header, rows)?;
    man.record_output("strategies.csv");

    if args.snapshot_every > 0 {
        let header: Vec<String> =
            ["t", "player", "arm", "prob"].map(String::from).to_vec();
        let rows = rec.snapshots.iter().flat_map(|(t, dists)| {
            dists.iter().enumerate().flat_map(move |(i, dist)| {
                dist.iter()
                    .enumerate()
                    .map(move |(k, p)| {
                        vec![t.to_string(), i.to_string(), k.to_string(), fmt_f64(*p)]
                    })
                    .collect::<Vec<_>>()
            })
        });
        write_csv(&args.out.join("snapshots.csv"), &header, rows)?;
        man.record_output("snapshots.csv");
    }

    let summary = json!({
        "horizon": horizon,
        "totals": reg.totals,
        "rates": reg.totals.iter().map(|r| r / horizon as f64).collect::<Vec<_>>(),
        "average_strategies": rec.average_strategies,
        "final_strategies": rec.final_strategies,
        "payoff_range": rec.payoff_range,
    });
    write_json(&args.out.join("summary.json"), &summary)?;
    man.record_output("summary.json");
    Ok(())
}
