//! `gdl analyze`: equilibrium candidates, linear stability at each, and a
//! sampled structure report for the pseudo-gradient field.

use crate::manifest::Manifest;
use crate::output::{fmt_f64, indexed, write_csv, write_json};
use crate::spec_file::resolve_game;
use clap::Args;
use gdl_core::equilibrium::{analyze_equilibria, monotonicity_report};
use gdl_core::stability::linear_stability;
use gdl_core::Result;
use serde_json::json;
use std::path::PathBuf;

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Builtin game name or path to a TOML game file
    #[arg(long)]
    pub game: String,
    /// Override a game parameter (repeatable, KEY=VALUE)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Sample pairs drawn by the structure probe
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
    /// RNG seed for the structure probe
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn run(args: &AnalyzeArgs, man: &mut Manifest) -> Result<()> {
    let loaded = resolve_game(&args.game, &args.params)?;
    let game = loaded.game.as_ref();
    let seed = args.seed.or(loaded.defaults.seed).unwrap_or(0);
    man.game = Some(loaded.label.clone());
    man.seed = Some(seed);
    man.config = json!({ "samples": args.samples });

    let candidates = analyze_equilibria(game)?;
    let stability = candidates
        .iter()
        .map(|c| linear_stability(game, &c.x))
        .collect::<Result<Vec<_>>>()?;
    let structure = monotonicity_report(game, None, args.samples, seed)?;

    let d = game.total_dim();
    let n = game.num_players();
    let mut header = vec!["label".to_string()];
    header.extend(indexed("x", d));
    header.extend(indexed("payoff", n));
    header.extend(["vi_gap", "strict", "max_real_part", "verdict"].map(String::from));
    let rows = candidates.iter().zip(&stability).map(|(c, s)| {
        let mut row = vec![c.kind.label().to_string()];
        row.extend(c.x.iter().map(|v| fmt_f64(*v)));
        row.extend(c.payoffs.iter().map(|v| fmt_f64(*v)));
        row.push(fmt_f64(c.vi_gap));
        row.push(match c.strict {
            None => String::new(),
            Some(false) => "0".to_string(),
            Some(true) => "1".to_string(),
        });
        row.push(fmt_f64(s.max_real_part));
        row.push(format!("{:?}", s.verdict));
        row
    });
    write_csv(&args.out.join("equilibria.csv"), &header, rows)?;
    man.record_output("equilibria.csv");

    let detail = json!({
        "game": loaded.label,
        "players": n,
        "dims": game.dims(),
        "equilibria": candidates
            .iter()
            .zip(&stability)
            .map(|(c, s)| json!({ "candidate": c, "stability": s }))
            .collect::<Vec<_>>(),
        "structure": structure,
    });
    write_json(&args.out.join("analysis.json"), &detail)?;
    man.record_output("analysis.json");
    Ok(())
}
