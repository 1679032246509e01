//! `gdl scan`: evaluate the variational inequality and a quadratic
//! Lyapunov candidate over the whole strategy grid.

use crate::commands::parse_floats;
use crate::manifest::Manifest;
use crate::output::{fmt_bool, fmt_f64, indexed, write_csv, write_json};
use crate::spec_file::{resolve_game, LoadedGame};
use clap::Args;
use gdl_core::equilibrium::fixed_point_solve;
use gdl_core::grid::ProductGrid;
use gdl_core::stability::{
    lyapunov_scan_continuous, lyapunov_scan_discrete, vs_scan, QuadraticLyapunov, RegionScan,
    VsScanReport,
};
use gdl_core::{GdlError, Result};
use serde_json::json;
use std::path::{Path, PathBuf};

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Builtin game name or path to a TOML game file
    #[arg(long)]
    pub game: String,
    /// Override a game parameter (repeatable, KEY=VALUE)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Equilibrium to center on (float list); solved from the set center
    /// when omitted
    #[arg(long)]
    pub eq: Option<String>,
    /// Lyapunov candidate: identity or diag:w_0,w_1,...
    #[arg(long, default_value = "identity")]
    pub lyapunov: String,
    /// Decrease notion: the eta-step map (discrete) or the flow
    /// derivative (continuous)
    #[arg(long, default_value = "discrete")]
    pub mode: String,
    /// Learning rate of the step map (discrete mode)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Grid points per free dimension
    #[arg(long)]
    pub resolution: Option<usize>,
}

/// Everything the basin command reuses: the scan plus its grid identity.
pub struct ScanProducts {
    pub scan: RegionScan,
    pub vs: VsScanReport,
    pub identity_lyapunov: bool,
}

pub fn run(args: &ScanArgs, man: &mut Manifest, threads: usize) -> Result<ScanProducts> {
    let loaded = resolve_game(&args.game, &args.params)?;
    let game = loaded.game.as_ref();
    man.game = Some(loaded.label.clone());

    let center = resolve_center(args, &loaded)?;
    let lyap = parse_lyapunov(&args.lyapunov, &center)?;
    let identity_lyapunov = args.lyapunov == "identity";
    let resolution = args.resolution.or(loaded.defaults.resolution);
    let grid = ProductGrid::over(game.feasible_set(), resolution)?;

    let eta = args.eta.or(loaded.defaults.eta).unwrap_or(0.05);
    let scan = match args.mode.as_str() {
        "discrete" => lyapunov_scan_discrete(game, &lyap, eta, &grid, threads)?,
        "continuous" => lyapunov_scan_continuous(game, &lyap, &grid, threads)?,
        other => {
            return Err(GdlError::input(format!(
                "unknown mode {other:?}; expected discrete or continuous"
            )))
        }
    };
    let vs = vs_scan(game, &center, &grid, threads)?;

    man.config = json!({
        "mode": args.mode,
        "eta": scan.eta,
        "resolution": resolution,
        "points": grid.len(),
        "center": center,
        "lyapunov": args.lyapunov,
    });

    write_scan_csv(&args.out.join("scan.csv"), &scan)?;
    man.record_output("scan.csv");
    write_json(&args.out.join("scan_summary.json"), &summary_json(&scan, &vs))?;
    man.record_output("scan_summary.json");
    Ok(ScanProducts { scan, vs, identity_lyapunov })
}

fn resolve_center(args: &ScanArgs, loaded: &LoadedGame) -> Result<Vec<f64>> {
    let game = loaded.game.as_ref();
    let set = game.feasible_set();
    match &args.eq {
        Some(spec) => set.ingest(&parse_floats(spec)?),
        None => {
            let out = fixed_point_solve(game, &set.center(), 0.2, 1e-10, 200_000)?;
            if !out.converged {
                return Err(GdlError::numerical(
                    "fixed-point iteration from the center did not settle; \
                     pass --eq explicitly",
                ));
            }
            Ok(out.x)
        }
    }
}

fn parse_lyapunov(spec: &str, center: &[f64]) -> Result<QuadraticLyapunov> {
    if spec == "identity" {
        return Ok(QuadraticLyapunov::identity(center.to_vec()));
    }
    if let Some(ws) = spec.strip_prefix("diag:") {
        let w = parse_floats(ws)?;
        return QuadraticLyapunov::diagonal(center.to_vec(), &w);
    }
    Err(GdlError::input(format!(
        "bad --lyapunov {spec:?}; expected identity or diag:w_0,w_1,..."
    )))
}

/// The in_Uc column is all zeros until a basin certificate fills it in.
pub fn write_scan_csv(path: &Path, scan: &RegionScan) -> Result<()> {
    let d = scan.center.len();
    let mut header = indexed("x", d);
    header.extend(
        ["V", "s", "deltaV", "deltaVbar", "in_V", "in_Vbar", "in_Uc"].map(String::from),
    );
    let rows = (0..scan.grid.len()).map(|i| {
        let mut row: Vec<String> =
            scan.grid.point(i).iter().map(|v| fmt_f64(*v)).collect();
        row.push(fmt_f64(scan.v[i]));
        row.push(fmt_f64(scan.s[i]));
        row.push(fmt_f64(scan.delta_v[i]));
        row.push(fmt_f64(scan.delta_vbar[i]));
        row.push(fmt_bool(scan.in_v[i]).to_string());
        row.push(fmt_bool(scan.in_vbar[i]).to_string());
        row.push(fmt_bool(scan.in_uc[i]).to_string());
        row
    });
    write_csv(path, &header, rows)
}

pub fn summary_json(scan: &RegionScan, vs: &VsScanReport) -> serde_json::Value {
    json!({
        "kind": scan.kind,
        "points": scan.grid.len(),
        "center": scan.center,
        "eta": scan.eta,
        "counts": {
            "in_V": scan.in_v.iter().filter(|b| **b).count(),
            "in_Vbar": scan.in_vbar.iter().filter(|b| **b).count(),
            "in_Uc": scan.in_uc.iter().filter(|b| **b).count(),
        },
        "inclusion_violations": scan.inclusion_violations,
        "certified_c": scan.certified_c,
        "variational": vs,
    })
}
