//! `gdl basin`: run a scan and certify a sublevel basin from it.
//!
//! The scan artifacts hit the disk before certification is attempted, so a
//! failed certificate (exit code 2) still leaves the full grid evidence in
//! the output directory.

use crate::commands::scan::{self, ScanArgs};
use crate::manifest::Manifest;
use crate::output::write_json;
use gdl_core::stability::certify_basin;
use gdl_core::Result;
use serde_json::json;

pub fn run(args: &ScanArgs, man: &mut Manifest, threads: usize) -> Result<()> {
    let mut products = scan::run(args, man, threads)?;
    let c = certify_basin(&mut products.scan)?;

    // Refresh the per-point table now that in_Uc is populated.
    scan::write_scan_csv(&args.out.join("scan.csv"), &products.scan)?;
    write_json(
        &args.out.join("scan_summary.json"),
        &scan::summary_json(&products.scan, &products.vs),
    )?;

    let basin = json!({
        "certified_c": c,
        // With V = |x - x*|^2 the certified set is a metric ball.
        "certified_radius": products.identity_lyapunov.then(|| c.sqrt()),
        "points_in_Uc": products.scan.in_uc.iter().filter(|b| **b).count(),
    });
    write_json(&args.out.join("basin.json"), &basin)?;
    man.record_output("basin.json");
    Ok(())
}
