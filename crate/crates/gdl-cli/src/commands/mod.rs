//! One module per subcommand, plus the argument conventions they share.

pub mod analyze;
pub mod basin;
pub mod regret;
pub mod scan;
pub mod simulate;

use gdl_core::projection::FeasibleSet;
use gdl_core::rng::{stream_rng, STREAM_X0};
use gdl_core::{GdlError, Result};
use rand::Rng;

/// Parse a comma-separated float list (`0.5,0.5`).
pub fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| GdlError::input(format!("{tok:?} is not a number")))
        })
        .collect()
}

/// Resolve an initial-state spec:
///
/// * `center` — midpoint of the feasible set,
/// * `uniform` — one uniform draw,
/// * `uniform-perturbed` — center plus U(-0.01, 0.01) noise, projected,
/// * `vertex:K` — K-th vertex,
/// * `csv:PATH` — first data row of a CSV file,
/// * a bare float list `0.3,0.7,...`.
pub fn parse_x0(spec: &str, set: &FeasibleSet, seed: u64) -> Result<Vec<f64>> {
    match spec {
        "center" => Ok(set.center()),
        "uniform" => Ok(set.sample(&mut stream_rng(seed, STREAM_X0))),
        "uniform-perturbed" => {
            let mut rng = stream_rng(seed, STREAM_X0);
            let mut x = set.center();
            for c in x.iter_mut() {
                *c += rng.random::<f64>() * 0.02 - 0.01;
            }
            Ok(set.project(&x))
        }
        _ => {
            if let Some(k) = spec.strip_prefix("vertex:") {
                let k: usize = k
                    .parse()
                    .map_err(|_| GdlError::input(format!("bad vertex index {k:?}")))?;
                return set.vertex(k);
            }
            if let Some(path) = spec.strip_prefix("csv:") {
                return x0_from_csv(path, set);
            }
            if spec.contains(',') {
                return set.ingest(&parse_floats(spec)?);
            }
            Err(GdlError::input(format!(
                "bad --x0 {spec:?}; expected center, uniform, uniform-perturbed, \
                 vertex:K, csv:PATH, or a float list"
            )))
        }
    }
}

fn x0_from_csv(path: &str, set: &FeasibleSet) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GdlError::input(format!("cannot read {path}: {e}")))?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Ok(x) = parse_floats(line) {
            return set.ingest(&x);
        }
        // Skip a header row and keep looking for numbers.
    }
    Err(GdlError::input(format!("{path} has no numeric data row")))
}
