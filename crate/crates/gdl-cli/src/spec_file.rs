//! Game resolution: builtin names and TOML game files.
//!
//! A game argument is either the name of a builtin (`tullock`,
//! `matching_pennies`, ...) or a path to a TOML file:
//!
//! ```toml
//! kind = "builtin"
//! name = "tullock"
//!
//! [params]
//! v = 2.0
//!
//! [defaults]
//! eta = 0.1
//! ```
//!
//! or a fully explicit finite game:
//!
//! ```toml
//! kind = "finite"
//! name = "coordination"
//! actions = [2, 2]
//! payoffs = [[[2, 0], [0, 3]], [[3, 0], [0, 2]]]
//! ```
//!
//! `payoffs[i]` is player i's tensor, nested one level per player, indexed
//! `[a_0][a_1]...`. `--param key=value` overrides `[params]` entries, which
//! in turn override builtin defaults.

use gdl_core::game::{builtin_names, load_builtin, FiniteGame, Game};
use gdl_core::{GdlError, Result};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;

/// Per-file run defaults; explicit command-line flags win over these.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDefaults {
    pub eta: Option<f64>,
    pub h: Option<f64>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
    pub dynamics: Option<String>,
    pub seed: Option<u64>,
    pub resolution: Option<usize>,
    pub stop_tol: Option<f64>,
}

pub struct LoadedGame {
    pub game: Box<dyn Game>,
    pub defaults: SpecDefaults,
    /// Name recorded in the manifest: builtin name or spec-file `name`.
    pub label: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    kind: String,
    name: Option<String>,
    params: Option<BTreeMap<String, f64>>,
    actions: Option<Vec<usize>>,
    payoffs: Option<toml::Value>,
    #[serde(default)]
    defaults: SpecDefaults,
}

/// Parse repeated `key=value` override flags.
pub fn parse_overrides(entries: &[String]) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for e in entries {
        let (k, v) = e
            .split_once('=')
            .ok_or_else(|| GdlError::input(format!("--param {e:?} is not KEY=VALUE")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| GdlError::input(format!("--param {e:?}: value is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

pub fn resolve_game(arg: &str, overrides: &[String]) -> Result<LoadedGame> {
    let overrides = parse_overrides(overrides)?;
    let looks_like_path =
        arg.ends_with(".toml") || arg.contains('/') || arg.contains('\\');
    if looks_like_path {
        return load_spec_file(Path::new(arg), overrides);
    }
    if !builtin_names().contains(&arg) {
        return Err(GdlError::input(format!(
            "unknown game {arg:?}; builtins are {} (or pass a TOML file path)",
            builtin_names().join(", ")
        )));
    }
    let game = load_builtin(arg, &overrides)?;
    Ok(LoadedGame { game, defaults: SpecDefaults::default(), label: arg.to_string() })
}

fn load_spec_file(path: &Path, overrides: BTreeMap<String, f64>) -> Result<LoadedGame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GdlError::input(format!("cannot read {}: {e}", path.display())))?;
    let spec: SpecFile = toml::from_str(&text)
        .map_err(|e| GdlError::input(format!("{}: {e}", path.display())))?;
    match spec.kind.as_str() {
        "builtin" => {
            let name = spec
                .name
                .ok_or_else(|| GdlError::input("kind = \"builtin\" requires a name"))?;
            let mut params = spec.params.unwrap_or_default();
            params.extend(overrides);
            let game = load_builtin(&name, &params)?;
            Ok(LoadedGame { game, defaults: spec.defaults, label: name })
        }
        "finite" => {
            if !overrides.is_empty() {
                return Err(GdlError::input(
                    "--param overrides only apply to builtin games",
                ));
            }
            if spec.params.is_some() {
                return Err(GdlError::input("[params] only applies to builtin games"));
            }
            let name = spec.name.unwrap_or_else(|| "finite".to_string());
            let payoffs = spec
                .payoffs
                .ok_or_else(|| GdlError::input("kind = \"finite\" requires payoffs"))?;
            let game = parse_finite(&name, spec.actions, &payoffs)?;
            Ok(LoadedGame { game: Box::new(game), defaults: spec.defaults, label: name })
        }
        other => Err(GdlError::input(format!(
            "unknown kind {other:?}; expected \"builtin\" or \"finite\""
        ))),
    }
}

fn parse_finite(
    name: &str,
    actions: Option<Vec<usize>>,
    payoffs: &toml::Value,
) -> Result<FiniteGame> {
    let tensors = payoffs
        .as_array()
        .ok_or_else(|| GdlError::input("payoffs must be an array with one tensor per player"))?;
    if tensors.is_empty() {
        return Err(GdlError::input("payoffs is empty"));
    }
    let shape = match actions {
        Some(s) => s,
        None => infer_shape(&tensors[0], tensors.len())?,
    };
    if shape.len() != tensors.len() {
        return Err(GdlError::input(format!(
            "{} payoff tensors for {} players",
            tensors.len(),
            shape.len()
        )));
    }
    let mut flat = Vec::with_capacity(tensors.len());
    for (i, t) in tensors.iter().enumerate() {
        let mut out = Vec::with_capacity(shape.iter().product());
        flatten(t, &shape, &mut format!("payoffs[{i}]"), &mut out)?;
        flat.push(out);
    }
    FiniteGame::new(name, shape, flat)
}

/// Take nesting lengths down the first branch as the action counts.
fn infer_shape(tensor: &toml::Value, players: usize) -> Result<Vec<usize>> {
    let mut shape = Vec::with_capacity(players);
    let mut cur = tensor;
    for _ in 0..players {
        let arr = cur.as_array().ok_or_else(|| {
            GdlError::input(format!(
                "payoffs[0] nests {} levels deep, expected {players}",
                shape.len()
            ))
        })?;
        if arr.is_empty() {
            return Err(GdlError::input("a payoff dimension is empty"));
        }
        shape.push(arr.len());
        cur = &arr[0];
    }
    if cur.as_array().is_some() {
        return Err(GdlError::input(format!(
            "payoffs[0] nests deeper than {players} levels; pass `actions` if the \
             player count is not the nesting depth"
        )));
    }
    Ok(shape)
}

fn flatten(v: &toml::Value, shape: &[usize], path: &mut String, out: &mut Vec<f64>) -> Result<()> {
    match shape.split_first() {
        None => match v {
            toml::Value::Integer(n) => {
                out.push(*n as f64);
                Ok(())
            }
            toml::Value::Float(x) => {
                out.push(*x);
                Ok(())
            }
            _ => Err(GdlError::input(format!("{path} is not a number"))),
        },
        Some((&len, rest)) => {
            let arr = v
                .as_array()
                .ok_or_else(|| GdlError::input(format!("{path} is not an array")))?;
            if arr.len() != len {
                return Err(GdlError::input(format!(
                    "{path} has length {}, expected {len}",
                    arr.len()
                )));
            }
            for (k, item) in arr.iter().enumerate() {
                let mark = path.len();
                path.push_str(&format!("[{k}]"));
                flatten(item, rest, path, out)?;
                path.truncate(mark);
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn resolve_err(arg: &str) -> String {
        match resolve_game(arg, &[]) {
            Err(e) => e.to_string(),
            Ok(_) => panic!("{arg} resolved"),
        }
    }

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn builtin_by_name() {
        let loaded = resolve_game("tullock", &[]).unwrap();
        assert_eq!(loaded.label, "tullock");
        assert_eq!(loaded.game.num_players(), 2);
    }

    #[test]
    fn unknown_name_lists_the_builtins() {
        let err = resolve_err("nim");
        assert!(err.contains("tullock"), "{err}");
    }

    #[test]
    fn finite_spec_round_trip() {
        let f = write_temp(
            r#"
kind = "finite"
name = "coordination"
payoffs = [[[2, 0], [0, 3]], [[3, 0], [0, 2]]]

[defaults]
eta = 0.1
"#,
        );
        let loaded = resolve_game(f.path().to_str().unwrap(), &[]).unwrap();
        assert_eq!(loaded.label, "coordination");
        assert_eq!(loaded.game.dims(), &[2, 2]);
        assert_eq!(loaded.defaults.eta, Some(0.1));
        let fg = loaded.game.as_finite().unwrap();
        assert_eq!(fg.payoff(0, &[1, 1]), 3.0);
        assert_eq!(fg.payoff(1, &[0, 0]), 3.0);
    }

    #[test]
    fn ragged_payoffs_name_the_offending_row() {
        let f = write_temp(r#"
kind = "finite"
payoffs = [[[2, 0], [0, 3, 1]], [[3, 0], [0, 2]]]
"#);
        let err = resolve_err(f.path().to_str().unwrap());
        assert!(err.contains("payoffs[0][1]"), "{err}");
    }

    #[test]
    fn builtin_spec_with_param_override() {
        let f = write_temp(
            r#"
kind = "builtin"
name = "tullock"

[params]
v = 2.0
"#,
        );
        let spec = resolve_game(f.path().to_str().unwrap(), &[]).unwrap();
        let cli = resolve_game(f.path().to_str().unwrap(), &["v=3.0".into()]).unwrap();
        // The prize scales the upper bound of the strategy box.
        let hi_of = |g: &LoadedGame| match g.game.feasible_set() {
            gdl_core::projection::FeasibleSet::Box { hi, .. } => hi[0],
            _ => panic!("expected a box"),
        };
        assert_eq!(hi_of(&spec), 2.0);
        assert_eq!(hi_of(&cli), 3.0);
    }
}
