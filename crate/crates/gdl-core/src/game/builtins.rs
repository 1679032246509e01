//! Builtin catalog of benchmark games, addressable by name with optional
//! scalar parameters.

use super::{BimatrixGame, ContinuousGame, Game};
use crate::error::{GdlError, Result};
use std::collections::BTreeMap;

/// Names accepted by [`load_builtin`], in catalog order.
pub fn builtin_names() -> &'static [&'static str] {
    &[
        "tullock",
        "spiral",
        "cournot",
        "prisoners_dilemma",
        "battle_of_sexes",
        "matching_pennies",
        "extended_matching_pennies",
        "milionis_cycle",
        "weak_pne_cycle",
    ]
}

struct ParamReader<'a> {
    game: &'a str,
    params: &'a BTreeMap<String, f64>,
    allowed: &'a [&'a str],
}

impl<'a> ParamReader<'a> {
    fn new(game: &'a str, params: &'a BTreeMap<String, f64>, allowed: &'a [&'a str]) -> Result<Self> {
        for k in params.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(GdlError::input(format!(
                    "unknown parameter `{k}` for builtin `{game}` (accepted: {})",
                    if allowed.is_empty() { "none".to_string() } else { allowed.join(", ") }
                )));
            }
        }
        Ok(ParamReader { game, params, allowed })
    }

    fn get(&self, key: &str, default: f64) -> f64 {
        debug_assert!(self.allowed.contains(&key), "{} param {}", self.game, key);
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// Instantiate a catalog game by name. Parameters are scalar key-value pairs;
/// unknown names and out-of-range parameters are input errors.
pub fn load_builtin(name: &str, params: &BTreeMap<String, f64>) -> Result<Box<dyn Game>> {
    match name {
        "tullock" => tullock(params),
        "spiral" => spiral(params),
        "cournot" => cournot(params),
        "prisoners_dilemma" => {
            ParamReader::new(name, params, &[])?;
            bimatrix(
                "prisoners_dilemma",
                vec![vec![3.0, 0.0], vec![5.0, 1.0]],
                vec![vec![3.0, 5.0], vec![0.0, 1.0]],
            )
        }
        "battle_of_sexes" => {
            ParamReader::new(name, params, &[])?;
            bimatrix(
                "battle_of_sexes",
                vec![vec![2.0, 0.0], vec![0.0, 3.0]],
                vec![vec![3.0, 0.0], vec![0.0, 2.0]],
            )
        }
        "matching_pennies" => {
            ParamReader::new(name, params, &[])?;
            bimatrix(
                "matching_pennies",
                vec![vec![1.0, -1.0], vec![-1.0, 1.0]],
                vec![vec![-1.0, 1.0], vec![1.0, -1.0]],
            )
        }
        "extended_matching_pennies" => extended_matching_pennies(params),
        "milionis_cycle" => {
            ParamReader::new(name, params, &[])?;
            bimatrix(
                "milionis_cycle",
                vec![
                    vec![1.0, 0.0, -1.0],
                    vec![-1.0, 0.0, -1.0],
                    vec![1.0, 0.0, -2.0],
                ],
                vec![
                    vec![1.0, -1.0, 1.0],
                    vec![0.0, 0.0, 0.0],
                    vec![-1.0, -1.0, 2.0],
                ],
            )
        }
        "weak_pne_cycle" => {
            ParamReader::new(name, params, &[])?;
            bimatrix(
                "weak_pne_cycle",
                vec![
                    vec![1.0, 2.0, 3.0],
                    vec![0.0, 2.0, 0.0],
                    vec![3.0, 2.0, 1.0],
                ],
                vec![
                    vec![3.0, 0.0, 1.0],
                    vec![1.0, 2.0, 2.0],
                    vec![1.0, 0.0, 3.0],
                ],
            )
        }
        _ => Err(GdlError::input(format!(
            "unknown builtin game `{name}` (available: {})",
            builtin_names().join(", ")
        ))),
    }
}

fn bimatrix(name: &str, a1: Vec<Vec<f64>>, a2: Vec<Vec<f64>>) -> Result<Box<dyn Game>> {
    Ok(Box::new(BimatrixGame::new(a1, a2)?.into_finite(name)?))
}

/// Two-player rent-seeking contest with exponent `r` and prize `v` on
/// `[1e-3, v]^2`. Utilities carry a fixed 1/4 scale so the interior
/// equilibrium Jacobian at r = 2 is `diag(-1/2, -1/2)`.
fn tullock(params: &BTreeMap<String, f64>) -> Result<Box<dyn Game>> {
    let p = ParamReader::new("tullock", params, &["v", "r"])?;
    let v = p.get("v", 1.0);
    let r = p.get("r", 2.0);
    if !(v.is_finite() && v > 1e-3) {
        return Err(GdlError::input("tullock prize `v` must exceed the domain floor 1e-3"));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(GdlError::input("tullock exponent `r` must be positive"));
    }
    const SCALE: f64 = 0.25;
    let share = move |own: f64, other: f64| own.powf(r) / (own.powf(r) + other.powf(r));
    let u1 = move |x: &[f64]| SCALE * (share(x[0], x[1]) * v - x[0]);
    let u2 = move |x: &[f64]| SCALE * (share(x[1], x[0]) * v - x[1]);
    let grad = move |x: &[f64]| {
        let s = x[0].powf(r) + x[1].powf(r);
        let g = |own: f64, other: f64| {
            SCALE * (r * v * own.powf(r - 1.0) * other.powf(r) / (s * s) - 1.0)
        };
        vec![g(x[0], x[1]), g(x[1], x[0])]
    };
    let game = ContinuousGame::new(
        "tullock",
        vec![1, 1],
        vec![1e-3, 1e-3],
        vec![v, v],
        vec![Box::new(u1), Box::new(u2)],
    )?
    .with_gradient(Box::new(grad));
    if (r - 2.0).abs() < 1e-15 {
        let jac = move |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            let s = a * a + b * b;
            let s3 = s * s * s;
            let c = SCALE * v;
            vec![
                vec![
                    c * 2.0 * b * b * (s - 4.0 * a * a) / s3,
                    c * 4.0 * a * b * (s - 2.0 * b * b) / s3,
                ],
                vec![
                    c * 4.0 * a * b * (s - 2.0 * a * a) / s3,
                    c * 2.0 * a * a * (s - 4.0 * b * b) / s3,
                ],
            ]
        };
        Ok(Box::new(game.with_jacobian(Box::new(jac))))
    } else {
        Ok(Box::new(game))
    }
}

/// Rotational two-player game on `[-c, c]^2` whose gradient field spirals
/// into the origin: no Nash improvement path argument applies, but a
/// quadratic Lyapunov function with weights (1, 2) certifies the sink.
fn spiral(params: &BTreeMap<String, f64>) -> Result<Box<dyn Game>> {
    let p = ParamReader::new("spiral", params, &["c"])?;
    let c = p.get("c", 1.0);
    if !(c.is_finite() && c > 0.0) {
        return Err(GdlError::input("spiral half-width `c` must be positive"));
    }
    let u1 = |x: &[f64]| -0.5 * x[0] * x[0] - 4.0 * x[0] * x[1];
    let u2 = |x: &[f64]| -0.25 * x[1] * x[1] + x[0] * x[1];
    let grad = |x: &[f64]| vec![-x[0] - 4.0 * x[1], x[0] - 0.5 * x[1]];
    let jac = |_: &[f64]| vec![vec![-1.0, -4.0], vec![1.0, -0.5]];
    Ok(Box::new(
        ContinuousGame::new(
            "spiral",
            vec![1, 1],
            vec![-c, -c],
            vec![c, c],
            vec![Box::new(u1), Box::new(u2)],
        )?
        .with_gradient(Box::new(grad))
        .with_jacobian(Box::new(jac)),
    ))
}

/// Duopoly with linear inverse demand `b0 - b1 x1 - b2 x2` and constant
/// marginal costs, quantities in `[0, xmax]`.
fn cournot(params: &BTreeMap<String, f64>) -> Result<Box<dyn Game>> {
    let p = ParamReader::new("cournot", params, &["b0", "b1", "b2", "c1", "c2", "xmax"])?;
    let b0 = p.get("b0", 1.0);
    let b1 = p.get("b1", 0.5);
    let b2 = p.get("b2", 0.5);
    let c1 = p.get("c1", 0.0);
    let c2 = p.get("c2", 0.0);
    let xmax = p.get("xmax", 1.0);
    for (k, v) in [("b0", b0), ("b1", b1), ("b2", b2), ("xmax", xmax)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(GdlError::input(format!("cournot parameter `{k}` must be positive")));
        }
    }
    if !c1.is_finite() || !c2.is_finite() || c1 < 0.0 || c2 < 0.0 {
        return Err(GdlError::input("cournot costs must be nonnegative"));
    }
    let price = move |x: &[f64]| b0 - b1 * x[0] - b2 * x[1];
    let u1 = move |x: &[f64]| x[0] * price(x) - c1 * x[0];
    let u2 = move |x: &[f64]| x[1] * price(x) - c2 * x[1];
    let grad = move |x: &[f64]| {
        vec![
            b0 - c1 - 2.0 * b1 * x[0] - b2 * x[1],
            b0 - c2 - b1 * x[0] - 2.0 * b2 * x[1],
        ]
    };
    let jac = move |_: &[f64]| vec![vec![-2.0 * b1, -b2], vec![-b1, -2.0 * b2]];
    Ok(Box::new(
        ContinuousGame::new(
            "cournot",
            vec![1, 1],
            vec![0.0, 0.0],
            vec![xmax, xmax],
            vec![Box::new(u1), Box::new(u2)],
        )?
        .with_gradient(Box::new(grad))
        .with_jacobian(Box::new(jac)),
    ))
}

/// 3x3 zero-sum-flavored matching game with a lure action: parameter `r`
/// pays on the diagonal corner, `q > 1` punishes leaving it.
fn extended_matching_pennies(params: &BTreeMap<String, f64>) -> Result<Box<dyn Game>> {
    let p = ParamReader::new("extended_matching_pennies", params, &["r", "q"])?;
    let r = p.get("r", 1.0);
    let q = p.get("q", 2.0);
    if !(r.is_finite() && r > 0.0) {
        return Err(GdlError::input("extended_matching_pennies parameter `r` must be positive"));
    }
    if !(q.is_finite() && q > 1.0) {
        return Err(GdlError::input("extended_matching_pennies parameter `q` must exceed 1"));
    }
    bimatrix(
        "extended_matching_pennies",
        vec![
            vec![r, -q, -q],
            vec![-q / 2.0, 1.0, -1.0],
            vec![-q / 2.0, -1.0, 1.0],
        ],
        vec![
            vec![r, -q / 2.0, -q / 2.0],
            vec![-q, -1.0, 1.0],
            vec![-q, 1.0, -1.0],
        ],
    )
}
