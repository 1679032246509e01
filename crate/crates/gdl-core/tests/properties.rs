//! Invariant suites: projection geometry, gradient consistency, trajectory
//! feasibility and determinism, operator structure flags, and no-regret
//! trends, exercised across the whole builtin catalog.

use gdl_core::dynamics::{make_dynamics, Horizon, LimitClassification, SimulationConfig};
use gdl_core::equilibrium::{analyze_equilibria, monotonicity_report, vi_gap, MonotonicityClass};
use gdl_core::game::{load_builtin, Game};
use gdl_core::learning::{external_regret, external_regret_total, simulate_selfplay};
use gdl_core::linalg::{dist, sub};
use gdl_core::projection::{project_simplex, FeasibleSet};
use gdl_core::rng::{stream_rng, STREAM_SAMPLES, STREAM_X0};
use proptest::prelude::*;
use rand::Rng;
use std::collections::BTreeMap;

fn load(name: &str) -> Box<dyn Game> {
    load_builtin(name, &BTreeMap::new()).unwrap()
}

const CATALOG: [&str; 9] = [
    "tullock",
    "spiral",
    "cournot",
    "prisoners_dilemma",
    "battle_of_sexes",
    "matching_pennies",
    "extended_matching_pennies",
    "milionis_cycle",
    "weak_pne_cycle",
];

proptest! {
    #[test]
    fn simplex_projection_lands_on_the_simplex(v in prop::collection::vec(-2.0f64..2.0, 2..6)) {
        let p = project_simplex(&v);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn simplex_projection_is_idempotent(v in prop::collection::vec(-2.0f64..2.0, 2..6)) {
        let p = project_simplex(&v);
        let pp = project_simplex(&p);
        prop_assert!(dist(&p, &pp) < 1e-12);
    }

    #[test]
    fn simplex_projection_is_nonexpansive(
        u in prop::collection::vec(-2.0f64..2.0, 3),
        v in prop::collection::vec(-2.0f64..2.0, 3),
    ) {
        let pu = project_simplex(&u);
        let pv = project_simplex(&v);
        prop_assert!(dist(&pu, &pv) <= dist(&u, &v) + 1e-12);
    }

    #[test]
    fn simplex_projection_satisfies_the_variational_characterization(
        v in prop::collection::vec(-2.0f64..2.0, 3),
        z in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let p = project_simplex(&v);
        let z = project_simplex(&z);
        // <v - p, z - p> <= 0 for every feasible z.
        let inner: f64 = sub(&v, &p).iter().zip(sub(&z, &p)).map(|(a, b)| a * b).sum();
        prop_assert!(inner <= 1e-10);
    }
}

#[test]
fn product_projections_are_nonexpansive_and_idempotent() {
    let sets = [
        FeasibleSet::simplex_product(vec![2, 3]).unwrap(),
        FeasibleSet::interval_box(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap(),
    ];
    let mut rng = stream_rng(1234, 0);
    for set in &sets {
        let d = set.dim();
        for _ in 0..10_000 {
            let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let pu = set.project(&u);
            let pv = set.project(&v);
            assert!(set.contains(&pu, 1e-10));
            assert!(dist(&pu, &set.project(&pu)) < 1e-12);
            assert!(dist(&pu, &pv) <= dist(&u, &v) + 1e-10);
        }
    }
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let h = 1e-6;
    for name in CATALOG {
        let g = load(name);
        let set = g.feasible_set();
        let mut rng = stream_rng(777, STREAM_SAMPLES);
        // The finite games differentiate their multilinear extension, which
        // is defined off the simplex; box games need a small interior margin
        // so both FD evaluations stay in the domain.
        let value: Box<dyn Fn(usize, &[f64]) -> f64> = match g.as_finite() {
            Some(fg) => {
                let fg = fg.clone();
                Box::new(move |i, x| fg.expected_utility(i, x))
            }
            None => {
                let gref = load(name);
                Box::new(move |i, x| gref.utility(i, x).unwrap())
            }
        };
        for _ in 0..100 {
            let mut x = set.sample(&mut rng);
            if let FeasibleSet::Box { lo, hi } = set {
                for (k, c) in x.iter_mut().enumerate() {
                    *c = c.clamp(lo[k] + 2.0 * h, hi[k] - 2.0 * h);
                }
            }
            let grad = g.gradient_unchecked(&x);
            for i in 0..g.num_players() {
                let (lo, len) = (g.block_offset(i), g.dims()[i]);
                for k in 0..len {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[lo + k] += h;
                    xm[lo + k] -= h;
                    let fd = (value(i, &xp) - value(i, &xm)) / (2.0 * h);
                    let denom = grad[lo + k].abs().max(1.0);
                    assert!(
                        (grad[lo + k] - fd).abs() / denom < 1e-5,
                        "{name} player {i} coord {k}: {} vs fd {}",
                        grad[lo + k],
                        fd
                    );
                }
            }
        }
    }
}

#[test]
fn finite_game_jacobians_have_zero_own_blocks() {
    for name in ["prisoners_dilemma", "milionis_cycle", "extended_matching_pennies"] {
        let g = load(name);
        let x = g.feasible_set().center();
        let jac = g.jacobian(&x);
        for i in 0..g.num_players() {
            let (lo, len) = (g.block_offset(i), g.dims()[i]);
            for r in lo..lo + len {
                for c in lo..lo + len {
                    assert_eq!(jac[r][c], 0.0, "{name}: own-block entry ({r},{c})");
                }
            }
        }
    }
}

#[test]
fn trajectories_stay_feasible_for_every_integrator() {
    for name in CATALOG {
        let g = load(name);
        let set = g.feasible_set();
        for dyn_name in ["discrete", "gpds", "lpds"] {
            let dynamics = make_dynamics(dyn_name).unwrap();
            for seed in 0..3u64 {
                let x0 = set.sample(&mut stream_rng(seed, STREAM_X0));
                let horizon = if dynamics.is_discrete() {
                    Horizon::Steps(200)
                } else {
                    Horizon::Time(0.2)
                };
                let cfg = SimulationConfig { horizon, ..Default::default() };
                let rec = dynamics.simulate(g.as_ref(), &x0, &cfg).unwrap();
                for (t, state) in rec.states.iter().enumerate() {
                    assert!(
                        set.contains(state, 1e-9),
                        "{name}/{dyn_name} seed {seed}: infeasible state at sample {t}"
                    );
                }
            }
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let g = load("matching_pennies");
    let dynamics = make_dynamics("discrete").unwrap();
    let cfg = SimulationConfig { horizon: Horizon::Steps(1000), ..Default::default() };
    let a = dynamics.simulate(g.as_ref(), &[0.6, 0.4, 0.5, 0.5], &cfg).unwrap();
    let b = dynamics.simulate(g.as_ref(), &[0.6, 0.4, 0.5, 0.5], &cfg).unwrap();
    assert_eq!(a.states, b.states);
    assert_eq!(a.gradient_norms, b.gradient_norms);

    let fg = load("battle_of_sexes");
    let fg = fg.as_finite().unwrap();
    let r1 = simulate_selfplay(fg, 2000, 5, 0).unwrap();
    let r2 = simulate_selfplay(fg, 2000, 5, 0).unwrap();
    assert_eq!(r1.history.actions, r2.history.actions);
    assert_eq!(r1.history.payoffs, r2.history.payoffs);
    assert_eq!(r1.final_strategies, r2.final_strategies);
}

#[test]
fn map_and_flow_endpoints_agree_better_at_smaller_steps() {
    // n ascent steps at rate eta track the global flow run to time n; the
    // gap shrinks with eta.
    let g = load("prisoners_dilemma");
    let discrete = make_dynamics("discrete").unwrap();
    let flow = make_dynamics("gpds").unwrap();
    let x0 = [0.5, 0.5, 0.5, 0.5];
    let mut gaps = Vec::new();
    for eta in [0.05, 0.005] {
        let d = discrete
            .simulate(
                g.as_ref(),
                &x0,
                &SimulationConfig { eta, horizon: Horizon::Steps(20), ..Default::default() },
            )
            .unwrap();
        let f = flow
            .simulate(
                g.as_ref(),
                &x0,
                &SimulationConfig {
                    eta,
                    horizon: Horizon::Time(20.0),
                    stop_tol: 1e-300,
                    ..Default::default()
                },
            )
            .unwrap();
        gaps.push(dist(d.states.last().unwrap(), f.states.last().unwrap()));
    }
    assert!(gaps[0] < 1e-3, "eta=0.05 gap {}", gaps[0]);
    assert!(gaps[1] < gaps[0], "gaps {gaps:?} not shrinking with eta");
}

#[test]
fn strongly_monotone_descent_never_moves_away() {
    let g = load("cournot");
    let eq = [2.0 / 3.0, 2.0 / 3.0];
    let set = g.feasible_set();
    let mut rng = stream_rng(31, STREAM_SAMPLES);
    let dynamics = make_dynamics("discrete").unwrap();
    let cfg = SimulationConfig { horizon: Horizon::Steps(50), ..Default::default() };
    for _ in 0..20 {
        let x0 = set.sample(&mut rng);
        let rec = dynamics.simulate(g.as_ref(), &x0, &cfg).unwrap();
        for w in rec.states.windows(2) {
            assert!(
                dist(&w[1], &eq) <= dist(&w[0], &eq) + 1e-12,
                "distance grew from {:?}",
                w[0]
            );
        }
    }
}

#[test]
fn contest_basin_runs_land_on_the_equilibrium() {
    let g = load("tullock");
    let set = g.feasible_set();
    let eq = [0.5, 0.5];
    let mut rng = stream_rng(11, STREAM_SAMPLES);
    let dynamics = make_dynamics("discrete").unwrap();
    let cfg = SimulationConfig { horizon: Horizon::Steps(20_000), ..Default::default() };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let x0 = loop {
            let c = set.sample(&mut rng);
            let d = sub(&c, &eq);
            if d.iter().map(|v| v * v).sum::<f64>() <= 0.119 {
                break c;
            }
        };
        let rec = dynamics.simulate(g.as_ref(), &x0, &cfg).unwrap();
        assert_eq!(rec.classification, LimitClassification::ConvergedPoint);
        worst = worst.max(dist(rec.states.last().unwrap(), &eq));
    }
    assert!(worst < 1e-5, "worst terminal distance {worst}");
}

#[test]
fn oscillating_flow_still_dissipates() {
    // The spiral's weighted energy x1^2 + 2 x2^2 decays along the global
    // flow while the first coordinate keeps changing sign.
    let g = load("spiral");
    let flow = make_dynamics("gpds").unwrap();
    let cfg = SimulationConfig { horizon: Horizon::Time(50.0), ..Default::default() };
    let rec = flow.simulate(g.as_ref(), &[0.5, 0.5], &cfg).unwrap();
    let v = |x: &[f64]| x[0] * x[0] + 2.0 * x[1] * x[1];
    let mut max_increase = f64::NEG_INFINITY;
    let mut sign_changes = 0;
    let mut prev_sign = rec.states[0][0].signum();
    for w in rec.states.windows(2) {
        max_increase = max_increase.max(v(&w[1]) - v(&w[0]));
        let s = w[1][0].signum();
        if w[1][0] != 0.0 && s != prev_sign {
            sign_changes += 1;
            prev_sign = s;
        }
    }
    assert!(v(rec.states.last().unwrap()) < 0.04);
    assert!(max_increase <= 1e-7, "energy rose by {max_increase} in one step");
    assert!(sign_changes >= 2, "only {sign_changes} sign changes");
}

#[test]
fn accepted_equilibria_have_negligible_gaps() {
    for name in CATALOG {
        let g = load(name);
        for cand in analyze_equilibria(g.as_ref()).unwrap() {
            assert!(
                cand.vi_gap <= 1e-10,
                "{name}: candidate {:?} has gap {}",
                cand.x,
                cand.vi_gap
            );
        }
    }
}

#[test]
fn gaps_are_positive_away_from_the_equilibrium() {
    let g = load("prisoners_dilemma");
    let eq = [0.0, 1.0, 0.0, 1.0];
    let mut rng = stream_rng(99, STREAM_SAMPLES);
    let set = g.feasible_set();
    for _ in 0..20 {
        let x = set.sample(&mut rng);
        if dist(&x, &eq) < 1e-3 {
            continue;
        }
        assert!(vi_gap(g.as_ref(), &x).unwrap() > 0.0, "zero gap at {x:?}");
    }
}

#[test]
fn structure_flags_across_the_catalog() {
    let cournot = monotonicity_report(load("cournot").as_ref(), None, 64, 0).unwrap();
    assert_eq!(cournot.classification, MonotonicityClass::StronglyMonotone);
    assert!(cournot.potential_game_candidate);
    assert!(!cournot.strategic_complements);

    let pd = monotonicity_report(load("prisoners_dilemma").as_ref(), None, 64, 0).unwrap();
    assert!(pd.strategic_complements);
    assert!(pd.classification < MonotonicityClass::Monotone);

    let mp = monotonicity_report(load("matching_pennies").as_ref(), None, 64, 0).unwrap();
    assert_eq!(mp.classification, MonotonicityClass::Monotone);
    assert!(!mp.potential_game_candidate);
}

#[test]
fn selfplay_distributions_are_proper() {
    for name in ["prisoners_dilemma", "matching_pennies", "extended_matching_pennies"] {
        let g = load(name);
        let rec = simulate_selfplay(g.as_finite().unwrap(), 400, 3, 100).unwrap();
        for snap in rec
            .snapshots
            .iter()
            .map(|(_, s)| s)
            .chain([&rec.average_strategies, &rec.final_strategies])
        {
            for p in snap {
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(p.iter().all(|&c| (0.0..=1.0).contains(&c)));
            }
        }
    }
}

#[test]
fn incremental_and_batch_regret_agree_bitwise() {
    for name in ["prisoners_dilemma", "battle_of_sexes", "matching_pennies"] {
        let g = load(name);
        let fg = g.as_finite().unwrap();
        let rec = simulate_selfplay(fg, 3000, 17, 0).unwrap();
        let incremental = external_regret(fg, &rec.history).unwrap();
        for (i, &total) in incremental.totals.iter().enumerate() {
            let batch = external_regret_total(fg, &rec.history, i).unwrap();
            assert_eq!(total, batch, "{name} player {i}");
        }
    }
}

#[test]
fn average_regret_shrinks_with_the_horizon() {
    // 3 games x 5 seeds. A single seed can get lucky at T = 1e3, so the
    // per-seed claim is only the sublinear ceiling; the mean across seeds
    // must actually fall.
    for name in ["prisoners_dilemma", "battle_of_sexes", "matching_pennies"] {
        let g = load(name);
        let fg = g.as_finite().unwrap();
        let mut short_sum = 0.0;
        let mut long_sum = 0.0;
        for seed in 0..5u64 {
            let rate = |t: usize| -> f64 {
                let rec = simulate_selfplay(fg, t, seed, 0).unwrap();
                let reg = external_regret(fg, &rec.history).unwrap();
                reg.totals.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / t as f64
            };
            let short = rate(1000);
            let long = rate(100_000);
            short_sum += short;
            long_sum += long;
            assert!(long <= 0.05, "{name} seed {seed}: R/T(1e5) = {long:.4}");
        }
        assert!(
            long_sum < short_sum,
            "{name}: mean R/T did not fall ({:.4} -> {:.4})",
            short_sum / 5.0,
            long_sum / 5.0
        );
    }
}
