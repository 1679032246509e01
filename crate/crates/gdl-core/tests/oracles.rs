//! Cross-checks against independently coded references: a Dykstra QP solver
//! for tangent-cone projections, brute-force best-response equilibrium
//! search, closed-form growth laws, and a hand-stepped bandit round.

use gdl_core::dynamics::{make_dynamics, Horizon, SimulationConfig};
use gdl_core::equilibrium::{enumerate_pure_nash, fixed_point_solve, vi_gap, CandidateKind};
use gdl_core::game::{load_builtin, FiniteGame, Game};
use gdl_core::learning::{simulate_selfplay, BanditState};
use gdl_core::linalg::{dist, dot, norm, sub};
use gdl_core::projection::{project_simplex, project_simplex_tangent};
use gdl_core::rng::stream_rng;
use gdl_core::stability::vs_value;
use rand::Rng;
use std::collections::BTreeMap;

fn load(name: &str) -> Box<dyn Game> {
    load_builtin(name, &BTreeMap::new()).unwrap()
}

/// Dykstra's alternating projection onto {sum w = 0} intersect {w_i >= 0
/// for active i}: an independent route to the tangent-cone projection.
fn dykstra_tangent(x: &[f64], v: &[f64], iters: usize) -> Vec<f64> {
    let d = x.len();
    let active: Vec<bool> = x.iter().map(|&xi| xi <= 1e-10).collect();
    let mut w = v.to_vec();
    let mut p = vec![0.0; d];
    let mut q = vec![0.0; d];
    for _ in 0..iters {
        // Project w + p onto the zero-sum hyperplane.
        let y: Vec<f64> = (0..d).map(|i| w[i] + p[i]).collect();
        let mean = y.iter().sum::<f64>() / d as f64;
        let w1: Vec<f64> = y.iter().map(|yi| yi - mean).collect();
        for i in 0..d {
            p[i] = y[i] - w1[i];
        }
        // Project w1 + q onto the active-coordinate orthant.
        let z: Vec<f64> = (0..d).map(|i| w1[i] + q[i]).collect();
        let w2: Vec<f64> = (0..d)
            .map(|i| if active[i] { z[i].max(0.0) } else { z[i] })
            .collect();
        for i in 0..d {
            q[i] = z[i] - w2[i];
        }
        w = w2;
    }
    w
}

#[test]
fn tangent_cone_projection_agrees_with_dykstra() {
    let mut rng = stream_rng(314, 0);
    for case in 0..100 {
        let d = 2 + case % 4;
        // Build a simplex point with a random subset of near-zero coords.
        let mut x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        for xi in x.iter_mut() {
            if rng.random::<f64>() < 0.4 {
                *xi = 0.0;
            }
        }
        let x = project_simplex(&x);
        let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let fast = project_simplex_tangent(&x, &v).unwrap();
        let slow = dykstra_tangent(&x, &v, 4000);
        assert!(
            dist(&fast, &slow) < 1e-6,
            "case {case}: x={x:?} v={v:?} fast={fast:?} dykstra={slow:?}"
        );
    }
}

#[test]
fn dilemma_gap_at_uniform_is_exactly_three_halves() {
    // Best response value 3 against a uniform opponent versus achieved 9/4,
    // per player 3/4, summed 3/2.
    let g = load("prisoners_dilemma");
    let gap = vi_gap(g.as_ref(), &[0.5, 0.5, 0.5, 0.5]).unwrap();
    assert!((gap - 1.5).abs() < 1e-14, "gap {gap}");
}

/// Naive best-response check written without the library's enumeration
/// internals: a profile is an equilibrium iff each player's action attains
/// the maximum over own deviations.
fn brute_force_pure_nash(game: &FiniteGame) -> Vec<(Vec<usize>, bool)> {
    let counts = game.action_counts();
    let mut out = Vec::new();
    for profile in game.profiles() {
        let mut is_eq = true;
        let mut strict = true;
        for i in 0..counts.len() {
            let here = game.payoff(i, &profile);
            for a in 0..counts[i] {
                if a == profile[i] {
                    continue;
                }
                let mut dev = profile.clone();
                dev[i] = a;
                let there = game.payoff(i, &dev);
                if there > here + 1e-9 {
                    is_eq = false;
                }
                if there >= here - 1e-9 {
                    strict = false;
                }
            }
        }
        if is_eq {
            out.push((profile, strict));
        }
    }
    out
}

#[test]
fn pure_equilibrium_enumeration_matches_brute_force_on_random_games() {
    let mut rng = stream_rng(2718, 1);
    for case in 0..50 {
        let players = 2 + case % 2;
        let counts: Vec<usize> = (0..players).map(|_| 2 + rng.random_range(0..3)).collect();
        let total: usize = counts.iter().product();
        let payoffs: Vec<Vec<f64>> = (0..players)
            .map(|_| (0..total).map(|_| (rng.random_range(0..7) as f64) - 3.0).collect())
            .collect();
        let game = FiniteGame::new("random", counts, payoffs).unwrap();
        let expected = brute_force_pure_nash(&game);
        let found = enumerate_pure_nash(&game).unwrap();
        assert_eq!(found.len(), expected.len(), "case {case}");
        for (cand, (profile, strict)) in found.iter().zip(&expected) {
            match &cand.kind {
                CandidateKind::Pure { profile: p } => assert_eq!(p, profile, "case {case}"),
                other => panic!("unexpected kind {:?}", other.label()),
            }
            assert_eq!(cand.strict, Some(*strict), "case {case} at {profile:?}");
        }
    }
}

#[test]
fn vertex_variational_values_equal_deviation_sums() {
    // At a vertex x_a the field components are the pure payoffs, so
    // <F(x_a), x_a - x_b> telescopes into per-player deviation sums --
    // for every ordered pair of profiles, exactly.
    for name in [
        "prisoners_dilemma",
        "battle_of_sexes",
        "matching_pennies",
        "milionis_cycle",
        "weak_pne_cycle",
        "extended_matching_pennies",
    ] {
        let g = load(name);
        let fg = g.as_finite().unwrap();
        let counts = fg.action_counts().to_vec();
        let profiles: Vec<Vec<usize>> = fg.profiles().collect();
        for a_star in &profiles {
            let x_star = vertex_of(&counts, a_star);
            for a in &profiles {
                let x = vertex_of(&counts, a);
                let s = vs_value(g.as_ref(), &x_star, &x).unwrap();
                let mut sum = 0.0;
                for i in 0..counts.len() {
                    let mut swapped = a.clone();
                    swapped[i] = a_star[i];
                    sum += fg.payoff(i, a) - fg.payoff(i, &swapped);
                }
                assert!(
                    (s - sum).abs() < 1e-9,
                    "{name}: a*={a_star:?} a={a:?} s={s} sum={sum}"
                );
            }
        }
    }
}

fn vertex_of(counts: &[usize], profile: &[usize]) -> Vec<f64> {
    let mut x = Vec::new();
    for (i, &k) in counts.iter().enumerate() {
        for a in 0..k {
            x.push(if a == profile[i] { 1.0 } else { 0.0 });
        }
    }
    x
}

#[test]
fn pennies_expansion_follows_the_growth_law() {
    // With the antisymmetric pennies field, one interior ascent step scales
    // the squared distance to the equilibrium by exactly 1 + 4 eta^2.
    let g = load("matching_pennies");
    let dynamics = make_dynamics("discrete").unwrap();
    let cfg = SimulationConfig { horizon: Horizon::Steps(20), ..Default::default() };
    let eq = [0.5, 0.5, 0.5, 0.5];
    let rec = dynamics.simulate(g.as_ref(), &[0.6, 0.4, 0.5, 0.5], &cfg).unwrap();
    let factor = 1.0 + 4.0 * cfg.eta * cfg.eta;
    for t in 0..20 {
        let d0 = dist(&rec.states[t], &eq);
        let d1 = dist(&rec.states[t + 1], &eq);
        assert!(rec.states[t + 1].iter().all(|&c| c > 0.0 && c < 1.0), "left interior at {t}");
        assert!(
            (d1 * d1 - factor * d0 * d0).abs() < 1e-12,
            "step {t}: {} vs {}",
            d1 * d1,
            factor * d0 * d0
        );
    }
}

#[test]
fn contest_fixed_point_iteration_agrees_with_the_closed_form() {
    let g = load("tullock");
    // F vanishes at (1/2, 1/2): share gradient 2*x1*x2^2/s^2 = 1 exactly.
    assert!(norm(&g.gradient(&[0.5, 0.5]).unwrap()) < 1e-15);
    let out = fixed_point_solve(g.as_ref(), &[0.3, 0.8], 0.2, 1e-12, 100_000).unwrap();
    assert!(out.converged);
    assert!(dist(&out.x, &[0.5, 0.5]) < 1e-8, "landed at {:?}", out.x);
}

#[test]
fn one_selfplay_round_replayed_by_hand() {
    // Re-derive round one of self-play with nothing but the public RNG and
    // bandit pieces and demand bitwise agreement.
    let g = load("prisoners_dilemma");
    let fg = g.as_finite().unwrap();
    let rec = simulate_selfplay(fg, 1, 99, 0).unwrap();

    let mut expected_profile = Vec::new();
    let mut bandits = Vec::new();
    for i in 0..2 {
        let b = BanditState::for_horizon(2, 1).unwrap();
        let mut rng = stream_rng(99, i as u64);
        expected_profile.push(b.sample(&mut rng));
        bandits.push(b);
    }
    assert_eq!(rec.history.actions[0], expected_profile);

    let us: Vec<f64> = (0..2).map(|i| fg.payoff(i, &expected_profile)).collect();
    assert_eq!(rec.history.payoffs[0], us);
    // Payoff range of the dilemma matrix is [0, 5].
    assert_eq!(rec.payoff_range, (0.0, 5.0));
    for i in 0..2 {
        let probs = bandits[i].probabilities();
        bandits[i].update(expected_profile[i], us[i] / 5.0, probs[expected_profile[i]]).unwrap();
        assert_eq!(rec.final_strategies[i], bandits[i].probabilities());
    }
}

#[test]
fn flow_and_map_tell_the_same_contest_story() {
    // The global projection flow at unit learning rate relaxes to the same
    // rest point the discrete map converges to.
    let g = load("tullock");
    let discrete = make_dynamics("discrete").unwrap();
    let flow = make_dynamics("gpds").unwrap();
    let d_rec = discrete
        .simulate(g.as_ref(), &[0.9, 0.2], &SimulationConfig::default())
        .unwrap();
    let f_rec = flow
        .simulate(
            g.as_ref(),
            &[0.9, 0.2],
            &SimulationConfig { eta: 1.0, horizon: Horizon::Time(50.0), ..Default::default() },
        )
        .unwrap();
    let d_end = d_rec.states.last().unwrap();
    let f_end = f_rec.states.last().unwrap();
    assert!(dist(d_end, &[0.5, 0.5]) < 1e-6);
    assert!(dist(f_end, &[0.5, 0.5]) < 1e-4);
}

#[test]
fn box_gap_oracle_on_the_duopoly() {
    // vi gap on a box sums the best coordinatewise moves: at the origin of
    // the duopoly both players see F_i = 1 and a unit of room, so gap = 2.
    let g = load("cournot");
    let gap = vi_gap(g.as_ref(), &[0.0, 0.0]).unwrap();
    assert!((gap - 2.0).abs() < 1e-12, "gap {gap}");
    let f = g.gradient(&[0.0, 0.0]).unwrap();
    assert!((dot(&f, &sub(&[1.0, 1.0], &[0.0, 0.0])) - 2.0).abs() < 1e-12);
}
