//! Bandit learners playing repeated finite games: Exp3 with
//! importance-weighted updates, uncoupled self-play, and external regret
//! accounting against the realized opponent path.

use crate::error::{GdlError, Result};
use crate::game::{FiniteGame, Game};
use crate::rng::stream_rng;
use rand::Rng;
use serde::Serialize;

/// Exp3 learner over `k` arms: exploration-mixed exponential weights with
/// unbiased importance-weighted reward estimates.
#[derive(Debug, Clone, Serialize)]
pub struct BanditState {
    weights: Vec<f64>,
    gamma: f64,
    eta_lr: f64,
}

impl BanditState {
    pub fn new(k: usize, gamma: f64, eta_lr: f64) -> Result<Self> {
        if k < 2 {
            return Err(GdlError::input("a bandit needs at least two arms"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(GdlError::input("exploration rate gamma must lie in (0, 1]"));
        }
        if !(eta_lr > 0.0 && eta_lr.is_finite()) {
            return Err(GdlError::input("bandit learning rate must be positive"));
        }
        Ok(BanditState { weights: vec![1.0; k], gamma, eta_lr })
    }

    /// Horizon-tuned parameters: `gamma = min(1, sqrt(k ln k / ((e-1) T)))`
    /// and `eta = gamma / k`, the classical anytime-free Exp3 tuning.
    pub fn for_horizon(k: usize, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(GdlError::input("horizon must be positive"));
        }
        let kf = k as f64;
        let gamma =
            (kf * kf.ln() / ((std::f64::consts::E - 1.0) * horizon as f64)).sqrt().min(1.0);
        BanditState::new(k, gamma, gamma / kf)
    }

    pub fn num_arms(&self) -> usize {
        self.weights.len()
    }

    /// Sampling distribution `(1 - gamma) w / |w| + gamma / k`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        let k = self.weights.len() as f64;
        self.weights
            .iter()
            .map(|w| (1.0 - self.gamma) * w / total + self.gamma / k)
            .collect()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let probs = self.probabilities();
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        probs.len() - 1
    }

    /// Importance-weighted update for the arm just played: `w_a *=
    /// exp(eta r / p_a)` with the reward already rescaled to [0, 1] and
    /// `p_a` the probability the arm was drawn with.
    pub fn update(&mut self, action: usize, reward: f64, prob: f64) -> Result<()> {
        if action >= self.weights.len() {
            return Err(GdlError::input("bandit update addresses a missing arm"));
        }
        if !(0.0..=1.0).contains(&reward) {
            return Err(GdlError::input("bandit rewards must be rescaled into [0, 1]"));
        }
        if !(prob > 0.0 && prob <= 1.0) {
            return Err(GdlError::input("bandit update needs the sampling probability in (0, 1]"));
        }
        let factor = (self.eta_lr * reward / prob).exp();
        if !factor.is_finite() {
            return Err(GdlError::numerical("bandit weight update overflowed"));
        }
        self.weights[action] *= factor;
        let max = self.weights.iter().cloned().fold(0.0f64, f64::max);
        if max > 1e100 {
            for w in &mut self.weights {
                *w /= max;
            }
        }
        Ok(())
    }
}

/// Realized play path, in the game's original payoff units.
#[derive(Debug, Clone, Serialize)]
pub struct PlayHistory {
    /// `actions[t][i]`: arm played by player `i` in round `t`.
    pub actions: Vec<Vec<usize>>,
    /// `payoffs[t][i]`: payoff received, original units.
    pub payoffs: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfPlayRecord {
    pub history: PlayHistory,
    /// Mean of each player's sampling distribution across all rounds.
    pub average_strategies: Vec<Vec<f64>>,
    pub final_strategies: Vec<Vec<f64>>,
    /// `(completed_rounds, per-player distributions)` taken every
    /// `snapshot_every` rounds (and always after the last round).
    pub snapshots: Vec<(usize, Vec<Vec<f64>>)>,
    /// Affine rescale `(lo, hi)` mapping payoffs into bandit rewards.
    pub payoff_range: (f64, f64),
}

/// Run uncoupled Exp3 self-play for `horizon` rounds. Every player keeps a
/// private bandit over their own actions and a private RNG stream derived
/// from `seed`; rewards are the game payoffs affinely rescaled by the
/// global payoff range. All draws in a round happen before any update.
pub fn simulate_selfplay(
    game: &FiniteGame,
    horizon: usize,
    seed: u64,
    snapshot_every: usize,
) -> Result<SelfPlayRecord> {
    if horizon == 0 {
        return Err(GdlError::input("self-play horizon must be positive"));
    }
    let n = game.num_players();
    let counts = game.action_counts().to_vec();
    let (lo, hi) = payoff_range(game);
    let span = hi - lo;

    let mut bandits = Vec::with_capacity(n);
    let mut rngs = Vec::with_capacity(n);
    for (i, &k) in counts.iter().enumerate() {
        bandits.push(BanditState::for_horizon(k, horizon)?);
        rngs.push(stream_rng(seed, i as u64));
    }

    let mut actions = Vec::with_capacity(horizon);
    let mut payoffs = Vec::with_capacity(horizon);
    let mut strategy_sums: Vec<Vec<f64>> = counts.iter().map(|&k| vec![0.0; k]).collect();
    let mut snapshots = Vec::new();

    for t in 0..horizon {
        let probs: Vec<Vec<f64>> = bandits.iter().map(|b| b.probabilities()).collect();
        for (i, p) in probs.iter().enumerate() {
            for (a, &pa) in p.iter().enumerate() {
                strategy_sums[i][a] += pa;
            }
        }
        let profile: Vec<usize> =
            (0..n).map(|i| bandits[i].sample(&mut rngs[i])).collect();
        let us: Vec<f64> = (0..n).map(|i| game.payoff(i, &profile)).collect();
        for i in 0..n {
            let reward = if span > 0.0 { (us[i] - lo) / span } else { 0.5 };
            bandits[i].update(profile[i], reward, probs[i][profile[i]])?;
        }
        actions.push(profile);
        payoffs.push(us);
        let done = t + 1;
        if (snapshot_every > 0 && done % snapshot_every == 0) || done == horizon {
            snapshots.push((done, bandits.iter().map(|b| b.probabilities()).collect()));
        }
    }

    let average_strategies = strategy_sums
        .into_iter()
        .map(|sums| sums.into_iter().map(|s| s / horizon as f64).collect())
        .collect();
    Ok(SelfPlayRecord {
        history: PlayHistory { actions, payoffs },
        average_strategies,
        final_strategies: bandits.iter().map(|b| b.probabilities()).collect(),
        snapshots,
        payoff_range: (lo, hi),
    })
}

fn payoff_range(game: &FiniteGame) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for profile in game.profiles() {
        for i in 0..game.num_players() {
            let u = game.payoff(i, &profile);
            lo = lo.min(u);
            hi = hi.max(u);
        }
    }
    (lo, hi)
}

#[derive(Debug, Clone, Serialize)]
pub struct RegretRecord {
    /// `curves[i][t]`: player `i`'s external regret after `t + 1` rounds,
    /// original payoff units.
    pub curves: Vec<Vec<f64>>,
    /// Final cumulative regret per player.
    pub totals: Vec<f64>,
}

/// External regret of every player against the realized opponent path:
/// `max_a sum_t u_i(a, a_-i(t)) - sum_t u_i(a(t))`, tracked incrementally
/// per round.
pub fn external_regret(game: &FiniteGame, history: &PlayHistory) -> Result<RegretRecord> {
    let n = game.num_players();
    let counts = game.action_counts();
    let t_max = history.actions.len();
    if t_max == 0 {
        return Err(GdlError::input("regret needs a nonempty history"));
    }
    let mut curves: Vec<Vec<f64>> = vec![Vec::with_capacity(t_max); n];
    let mut counterfactual: Vec<Vec<f64>> = counts.iter().map(|&k| vec![0.0; k]).collect();
    let mut realized = vec![0.0; n];
    for t in 0..t_max {
        let profile = &history.actions[t];
        if profile.len() != n || profile.iter().zip(counts).any(|(&a, &k)| a >= k) {
            return Err(GdlError::input("history round does not address valid actions"));
        }
        for i in 0..n {
            realized[i] += game.payoff(i, profile);
            let mut swapped = profile.clone();
            for a in 0..counts[i] {
                swapped[i] = a;
                counterfactual[i][a] += game.payoff(i, &swapped);
            }
            let best = counterfactual[i].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            curves[i].push(best - realized[i]);
        }
    }
    let totals = curves.iter().map(|c| *c.last().unwrap()).collect();
    Ok(RegretRecord { curves, totals })
}

/// Single-pass recomputation of one player's final regret, for
/// cross-checking the incremental curves.
pub fn external_regret_total(game: &FiniteGame, history: &PlayHistory, player: usize) -> Result<f64> {
    let counts = game.action_counts();
    if player >= game.num_players() {
        return Err(GdlError::input("regret asked for a missing player"));
    }
    if history.actions.is_empty() {
        return Err(GdlError::input("regret needs a nonempty history"));
    }
    let mut counterfactual = vec![0.0; counts[player]];
    let mut realized = 0.0;
    for profile in &history.actions {
        realized += game.payoff(player, profile);
        let mut swapped = profile.clone();
        for a in 0..counts[player] {
            swapped[player] = a;
            counterfactual[a] += game.payoff(player, &swapped);
        }
    }
    let best = counterfactual.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(best - realized)
}
