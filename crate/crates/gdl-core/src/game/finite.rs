//! Finite normal-form games in mixed strategies.
//!
//! Payoffs are stored as one row-major tensor per player over pure action
//! profiles. Expected utility is multilinear in the players' mixed
//! strategies, so the pseudo-gradient and its Jacobian have exact closed
//! forms: no differencing is involved anywhere in this file.

use super::Game;
use crate::error::{GdlError, Result};
use crate::projection::FeasibleSet;
use serde::Serialize;

/// A finite game: `action_counts[i]` pure actions for player i and a payoff
/// tensor `payoffs[i]` of length `prod(action_counts)` in row-major profile
/// order (last player's action varies fastest).
#[derive(Debug, Clone, Serialize)]
pub struct FiniteGame {
    name: String,
    action_counts: Vec<usize>,
    payoffs: Vec<Vec<f64>>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    set: FeasibleSet,
}

impl FiniteGame {
    pub fn new(name: impl Into<String>, action_counts: Vec<usize>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        let name = name.into();
        if action_counts.is_empty() {
            return Err(GdlError::input("a finite game needs at least one player"));
        }
        if action_counts.iter().any(|&k| k == 0) {
            return Err(GdlError::input("every player needs at least one action"));
        }
        let profiles: usize = action_counts.iter().product();
        if payoffs.len() != action_counts.len() {
            return Err(GdlError::input(format!(
                "got {} payoff tensors for {} players",
                payoffs.len(),
                action_counts.len()
            )));
        }
        for (i, t) in payoffs.iter().enumerate() {
            if t.len() != profiles {
                return Err(GdlError::input(format!(
                    "payoff tensor for player {i} has {} entries, expected {profiles}",
                    t.len()
                )));
            }
            if let Some(k) = t.iter().position(|v| !v.is_finite()) {
                return Err(GdlError::input(format!(
                    "payoff tensor for player {i} has a non-finite entry at flat index {k}"
                )));
            }
        }
        let mut strides = vec![1usize; action_counts.len()];
        for i in (0..action_counts.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * action_counts[i + 1];
        }
        let set = FeasibleSet::simplex_product(action_counts.clone())?;
        Ok(FiniteGame { name, action_counts, payoffs, strides, set })
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs[0].len()
    }

    fn flat_index(&self, profile: &[usize]) -> usize {
        profile
            .iter()
            .zip(&self.strides)
            .map(|(&a, &s)| a * s)
            .sum()
    }

    /// Payoff of `player` at a pure action profile.
    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        debug_assert_eq!(profile.len(), self.action_counts.len());
        debug_assert!(profile.iter().zip(&self.action_counts).all(|(&a, &k)| a < k));
        self.payoffs[player][self.flat_index(profile)]
    }

    /// Iterate all pure profiles in lexicographic order.
    pub fn profiles(&self) -> ProfileIter {
        ProfileIter {
            counts: self.action_counts.clone(),
            current: vec![0; self.action_counts.len()],
            done: false,
        }
    }

    /// Expected utility of `player` under the mixed profile `x`
    /// (concatenated per-player distributions).
    pub fn expected_utility(&self, player: usize, x: &[f64]) -> f64 {
        let offsets = self.offsets();
        let mut total = 0.0;
        for (flat, profile) in self.profiles().enumerate() {
            let mut p = 1.0;
            for (j, &aj) in profile.iter().enumerate() {
                p *= x[offsets[j] + aj];
            }
            total += self.payoffs[player][flat] * p;
        }
        total
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.action_counts.len());
        let mut off = 0;
        for &k in &self.action_counts {
            out.push(off);
            off += k;
        }
        out
    }

    /// Exact pseudo-gradient of the mixed extension:
    /// `F_i[a] = E[u_i | player i plays a]`, multilinear in the opponents.
    pub fn gradient_at(&self, x: &[f64]) -> Vec<f64> {
        let n = self.action_counts.len();
        let offsets = self.offsets();
        let mut out = vec![0.0; self.set.dim()];
        for (flat, profile) in self.profiles().enumerate() {
            for i in 0..n {
                let mut p = 1.0;
                for (j, &aj) in profile.iter().enumerate() {
                    if j != i {
                        p *= x[offsets[j] + aj];
                    }
                }
                out[offsets[i] + profile[i]] += self.payoffs[i][flat] * p;
            }
        }
        out
    }

    /// Exact Jacobian of the pseudo-gradient. Own-player blocks vanish
    /// (`F_i` does not depend on `x_i`); cross blocks are the multilinear
    /// coefficients with two players' actions held fixed.
    pub fn jacobian_at(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let n = self.action_counts.len();
        let d = self.set.dim();
        let offsets = self.offsets();
        let mut jac = vec![vec![0.0; d]; d];
        for (flat, profile) in self.profiles().enumerate() {
            for i in 0..n {
                let row = offsets[i] + profile[i];
                for j in 0..n {
                    if j == i {
                        continue;
                    }
                    let mut p = 1.0;
                    for (k, &ak) in profile.iter().enumerate() {
                        if k != i && k != j {
                            p *= x[offsets[k] + ak];
                        }
                    }
                    jac[row][offsets[j] + profile[j]] += self.payoffs[i][flat] * p;
                }
            }
        }
        jac
    }
}

impl Game for FiniteGame {
    fn name(&self) -> &str {
        &self.name
    }

    fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    fn dims(&self) -> &[usize] {
        &self.action_counts
    }

    fn feasible_set(&self) -> &FeasibleSet {
        &self.set
    }

    fn utility(&self, player: usize, x: &[f64]) -> Result<f64> {
        if player >= self.num_players() {
            return Err(GdlError::input(format!("no player {player} in `{}`", self.name)));
        }
        if !self.set.contains(x, 1e-8) {
            return Err(GdlError::input(format!("point outside the domain of `{}`", self.name)));
        }
        Ok(self.expected_utility(player, x))
    }

    fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.gradient_at(x)
    }

    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.jacobian_at(x)
    }

    fn as_finite(&self) -> Option<&FiniteGame> {
        Some(self)
    }
}

/// Lexicographic iterator over pure action profiles.
pub struct ProfileIter {
    counts: Vec<usize>,
    current: Vec<usize>,
    done: bool,
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        // Odometer increment, last position fastest.
        let mut pos = self.counts.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.current[pos] += 1;
            if self.current[pos] < self.counts[pos] {
                break;
            }
            self.current[pos] = 0;
        }
        Some(out)
    }
}

/// Two-player game given by payoff matrices: player 1 receives `a1[i][j]`
/// and player 2 receives `a2[i][j]` when row i meets column j.
#[derive(Debug, Clone)]
pub struct BimatrixGame {
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
}

impl BimatrixGame {
    pub fn new(a1: Vec<Vec<f64>>, a2: Vec<Vec<f64>>) -> Result<Self> {
        let rows = a1.len();
        if rows == 0 || a1[0].is_empty() {
            return Err(GdlError::input("payoff matrices must be nonempty"));
        }
        let cols = a1[0].len();
        for (label, m) in [("first", &a1), ("second", &a2)] {
            if m.len() != rows {
                return Err(GdlError::input(format!(
                    "{label} payoff matrix has {} rows, expected {rows}",
                    m.len()
                )));
            }
            for (i, r) in m.iter().enumerate() {
                if r.len() != cols {
                    return Err(GdlError::input(format!(
                        "{label} payoff matrix row {i} has {} entries, expected {cols}",
                        r.len()
                    )));
                }
            }
        }
        Ok(BimatrixGame { a1, a2 })
    }

    pub fn into_finite(self, name: impl Into<String>) -> Result<FiniteGame> {
        let rows = self.a1.len();
        let cols = self.a1[0].len();
        let mut t1 = Vec::with_capacity(rows * cols);
        let mut t2 = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                t1.push(self.a1[i][j]);
                t2.push(self.a2[i][j]);
            }
        }
        FiniteGame::new(name, vec![rows, cols], vec![t1, t2])
    }
}
