//! Game abstractions: a common trait over finite games in mixed strategies
//! and smooth continuous-action games, plus the builtin catalog.

mod builtins;
mod continuous;
mod finite;

pub use builtins::{builtin_names, load_builtin};
pub use continuous::ContinuousGame;
pub use finite::{BimatrixGame, FiniteGame};

use crate::error::{GdlError, Result};
use crate::projection::FeasibleSet;

/// Step used by central finite differences when no analytic Jacobian exists.
pub const FD_STEP: f64 = 1e-6;

/// A game exposes utilities, the pseudo-gradient field
/// `F(x) = (grad_{x_i} u_i(x))_i`, and its Jacobian, over a feasible set that
/// is either a box or a product of simplices.
pub trait Game: Send + Sync {
    fn name(&self) -> &str;

    fn num_players(&self) -> usize;

    /// Per-player block dimensions; concatenated they index the ambient space.
    fn dims(&self) -> &[usize];

    fn feasible_set(&self) -> &FeasibleSet;

    /// Expected / realized utility of `player` at joint strategy `x`.
    fn utility(&self, player: usize, x: &[f64]) -> Result<f64>;

    /// Pseudo-gradient without a domain check. The analytic formulas of every
    /// game in this crate extend smoothly to a neighborhood of the feasible
    /// set, which finite differences and escape probes rely on.
    fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64>;

    /// Pseudo-gradient with domain validation.
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        if !self.feasible_set().contains(x, 1e-8) {
            return Err(GdlError::input(format!(
                "point outside the domain of `{}`",
                self.name()
            )));
        }
        Ok(self.gradient_unchecked(x))
    }

    /// Jacobian of the pseudo-gradient, `J[r][c] = dF_r/dx_c`. The default
    /// uses central differences on `gradient_unchecked`.
    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let d = x.len();
        let mut cols = Vec::with_capacity(d);
        for k in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += FD_STEP;
            xm[k] -= FD_STEP;
            let fp = self.gradient_unchecked(&xp);
            let fm = self.gradient_unchecked(&xm);
            cols.push(
                fp.iter()
                    .zip(fm)
                    .map(|(p, m)| (p - m) / (2.0 * FD_STEP))
                    .collect::<Vec<f64>>(),
            );
        }
        (0..d).map(|r| (0..d).map(|c| cols[c][r]).collect()).collect()
    }

    /// Downcast to a finite game when the dynamics or learners need the
    /// payoff tensors themselves.
    fn as_finite(&self) -> Option<&FiniteGame> {
        None
    }

    /// Downcast to a continuous game, e.g. to discretize it.
    fn as_continuous(&self) -> Option<&ContinuousGame> {
        None
    }

    fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    /// Offset of `player`'s block in the ambient coordinates.
    fn block_offset(&self, player: usize) -> usize {
        self.dims()[..player].iter().sum()
    }
}
