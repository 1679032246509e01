//! Continuous-action games on box domains, defined by utility closures with
//! optional analytic gradient and Jacobian oracles.

use super::{FiniteGame, Game, FD_STEP};
use crate::error::{GdlError, Result};
use crate::projection::FeasibleSet;

type UtilFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacFn = Box<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

pub struct ContinuousGame {
    name: String,
    dims: Vec<usize>,
    set: FeasibleSet,
    utilities: Vec<UtilFn>,
    gradient: Option<GradFn>,
    jacobian: Option<JacFn>,
}

impl ContinuousGame {
    /// Build a game with one utility closure per player over the box
    /// `[lo, hi]`; `dims[i]` coordinates belong to player i.
    pub fn new(
        name: impl Into<String>,
        dims: Vec<usize>,
        lo: Vec<f64>,
        hi: Vec<f64>,
        utilities: Vec<UtilFn>,
    ) -> Result<Self> {
        let total: usize = dims.iter().sum();
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(GdlError::input("continuous game needs nonzero per-player dimensions"));
        }
        if lo.len() != total || hi.len() != total {
            return Err(GdlError::input(format!(
                "box bounds have {} coordinates, players span {total}",
                lo.len()
            )));
        }
        if utilities.len() != dims.len() {
            return Err(GdlError::input(format!(
                "got {} utility functions for {} players",
                utilities.len(),
                dims.len()
            )));
        }
        let set = FeasibleSet::interval_box(lo, hi)?;
        Ok(ContinuousGame {
            name: name.into(),
            dims,
            set,
            utilities,
            gradient: None,
            jacobian: None,
        })
    }

    pub fn with_gradient(mut self, f: GradFn) -> Self {
        self.gradient = Some(f);
        self
    }

    pub fn with_jacobian(mut self, f: JacFn) -> Self {
        self.jacobian = Some(f);
        self
    }

    /// Sample each (one-dimensional) player's interval on a uniform grid of
    /// `points` values and tabulate utilities into a finite game.
    pub fn discretize(&self, points: usize) -> Result<FiniteGame> {
        if self.dims.iter().any(|&d| d != 1) {
            return Err(GdlError::input(
                "discretization requires one-dimensional strategy spaces",
            ));
        }
        if points < 2 {
            return Err(GdlError::input("discretization needs at least two points per player"));
        }
        let (lo, hi) = match &self.set {
            FeasibleSet::Box { lo, hi } => (lo.clone(), hi.clone()),
            _ => unreachable!("continuous games live on boxes"),
        };
        let n = self.dims.len();
        let levels: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..points)
                    .map(|k| lo[i] + (hi[i] - lo[i]) * k as f64 / (points - 1) as f64)
                    .collect()
            })
            .collect();
        let profiles: usize = points.pow(n as u32);
        let mut tensors = vec![Vec::with_capacity(profiles); n];
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().enumerate().map(|(i, &k)| levels[i][k]).collect();
            for (i, t) in tensors.iter_mut().enumerate() {
                t.push((self.utilities[i])(&x));
            }
            // Odometer.
            let mut pos = n;
            loop {
                if pos == 0 {
                    let counts = vec![points; n];
                    let name = format!("{}-grid{}", self.name, points);
                    return FiniteGame::new(name, counts, tensors);
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < points {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

impl Game for ContinuousGame {
    fn name(&self) -> &str {
        &self.name
    }

    fn num_players(&self) -> usize {
        self.dims.len()
    }

    fn dims(&self) -> &[usize] {
        &self.dims
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
        Ok((self.utilities[player])(x))
    }

    fn as_continuous(&self) -> Option<&ContinuousGame> {
        Some(self)
    }

    fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        if let Some(g) = &self.gradient {
            return g(x);
        }
        // Central differences of each player's utility in its own block.
        let mut out = vec![0.0; x.len()];
        let mut off = 0;
        for (i, &d) in self.dims.iter().enumerate() {
            for k in off..off + d {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += FD_STEP;
                xm[k] -= FD_STEP;
                out[k] = ((self.utilities[i])(&xp) - (self.utilities[i])(&xm)) / (2.0 * FD_STEP);
            }
            off += d;
        }
        out
    }

    fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        // Fall back to differencing the (possibly analytic) gradient.
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
}
