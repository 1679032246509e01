//! Feasible sets (boxes and products of simplices) with Euclidean projection,
//! tangent-cone projection, and ingestion/validation of raw points.

use crate::error::{GdlError, Result};
use crate::linalg::dot;
use rand::Rng;

/// Coordinates this close to a bound count as active when building tangent
/// cones.
pub const ACTIVE_TOL: f64 = 1e-10;

/// Slack allowed by the KKT verification inside the tangent-cone solver.
const KKT_TOL: f64 = 1e-12;

/// Euclidean projection of `v` onto the probability simplex
/// `{x >= 0, sum x = 1}` by sort and threshold.
///
/// The pivot uses a strict `> 0` test so that points already on the simplex
/// (in exact arithmetic) are reproduced without perturbing zero coordinates —
/// vertices stay vertices bit for bit.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    debug_assert!(!v.is_empty());
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j as f64 + 1.0);
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Projection of `v` onto the tangent cone of the simplex at `x`.
///
/// With active set `A = {i : x_i <= ACTIVE_TOL}`, the cone is
/// `{w : sum w = 0, w_i >= 0 for i in A}`. The minimizer pins some subset
/// `S` of `A` to zero and shifts the rest by a common multiplier; since
/// simplex blocks in this crate are small (dimension <= 12), the subset is
/// found by enumeration with an explicit KKT check, falling back to the best
/// feasible candidate under accumulated roundoff.
pub fn project_simplex_tangent(x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    debug_assert_eq!(x.len(), v.len());
    let d = x.len();
    let active: Vec<usize> = (0..d).filter(|&i| x[i] <= ACTIVE_TOL).collect();
    if active.is_empty() {
        // Plain hyperplane projection: remove the mean.
        let mean = v.iter().sum::<f64>() / d as f64;
        return Ok(v.iter().map(|&vi| vi - mean).collect());
    }
    if active.len() > 12 {
        return Err(GdlError::numerical(format!(
            "tangent-cone projection supports at most 12 active coordinates per block, got {}",
            active.len()
        )));
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0..(1u32 << active.len()) {
        let pinned: Vec<usize> = active
            .iter()
            .enumerate()
            .filter(|(bit, _)| mask >> bit & 1 == 1)
            .map(|(_, &i)| i)
            .collect();
        let n_free = d - pinned.len();
        if n_free == 0 {
            // Everything pinned: w = 0, feasible; KKT needs theta - v_i >= 0
            // with theta unconstrained -> take theta = max v.
            let w = vec![0.0; d];
            let theta = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let kkt = pinned.iter().all(|&i| theta - v[i] >= -KKT_TOL);
            let obj = dot(v, v);
            consider(&mut best, kkt, obj, w);
            continue;
        }
        let free_sum: f64 = (0..d)
            .filter(|i| !pinned.contains(i))
            .map(|i| v[i])
            .sum();
        let theta = free_sum / n_free as f64;
        let mut w = vec![0.0; d];
        let mut obj = 0.0;
        for i in 0..d {
            if pinned.contains(&i) {
                obj += v[i] * v[i];
            } else {
                w[i] = v[i] - theta;
                obj += theta * theta;
            }
        }
        // KKT: pinned actives need nonnegative multipliers; free actives need
        // nonnegative components.
        let duals_ok = pinned.iter().all(|&i| theta - v[i] >= -KKT_TOL);
        let primal_ok = active
            .iter()
            .filter(|i| !pinned.contains(i))
            .all(|&i| w[i] >= -KKT_TOL);
        consider(&mut best, duals_ok && primal_ok, obj, w);
    }
    Ok(best.expect("at least one candidate subset is always feasible").1)
}

fn consider(best: &mut Option<(f64, Vec<f64>)>, kkt: bool, obj: f64, w: Vec<f64>) {
    if !kkt {
        return;
    }
    match best {
        Some((b, _)) if *b <= obj => {}
        _ => *best = Some((obj, w)),
    }
}

/// Strategy space shared by all games: either a coordinate box or a product
/// of probability simplices (one block per player).
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    SimplexProduct { dims: Vec<usize> },
}

impl FeasibleSet {
    pub fn simplex_product(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d == 0) {
            return Err(GdlError::input("simplex product needs nonzero block dimensions"));
        }
        Ok(FeasibleSet::SimplexProduct { dims })
    }

    pub fn interval_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(GdlError::input("box bounds must be nonempty and of equal length"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(GdlError::input("box bounds must satisfy lo < hi coordinatewise"));
        }
        Ok(FeasibleSet::Box { lo, hi })
    }

    /// Total ambient dimension.
    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::SimplexProduct { dims } => dims.iter().sum(),
        }
    }

    /// Per-player blocks as (offset, len) pairs. A box is one block per
    /// coordinate player only when built that way; here each coordinate of a
    /// box belongs to the single owning player's block, which callers define.
    /// For simplex products the blocks are the simplices.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        match self {
            FeasibleSet::Box { lo, .. } => (0..lo.len()).map(|i| (i, 1)).collect(),
            FeasibleSet::SimplexProduct { dims } => {
                let mut out = Vec::with_capacity(dims.len());
                let mut off = 0;
                for &d in dims {
                    out.push((off, d));
                    off += d;
                }
                out
            }
        }
    }

    /// Dimensions that can vary independently (box: all; simplex: d-1 per block).
    pub fn free_dims(&self) -> usize {
        match self {
            FeasibleSet::Box { lo, .. } => lo.len(),
            FeasibleSet::SimplexProduct { dims } => dims.iter().map(|d| d - 1).sum(),
        }
    }

    /// Euclidean projection onto the set, blockwise.
    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lo, hi } => v
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&x, (&l, &h))| x.clamp(l, h))
                .collect(),
            FeasibleSet::SimplexProduct { .. } => {
                let mut out = Vec::with_capacity(self.dim());
                for (off, len) in self.blocks() {
                    out.extend(project_simplex(&v[off..off + len]));
                }
                out
            }
        }
    }

    /// Projection of `v` onto the tangent cone of the set at `x`.
    pub fn project_tangent(&self, x: &[f64], v: &[f64]) -> Result<Vec<f64>> {
        match self {
            FeasibleSet::Box { lo, hi } => Ok(v
                .iter()
                .enumerate()
                .map(|(i, &vi)| {
                    let mut w = vi;
                    if x[i] - lo[i] <= ACTIVE_TOL {
                        w = w.max(0.0);
                    }
                    if hi[i] - x[i] <= ACTIVE_TOL {
                        w = w.min(0.0);
                    }
                    w
                })
                .collect()),
            FeasibleSet::SimplexProduct { .. } => {
                let mut out = Vec::with_capacity(self.dim());
                for (off, len) in self.blocks() {
                    out.extend(project_simplex_tangent(&x[off..off + len], &v[off..off + len])?);
                }
                Ok(out)
            }
        }
    }

    /// Membership within tolerance `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            FeasibleSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&v, (&l, &h))| v >= l - tol && v <= h + tol),
            FeasibleSet::SimplexProduct { .. } => self.blocks().iter().all(|&(off, len)| {
                let blk = &x[off..off + len];
                blk.iter().all(|&v| v >= -tol) && (blk.iter().sum::<f64>() - 1.0).abs() <= tol
            }),
        }
    }

    /// Validate an externally supplied point and absorb roundoff-sized error:
    /// simplex blocks must sum to 1 within 1e-9 with coordinates above -1e-9,
    /// box points must be within 1e-9 of the bounds. Returns the cleaned point.
    pub fn ingest(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(GdlError::input(format!(
                "point has {} coordinates, feasible set has dimension {}",
                x.len(),
                self.dim()
            )));
        }
        if !self.contains(x, 1e-9) {
            return Err(GdlError::input("point lies outside the feasible set (tolerance 1e-9)"));
        }
        let mut out = x.to_vec();
        self.renormalize(&mut out);
        Ok(out)
    }

    /// Snap a nearly feasible point exactly onto the set (clamp + rescale).
    pub fn renormalize(&self, x: &mut [f64]) {
        match self {
            FeasibleSet::Box { lo, hi } => {
                for (i, v) in x.iter_mut().enumerate() {
                    *v = v.clamp(lo[i], hi[i]);
                }
            }
            FeasibleSet::SimplexProduct { .. } => {
                for (off, len) in self.blocks() {
                    let blk = &mut x[off..off + len];
                    for v in blk.iter_mut() {
                        if *v < 0.0 {
                            *v = 0.0;
                        }
                    }
                    let s: f64 = blk.iter().sum();
                    if s > 0.0 {
                        for v in blk.iter_mut() {
                            *v /= s;
                        }
                    } else {
                        let u = 1.0 / len as f64;
                        for v in blk.iter_mut() {
                            *v = u;
                        }
                    }
                }
            }
        }
    }

    /// Barycenter of a simplex product / midpoint of a box.
    pub fn center(&self) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lo, hi } => lo.iter().zip(hi).map(|(&l, &h)| 0.5 * (l + h)).collect(),
            FeasibleSet::SimplexProduct { dims } => {
                let mut out = Vec::with_capacity(self.dim());
                for &d in dims {
                    out.extend(std::iter::repeat(1.0 / d as f64).take(d));
                }
                out
            }
        }
    }

    /// Vertex addressed by a single index: for simplex products every block
    /// plays pure action `i`; for a box, bit `k` of `i` selects hi over lo in
    /// coordinate `k`.
    pub fn vertex(&self, i: usize) -> Result<Vec<f64>> {
        match self {
            FeasibleSet::Box { lo, hi } => {
                if lo.len() < 64 && i >= 1usize << lo.len() {
                    return Err(GdlError::input(format!(
                        "corner index {i} out of range for a {}-dimensional box",
                        lo.len()
                    )));
                }
                Ok((0..lo.len())
                    .map(|k| if i >> k & 1 == 1 { hi[k] } else { lo[k] })
                    .collect())
            }
            FeasibleSet::SimplexProduct { dims } => {
                let mut out = vec![0.0; self.dim()];
                for (&d, (off, _)) in dims.iter().zip(self.blocks()) {
                    if i >= d {
                        return Err(GdlError::input(format!(
                            "action index {i} out of range for a block with {d} actions"
                        )));
                    }
                    out[off + i] = 1.0;
                }
                Ok(out)
            }
        }
    }

    /// Uniform random point: coordinatewise uniform on a box, exponential
    /// spacings (exact uniform measure) on each simplex block.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            FeasibleSet::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(&l, &h)| rng.random_range(l..h))
                .collect(),
            FeasibleSet::SimplexProduct { dims } => {
                let mut out = Vec::with_capacity(self.dim());
                for &d in dims {
                    let mut e: Vec<f64> = (0..d)
                        .map(|_| -(1.0 - rng.random::<f64>()).ln())
                        .collect();
                    let s: f64 = e.iter().sum();
                    for v in &mut e {
                        *v /= s;
                    }
                    out.extend(e);
                }
                out
            }
        }
    }

    /// Active constraint indices at `x` (per coordinate).
    pub fn active_set(&self, x: &[f64]) -> Vec<usize> {
        match self {
            FeasibleSet::Box { lo, hi } => (0..x.len())
                .filter(|&i| x[i] - lo[i] <= ACTIVE_TOL || hi[i] - x[i] <= ACTIVE_TOL)
                .collect(),
            FeasibleSet::SimplexProduct { .. } => {
                (0..x.len()).filter(|&i| x[i] <= ACTIVE_TOL).collect()
            }
        }
    }

    /// True when no inequality constraint is active at `x`.
    pub fn is_interior(&self, x: &[f64]) -> bool {
        self.active_set(x).is_empty()
    }
}
