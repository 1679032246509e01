//! Stability analysis around candidate equilibria: linearization verdicts,
//! variational-stability scans, quadratic Lyapunov decrease certificates on
//! grids, and conservative sublevel-set basin certification.

use crate::error::{GdlError, Result};
use crate::game::{FiniteGame, Game};
use crate::grid::ProductGrid;
use crate::linalg::{axpy, complex_eigenvalues, dist, dot, norm, sub, symmetrized_eigenvalues};
use crate::projection::FeasibleSet;
use serde::Serialize;

/// Strict-negativity margin for scan classifications.
const SIGN_TOL: f64 = 1e-12;

/// Points this close to the equilibrium are treated as the equilibrium
/// itself in scans and radius computations.
const CENTER_TOL: f64 = 1e-9;

/// Real-part margin of the linearization verdict.
const EIG_TOL: f64 = 1e-10;

/// Quadratic form `V(x) = (x - c)^T Q (x - c)` with symmetric positive
/// definite `Q`, the workhorse certificate of the stability module.
#[derive(Debug, Clone, Serialize)]
pub struct QuadraticLyapunov {
    pub center: Vec<f64>,
    pub q: Vec<Vec<f64>>,
}

impl QuadraticLyapunov {
    pub fn new(center: Vec<f64>, q: Vec<Vec<f64>>) -> Result<Self> {
        let d = center.len();
        if q.len() != d || q.iter().any(|r| r.len() != d) {
            return Err(GdlError::input("Lyapunov matrix shape must match the center"));
        }
        for r in 0..d {
            for c in 0..d {
                if !q[r][c].is_finite() {
                    return Err(GdlError::input("Lyapunov matrix must be finite"));
                }
                if (q[r][c] - q[c][r]).abs() > 1e-12 {
                    return Err(GdlError::input("Lyapunov matrix must be symmetric"));
                }
            }
        }
        let eigs = symmetrized_eigenvalues(&q);
        if eigs.first().copied().unwrap_or(0.0) <= 0.0 {
            return Err(GdlError::input("Lyapunov matrix must be positive definite"));
        }
        Ok(QuadraticLyapunov { center, q })
    }

    pub fn identity(center: Vec<f64>) -> Self {
        let d = center.len();
        let q = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        QuadraticLyapunov { center, q }
    }

    pub fn diagonal(center: Vec<f64>, weights: &[f64]) -> Result<Self> {
        if weights.len() != center.len() {
            return Err(GdlError::input("diagonal Lyapunov weights must match the dimension"));
        }
        if weights.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(GdlError::input("diagonal Lyapunov weights must be positive"));
        }
        let d = center.len();
        let q = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| if i == j { weights[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        Ok(QuadraticLyapunov { center, q })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let d = sub(x, &self.center);
        let mut acc = 0.0;
        for (i, row) in self.q.iter().enumerate() {
            acc += d[i] * dot(row, &d);
        }
        acc
    }

    /// `grad V(x) = 2 Q (x - c)`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let d = sub(x, &self.center);
        self.q.iter().map(|row| 2.0 * dot(row, &d)).collect()
    }
}

/// `dV/dt` along the raw field: `<grad V(x), F(x)>`.
pub fn lie_derivative(game: &dyn Game, lyap: &QuadraticLyapunov, x: &[f64]) -> Result<f64> {
    let f = game.gradient(x)?;
    Ok(dot(&lyap.gradient(x), &f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityVerdict {
    AsymptoticallyStable,
    Unstable,
    Marginal,
    /// The candidate sits on the boundary of the feasible set, where the
    /// projected dynamics are not differentiable: eigenvalues of the raw
    /// field say nothing and no verdict is issued.
    BoundaryIndeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct LinearStabilityReport {
    /// Eigenvalues as (re, im), sorted by real part; on simplex products
    /// these are the eigenvalues of the Jacobian restricted to the tangent
    /// space of the strategy polytope.
    pub eigenvalues: Vec<(f64, f64)>,
    pub tangent_reduced: bool,
    pub max_real_part: f64,
    pub verdict: StabilityVerdict,
}

/// Linearize the field at `x_star` and classify by spectral abscissa.
pub fn linear_stability(game: &dyn Game, x_star: &[f64]) -> Result<LinearStabilityReport> {
    let set = game.feasible_set();
    let x = set.ingest(x_star)?;
    let jac = game.jacobian(&x);
    let (reduced, tangent_reduced) = match set {
        FeasibleSet::Box { .. } => (jac, false),
        FeasibleSet::SimplexProduct { .. } => {
            (crate::equilibrium::tangent_restrict(set, &jac), true)
        }
    };
    let eigenvalues = complex_eigenvalues(&reduced);
    let max_real_part = eigenvalues
        .iter()
        .map(|&(re, _)| re)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if !set.is_interior(&x) {
        StabilityVerdict::BoundaryIndeterminate
    } else if max_real_part < -EIG_TOL {
        StabilityVerdict::AsymptoticallyStable
    } else if max_real_part > EIG_TOL {
        StabilityVerdict::Unstable
    } else {
        StabilityVerdict::Marginal
    };
    Ok(LinearStabilityReport { eigenvalues, tangent_reduced, max_real_part, verdict })
}

/// `s(x) = <F(x), x - x*>`: negative under variational stability.
pub fn vs_value(game: &dyn Game, x_star: &[f64], x: &[f64]) -> Result<f64> {
    let f = game.gradient(x)?;
    Ok(dot(&f, &sub(x, x_star)))
}

#[derive(Debug, Clone, Serialize)]
pub struct VsScanReport {
    pub points: usize,
    /// Grid points (excluding a 1e-9 ball at the equilibrium) where
    /// `s >= -1e-12`.
    pub violations: usize,
    /// Distance to the nearest violation; with none, the largest grid
    /// distance scanned (the whole region is clean to that radius).
    pub violation_free_radius: f64,
    pub min_s: f64,
    pub max_s: f64,
}

/// Scan `s(x)` on a grid around `x_star`.
pub fn vs_scan(
    game: &dyn Game,
    x_star: &[f64],
    grid: &ProductGrid,
    threads: usize,
) -> Result<VsScanReport> {
    let x_star = game.feasible_set().ingest(x_star)?;
    struct Rec {
        s: f64,
        d: f64,
    }
    let rows = parallel_map(grid.len(), threads, &|i| {
        let p = grid.point(i);
        let f = game.gradient_unchecked(&p);
        Rec { s: dot(&f, &sub(&p, &x_star)), d: dist(&p, &x_star) }
    });
    let mut violations = 0usize;
    let mut nearest = f64::INFINITY;
    let mut max_d = 0.0f64;
    let mut min_s = f64::INFINITY;
    let mut max_s = f64::NEG_INFINITY;
    for r in &rows {
        max_d = max_d.max(r.d);
        min_s = min_s.min(r.s);
        max_s = max_s.max(r.s);
        if r.d > CENTER_TOL && r.s >= -SIGN_TOL {
            violations += 1;
            nearest = nearest.min(r.d);
        }
    }
    let violation_free_radius = if violations == 0 { max_d } else { nearest };
    Ok(VsScanReport { points: grid.len(), violations, violation_free_radius, min_s, max_s })
}

/// Sampled strong-stability modulus: `inf -s(x)/|x - x*|^2` over the grid,
/// reported only when strictly positive.
pub fn strong_vs_alpha(
    game: &dyn Game,
    x_star: &[f64],
    grid: &ProductGrid,
    threads: usize,
) -> Result<Option<f64>> {
    let x_star = game.feasible_set().ingest(x_star)?;
    let ratios = parallel_map(grid.len(), threads, &|i| {
        let p = grid.point(i);
        let d = dist(&p, &x_star);
        if d <= CENTER_TOL {
            return f64::INFINITY;
        }
        let f = game.gradient_unchecked(&p);
        -dot(&f, &sub(&p, &x_star)) / (d * d)
    });
    let inf = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    if inf.is_finite() && inf > EIG_TOL {
        Ok(Some(inf))
    } else {
        Ok(None)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PureDeviationReport {
    /// Every non-equilibrium profile has a strictly negative deviation sum.
    pub passes: bool,
    pub profiles_checked: usize,
    /// Profile attaining the largest deviation sum and that sum.
    pub worst_profile: Vec<usize>,
    pub worst_sum: f64,
}

/// Vertex form of the variational criterion at a pure profile `a*`: for
/// every profile `a != a*`, `sum_i [u_i(a) - u_i(a*_i, a_-i)]` must be
/// strictly negative (below `-1e-12`, the grid scan's own tolerance).
pub fn pure_deviation_vs_check(game: &FiniteGame, a_star: &[usize]) -> Result<PureDeviationReport> {
    let counts = game.action_counts();
    if a_star.len() != counts.len()
        || a_star.iter().zip(counts).any(|(&a, &k)| a >= k)
    {
        return Err(GdlError::input("profile does not address valid actions"));
    }
    let mut passes = true;
    let mut worst_sum = f64::NEG_INFINITY;
    let mut worst_profile = a_star.to_vec();
    let mut checked = 0usize;
    for profile in game.profiles() {
        if profile == a_star {
            continue;
        }
        checked += 1;
        let mut sum = 0.0;
        for i in 0..counts.len() {
            let mut swapped = profile.clone();
            swapped[i] = a_star[i];
            sum += game.payoff(i, &profile) - game.payoff(i, &swapped);
        }
        if sum >= -SIGN_TOL {
            passes = false;
        }
        if sum > worst_sum {
            worst_sum = sum;
            worst_profile = profile;
        }
    }
    Ok(PureDeviationReport { passes, profiles_checked: checked, worst_profile, worst_sum })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    /// One step of the discrete map per grid point: exact `Delta V` plus the
    /// quadratic upper bound `Delta Vbar`.
    Discrete,
    /// Lie derivative of V along the raw field, with a LaSalle-style escape
    /// probe on the `dV/dt = 0` set.
    Continuous,
}

/// Grid evaluation of a Lyapunov candidate around an equilibrium.
#[derive(Debug, Clone)]
pub struct RegionScan {
    pub grid: ProductGrid,
    pub kind: ScanKind,
    pub center: Vec<f64>,
    /// Learning rate of the step map (discrete scans).
    pub eta: Option<f64>,
    pub v: Vec<f64>,
    /// `s(x) = <F(x), x - x*>`.
    pub s: Vec<f64>,
    /// Discrete: exact `V(step(x)) - V(x)`. Continuous: `dV/dt`.
    pub delta_v: Vec<f64>,
    /// Discrete: `eta^2 |F - F*|^2 + 2 eta s` (NaN on continuous scans).
    pub delta_vbar: Vec<f64>,
    /// Fully centered bound `eta^2 |F - F*|^2 + 2 eta <F - F*, x - x*>`,
    /// a rigorous majorant of `delta_v` whenever `x*` is a fixed point of
    /// the step map (NaN on continuous scans).
    pub centered_bound: Vec<f64>,
    /// Decrease set: V > 0 and strict decrease (the center itself included).
    pub in_v: Vec<bool>,
    /// Certified-decrease set: bound negative (discrete) or dissipativity
    /// including the LaSalle probe (continuous); the center included.
    pub in_vbar: Vec<bool>,
    /// Certified sublevel set, populated by [`certify_basin`].
    pub in_uc: Vec<bool>,
    pub certified_c: Option<f64>,
    /// Discrete: points certified by the bound that do not actually
    /// decrease (`in_vbar` without `in_v`). Continuous: points certified
    /// dissipative whose Lie derivative is positive beyond tolerance (the
    /// LaSalle shell `dV/dt = 0` legitimately sits in the certified set
    /// without strict decrease). Should be zero in both modes.
    pub inclusion_violations: usize,
    /// Discrete scans: points where the exact decrease exceeds the reported
    /// bound by more than 1e-12 (the bound is only guaranteed at interior
    /// equilibria where `F(x*) = 0`).
    pub bound_dominance_violations: usize,
    /// Points where the exact decrease exceeds the centered bound.
    pub centered_dominance_violations: usize,
}

struct PointEval {
    v: f64,
    s: f64,
    dv: f64,
    dvbar: f64,
    centered: f64,
    in_v: bool,
    in_vbar: bool,
}

fn assemble(
    grid: ProductGrid,
    kind: ScanKind,
    center: Vec<f64>,
    eta: Option<f64>,
    rows: Vec<PointEval>,
) -> RegionScan {
    let n = rows.len();
    let mut scan = RegionScan {
        grid,
        kind,
        center,
        eta,
        v: Vec::with_capacity(n),
        s: Vec::with_capacity(n),
        delta_v: Vec::with_capacity(n),
        delta_vbar: Vec::with_capacity(n),
        centered_bound: Vec::with_capacity(n),
        in_v: Vec::with_capacity(n),
        in_vbar: Vec::with_capacity(n),
        in_uc: vec![false; n],
        certified_c: None,
        inclusion_violations: 0,
        bound_dominance_violations: 0,
        centered_dominance_violations: 0,
    };
    for r in rows {
        scan.v.push(r.v);
        scan.s.push(r.s);
        scan.delta_v.push(r.dv);
        scan.delta_vbar.push(r.dvbar);
        scan.centered_bound.push(r.centered);
        scan.in_v.push(r.in_v);
        scan.in_vbar.push(r.in_vbar);
        let included_wrongly = match kind {
            ScanKind::Discrete => r.in_vbar && !r.in_v,
            ScanKind::Continuous => r.in_vbar && r.dv > SIGN_TOL,
        };
        if included_wrongly {
            scan.inclusion_violations += 1;
        }
        if !r.dvbar.is_nan() && r.dv > r.dvbar + SIGN_TOL {
            scan.bound_dominance_violations += 1;
        }
        if !r.centered.is_nan() && r.dv > r.centered + SIGN_TOL {
            scan.centered_dominance_violations += 1;
        }
    }
    scan
}

/// Evaluate the exact one-step decrease of `V` under `x -> proj(x + eta F)`
/// together with the quadratic upper bound, at every node of `grid`.
pub fn lyapunov_scan_discrete(
    game: &dyn Game,
    lyap: &QuadraticLyapunov,
    eta: f64,
    grid: &ProductGrid,
    threads: usize,
) -> Result<RegionScan> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(GdlError::input("scan learning rate eta must be positive"));
    }
    let set = game.feasible_set();
    let x_star = set.ingest(&lyap.center)?;
    let f_star = game.gradient(&x_star)?;
    let rows = parallel_map(grid.len(), threads, &|i| {
        let p = grid.point(i);
        let f = game.gradient_unchecked(&p);
        let v = lyap.value(&p);
        let diff = sub(&p, &x_star);
        let s = dot(&f, &diff);
        let next = set.project(&axpy(&p, eta, &f));
        let dv = lyap.value(&next) - v;
        let df = sub(&f, &f_star);
        let df2 = dot(&df, &df);
        let dvbar = eta * eta * df2 + 2.0 * eta * s;
        let centered = eta * eta * df2 + 2.0 * eta * dot(&df, &diff);
        let is_center = dist(&p, &x_star) <= CENTER_TOL;
        PointEval {
            v,
            s,
            dv,
            dvbar,
            centered,
            in_v: is_center || (v > 0.0 && dv < 0.0),
            in_vbar: is_center || (v > 0.0 && dvbar < 0.0),
        }
    });
    Ok(assemble(grid.clone(), ScanKind::Discrete, x_star, Some(eta), rows))
}

/// Evaluate the Lie derivative of `V` along the raw field at every node,
/// flagging dissipativity with a strict margin or a LaSalle escape probe.
pub fn lyapunov_scan_continuous(
    game: &dyn Game,
    lyap: &QuadraticLyapunov,
    grid: &ProductGrid,
    threads: usize,
) -> Result<RegionScan> {
    let set = game.feasible_set();
    let x_star = set.ingest(&lyap.center)?;
    let rows = parallel_map(grid.len(), threads, &|i| {
        let p = grid.point(i);
        let f = game.gradient_unchecked(&p);
        let v = lyap.value(&p);
        let s = dot(&f, &sub(&p, &x_star));
        let vdot = dot(&lyap.gradient(&p), &f);
        let is_center = dist(&p, &x_star) <= CENTER_TOL;
        // On the dV/dt = 0 set (excluding the equilibrium) the trajectory
        // may still be passing through: probe a short move along the field
        // and accept strict decrease there.
        let dissipative = vdot < -SIGN_TOL
            || (vdot.abs() <= SIGN_TOL && norm(&f) > 0.0 && {
                let probe = axpy(&p, 1e-3, &f);
                let fp = game.gradient_unchecked(&probe);
                dot(&lyap.gradient(&probe), &fp) < 0.0
            });
        PointEval {
            v,
            s,
            dv: vdot,
            dvbar: f64::NAN,
            centered: f64::NAN,
            in_v: is_center || (v > 0.0 && vdot < 0.0),
            in_vbar: is_center || (v > 0.0 && dissipative),
        }
    });
    Ok(assemble(grid.clone(), ScanKind::Continuous, x_star, None, rows))
}

/// Largest certified sublevel set `{V <= c}` inside the verified decrease
/// region.
///
/// A node is *certifiable* when it and every axis neighbor carry the
/// decrease certificate (`in_vbar`), so the sublevel set cannot leak through
/// an unverified cell. `c` is then pushed just below the smallest `V` of any
/// non-certifiable node, and clipped at the smallest boundary `V` of the
/// scanned region so `{V <= c}` cannot touch the region's edge from inside
/// (touching exactly is allowed). Populates `in_uc` and `certified_c`.
pub fn certify_basin(scan: &mut RegionScan) -> Result<f64> {
    let n = scan.grid.len();
    let mut bad_min_v: Option<f64> = None;
    let mut max_v = f64::NEG_INFINITY;
    let mut boundary_min_v: Option<f64> = None;
    for i in 0..n {
        max_v = max_v.max(scan.v[i]);
        if scan.grid.on_boundary(i) {
            boundary_min_v = Some(boundary_min_v.map_or(scan.v[i], |m: f64| m.min(scan.v[i])));
        }
        let certifiable =
            scan.in_vbar[i] && scan.grid.neighbors(i).iter().all(|&nb| scan.in_vbar[nb]);
        if !certifiable {
            bad_min_v = Some(bad_min_v.map_or(scan.v[i], |m: f64| m.min(scan.v[i])));
        }
    }
    let mut c = match bad_min_v {
        Some(v) => next_down(v),
        None => max_v,
    };
    if let Some(b) = boundary_min_v {
        c = c.min(b);
    }
    if !(c > 0.0) {
        return Err(GdlError::numerical(
            "no certifiable sublevel set: the decrease region does not surround the equilibrium",
        ));
    }
    for i in 0..n {
        scan.in_uc[i] = scan.v[i] <= c;
    }
    scan.certified_c = Some(c);
    Ok(c)
}

/// Largest double strictly below `x`.
fn next_down(x: f64) -> f64 {
    if x.is_nan() || x == f64::NEG_INFINITY {
        return x;
    }
    if x == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = x.to_bits();
    if x > 0.0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

/// Deterministic parallel map over `0..n`: contiguous chunks, one scoped
/// thread each, assembled in index order regardless of thread count.
fn parallel_map<T: Send>(n: usize, threads: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let mut out: Vec<Option<T>> = Vec::with_capacity(n);
    out.resize_with(n, || None);
    let mut slices: Vec<(usize, &mut [Option<T>])> = Vec::new();
    {
        let mut rest = out.as_mut_slice();
        let mut base = 0;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            slices.push((base, head));
            base += take;
            rest = tail;
        }
    }
    std::thread::scope(|scope| {
        for (base, slice) in slices {
            scope.spawn(move || {
                for (k, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(base + k));
                }
            });
        }
    });
    out.into_iter().map(|v| v.expect("filled by worker")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::load_builtin;
    use crate::grid::ProductGrid;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn load(name: &str) -> Box<dyn Game> {
        load_builtin(name, &BTreeMap::new()).unwrap()
    }

    #[test]
    fn lyapunov_validation() {
        assert!(QuadraticLyapunov::new(vec![0.0; 2], vec![vec![1.0, 0.0], vec![0.0, 0.0]]).is_err());
        assert!(QuadraticLyapunov::new(vec![0.0; 2], vec![vec![1.0, 0.5], vec![-0.5, 1.0]]).is_err());
        let q = QuadraticLyapunov::diagonal(vec![0.0, 0.0], &[1.0, 2.0]).unwrap();
        assert_abs_diff_eq!(q.value(&[0.3, 0.1]), 0.09 + 0.02, epsilon = 1e-15);
        assert_eq!(q.gradient(&[0.3, 0.1]), vec![0.6, 0.4]);
    }

    #[test]
    fn spiral_lie_derivative_closed_form() {
        let g = load("spiral");
        let lyap = QuadraticLyapunov::diagonal(vec![0.0, 0.0], &[1.0, 2.0]).unwrap();
        let ld = lie_derivative(g.as_ref(), &lyap, &[0.3, 0.1]).unwrap();
        assert_abs_diff_eq!(ld, -0.32, epsilon = 1e-14);
        // The closed form is -2 (x1 + x2)^2 everywhere.
        for p in [[0.5, -0.2], [-0.9, 0.4], [0.25, 0.25]] {
            let ld = lie_derivative(g.as_ref(), &lyap, &p).unwrap();
            let closed = -2.0 * (p[0] + p[1]) * (p[0] + p[1]);
            assert_abs_diff_eq!(ld, closed, epsilon = 1e-12);
        }
    }

    #[test]
    fn linearization_verdicts_across_the_catalog() {
        let tullock = load("tullock");
        let rep = linear_stability(tullock.as_ref(), &[0.5, 0.5]).unwrap();
        assert_eq!(rep.verdict, StabilityVerdict::AsymptoticallyStable);
        assert!(!rep.tangent_reduced);
        assert_abs_diff_eq!(rep.eigenvalues[0].0, -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.eigenvalues[1].0, -0.5, epsilon = 1e-10);

        let mp = load("matching_pennies");
        let rep = linear_stability(mp.as_ref(), &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(rep.verdict, StabilityVerdict::Marginal);
        assert!(rep.tangent_reduced);
        assert_eq!(rep.eigenvalues.len(), 2);
        assert_abs_diff_eq!(rep.eigenvalues[0].1.abs(), 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.max_real_part, 0.0, epsilon = 1e-10);

        let spiral = load("spiral");
        let rep = linear_stability(spiral.as_ref(), &[0.0, 0.0]).unwrap();
        assert_eq!(rep.verdict, StabilityVerdict::AsymptoticallyStable);
        let im = (7.0f64).sqrt() * 0.75;
        assert_abs_diff_eq!(rep.eigenvalues[0].0, -0.75, epsilon = 1e-10);
        assert_abs_diff_eq!(rep.eigenvalues[0].1.abs(), im, epsilon = 1e-10);

        // Vertex equilibria get no verdict from the raw linearization.
        let pd = load("prisoners_dilemma");
        let rep = linear_stability(pd.as_ref(), &[0.0, 1.0, 0.0, 1.0]).unwrap();
        assert_eq!(rep.verdict, StabilityVerdict::BoundaryIndeterminate);
    }

    #[test]
    fn variational_scan_flags_the_spiral_axis() {
        let g = load("spiral");
        // s((t, -t)) = 1.5 t^2 > 0: the anti-diagonal violates the
        // variational inequality arbitrarily close to the equilibrium.
        let s = vs_value(g.as_ref(), &[0.0, 0.0], &[1e-3, -1e-3]).unwrap();
        assert!(s > 0.0);
        let grid = ProductGrid::over(g.feasible_set(), Some(201)).unwrap();
        let rep = vs_scan(g.as_ref(), &[0.0, 0.0], &grid, 2).unwrap();
        assert!(rep.violations > 0);
        assert!(rep.violation_free_radius < 0.02);
    }

    #[test]
    fn pennies_is_everywhere_borderline() {
        let g = load("matching_pennies");
        let eq = [0.5, 0.5, 0.5, 0.5];
        let grid = ProductGrid::over(g.feasible_set(), Some(41)).unwrap();
        let rep = vs_scan(g.as_ref(), &eq, &grid, 2).unwrap();
        // s vanishes identically: every off-center node is a (tie) violation.
        assert_abs_diff_eq!(rep.min_s, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.max_s, 0.0, epsilon = 1e-12);
        assert_eq!(rep.violations + 1, rep.points);
        assert!(strong_vs_alpha(g.as_ref(), &eq, &grid, 2).unwrap().is_none());
    }

    #[test]
    fn defection_dominance_in_the_deviation_sums() {
        let g = load("prisoners_dilemma");
        let rep = pure_deviation_vs_check(g.as_finite().unwrap(), &[1, 1]).unwrap();
        assert!(rep.passes);
        assert_eq!(rep.profiles_checked, 3);
        // Worst profile is one-sided cooperation: sum = -1.
        assert!(rep.worst_sum < -SIGN_TOL);

        let milionis = load("milionis_cycle");
        let rep = pure_deviation_vs_check(milionis.as_finite().unwrap(), &[0, 0]).unwrap();
        assert!(!rep.passes);
    }

    #[test]
    fn strong_alpha_of_the_dilemma_is_one_half() {
        let g = load("prisoners_dilemma");
        let eq = [0.0, 1.0, 0.0, 1.0];
        let grid = ProductGrid::over(g.feasible_set(), Some(101)).unwrap();
        let alpha = strong_vs_alpha(g.as_ref(), &eq, &grid, 2).unwrap().unwrap();
        assert_abs_diff_eq!(alpha, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn spiral_certificate_covers_the_inscribed_ellipse() {
        let g = load("spiral");
        let lyap = QuadraticLyapunov::diagonal(vec![0.0, 0.0], &[1.0, 2.0]).unwrap();
        let grid = ProductGrid::over(g.feasible_set(), Some(201)).unwrap();
        let mut scan = lyapunov_scan_continuous(g.as_ref(), &lyap, &grid, 2).unwrap();
        assert_eq!(scan.inclusion_violations, 0);
        let c = certify_basin(&mut scan).unwrap();
        assert_abs_diff_eq!(c, 1.0, epsilon = 1e-12);
        assert!(scan.in_uc.iter().filter(|&&b| b).count() > 0);
    }

    #[test]
    fn pennies_has_no_certificate() {
        let g = load("matching_pennies");
        let lyap = QuadraticLyapunov::identity(vec![0.5, 0.5, 0.5, 0.5]);
        let grid = ProductGrid::over(g.feasible_set(), Some(41)).unwrap();
        let mut scan = lyapunov_scan_discrete(g.as_ref(), &lyap, 0.05, &grid, 2).unwrap();
        // The expansion is uniform: Delta V > 0 off the equilibrium.
        assert!(certify_basin(&mut scan).is_err());
    }

    #[test]
    fn contest_discrete_scan_certifies_a_ball() {
        let g = load("tullock");
        let lyap = QuadraticLyapunov::identity(vec![0.5, 0.5]);
        let grid = ProductGrid::over(g.feasible_set(), Some(200)).unwrap();
        let mut scan = lyapunov_scan_discrete(g.as_ref(), &lyap, 0.05, &grid, 2).unwrap();
        assert_eq!(scan.inclusion_violations, 0);
        assert_eq!(scan.bound_dominance_violations, 0);
        assert_eq!(scan.centered_dominance_violations, 0);
        let c = certify_basin(&mut scan).unwrap();
        assert!(c > 0.05, "certified level {c}");
    }

    #[test]
    fn parallel_map_is_thread_count_invariant() {
        let f = |i: usize| (i as f64).sqrt();
        let serial = parallel_map(1000, 1, &f);
        for threads in [2, 3, 7, 16] {
            let par = parallel_map(1000, threads, &f);
            assert_eq!(serial, par);
        }
    }

    #[test]
    fn next_down_is_a_strict_predecessor() {
        for x in [1.0, 0.119, 1e-300, 3.5e10] {
            let y = next_down(x);
            assert!(y < x);
            assert_eq!(f64::from_bits(y.to_bits() + 1), x);
        }
        assert!(next_down(0.0) < 0.0);
    }
}
