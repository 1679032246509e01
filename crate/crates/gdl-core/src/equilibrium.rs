//! Equilibrium computation and diagnosis: pure-profile enumeration,
//! variational-inequality gaps, projected fixed-point iteration, damped
//! Newton on interior stationarity systems, and monotonicity probes of the
//! pseudo-gradient field.

use crate::error::{GdlError, Result};
use crate::game::{FiniteGame, Game};
use crate::linalg::{self, dot, norm, spectral_norm, sub, symmetrized_eigenvalues};
use crate::projection::FeasibleSet;
use crate::rng::{stream_rng, STREAM_SAMPLES};
use serde::Serialize;

/// Tolerance separating payoff ties from genuine improvements when comparing
/// pure deviations; payoffs are O(1) in the catalog.
pub const TIE_TOL: f64 = 1e-9;

/// A candidate equilibrium with its diagnosis.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumCandidate {
    #[serde(flatten)]
    pub kind: CandidateKind,
    /// Joint strategy in ambient coordinates.
    pub x: Vec<f64>,
    /// Best unilateral improvement available to any player (0 at equilibria).
    pub vi_gap: f64,
    /// For pure profiles: every deviation strictly loses.
    pub strict: Option<bool>,
    pub payoffs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateKind {
    Pure { profile: Vec<usize> },
    Mixed,
    Interior,
}

impl CandidateKind {
    pub fn label(&self) -> &'static str {
        match self {
            CandidateKind::Pure { .. } => "pure",
            CandidateKind::Mixed => "mixed",
            CandidateKind::Interior => "interior",
        }
    }
}

/// Worst-case unilateral improvement `sum_i max_{z_i} <F_i(x), z_i - x_i>`.
///
/// Zero exactly at variational equilibria; for simplex blocks the inner
/// maximum is attained at a vertex, for box blocks at a bound.
pub fn vi_gap(game: &dyn Game, x: &[f64]) -> Result<f64> {
    let f = game.gradient(x)?;
    Ok(vi_gap_with(game.feasible_set(), x, &f))
}

/// As [`vi_gap`] but reusing an already computed field value.
pub fn vi_gap_with(set: &FeasibleSet, x: &[f64], f: &[f64]) -> f64 {
    match set {
        FeasibleSet::Box { lo, hi } => (0..x.len())
            .map(|k| (f[k] * (lo[k] - x[k])).max(f[k] * (hi[k] - x[k])))
            .sum(),
        FeasibleSet::SimplexProduct { .. } => set
            .blocks()
            .iter()
            .map(|&(off, len)| {
                let blk_f = &f[off..off + len];
                let best = blk_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                best - dot(blk_f, &x[off..off + len])
            })
            .sum(),
    }
}

/// Enumerate all pure Nash equilibria of a finite game in lexicographic
/// profile order. Ties within [`TIE_TOL`] do not count as improvements, so
/// weak equilibria are kept and flagged `strict: false`.
pub fn enumerate_pure_nash(game: &FiniteGame) -> Result<Vec<EquilibriumCandidate>> {
    let counts = game.action_counts();
    let profiles: usize = counts.iter().product();
    if profiles > 10_000_000 {
        return Err(GdlError::numerical(format!(
            "pure-profile enumeration over {profiles} profiles exceeds the 1e7 budget"
        )));
    }
    let n = counts.len();
    let mut out = Vec::new();
    for profile in game.profiles() {
        let mut is_eq = true;
        let mut strict = true;
        'players: for i in 0..n {
            let base = game.payoff(i, &profile);
            let mut dev = profile.clone();
            for a in 0..counts[i] {
                if a == profile[i] {
                    continue;
                }
                dev[i] = a;
                let u = game.payoff(i, &dev);
                if u > base + TIE_TOL {
                    is_eq = false;
                    break 'players;
                }
                if u > base - TIE_TOL {
                    strict = false;
                }
            }
        }
        if is_eq {
            let x = vertex_of(game, &profile);
            let gap = vi_gap(game, &x)?;
            let payoffs = (0..n).map(|i| game.payoff(i, &profile)).collect();
            out.push(EquilibriumCandidate {
                kind: CandidateKind::Pure { profile },
                x,
                vi_gap: gap,
                strict: Some(strict),
                payoffs,
            });
        }
    }
    Ok(out)
}

fn vertex_of(game: &FiniteGame, profile: &[usize]) -> Vec<f64> {
    let mut x = vec![0.0; game.total_dim()];
    let mut off = 0;
    for (i, &k) in game.action_counts().iter().enumerate() {
        x[off + profile[i]] = 1.0;
        off += k;
    }
    x
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointOutcome {
    pub x: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Final step length `|proj(x + gamma F(x)) - x|`.
    pub residual: f64,
}

/// Iterate the projected map `x <- proj(x + gamma F(x))` until the step
/// length falls below `tol`. Non-convergence within `max_iter` is reported,
/// not raised: cycling fields legitimately fail to settle.
pub fn fixed_point_solve(
    game: &dyn Game,
    x0: &[f64],
    gamma: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointOutcome> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(GdlError::input("fixed-point step size gamma must be positive"));
    }
    let set = game.feasible_set();
    let mut x = set.ingest(x0)?;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let f = game.gradient_unchecked(&x);
        let next = set.project(&linalg::axpy(&x, gamma, &f));
        residual = linalg::dist(&next, &x);
        x = next;
        if residual < tol {
            return Ok(FixedPointOutcome { x, converged: true, iterations: it, residual });
        }
    }
    Ok(FixedPointOutcome { x, converged: false, iterations: max_iter, residual })
}

#[derive(Debug, Clone, Serialize)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    /// Final norm of the stationarity system.
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton iteration for interior stationary points.
///
/// On simplex products the solver works on the reduced indifference system
/// (per block: leading field components minus the last one, with the
/// dependent coordinate eliminated), so the Jacobian stays square and the
/// iterate stays on the affine hull. On boxes it solves `F(x) = 0` directly.
/// The result is not checked for feasibility — callers decide whether an
/// exterior root is meaningful.
pub fn interior_root_solve(
    game: &dyn Game,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    match game.feasible_set() {
        FeasibleSet::Box { .. } => newton_box(game, x0, tol, max_iter),
        FeasibleSet::SimplexProduct { dims } => {
            let dims = dims.clone();
            newton_simplex(game, &dims, x0, tol, max_iter)
        }
    }
}

fn newton_box(game: &dyn Game, x0: &[f64], tol: f64, max_iter: usize) -> Result<NewtonOutcome> {
    let mut x = x0.to_vec();
    let mut f = game.gradient_unchecked(&x);
    let mut r = norm(&f);
    for it in 0..max_iter {
        if r < tol {
            return Ok(NewtonOutcome { x, residual: r, iterations: it });
        }
        let jac = game.jacobian(&x);
        let rhs: Vec<f64> = f.iter().map(|v| -v).collect();
        let delta = linalg::solve_linear(&jac, &rhs)
            .ok_or_else(|| GdlError::numerical("singular Jacobian in Newton iteration"))?;
        (x, f, r) = damped_step(&x, &delta, r, |y| game.gradient_unchecked(y))?;
    }
    if r < tol {
        return Ok(NewtonOutcome { x, residual: r, iterations: max_iter });
    }
    Err(GdlError::numerical(format!(
        "Newton iteration did not reach tolerance {tol:e} in {max_iter} steps (residual {r:e})"
    )))
}

fn newton_simplex(
    game: &dyn Game,
    dims: &[usize],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    // Reduced coordinates: the first d_i - 1 entries of each block.
    let reduced_dim: usize = dims.iter().map(|d| d - 1).sum();
    let offsets: Vec<usize> = {
        let mut v = Vec::with_capacity(dims.len());
        let mut off = 0;
        for &d in dims {
            v.push(off);
            off += d;
        }
        v
    };
    let embed = |y: &[f64]| -> Vec<f64> {
        let mut x = Vec::with_capacity(dims.iter().sum());
        let mut pos = 0;
        for &d in dims {
            let head = &y[pos..pos + d - 1];
            let tail = 1.0 - head.iter().sum::<f64>();
            x.extend_from_slice(head);
            x.push(tail);
            pos += d - 1;
        }
        x
    };
    let reduced_field = |y: &[f64]| -> Vec<f64> {
        let x = embed(y);
        let f = game.gradient_unchecked(&x);
        let mut g = Vec::with_capacity(reduced_dim);
        for (i, &d) in dims.iter().enumerate() {
            let off = offsets[i];
            let last = f[off + d - 1];
            for k in 0..d - 1 {
                g.push(f[off + k] - last);
            }
        }
        g
    };
    let mut y: Vec<f64> = {
        let mut v = Vec::with_capacity(reduced_dim);
        let mut off = 0;
        for &d in dims {
            v.extend_from_slice(&x0[off..off + d - 1]);
            off += d;
        }
        v
    };
    if reduced_dim == 0 {
        return Ok(NewtonOutcome { x: embed(&y), residual: 0.0, iterations: 0 });
    }
    let mut g = reduced_field(&y);
    let mut r = norm(&g);
    for it in 0..max_iter {
        if r < tol {
            return Ok(NewtonOutcome { x: embed(&y), residual: r, iterations: it });
        }
        let x = embed(&y);
        let jac = game.jacobian(&x);
        // Chain rule for the reduced system: subtract the last row of each
        // row block and the last column of each column block.
        let mut red = vec![vec![0.0; reduced_dim]; reduced_dim];
        let mut row = 0;
        for (i, &di) in dims.iter().enumerate() {
            let ro = offsets[i];
            for k in 0..di - 1 {
                let mut col = 0;
                for (j, &dj) in dims.iter().enumerate() {
                    let co = offsets[j];
                    for l in 0..dj - 1 {
                        red[row + k][col + l] = (jac[ro + k][co + l] - jac[ro + k][co + dj - 1])
                            - (jac[ro + di - 1][co + l] - jac[ro + di - 1][co + dj - 1]);
                    }
                    col += dj - 1;
                }
            }
            row += di - 1;
        }
        let rhs: Vec<f64> = g.iter().map(|v| -v).collect();
        let delta = linalg::solve_linear(&red, &rhs)
            .ok_or_else(|| GdlError::numerical("singular reduced Jacobian in Newton iteration"))?;
        (y, g, r) = damped_step(&y, &delta, r, reduced_field)?;
    }
    if r < tol {
        return Ok(NewtonOutcome { x: embed(&y), residual: r, iterations: max_iter });
    }
    Err(GdlError::numerical(format!(
        "Newton iteration did not reach tolerance {tol:e} in {max_iter} steps (residual {r:e})"
    )))
}

/// Backtracking step: halve until the residual norm decreases (at most 30
/// halvings). Returns the new point, field value, and residual.
fn damped_step<Ff: Fn(&[f64]) -> Vec<f64>>(
    x: &[f64],
    delta: &[f64],
    r0: f64,
    field: Ff,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut lambda = 1.0;
    for _ in 0..=30 {
        let cand = linalg::axpy(x, lambda, delta);
        let f = field(&cand);
        let r = norm(&f);
        if r < r0 {
            return Ok((cand, f, r));
        }
        lambda *= 0.5;
    }
    Err(GdlError::numerical(
        "Newton line search failed to reduce the residual after 30 halvings",
    ))
}

/// Candidate equilibria of a game in a deterministic order: all pure Nash
/// profiles (finite games, lexicographic), then one interior/mixed candidate
/// found by Newton from the barycenter, kept only when it is feasible and
/// its variational gap vanishes to 1e-10.
pub fn analyze_equilibria(game: &dyn Game) -> Result<Vec<EquilibriumCandidate>> {
    let mut out = Vec::new();
    if let Some(fin) = game.as_finite() {
        out.extend(enumerate_pure_nash(fin)?);
    }
    let center = game.feasible_set().center();
    if let Ok(newton) = interior_root_solve(game, &center, 1e-12, 100) {
        if let Ok(x) = game.feasible_set().ingest(&newton.x) {
            let gap = vi_gap(game, &x)?;
            let far_from_known = out
                .iter()
                .all(|c: &EquilibriumCandidate| linalg::dist(&c.x, &x) > 1e-8);
            if gap <= 1e-10 && far_from_known {
                let payoffs = (0..game.num_players())
                    .map(|i| game.utility(i, &x))
                    .collect::<Result<Vec<f64>>>()?;
                let kind = if game.as_finite().is_some() {
                    CandidateKind::Mixed
                } else {
                    CandidateKind::Interior
                };
                out.push(EquilibriumCandidate {
                    kind,
                    x,
                    vi_gap: gap,
                    strict: None,
                    payoffs,
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotonicityClass {
    NoneDetected,
    PseudomonotoneOnly,
    Monotone,
    StrictlyMonotone,
    StronglyMonotone,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub classification: MonotonicityClass,
    /// Strong-monotonicity modulus: exact `-lambda_max` of the symmetrized
    /// (tangent-restricted) Jacobian for affine fields, else the sampled
    /// infimum of `-<dF, dx>/|dx|^2`.
    pub strong_alpha: Option<f64>,
    /// True when the Jacobian was found constant and the classification is
    /// certified by its symmetrized eigenvalues (the pseudomonotone /
    /// none_detected split below `monotone` remains sample-based).
    pub exact: bool,
    pub samples: usize,
    pub pairs: usize,
    pub monotone_violations: usize,
    pub strict_violations: usize,
    pub strong_violations: usize,
    pub pseudo_violations: usize,
    /// Largest eigenvalue of the symmetrized Jacobian on the tangent space
    /// (exact path only; NaN when sampled).
    pub max_symmetrized_eigenvalue: f64,
    pub lipschitz_estimate: f64,
    /// All cross-player Jacobian entries nonnegative at the probe points.
    pub strategic_complements: bool,
    /// Jacobian symmetric at the probe points, i.e. the field looks
    /// conservative and the game is a candidate potential game.
    pub potential_game_candidate: bool,
}

/// Tolerances of the monotonicity ladder.
const MONO_TOL: f64 = 1e-12;
const STRONG_TOL: f64 = 1e-10;

/// Probe the pseudo-gradient field for monotonicity structure on `region`
/// (defaults to the whole feasible set) using `samples` random points.
///
/// When the Jacobian is constant — every affine field, i.e. all bimatrix
/// mixed extensions and linear-quadratic games — the class is decided
/// exactly from the symmetrized eigenvalues restricted to the tangent space;
/// otherwise from pairwise sampled inner products.
pub fn monotonicity_report(
    game: &dyn Game,
    region: Option<&FeasibleSet>,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if samples < 2 {
        return Err(GdlError::input("monotonicity probing needs at least 2 samples"));
    }
    let set = region.unwrap_or_else(|| game.feasible_set());
    let mut rng = stream_rng(seed, STREAM_SAMPLES);
    let pts: Vec<Vec<f64>> = (0..samples).map(|_| set.sample(&mut rng)).collect();
    let fields: Vec<Vec<f64>> = pts.iter().map(|p| game.gradient_unchecked(p)).collect();

    let mut monotone_violations = 0usize;
    let mut strict_violations = 0usize;
    let mut strong_violations = 0usize;
    let mut pseudo_violations = 0usize;
    let mut alpha_inf = f64::INFINITY;
    let mut lipschitz = 0.0f64;
    let mut pairs = 0usize;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let dx = sub(&pts[i], &pts[j]);
            let d2 = dot(&dx, &dx);
            if d2 < 1e-20 {
                continue;
            }
            pairs += 1;
            let df = sub(&fields[i], &fields[j]);
            let m = dot(&df, &dx);
            if m > MONO_TOL {
                monotone_violations += 1;
            }
            if m >= -MONO_TOL {
                strict_violations += 1;
            }
            let ratio = -m / d2;
            alpha_inf = alpha_inf.min(ratio);
            if ratio <= STRONG_TOL {
                strong_violations += 1;
            }
            lipschitz = lipschitz.max(norm(&df) / d2.sqrt());
            // Pseudomonotonicity, both orientations: <F(y), x-y> <= 0 must
            // force <F(x), x-y> <= 0.
            let fy_dx = dot(&fields[j], &dx);
            let fx_dx = dot(&fields[i], &dx);
            if fy_dx <= MONO_TOL && fx_dx > MONO_TOL {
                pseudo_violations += 1;
            }
            if -fx_dx <= MONO_TOL && -fy_dx > MONO_TOL {
                pseudo_violations += 1;
            }
        }
    }

    // Probe the Jacobian at three points for constancy and structure flags.
    let probes: Vec<Vec<f64>> = {
        let mut v = vec![set.center()];
        v.push(pts[0].clone());
        v.push(pts[1].clone());
        v
    };
    let jacs: Vec<Vec<Vec<f64>>> = probes.iter().map(|p| game.jacobian(p)).collect();
    let d = game.total_dim();
    let constant = jacs[1..].iter().all(|j| {
        (0..d).all(|r| (0..d).all(|c| (j[r][c] - jacs[0][r][c]).abs() <= 1e-9))
    });
    let strategic_complements = jacs.iter().all(|j| cross_entries_nonneg(game, j));
    let potential_game_candidate = jacs
        .iter()
        .all(|j| (0..d).all(|r| (0..d).all(|c| (j[r][c] - j[c][r]).abs() <= 1e-9)));

    let mut max_sym_eig = f64::NAN;
    let mut exact = false;
    let mut strong_alpha = None;
    let classification = if constant {
        exact = true;
        let reduced = tangent_restrict(game.feasible_set(), &jacs[0]);
        let eigs = symmetrized_eigenvalues(&reduced);
        let lam = *eigs.last().expect("nonempty spectrum");
        max_sym_eig = lam;
        lipschitz = spectral_norm(&jacs[0]);
        if lam < -STRONG_TOL {
            strong_alpha = Some(-lam);
            MonotonicityClass::StronglyMonotone
        } else if lam <= STRONG_TOL {
            MonotonicityClass::Monotone
        } else if pseudo_violations == 0 {
            MonotonicityClass::PseudomonotoneOnly
        } else {
            MonotonicityClass::NoneDetected
        }
    } else if monotone_violations == 0 {
        if strong_violations == 0 {
            strong_alpha = Some(alpha_inf);
            MonotonicityClass::StronglyMonotone
        } else if strict_violations == 0 {
            MonotonicityClass::StrictlyMonotone
        } else {
            MonotonicityClass::Monotone
        }
    } else if pseudo_violations == 0 {
        MonotonicityClass::PseudomonotoneOnly
    } else {
        MonotonicityClass::NoneDetected
    };

    Ok(MonotonicityReport {
        classification,
        strong_alpha,
        exact,
        samples,
        pairs,
        monotone_violations,
        strict_violations,
        strong_violations,
        pseudo_violations,
        max_symmetrized_eigenvalue: max_sym_eig,
        lipschitz_estimate: lipschitz,
        strategic_complements,
        potential_game_candidate,
    })
}

fn cross_entries_nonneg(game: &dyn Game, jac: &[Vec<f64>]) -> bool {
    let dims = game.dims();
    let mut off_r = 0;
    for (i, &di) in dims.iter().enumerate() {
        let mut off_c = 0;
        for (j, &dj) in dims.iter().enumerate() {
            if i != j {
                for r in off_r..off_r + di {
                    for c in off_c..off_c + dj {
                        if jac[r][c] < -STRONG_TOL {
                            return false;
                        }
                    }
                }
            }
            off_c += dj;
        }
        off_r += di;
    }
    true
}

/// Restrict a matrix to the tangent space of the feasible set: identity for
/// boxes, blockwise Helmert contrasts for simplex products.
pub fn tangent_restrict(set: &FeasibleSet, m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match set {
        FeasibleSet::Box { .. } => m.to_vec(),
        FeasibleSet::SimplexProduct { dims } => {
            let total: usize = dims.iter().sum();
            let mut basis: Vec<Vec<f64>> = Vec::new();
            let mut off = 0;
            for &d in dims {
                for row in linalg::helmert_basis(d) {
                    let mut full = vec![0.0; total];
                    full[off..off + d].copy_from_slice(&row);
                    basis.push(full);
                }
                off += d;
            }
            if basis.is_empty() {
                // Degenerate: every player has one action; the tangent space
                // is trivial and the zero matrix is the restriction.
                return vec![vec![0.0]];
            }
            linalg::restrict(m, &basis)
        }
    }
}
