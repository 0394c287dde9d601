//! Sub/super-solutions and the nonnegative stationary state of
//! `rate (J_eps * u - u) + u (a - kappa u) = 0`.
//!
//! Writing `A` for the matrix of `rate (J_eps * . - .) + a`, the problem is
//! `F(u) = A u - kappa u^2 = 0`. Two order-preserving iterations bracket the
//! solution:
//!
//! * from the sub-solution `theta phi_p` upward, the implicit monotone map
//!   `(c I - A) u' = c u - kappa u^2` (or the explicit damped map);
//! * from the super-solution downward, Newton's method. `F` is concave and
//!   `2 kappa u - A` is an M-matrix for every `u` above the solution, so each
//!   Newton iterate is again a super-solution and the sequence decreases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Topology};
use crate::growth::{GrowthProfile, Reaction};
use crate::linalg::{sup_distance, sup_norm, BandCholesky, BandedSym};
use crate::nonlocal_op::DiscreteOperator;
use crate::spectral::{principal_eigenvalue, Sign, SpectralEstimate, SpectralOptions};

/// Ratio floor below which `f(x, s) / s` terms are skipped.
pub const POSITIVITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// `(c I - A) u' = c u - kappa u^2` from below, Newton from above.
    #[default]
    Implicit,
    /// `u' = u + tau F(u)` with `tau = 0.9 / (rate + L_f)` on both sides.
    Explicit,
}

#[derive(Debug, Clone, Copy)]
pub struct StationaryOptions {
    /// Residual and uniqueness tolerance.
    pub tol: f64,
    pub max_iterations: usize,
    pub scheme: Scheme,
    pub spectral: SpectralOptions,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            tol: 1e-8,
            max_iterations: 500_000,
            scheme: Scheme::Implicit,
            spectral: SpectralOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Persistence,
    Extinction,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SuperKind {
    /// `2M` on `B_{2 R0}`, `C exp(-alpha |x|)` outside.
    Exponential { alpha: f64, c: f64, r0: f64, m: f64 },
    /// The constant `sup S`.
    Constant { level: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Supersolution {
    #[serde(skip)]
    pub values: Vec<f64>,
    pub kind: SuperKind,
    /// `max_i F(u_bar)_i`, non-positive for a super-solution.
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarySolution {
    #[serde(skip)]
    pub grid: Grid,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub residual: f64,
    #[serde(skip)]
    pub sub: Vec<f64>,
    #[serde(skip)]
    pub super_: Vec<f64>,
    pub lambda_p_used: SpectralEstimate,
    pub verdict: Verdict,
    /// `(R, sup-norm change)` for whole-space solves.
    pub r_history: Vec<(f64, f64)>,
    /// Distance between the iterates from below and from above.
    pub branch_gap: f64,
    pub iterations: usize,
    /// Terminal state of the attempted iteration when the sign is indeterminate.
    #[serde(skip)]
    pub attempt: Option<Vec<f64>>,
}

impl StationarySolution {
    pub fn sup(&self) -> f64 {
        sup_norm(&self.values)
    }
    pub fn l1(&self) -> f64 {
        self.grid.norm_l1(&self.values)
    }
    pub fn l2(&self) -> f64 {
        self.grid.norm_l2(&self.values)
    }
}

/// `F(u) = A u - kappa u^2`.
pub fn stationary_residual(a: &BandedSym, kappa: f64, u: &[f64]) -> Vec<f64> {
    let mut f = a.matvec(u);
    for (fi, ui) in f.iter_mut().zip(u) {
        *fi -= kappa * ui * ui;
    }
    f
}

/// `F(u)` evaluated on the operator (direct path).
pub fn operator_residual(op: &DiscreteOperator, reaction: &Reaction, u: &[f64]) -> Result<Vec<f64>> {
    let lin = op.apply(u, false, crate::nonlocal_op::Path::Direct)?;
    Ok(lin
        .iter()
        .zip(u)
        .zip(op.growth())
        .map(|((l, v), a)| l + reaction.value(*a, *v))
        .collect())
}

/// `build_supersolution`: exponential super-solution for compact kernels and
/// a hostile exterior, falling back to the constant `sup S`.
pub fn build_supersolution(op: &DiscreteOperator, growth: &GrowthProfile, reaction: &Reaction) -> Result<Supersolution> {
    let grid = op.grid();
    let a = op.growth();
    let kernel = op.kernel();
    if !kernel.base().is_compact() {
        return Err(Error::SupersolutionConstruction(
            "exponential ansatz needs a compactly supported kernel".into(),
        ));
    }
    let host = growth.hostility().ok_or_else(|| {
        Error::SupersolutionConstruction("growth rate is not uniformly negative at infinity".into())
    })?;
    let nu = host.nu;
    let r0 = host.half_radius;
    // h(alpha) = rate (sum_d s_d exp(alpha |d h|) - 1) - nu / 2 on the actual stencil.
    let stencil = op.convolver().stencil();
    let hsp = grid.spacing();
    let reach = stencil.reach() as i64;
    let two_d = grid.dimension() == 2;
    let h_of = |alpha: f64| {
        let mut acc = 0.0;
        let r1 = if two_d { reach } else { 0 };
        for d0 in -reach..=reach {
            for d1 in -r1..=r1 {
                let w = stencil.at([d0, d1]);
                if w > 0.0 {
                    let dist = hsp * ((d0 * d0 + d1 * d1) as f64).sqrt();
                    acc += w * (alpha * dist).exp();
                }
            }
        }
        op.rate() * (acc - 1.0) - 0.5 * nu
    };
    let mut alpha = 1.0;
    while h_of(alpha) >= 0.0 {
        alpha *= 0.5;
        if alpha < 1e-12 {
            return Err(Error::SupersolutionConstruction(format!(
                "no decay rate alpha with h(alpha) < 0 (nu = {nu})"
            )));
        }
    }
    let m = (0..grid.len())
        .filter(|&i| grid.norm(i) <= 2.0 * r0)
        .map(|i| reaction.saturation(a[i]))
        .fold(0.0, f64::max);
    let c = 2.0 * m * (2.0 * alpha * r0).exp();
    let values: Vec<f64> = (0..grid.len())
        .map(|i| {
            let r = grid.norm(i);
            if r <= 2.0 * r0 {
                2.0 * m
            } else {
                c * (-alpha * r).exp()
            }
        })
        .collect();
    let f = operator_residual(op, reaction, &values)?;
    let margin = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(Supersolution {
        values,
        kind: SuperKind::Exponential { alpha, c, r0, m },
        margin,
    })
}

/// Constant super-solution `sup S`; valid on ball grids (mass deficit) and tori.
pub fn constant_supersolution(op: &DiscreteOperator, reaction: &Reaction) -> Result<Supersolution> {
    let level = reaction.sup_saturation(op.growth());
    let values = vec![level; op.len()];
    let f = operator_residual(op, reaction, &values)?;
    Ok(Supersolution {
        values,
        kind: SuperKind::Constant { level },
        margin: f.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Exponential super-solution when it can be built and verified, otherwise the constant one.
pub fn best_supersolution(
    op: &DiscreteOperator,
    growth: Option<&GrowthProfile>,
    reaction: &Reaction,
    tol: f64,
) -> Result<Supersolution> {
    if op.grid().topology() == Topology::BallTruncated {
        if let Some(g) = growth {
            if let Ok(s) = build_supersolution(op, g, reaction) {
                if s.margin <= tol {
                    return Ok(s);
                }
            }
        }
    }
    constant_supersolution(op, reaction)
}

/// Largest `theta <= -lambda_upper / (2 kappa)` (halving) with `theta phi` a
/// pointwise sub-solution.
pub fn build_subsolution(a: &BandedSym, kappa: f64, est: &SpectralEstimate) -> Option<Vec<f64>> {
    if est.upper >= 0.0 {
        return None;
    }
    let phi = &est.eigenvector;
    // (A phi)_i / phi_i through the nonnegative shifted product.
    let shift = 1.0 + a.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let mut y = vec![0.0; phi.len()];
    a.matvec_shifted(phi, shift, &mut y);
    let q: Vec<f64> = y.iter().zip(phi).map(|(y, p)| y / p - shift).collect();
    let mut theta = -est.upper / (2.0 * kappa);
    for _ in 0..60 {
        if phi.iter().zip(&q).all(|(p, q)| q - kappa * theta * p >= 0.0) {
            return Some(phi.iter().map(|p| theta * p).collect());
        }
        theta *= 0.5;
    }
    None
}

struct Branches {
    lower: Vec<f64>,
    upper: Vec<f64>,
    iterations: usize,
}

fn implicit_constant(a: &BandedSym, kappa: f64, super_sup: f64, lambda_lower: f64) -> Result<(f64, BandCholesky)> {
    let mut c = (2.0 * kappa * super_sup).max(-lambda_lower);
    c += 1e-3 * (1.0 + c.abs());
    for _ in 0..60 {
        if let Ok(ch) = a.cholesky_of_shift(c) {
            return Ok((c, ch));
        }
        c = 1.5 * c + 1.0;
    }
    Err(Error::NumericalFailure("no admissible implicit shift".into()))
}

/// Monotone iteration from `start` until the extrapolated error drops below `tol`.
fn monotone_branch<S>(start: &[f64], mut step: S, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)>
where
    S: FnMut(&[f64]) -> Vec<f64>,
{
    let mut u = start.to_vec();
    let mut prev_d = f64::INFINITY;
    for k in 1..=max_iter {
        let next = step(&u);
        let d = sup_distance(&next, &u);
        u = next;
        if !d.is_finite() {
            return Err(Error::NumericalFailure("monotone iteration diverged".into()));
        }
        let q = if prev_d.is_finite() && prev_d > 0.0 { (d / prev_d).min(0.999_999) } else { 0.999 };
        let err = if d == 0.0 { 0.0 } else { d * q / (1.0 - q) };
        if err <= tol && k > 2 {
            return Ok((u, k));
        }
        prev_d = d;
    }
    Err(Error::SolverStalled {
        iterations: max_iter,
        residual: prev_d,
    })
}

fn newton_from_above(a: &BandedSym, kappa: f64, start: &[f64], tol: f64) -> Option<(Vec<f64>, usize)> {
    let mut u = start.to_vec();
    let mut last_res = f64::INFINITY;
    for k in 1..=100 {
        let f = stationary_residual(a, kappa, &u);
        let res = sup_norm(&f);
        if res <= 1e-3 * tol || (res >= last_res && res <= tol) {
            return Some((u, k));
        }
        last_res = res;
        let mut jac = a.clone();
        let d: Vec<f64> = u.iter().map(|v| -2.0 * kappa * v).collect();
        jac.add_to_diagonal(&d);
        let chol = jac.cholesky_of_shift(0.0).ok()?;
        let mut delta = f;
        chol.solve_in_place(&mut delta);
        for (ui, di) in u.iter_mut().zip(&delta) {
            *ui = (*ui + di).max(0.0);
        }
    }
    let res = sup_norm(&stationary_residual(a, kappa, &u));
    (res <= tol).then_some((u, 100))
}

fn solve_branches(
    a: &BandedSym,
    kappa: f64,
    rate: f64,
    sub: &[f64],
    sup: &[f64],
    est: &SpectralEstimate,
    opts: &StationaryOptions,
) -> Result<Branches> {
    let s_max = sup_norm(sup);
    match opts.scheme {
        Scheme::Implicit => {
            let (c, chol) = implicit_constant(a, kappa, s_max, est.lower)?;
            let step = |u: &[f64]| {
                let mut rhs: Vec<f64> = u.iter().map(|v| c * v - kappa * v * v).collect();
                chol.solve_in_place(&mut rhs);
                rhs.iter_mut().for_each(|v| *v = v.max(0.0));
                rhs
            };
            let (lower, it_lo) = monotone_branch(sub, step, opts.tol, opts.max_iterations)?;
            let (upper, it_up) = match newton_from_above(a, kappa, sup, opts.tol) {
                Some(r) => r,
                None => monotone_branch(sup, step, 0.1 * opts.tol, opts.max_iterations)?,
            };
            Ok(Branches {
                lower,
                upper,
                iterations: it_lo + it_up,
            })
        }
        Scheme::Explicit => {
            let diag = a.diagonal();
            let lf = diag
                .iter()
                .map(|d| {
                    // a_i = d - rate (s0 - 1) is not needed exactly: bound |a - 2 kappa s| by
                    // the diagonal spread, which contains a_i up to the stencil self-weight.
                    (d + rate).abs().max((d + rate - 2.0 * kappa * s_max).abs())
                })
                .fold(0.0, f64::max);
            let tau = 0.9 / (rate + lf);
            let step = |u: &[f64]| {
                let f = stationary_residual(a, kappa, u);
                u.iter().zip(&f).map(|(v, f)| (v + tau * f).max(0.0)).collect::<Vec<f64>>()
            };
            let (lower, it_lo) = monotone_branch(sub, step, opts.tol, opts.max_iterations)?;
            let (upper, it_up) = monotone_branch(sup, step, opts.tol, opts.max_iterations)?;
            Ok(Branches {
                lower,
                upper,
                iterations: it_lo + it_up,
            })
        }
    }
}

/// Core solver on an assembled banded system. `est` must be the principal
/// eigenvalue of `a`.
pub fn solve_monotone(
    a: &BandedSym,
    kappa: f64,
    rate: f64,
    est: &SpectralEstimate,
    sup: &[f64],
    opts: &StationaryOptions,
) -> Result<MonotoneOutcome> {
    let n = a.len();
    match est.sign() {
        Sign::NonNegative => Ok(MonotoneOutcome {
            values: vec![0.0; n],
            sub: vec![0.0; n],
            residual: 0.0,
            gap: 0.0,
            iterations: 0,
            verdict: Verdict::Extinction,
            attempt: None,
        }),
        Sign::Indeterminate => {
            let attempt = newton_from_above(a, kappa, sup, opts.tol).map(|r| r.0);
            Ok(MonotoneOutcome {
                values: vec![0.0; n],
                sub: vec![0.0; n],
                residual: 0.0,
                gap: f64::NAN,
                iterations: 0,
                verdict: Verdict::Indeterminate,
                attempt,
            })
        }
        Sign::Negative => {
            let sub = build_subsolution(a, kappa, est)
                .ok_or_else(|| Error::NumericalFailure("no verified sub-solution amplitude".into()))?;
            if sub.iter().zip(sup).any(|(s, u)| s > u) {
                return Err(Error::MonotonicityViolation("sub-solution exceeds super-solution".into()));
            }
            let br = solve_branches(a, kappa, rate, &sub, sup, est, opts)?;
            let gap = sup_distance(&br.lower, &br.upper);
            if gap > 10.0 * opts.tol {
                return Err(Error::UniquenessViolation { gap });
            }
            let values = br.upper;
            let residual = sup_norm(&stationary_residual(a, kappa, &values));
            if residual > opts.tol {
                return Err(Error::SolverStalled {
                    iterations: br.iterations,
                    residual,
                });
            }
            let slack = 10.0 * opts.tol;
            if values.iter().zip(&sub).any(|(v, s)| *v < s - slack) || values.iter().zip(sup).any(|(v, s)| *v > s + slack) {
                return Err(Error::MonotonicityViolation("solution leaves the sub/super bracket".into()));
            }
            Ok(MonotoneOutcome {
                values,
                sub,
                residual,
                gap,
                iterations: br.iterations,
                verdict: Verdict::Persistence,
                attempt: None,
            })
        }
    }
}

/// Implicit monotone iteration from an arbitrary sub- or super-solution
/// `start` (checked pointwise up to `opts.tol`). Used for multi-start
/// uniqueness tests.
pub fn iterate_from(
    op: &DiscreteOperator,
    reaction: &Reaction,
    est: &SpectralEstimate,
    start: &[f64],
    opts: &StationaryOptions,
) -> Result<Vec<f64>> {
    let a = op.banded();
    let kappa = reaction.crowding;
    let f = stationary_residual(&a, kappa, start);
    let is_sub = f.iter().all(|v| *v >= -opts.tol);
    let is_super = f.iter().all(|v| *v <= opts.tol);
    if !(is_sub || is_super) || start.iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "start",
            reason: "initial iterate is neither a sub- nor a super-solution".into(),
        });
    }
    let s_max = sup_norm(start).max(reaction.sup_saturation(op.growth()));
    let (c, chol) = implicit_constant(&a, kappa, s_max, est.lower)?;
    let step = |u: &[f64]| {
        let mut rhs: Vec<f64> = u.iter().map(|v| c * v - kappa * v * v).collect();
        chol.solve_in_place(&mut rhs);
        rhs.iter_mut().for_each(|v| *v = v.max(0.0));
        rhs
    };
    Ok(monotone_branch(start, step, 0.1 * opts.tol, opts.max_iterations)?.0)
}

#[derive(Debug, Clone)]
pub struct MonotoneOutcome {
    pub values: Vec<f64>,
    pub sub: Vec<f64>,
    pub residual: f64,
    pub gap: f64,
    pub iterations: usize,
    pub verdict: Verdict,
    pub attempt: Option<Vec<f64>>,
}

/// `solve_stationary_ball`: stationary state on one ball (or torus) grid.
pub fn solve_stationary_ball(
    op: &DiscreteOperator,
    reaction: &Reaction,
    growth: Option<&GrowthProfile>,
    opts: &StationaryOptions,
) -> Result<StationarySolution> {
    let est = principal_eigenvalue(op, &opts.spectral)?;
    solve_with_estimate(op, reaction, growth, est, opts)
}

/// As [`solve_stationary_ball`] with a precomputed principal eigenvalue.
pub fn solve_with_estimate(
    op: &DiscreteOperator,
    reaction: &Reaction,
    growth: Option<&GrowthProfile>,
    est: SpectralEstimate,
    opts: &StationaryOptions,
) -> Result<StationarySolution> {
    let sup = best_supersolution(op, growth, reaction, opts.tol)?;
    let a = op.banded();
    let out = solve_monotone(&a, reaction.crowding, op.rate(), &est, &sup.values, opts)?;
    // Report the residual through the direct operator path as well.
    let residual = if out.verdict == Verdict::Persistence {
        sup_norm(&operator_residual(op, reaction, &out.values)?)
    } else {
        out.residual
    };
    Ok(StationarySolution {
        grid: op.grid().clone(),
        values: out.values,
        residual,
        sub: out.sub,
        super_: sup.values,
        lambda_p_used: est,
        verdict: out.verdict,
        r_history: Vec::new(),
        branch_gap: out.gap,
        iterations: out.iterations,
        attempt: out.attempt,
    })
}

/// `solve_stationary_wholespace`: ball solves over an increasing schedule of
/// nested grids, checking `u_{R_k} <= u_{R_{k+1}}` on the common domain and
/// stopping once the change drops below `opts.tol`.
pub fn solve_stationary_wholespace<F>(
    build: F,
    radii: &[f64],
    reaction: &Reaction,
    growth: Option<&GrowthProfile>,
    change_tol: f64,
    opts: &StationaryOptions,
) -> Result<StationarySolution>
where
    F: Fn(f64) -> Result<DiscreteOperator>,
{
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "R_schedule",
            reason: "radii must be a non-empty increasing list".into(),
        });
    }
    let mut history = Vec::new();
    let mut prev: Option<StationarySolution> = None;
    for &r in radii {
        let op = build(r)?;
        let sol = solve_stationary_ball(&op, reaction, growth, opts)?;
        let change = match &prev {
            None => sup_norm(&sol.values),
            Some(p) => {
                let map = p.grid.embedding_into(&sol.grid).ok_or_else(|| {
                    Error::DiscretizationInconsistency("schedule grids are not nested".into())
                })?;
                let slack = 10.0 * opts.tol;
                let mut change: f64 = 0.0;
                let mut on_common = vec![false; sol.values.len()];
                for (i, &j) in map.iter().enumerate() {
                    on_common[j] = true;
                    let d = sol.values[j] - p.values[i];
                    if d < -slack {
                        return Err(Error::MonotonicityViolation(format!(
                            "u decreases by {:.3e} from R = {} to R = {r}",
                            -d,
                            p.grid.radius()
                        )));
                    }
                    change = change.max(d.abs());
                }
                for (j, v) in sol.values.iter().enumerate() {
                    if !on_common[j] {
                        change = change.max(v.abs());
                    }
                }
                change
            }
        };
        history.push((r, change));
        let done = prev.is_some() && change <= change_tol;
        prev = Some(sol);
        if done {
            break;
        }
    }
    let mut sol = prev.expect("non-empty schedule");
    sol.r_history = history;
    Ok(sol)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct UniquenessReport {
    /// `sum_i w_i v_i u_i [f(u_i)/u_i - f(v_i)/v_i]`
    pub defect: f64,
    pub sup_distance: f64,
}

/// `verify_uniqueness`: energy-identity defect between two candidates.
pub fn verify_uniqueness(grid: &Grid, a: &[f64], reaction: &Reaction, u: &[f64], v: &[f64]) -> UniquenessReport {
    let mut defect = 0.0;
    for i in 0..u.len() {
        if u[i] < POSITIVITY_FLOOR || v[i] < POSITIVITY_FLOOR {
            continue;
        }
        defect += v[i] * u[i] * (reaction.per_capita(a[i], u[i]) - reaction.per_capita(a[i], v[i]));
    }
    UniquenessReport {
        defect: grid.weight() * defect,
        sup_distance: sup_distance(u, v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;
    use crate::kernel::{rescale_kernel, Kernel};

    fn setup(r: f64, growth: &GrowthProfile) -> DiscreteOperator {
        let g = build_grid(1, r, 0.1, Topology::BallTruncated).unwrap();
        let k = rescale_kernel(&Kernel::tent(1), 1.0, 0.0, 1.0).unwrap();
        DiscreteOperator::new(&g, &k, growth.sample(&g)).unwrap()
    }

    #[test]
    fn torus_constant_growth_gives_logistic_equilibrium() {
        let g = build_grid(1, 2.0, 0.1, Topology::Torus).unwrap();
        let k = rescale_kernel(&Kernel::tent(1), 0.5, 0.0, 1.0).unwrap();
        let op = DiscreteOperator::new(&g, &k, vec![0.7; g.len()]).unwrap();
        let sol = solve_stationary_ball(&op, &Reaction::default(), None, &StationaryOptions::default()).unwrap();
        assert_eq!(sol.verdict, Verdict::Persistence);
        assert!(sol.values.iter().all(|v| (v - 0.7).abs() < 1e-9));
    }

    #[test]
    fn hostile_everywhere_is_extinct() {
        let growth = GrowthProfile::constant(-0.2);
        let op = setup(4.0, &growth);
        let sol = solve_stationary_ball(&op, &Reaction::default(), Some(&growth), &StationaryOptions::default()).unwrap();
        assert_eq!(sol.verdict, Verdict::Extinction);
        assert!(sol.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bump_solution_is_sandwiched() {
        let growth = GrowthProfile::bump(2.0, 1.0, -1.0);
        let op = setup(6.0, &growth);
        let sup = build_supersolution(&op, &growth, &Reaction::default()).unwrap();
        assert!(sup.margin <= 0.0, "margin {}", sup.margin);
        let sol = solve_stationary_ball(&op, &Reaction::default(), Some(&growth), &StationaryOptions::default()).unwrap();
        assert_eq!(sol.verdict, Verdict::Persistence);
        assert!(sol.residual <= 1e-8);
        for i in 0..sol.values.len() {
            assert!(sol.sub[i] <= sol.values[i] + 1e-12 && sol.values[i] <= sol.super_[i] + 1e-12);
        }
        let r = verify_uniqueness(&sol.grid, op.growth(), &Reaction::default(), &sol.values, &sol.values);
        assert_eq!(r.defect, 0.0);
    }

    #[test]
    fn explicit_scheme_agrees_with_implicit() {
        let growth = GrowthProfile::bump(1.5, 1.0, -1.0);
        let op = setup(4.0, &growth);
        let implicit = solve_stationary_ball(&op, &Reaction::default(), Some(&growth), &StationaryOptions::default()).unwrap();
        let opts = StationaryOptions {
            scheme: Scheme::Explicit,
            ..Default::default()
        };
        let explicit = solve_stationary_ball(&op, &Reaction::default(), Some(&growth), &opts).unwrap();
        assert!(sup_distance(&implicit.values, &explicit.values) < 1e-7);
    }
}
