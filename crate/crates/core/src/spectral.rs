//! Certified principal eigenvalues of Metzler operators.
//!
//! For a symmetric matrix `A` with nonnegative off-diagonal entries the
//! principal eigenvalue is `lambda_p = -lambda_max(A)`. Two independent
//! certificates are provided:
//!
//! * `perron-cw`: Collatz-Wielandt quotients of a positive vector under
//!   `A + c I`. Any positive vector yields a valid two-sided bracket, so the
//!   iteration only has to make the bracket narrow. Shifted inverse steps
//!   converge the bulk of the vector quickly; plain power steps follow them
//!   because they are accurate componentwise, which matters where the
//!   eigenvector is exponentially small.
//! * `rayleigh`: inverse iteration with Rayleigh shifts. The quotient is a
//!   lower bound for `lambda_max`; a successful Cholesky factorization of
//!   `(r + 2 res) I - A` proves the upper bound.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Bracket, Error, Result};
use crate::linalg::{dot, sup_norm, BandedSym};
use crate::nonlocal_op::DiscreteOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PerronCw,
    Rayleigh,
    FdLaplacian,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::PerronCw => "perron-cw",
            Method::Rayleigh => "rayleigh",
            Method::FdLaplacian => "fd-laplacian",
        }
    }
}

/// Sign of a principal eigenvalue as far as its bracket certifies it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Negative,
    NonNegative,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Positive, normalized to unit sup-norm.
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    /// `||(A + value) phi||_inf`
    pub residual: f64,
    pub method: Method,
    pub iterations: usize,
}

impl SpectralEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn sign(&self) -> Sign {
        if self.upper < 0.0 {
            Sign::Negative
        } else if self.lower >= 0.0 {
            Sign::NonNegative
        } else {
            Sign::Indeterminate
        }
    }

    pub fn bracket(&self) -> Bracket {
        Bracket {
            lower: self.lower,
            upper: self.upper,
        }
    }

    /// Enlarges the bracket symmetrically (perturbation bounds).
    pub fn widened(mut self, delta: f64) -> Self {
        self.lower -= delta;
        self.upper += delta;
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralOptions {
    /// Target bracket width.
    pub tol: f64,
    /// Budget of matrix-vector products plus triangular solves.
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            tol: 1e-10,
            max_iterations: 200_000,
        }
    }
}

impl SpectralOptions {
    pub fn with_tol(tol: f64) -> Self {
        SpectralOptions {
            tol,
            ..Default::default()
        }
    }
}

fn check_metzler(a: &BandedSym) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "operator has no points".into(),
        });
    }
    if a.len() > 1 && a.min_offdiagonal() < 0.0 {
        return Err(Error::NumericalFailure("negative off-diagonal coupling".into()));
    }
    if !a.is_irreducible() {
        return Err(Error::Reducible);
    }
    Ok(())
}

/// Collatz-Wielandt bracket `[min, max]` of `(A + c) x / x - c` given
/// `y = (A + c) x`, padded by the rounding error of the nonnegative sums.
fn cw_bounds(x: &[f64], y: &[f64], shift: f64, terms: usize) -> (f64, f64) {
    let gamma = 4.0 * (terms as f64 + 2.0) * f64::EPSILON;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (xi, yi) in x.iter().zip(y) {
        if !(*xi > 0.0) {
            return (f64::NEG_INFINITY, f64::INFINITY);
        }
        let q = yi / xi;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (lo * (1.0 - gamma) - shift, hi * (1.0 + gamma) - shift)
}

fn normalize_sup(x: &mut [f64]) {
    let m = sup_norm(x);
    if m > 0.0 && m.is_finite() {
        for v in x.iter_mut() {
            *v /= m;
        }
    }
}

fn residual_sup(a: &BandedSym, phi: &[f64], lambda_max: f64) -> f64 {
    let mut y = vec![0.0; phi.len()];
    a.matvec_shifted(phi, -lambda_max, &mut y);
    sup_norm(&y)
}

struct PerronState {
    x: Vec<f64>,
    y: Vec<f64>,
    lo: f64,
    hi: f64,
    iterations: usize,
}

impl PerronState {
    /// `steps` power steps, tightening the best certified bounds after each.
    fn power(&mut self, a: &BandedSym, shift: f64, steps: usize) {
        for _ in 0..steps {
            a.matvec_shifted(&self.x, shift, &mut self.y);
            let (lo, hi) = cw_bounds(&self.x, &self.y, shift, 2 * a.bandwidth() + 1);
            self.lo = self.lo.max(lo);
            self.hi = self.hi.min(hi);
            std::mem::swap(&mut self.x, &mut self.y);
            normalize_sup(&mut self.x);
            self.iterations += 1;
        }
    }
}

/// Certified bracket on `lambda_max(A)` by Collatz-Wielandt quotients.
///
/// `shift` must make `A + shift I` entrywise nonnegative with a positive
/// diagonal. Returns `(lower, upper, vector, iterations)`.
/// Requested bracket width, floored at what rounding allows for an operator
/// of magnitude `scale`.
pub fn effective_tol(tol: f64, scale: f64) -> f64 {
    tol.max(256.0 * f64::EPSILON * scale)
}

pub fn perron_root(a: &BandedSym, shift: f64, opts: &SpectralOptions) -> Result<(f64, f64, Vec<f64>, usize)> {
    check_metzler(a)?;
    if a.diagonal().iter().any(|d| !(d + shift > 0.0)) {
        return Err(Error::InvalidParameter {
            name: "shift",
            reason: format!("shift {shift} leaves a non-positive diagonal"),
        });
    }
    let n = a.len();
    let mut st = PerronState {
        x: vec![1.0; n],
        y: vec![0.0; n],
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
        iterations: 0,
    };
    st.power(a, shift, 20);
    let mut power_steps = 32;
    let scale = 1.0 + shift.abs();
    let tol = effective_tol(opts.tol, scale);
    while st.hi - st.lo > tol {
        if !st.hi.is_finite() || !st.lo.is_finite() {
            st.power(a, shift, 20);
            if st.iterations >= opts.max_iterations {
                return Err(Error::NumericalFailure("Perron iterate never became positive".into()));
            }
            continue;
        }
        if st.iterations >= opts.max_iterations {
            return Err(Error::NonConvergence {
                iterations: st.iterations,
                bracket: Bracket {
                    lower: -st.hi,
                    upper: -st.lo,
                },
            });
        }
        // Inverse phase: sigma above the certified upper bound keeps sigma I - A
        // a nonsingular M-matrix, whose inverse is nonnegative.
        let mut delta = (0.5 * (st.hi - st.lo)).max(1e-13 * scale);
        let chol = loop {
            match a.cholesky_of_shift(st.hi + delta) {
                Ok(c) => break c,
                Err(_) if delta < 1e3 * scale => delta *= 10.0,
                Err(e) => return Err(e),
            }
        };
        let saved = st.x.clone();
        for _ in 0..3 {
            chol.solve_in_place(&mut st.x);
            for v in st.x.iter_mut() {
                if !(*v > 0.0) {
                    *v = 0.0;
                }
            }
            normalize_sup(&mut st.x);
            st.iterations += 1;
        }
        if !st.x.iter().all(|v| v.is_finite()) || sup_norm(&st.x) == 0.0 {
            st.x = saved;
        }
        // Zero entries are repaired by the first power step (A is irreducible
        // and the shifted diagonal is positive).
        st.power(a, shift, power_steps.min(opts.max_iterations.saturating_sub(st.iterations).max(1)));
        power_steps = (power_steps * 2).min(1 << 14);
    }
    Ok((st.lo, st.hi, st.x, st.iterations))
}

/// Perron-CW estimate of `lambda_p = -lambda_max(A)`.
pub fn principal_eigenvalue_banded(
    a: &BandedSym,
    shift: f64,
    method: Method,
    opts: &SpectralOptions,
) -> Result<SpectralEstimate> {
    let (lo, hi, x, iterations) = perron_root(a, shift, opts)?;
    let mid = 0.5 * (lo + hi);
    Ok(SpectralEstimate {
        value: -mid,
        lower: -hi,
        upper: -lo,
        residual: residual_sup(a, &x, mid),
        eigenvector: x,
        method,
        iterations,
    })
}

/// Rayleigh-quotient estimate of `lambda_v = -lambda_max(A)` for symmetric `A`.
pub fn rayleigh_banded(a: &BandedSym, opts: &SpectralOptions) -> Result<SpectralEstimate> {
    if a.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "operator has no points".into(),
        });
    }
    let n = a.len();
    let norm_a = a.gershgorin_upper().abs().max(
        a.diagonal().iter().fold(0.0_f64, |m, d| m.max(d.abs())),
    );
    let tiny = 64.0 * f64::EPSILON * (1.0 + norm_a);
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut sigma = a.gershgorin_upper() + tiny + 1e-3 * (1.0 + norm_a);
    let mut chol = a.cholesky_of_shift(sigma)?;
    let mut iterations = 0;
    let mut last = (f64::NEG_INFINITY, f64::INFINITY);
    loop {
        chol.solve_in_place(&mut x);
        let nrm = dot(&x, &x).sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::NumericalFailure("inverse iteration produced a null vector".into()));
        }
        x.iter_mut().for_each(|v| *v /= nrm);
        iterations += 1;
        let ax = a.matvec(&x);
        let r = dot(&x, &ax);
        let res = ax.iter().zip(&x).map(|(p, q)| (p - r * q).powi(2)).sum::<f64>().sqrt();
        let upper = r + 2.0 * res + tiny;
        if upper - r + tiny <= opts.tol.max(4.0 * tiny) && a.cholesky_of_shift(upper).is_ok() {
            let mut phi: Vec<f64> = x.iter().map(|v| v.abs()).collect();
            normalize_sup(&mut phi);
            return Ok(SpectralEstimate {
                value: -r,
                lower: -upper,
                upper: -(r - tiny),
                residual: residual_sup(a, &phi, r),
                eigenvector: phi,
                method: Method::Rayleigh,
                iterations,
            });
        }
        last = (last.0.max(r - tiny), last.1);
        if a.cholesky_of_shift(upper).is_ok() {
            last.1 = last.1.min(upper);
        }
        if iterations >= opts.max_iterations.min(10_000) {
            return Err(Error::NonConvergence {
                iterations,
                bracket: Bracket {
                    lower: -last.1,
                    upper: -last.0,
                },
            });
        }
        // Rayleigh shift, accepted only if it stays above the spectrum.
        if upper < sigma {
            if let Ok(c) = a.cholesky_of_shift(upper) {
                sigma = upper;
                chol = c;
            }
        }
    }
}

/// Diagnostics attached to a principal eigenvalue of `rate (J * . - .) + a` on a domain.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EigenDiagnostics {
    /// `-sup(a - rate + rate k)`
    pub bound_lower: f64,
    /// `rate - sup a`
    pub bound_upper: f64,
    /// Certified strict inequality `lambda_p < rate - sup a`, the criterion
    /// for a principal eigenfunction on a bounded domain.
    pub eigenfunction_exists: bool,
    /// `h^N sum phi` with `sup phi = 1`.
    pub eigenvector_mass: f64,
}

pub fn diagnostics(op: &DiscreteOperator, est: &SpectralEstimate) -> EigenDiagnostics {
    let (bound_lower, bound_upper) = op.eigenvalue_bounds();
    EigenDiagnostics {
        bound_lower,
        bound_upper,
        eigenfunction_exists: est.upper < bound_upper,
        eigenvector_mass: op.grid().integrate(&est.eigenvector),
    }
}

/// `principal_eigenvalue`: Perron-CW estimate of `lambda_p(L_R + a)`, with
/// the kernel-truncation error added to the bracket.
pub fn principal_eigenvalue(op: &DiscreteOperator, opts: &SpectralOptions) -> Result<SpectralEstimate> {
    let est = principal_eigenvalue_banded(&op.banded(), op.perron_shift(), Method::PerronCw, opts)?;
    Ok(est.widened(op.truncation_error()))
}

/// `rayleigh_lambda_v`: variational estimate on the same operator.
pub fn rayleigh_lambda_v(op: &DiscreteOperator, opts: &SpectralOptions) -> Result<SpectralEstimate> {
    // Uniform weights make W^{1/2} A W^{-1/2} = A.
    let est = rayleigh_banded(&op.banded(), opts)?;
    Ok(est.widened(op.truncation_error()))
}

#[derive(Debug, Clone, Serialize)]
pub struct RExtrapolation {
    pub radii: Vec<f64>,
    pub estimates: Vec<SpectralEstimate>,
    /// Last value of the sequence.
    pub value: f64,
    /// Last decrease, reported as the extrapolation uncertainty.
    pub uncertainty: f64,
    pub converged: bool,
}

impl RExtrapolation {
    /// Upper bound on the limit: the sequence is non-increasing.
    pub fn upper(&self) -> f64 {
        self.estimates.last().map_or(f64::INFINITY, |e| e.upper)
    }
}

/// `lambda_p_extrapolate_R`: evaluates `lambda_p(L_R + a)` over an increasing
/// schedule (in parallel), checks monotonicity and stops at the first
/// decrease below `tol`.
pub fn lambda_p_extrapolate_r<F>(build: F, radii: &[f64], tol: f64, opts: &SpectralOptions) -> Result<RExtrapolation>
where
    F: Fn(f64) -> Result<DiscreteOperator> + Sync,
{
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "R_schedule",
            reason: "radii must be a non-empty increasing list".into(),
        });
    }
    let results: Vec<Result<SpectralEstimate>> = radii
        .par_iter()
        .map(|&r| build(r).and_then(|op| principal_eigenvalue(&op, opts)))
        .collect();
    let mut estimates = Vec::with_capacity(radii.len());
    for r in results {
        estimates.push(r?);
    }
    let mut used = estimates.len();
    let mut uncertainty = f64::INFINITY;
    let mut converged = false;
    for k in 1..estimates.len() {
        let (prev, cur) = (&estimates[k - 1], &estimates[k]);
        if cur.lower > prev.upper {
            return Err(Error::DiscretizationInconsistency(format!(
                "lambda_p increases from [{:.3e}, {:.3e}] at R = {} to [{:.3e}, {:.3e}] at R = {}",
                prev.lower, prev.upper, radii[k - 1], cur.lower, cur.upper, radii[k]
            )));
        }
        uncertainty = (prev.value - cur.value).max(0.0);
        if uncertainty <= tol {
            used = k + 1;
            converged = true;
            break;
        }
    }
    estimates.truncate(used);
    Ok(RExtrapolation {
        radii: radii[..used].to_vec(),
        value: estimates[used - 1].value,
        uncertainty,
        converged,
        estimates,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub epsilon: f64,
    pub original: f64,
    pub rescaled: f64,
    pub difference: f64,
    /// Sum of both bracket widths.
    pub allowance: f64,
}

impl ScalingReport {
    pub fn consistent(&self) -> bool {
        self.difference <= self.allowance
    }
}

/// `scaling_invariance_check`: compares `lambda_p(M + a)` on `(R, h)` with
/// `lambda_p(M_eps + a(./eps))` on the mapped grid `(eps R, eps h)`.
pub fn scaling_invariance_check(
    kernel: &crate::kernel::Kernel,
    growth: &crate::growth::GrowthProfile,
    grid: &crate::grid::Grid,
    epsilon: f64,
    opts: &SpectralOptions,
) -> Result<ScalingReport> {
    use crate::grid::Grid;
    use crate::kernel::ScaledKernel;
    let base = ScaledKernel::unit(kernel.clone());
    let op = DiscreteOperator::new(grid, &base, growth.sample(grid))?;
    let mapped = Grid::new(
        grid.dimension(),
        epsilon * grid.radius(),
        epsilon * grid.spacing(),
        grid.topology(),
    )?;
    let scaled = ScaledKernel::new(kernel.clone(), epsilon, 0.0, 1.0)?;
    let op_eps = DiscreteOperator::new(&mapped, &scaled, growth.dilated(epsilon).sample(&mapped))?;
    let e0 = principal_eigenvalue(&op, opts)?;
    let e1 = principal_eigenvalue(&op_eps, opts)?;
    Ok(ScalingReport {
        epsilon,
        original: e0.value,
        rescaled: e1.value,
        difference: (e0.value - e1.value).abs(),
        allowance: e0.width() + e1.width(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn random_metzler(n: usize, seed: u64) -> BandedSym {
        // deterministic pseudo-random fill
        let mut s = seed;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let m = DMatrix::from_fn(n, n, |_, _| 0.0);
        let mut m = m;
        for i in 0..n {
            m[(i, i)] = 2.0 * next() - 1.0;
            for j in 0..i {
                let v = next();
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        BandedSym::from_dense(&m)
    }

    #[test]
    fn brackets_contain_dense_eigenvalue() {
        for seed in 0..5 {
            let a = random_metzler(7, seed);
            let top = a.to_dense().symmetric_eigen().eigenvalues.max();
            let p = principal_eigenvalue_banded(&a, 3.0, Method::PerronCw, &SpectralOptions::default()).unwrap();
            assert!(p.contains(-top), "{p:?} vs {top}");
            assert!(p.width() <= 1e-10);
            let r = rayleigh_banded(&a, &SpectralOptions::default()).unwrap();
            assert!(r.contains(-top), "{r:?} vs {top}");
            assert!((p.value - r.value).abs() < 1e-9);
        }
    }

    #[test]
    fn reducible_matrix_is_rejected() {
        let mut a = BandedSym::zeros(3, 1);
        a.shift_diagonal(-1.0);
        assert!(matches!(
            principal_eigenvalue_banded(&a, 2.0, Method::PerronCw, &SpectralOptions::default()),
            Err(Error::Reducible)
        ));
    }

    #[test]
    fn sign_classification() {
        let e = |lower: f64, upper: f64| SpectralEstimate {
            value: 0.5 * (lower + upper),
            lower,
            upper,
            eigenvector: vec![],
            residual: 0.0,
            method: Method::PerronCw,
            iterations: 0,
        };
        assert_eq!(e(-1.0, -0.5).sign(), Sign::Negative);
        assert_eq!(e(0.0, 0.5).sign(), Sign::NonNegative);
        assert_eq!(e(-0.1, 0.1).sign(), Sign::Indeterminate);
    }
}
