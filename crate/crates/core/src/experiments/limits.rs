use serde::{Deserialize, Serialize};

use super::sweep::{TARGET_A_MINUS_ONE, TARGET_A_PLUS, TARGET_LAMBDA_M0, TARGET_LAMBDA_SUP};
use super::{epsilon_sweep, log_log_slope, GridCoupling, SweepEntry};
use crate::error::{Error, Result};
use crate::fd::{laplacian_matrix, FdGrid};
use crate::linalg::sup_norm;
use crate::problem::Problem;
use crate::spectral::{principal_eigenvalue_banded, Method, SpectralEstimate};
use crate::stationary::{solve_monotone, stationary_residual, StationaryOptions, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct LocalKppSolution {
    #[serde(skip)]
    pub grid: FdGrid,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub lambda1: SpectralEstimate,
    pub residual: f64,
    pub verdict: Verdict,
}

/// `local_kpp_solve_fd`: `sigma v'' + v (a - v) = 0` with Dirichlet data on
/// `B_R`, by the same sub/super monotone scheme as the nonlocal solver.
pub fn local_kpp_solve_fd(grid: &FdGrid, a: &[f64], sigma: f64, opts: &StationaryOptions) -> Result<LocalKppSolution> {
    let m = laplacian_matrix(grid, sigma, a)?;
    let shift = 1.0 + m.diagonal().iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
    let est = principal_eigenvalue_banded(&m, shift, Method::FdLaplacian, &opts.spectral)?;
    let level = a.iter().fold(0.0_f64, |s, v| s.max(*v));
    let sup = vec![level; grid.len()];
    let rate = 2.0 * grid.dimension() as f64 * sigma / (grid.spacing() * grid.spacing());
    let out = solve_monotone(&m, 1.0, rate, &est, &sup, opts)?;
    let residual = sup_norm(&stationary_residual(&m, 1.0, &out.values));
    Ok(LocalKppSolution {
        grid: grid.clone(),
        values: out.values,
        lambda1: est,
        residual,
        verdict: out.verdict,
    })
}

/// Largest `|x|` over grid points with `a(x) > 0` (zero when there are none).
pub fn niche_radius(p: &Problem) -> Result<f64> {
    let grid = p.grid()?;
    let a = p.growth.sample(&grid);
    Ok((0..grid.len()).filter(|&i| a[i] > 0.0).map(|i| grid.norm(i)).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    ToZero,
    ToInfinity,
}

#[derive(Debug, Clone, Copy)]
pub struct LimitOptions {
    /// Target spacing of the finite-difference reference (adjusted so that
    /// `2R/h` is an integer).
    pub fd_spacing: f64,
    /// Radius of the ball on which the local limit is compared; defaults to
    /// the niche radius.
    pub core_radius: Option<f64>,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            fd_spacing: 0.005,
            core_radius: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub m: f64,
    pub direction: Direction,
    pub target_name: String,
    pub lambda_target_name: String,
    pub lambda_reference: f64,
    pub eps: Vec<f64>,
    pub errors: Vec<f64>,
    pub lambda_errors: Vec<f64>,
    /// Last three state errors strictly decreasing.
    pub monotone_tail: bool,
    pub lambda_monotone_tail: bool,
    pub rate: Option<f64>,
    pub lambda_rate: Option<f64>,
    pub advice: Option<String>,
    pub local: Option<LocalKppSolution>,
    pub entries: Vec<SweepEntry>,
}

fn strictly_decreasing_tail(v: &[f64]) -> bool {
    v.len() >= 3 && v[v.len() - 3..].windows(2).all(|w| w[1] < w[0]) && v.iter().all(|x| x.is_finite())
}

/// `asymptotic_limit_check`: distances to the limit object along an `eps`
/// schedule, with monotone-decrease verdicts and empirical rates.
#[allow(clippy::too_many_arguments)]
pub fn asymptotic_limit_check(
    base: &Problem,
    m: f64,
    direction: Direction,
    eps: &[f64],
    coupling: &GridCoupling,
    limit: &LimitOptions,
    opts: &StationaryOptions,
) -> Result<LimitReport> {
    if !(0.0..=2.0).contains(&m) {
        return Err(Error::InvalidParameter {
            name: "m",
            reason: "limits are characterized for 0 <= m <= 2".into(),
        });
    }
    let sweep = epsilon_sweep(base, m, eps, coupling, opts)?;
    let sup_a = base.growth.sup();
    let mut local = None;
    let (target_name, lambda_target_name, lambda_reference, errors): (String, String, f64, Vec<f64>) =
        if m == 2.0 && direction == Direction::ToZero {
            let n = base.dimension();
            let sigma = base.kernel.moment(2.0)?.value / (2.0 * n as f64);
            let cells = (2.0 * base.radius / limit.fd_spacing).round().max(2.0);
            let fd = FdGrid::new(n, base.radius, 2.0 * base.radius / cells)?;
            let a_fd = fd.sample(|x| base.growth.value(x));
            let v = local_kpp_solve_fd(&fd, &a_fd, sigma, opts)?;
            let core = match limit.core_radius {
                Some(r) => r,
                None => niche_radius(base)?,
            };
            let errors = sweep
                .entries
                .iter()
                .map(|e| match &e.solution {
                    None => f64::NAN,
                    Some(sol) => {
                        let g = &sol.grid;
                        let mut acc = 0.0;
                        for i in 0..g.len() {
                            if g.norm(i) <= core {
                                let d = sol.values[i] - fd.interpolate(&v.values, &g.coords(i)[..n]);
                                acc += d * d;
                            }
                        }
                        (g.weight() * acc).sqrt()
                    }
                })
                .collect();
            let reference = v.lambda1.value;
            local = Some(v);
            ("local-kpp v (L2 on core)".into(), "lambda:lambda1 FD".into(), reference, errors)
        } else if m == 0.0 && direction == Direction::ToInfinity {
            (
                TARGET_A_MINUS_ONE.into(),
                TARGET_LAMBDA_M0.into(),
                1.0 - sup_a,
                sweep.entries.iter().map(|e| e.error(TARGET_A_MINUS_ONE).unwrap_or(f64::NAN)).collect(),
            )
        } else {
            (
                TARGET_A_PLUS.into(),
                TARGET_LAMBDA_SUP.into(),
                -sup_a,
                sweep.entries.iter().map(|e| e.error(TARGET_A_PLUS).unwrap_or(f64::NAN)).collect(),
            )
        };
    let lambda_errors: Vec<f64> = sweep
        .entries
        .iter()
        .map(|e| e.lambda_p.as_ref().map_or(f64::NAN, |l| (l.value - lambda_reference).abs()))
        .collect();
    // order the tail along the limit direction
    let along = |v: &[f64]| -> Vec<f64> {
        let mut v = v.to_vec();
        if direction == Direction::ToZero {
            v.reverse();
        }
        v
    };
    let monotone_tail = strictly_decreasing_tail(&along(&errors));
    let lambda_monotone_tail = strictly_decreasing_tail(&along(&lambda_errors));
    let advice = (!monotone_tail || !lambda_monotone_tail).then(|| {
        match direction {
            Direction::ToZero => "errors do not decrease monotonically: refine h_per_eps and rerun",
            Direction::ToInfinity => "errors do not decrease monotonically: enlarge r_per_eps and rerun",
        }
        .to_string()
    });
    Ok(LimitReport {
        m,
        direction,
        target_name,
        lambda_target_name,
        lambda_reference,
        rate: log_log_slope(eps, &errors),
        lambda_rate: log_log_slope(eps, &lambda_errors),
        eps: eps.to_vec(),
        errors,
        lambda_errors,
        monotone_tail,
        lambda_monotone_tail,
        advice,
        local,
        entries: sweep.entries,
    })
}
