//! Quantitative programs built on the solvers: epsilon sweeps, the critical
//! range, asymptotic limits, a-priori audits, invasion fitness and fat-tail
//! verdicts.

mod audit;
mod eps_star;
mod fat_tail;
mod invasion;
mod limits;
mod sweep;

pub use audit::{apriori_estimate_audit, energy_slope, AuditItem, AuditReport};
pub use eps_star::{find_eps_star, lambda_sign, EpsStar, EpsStarReport};
pub use fat_tail::{fat_tail_verdict, FatTailReport, FatTailVerdict};
pub use invasion::{invasion_fitness, invasion_matrix, InvasionEntry, InvasionMatrix, InvasionVerdict, Resident};
pub use limits::{
    asymptotic_limit_check, local_kpp_solve_fd, niche_radius, Direction, LimitOptions, LimitReport, LocalKppSolution,
};
pub use sweep::{
    epsilon_sweep, Coherence, SweepEntry, SweepResult, TARGET_A_MINUS_ONE, TARGET_A_PLUS, TARGET_LAMBDA_M0, TARGET_LAMBDA_SUP,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Problem;

/// How the grid follows the range factor: `h = min(h_base, h_per_eps * eps)`
/// keeps small kernels resolved and `R = max(R_base, r_per_eps * eps)` keeps
/// wide kernels inside the domain.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridCoupling {
    pub h_per_eps: Option<f64>,
    pub r_per_eps: Option<f64>,
}

impl GridCoupling {
    pub fn fixed() -> Self {
        GridCoupling::default()
    }

    pub fn small_eps(h0: f64) -> Self {
        GridCoupling {
            h_per_eps: Some(h0),
            r_per_eps: None,
        }
    }

    pub fn large_eps(c: f64) -> Self {
        GridCoupling {
            h_per_eps: None,
            r_per_eps: Some(c),
        }
    }

    /// `base` re-gridded and rescaled for range `eps` and exponent `m`.
    pub fn problem_at(&self, base: &Problem, eps: f64, m: f64) -> Problem {
        let h = self.h_per_eps.map_or(base.spacing, |h0| base.spacing.min(h0 * eps));
        let r = self.r_per_eps.map_or(base.radius, |c| base.radius.max(c * eps));
        base.clone().with_grid(r, h).with_scaling(eps, m)
    }
}

/// Rejects a range whose rescaled kernel is narrower than two cells.
pub(crate) fn check_resolution(p: &Problem) -> Result<()> {
    let support = p.epsilon * p.kernel.support_radius();
    if support.is_finite() && support < 2.0 * p.spacing {
        return Err(Error::UnderResolvedKernel {
            support,
            spacing: p.spacing,
        });
    }
    Ok(())
}

fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) || eps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: "schedule must be a non-empty strictly increasing list of positive values".into(),
        });
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x` over positive pairs.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
