use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::validate_kernel;
use crate::problem::Problem;
use crate::spectral::{lambda_p_extrapolate_r, RExtrapolation, SpectralOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FatTailVerdict {
    Extinction,
    Persistence,
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct FatTailReport {
    pub verdict: FatTailVerdict,
    /// Certified lower bound on the whole-space `lambda_p(M + a)`: `-sup a`
    /// (the constant test function).
    pub whole_space_lower: f64,
    /// Certified upper bound on `lim_R lambda_p(L_R + a)`; the sequence is
    /// non-increasing in `R`, so the last computed upper end bounds the limit.
    pub limit_upper: f64,
    pub extrapolation: RExtrapolation,
    /// Bracket widening from kernel tail truncation at the last radius.
    pub truncation_error: f64,
}

/// `fat_tail_verdict`: extinction if the whole-space lower bound is positive,
/// persistence if the ball limit is certified negative, otherwise the gap
/// between the two criteria is reported as indeterminate.
pub fn fat_tail_verdict(base: &Problem, radii: &[f64], tol: f64, opts: &SpectralOptions) -> Result<FatTailReport> {
    let report = validate_kernel(&base.kernel, 1e-8)?;
    if !report.h5() {
        return Err(Error::TailHypothesisViolated);
    }
    let build = |r: f64| base.clone().with_grid(r, base.spacing).operator();
    let extrapolation = lambda_p_extrapolate_r(build, radii, tol, opts)?;
    let last_r = *extrapolation.radii.last().expect("non-empty schedule");
    let truncation_error = build(last_r)?.truncation_error();
    let whole_space_lower = -base.growth.sup();
    let limit_upper = extrapolation.upper();
    let verdict = if whole_space_lower > 0.0 {
        FatTailVerdict::Extinction
    } else if limit_upper < 0.0 {
        FatTailVerdict::Persistence
    } else {
        FatTailVerdict::Indeterminate
    };
    Ok(FatTailReport {
        verdict,
        whole_space_lower,
        limit_upper,
        extrapolation,
        truncation_error,
    })
}
