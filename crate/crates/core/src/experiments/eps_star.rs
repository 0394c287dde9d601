use serde::Serialize;

use super::GridCoupling;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::spectral::{Sign, SpectralOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EpsStar {
    /// `(a - 1)^+` is positive somewhere: persistence for every range.
    Infinite,
    /// The sign change lies in `[lower, upper]`.
    Finite { eps: f64, lower: f64, upper: f64 },
    /// Same certified sign at both ends of the bracket.
    NoThresholdInRange { sign_lo: Sign, sign_hi: Sign },
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsStarReport {
    pub result: EpsStar,
    /// `(eps, certified sign)` for every evaluation, in order.
    pub samples: Vec<(f64, Sign)>,
    pub warning: Option<String>,
}

/// Certified sign of `lambda_p` at range `eps` (m = 0), tightening the
/// spectral tolerance while the bracket straddles zero.
pub fn lambda_sign(base: &Problem, eps: f64, coupling: &GridCoupling, opts: &SpectralOptions) -> Result<Sign> {
    let p = coupling.problem_at(base, eps, 0.0);
    let op = p.operator()?;
    let mut o = *opts;
    loop {
        let est = crate::spectral::principal_eigenvalue(&op, &o)?;
        let s = est.sign();
        if s != Sign::Indeterminate || o.tol <= 1e-15 {
            return Ok(s);
        }
        o.tol *= 1e-2;
    }
}

/// `find_eps_star`: critical range for `m = 0` by bisection on the
/// certified sign of `lambda_p(eps)` over `[lo, hi]`.
pub fn find_eps_star(
    base: &Problem,
    lo: f64,
    hi: f64,
    tol: f64,
    coupling: &GridCoupling,
    opts: &SpectralOptions,
) -> Result<EpsStarReport> {
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps_bracket",
            reason: "need 0 < eps_lo < eps_hi and tol > 0".into(),
        });
    }
    let grid = base.grid()?;
    let grid_max = base.growth.sample(&grid).into_iter().fold(f64::NEG_INFINITY, f64::max);
    let mut warning = None;
    if grid_max > 1.0 {
        return Ok(EpsStarReport {
            result: EpsStar::Infinite,
            samples: Vec::new(),
            warning,
        });
    }
    if base.growth.sup() > 1.0 {
        warning = Some(format!(
            "grid maximum of a is {grid_max:.6} <= 1 but the analytic supremum is {:.6}; a thin spike may be unresolved",
            base.growth.sup()
        ));
    }
    let mut samples = Vec::new();
    let eval = |eps: f64, samples: &mut Vec<(f64, Sign)>| -> Result<Sign> {
        let s = lambda_sign(base, eps, coupling, opts)?;
        samples.push((eps, s));
        Ok(s)
    };
    let (mut a, mut b) = (lo, hi);
    let s_lo = eval(a, &mut samples)?;
    let s_hi = eval(b, &mut samples)?;
    let persists = |s: Sign| s == Sign::Negative;
    if s_lo == Sign::Indeterminate || s_hi == Sign::Indeterminate || persists(s_lo) == persists(s_hi) {
        let result = if s_lo == Sign::Indeterminate {
            EpsStar::Finite { eps: a, lower: a, upper: a }
        } else if s_hi == Sign::Indeterminate {
            EpsStar::Finite { eps: b, lower: b, upper: b }
        } else {
            EpsStar::NoThresholdInRange { sign_lo: s_lo, sign_hi: s_hi }
        };
        return Ok(EpsStarReport { result, samples, warning });
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        match eval(mid, &mut samples)? {
            Sign::Indeterminate => {
                // lambda_p vanishes at mid to within 1e-15
                return Ok(EpsStarReport {
                    result: EpsStar::Finite { eps: mid, lower: mid, upper: mid },
                    samples,
                    warning,
                });
            }
            s if persists(s) == persists(s_lo) => a = mid,
            _ => b = mid,
        }
    }
    Ok(EpsStarReport {
        result: EpsStar::Finite {
            eps: 0.5 * (a + b),
            lower: a,
            upper: b,
        },
        samples,
        warning,
    })
}
