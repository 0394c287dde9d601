//! Explicit Euler integration of `u_t = rate (J_eps * u - u) + u (a - kappa u)`.
//!
//! With `dt <= 1 / (rate + L_f)` the one-step map is order-preserving on the
//! invariant region `[0, max(|u0|_inf, sup S)]`, so the discrete comparison
//! principle holds exactly (up to rounding).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::Reaction;
use crate::linalg::{sup_distance, sup_norm};
use crate::nonlocal_op::{DiscreteOperator, Path};
use crate::spectral::{Sign, SpectralEstimate};

/// Per-step slack for the pointwise monotonicity checks.
pub const MONOTONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct EvolutionOptions {
    pub horizon: f64,
    /// `None` selects `0.5 / (rate + L_f)`.
    pub dt: Option<f64>,
    pub stride: f64,
    pub path: Path,
}

impl Default for EvolutionOptions {
    fn default() -> Self {
        EvolutionOptions {
            horizon: 10.0,
            dt: None,
            stride: 1.0,
            path: Path::Direct,
        }
    }
}

impl EvolutionOptions {
    pub fn with_horizon(horizon: f64) -> Self {
        EvolutionOptions {
            horizon,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonotoneFlag {
    Increasing,
    Decreasing,
    /// Both orderings held within slack (a fixed point).
    Stationary,
    Neither,
}

impl MonotoneFlag {
    fn from_pair(up: bool, down: bool) -> Self {
        match (up, down) {
            (true, true) => MonotoneFlag::Stationary,
            (true, false) => MonotoneFlag::Increasing,
            (false, true) => MonotoneFlag::Decreasing,
            (false, false) => MonotoneFlag::Neither,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EvolutionTrace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub sup_norm: Vec<f64>,
    /// Present when a stationary reference was supplied.
    pub dist_to_stationary_sup: Option<Vec<f64>>,
    pub dist_to_stationary_l1: Option<Vec<f64>>,
    pub mass: Vec<f64>,
    pub monotone_flag: MonotoneFlag,
}

/// `(dt_auto, dt_bound)` for initial data `u0`.
pub fn step_bounds(op: &DiscreteOperator, reaction: &Reaction, u0: &[f64]) -> (f64, f64) {
    let s_max = sup_norm(u0).max(reaction.sup_saturation(op.growth()));
    let lf = reaction.lipschitz(op.growth(), s_max);
    let denom = op.rate() + lf;
    (0.5 / denom, 1.0 / denom)
}

struct Stepper<'a> {
    op: &'a DiscreteOperator,
    reaction: &'a Reaction,
    path: Path,
}

impl Stepper<'_> {
    fn step(&self, u: &[f64], dt: f64) -> Result<Vec<f64>> {
        let lin = self.op.apply(u, false, self.path)?;
        let a = self.op.growth();
        let mut next = Vec::with_capacity(u.len());
        for i in 0..u.len() {
            let v = u[i] + dt * (lin[i] + self.reaction.value(a[i], u[i]));
            if !v.is_finite() {
                return Err(Error::NumericalFailure(format!("non-finite state at point {i}")));
            }
            // nonnegativity holds exactly under the step bound; clip rounding noise
            next.push(v.max(0.0));
        }
        Ok(next)
    }
}

fn validate_initial(op: &DiscreteOperator, u0: &[f64]) -> Result<()> {
    if u0.len() != op.len() {
        return Err(Error::DimensionMismatch {
            expected: op.len(),
            actual: u0.len(),
        });
    }
    if u0.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: "initial data must be finite and nonnegative".into(),
        });
    }
    Ok(())
}

/// `evolve`: integrate to `opts.horizon`, recording every `opts.stride` time units.
pub fn evolve(
    op: &DiscreteOperator,
    reaction: &Reaction,
    u0: &[f64],
    opts: &EvolutionOptions,
    reference: Option<&[f64]>,
) -> Result<(EvolutionTrace, Vec<f64>)> {
    validate_initial(op, u0)?;
    if !(opts.horizon >= 0.0 && opts.stride > 0.0) {
        return Err(Error::InvalidParameter {
            name: "horizon",
            reason: "need horizon >= 0 and stride > 0".into(),
        });
    }
    let (auto, bound) = step_bounds(op, reaction, u0);
    let dt = match opts.dt {
        Some(dt) if dt > bound => return Err(Error::StepTooLarge { dt, bound }),
        Some(dt) if dt <= 0.0 => {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "time step must be positive".into(),
            })
        }
        Some(dt) => dt,
        None => auto,
    };
    let steps = (opts.horizon / dt).ceil() as usize;
    let dt = if steps > 0 { opts.horizon / steps as f64 } else { dt };
    let per_record = ((opts.stride / dt).round() as usize).max(1);
    let grid = op.grid();
    let stepper = Stepper {
        op,
        reaction,
        path: opts.path,
    };

    let mut trace = EvolutionTrace {
        dt,
        times: Vec::new(),
        sup_norm: Vec::new(),
        dist_to_stationary_sup: reference.map(|_| Vec::new()),
        dist_to_stationary_l1: reference.map(|_| Vec::new()),
        mass: Vec::new(),
        monotone_flag: MonotoneFlag::Stationary,
    };
    let record = |trace: &mut EvolutionTrace, t: f64, u: &[f64]| {
        trace.times.push(t);
        trace.sup_norm.push(sup_norm(u));
        trace.mass.push(grid.norm_l1(u));
        if let Some(r) = reference {
            let diff: Vec<f64> = u.iter().zip(r).map(|(a, b)| a - b).collect();
            trace.dist_to_stationary_sup.as_mut().unwrap().push(sup_norm(&diff));
            trace.dist_to_stationary_l1.as_mut().unwrap().push(grid.norm_l1(&diff));
        }
    };

    let mut u = u0.to_vec();
    record(&mut trace, 0.0, &u);
    let (mut up, mut down) = (true, true);
    for k in 1..=steps {
        let next = stepper.step(&u, dt)?;
        for (n, o) in next.iter().zip(&u) {
            up &= *n >= o - MONOTONE_SLACK;
            down &= *n <= o + MONOTONE_SLACK;
        }
        u = next;
        if k % per_record == 0 || k == steps {
            record(&mut trace, k as f64 * dt, &u);
        }
    }
    trace.monotone_flag = MonotoneFlag::from_pair(up, down);
    Ok((trace, u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ordering {
    /// `u0` is a sub-solution; expect increase.
    Sub,
    /// `u0` is a super-solution; expect decrease.
    Super,
}

/// `comparison_monotonicity_test`: verifies the sub/super property of `u0`,
/// runs the flow and fails on the first step that breaks the expected order.
pub fn comparison_monotonicity_test(
    op: &DiscreteOperator,
    reaction: &Reaction,
    u0: &[f64],
    ordering: Ordering,
    opts: &EvolutionOptions,
    property_tol: f64,
) -> Result<MonotoneFlag> {
    validate_initial(op, u0)?;
    let f = crate::stationary::operator_residual(op, reaction, u0)?;
    let ok = match ordering {
        Ordering::Sub => f.iter().all(|v| *v >= -property_tol),
        Ordering::Super => f.iter().all(|v| *v <= property_tol),
    };
    if !ok {
        return Err(Error::InvalidParameter {
            name: "u0",
            reason: format!("initial data is not a {ordering:?}-solution"),
        });
    }
    let (trace, _) = evolve(op, reaction, u0, opts, None)?;
    let expected = match ordering {
        Ordering::Sub => [MonotoneFlag::Increasing, MonotoneFlag::Stationary],
        Ordering::Super => [MonotoneFlag::Decreasing, MonotoneFlag::Stationary],
    };
    if expected.contains(&trace.monotone_flag) {
        Ok(trace.monotone_flag)
    } else {
        Err(Error::MonotonicityViolation(format!(
            "{ordering:?}-solution data produced a {:?} trajectory",
            trace.monotone_flag
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LongTimeVerdict {
    Extinction,
    PersistenceConverged,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct LongTimeReport {
    pub verdict: LongTimeVerdict,
    pub final_sup: f64,
    pub final_dist_sup: Option<f64>,
    pub final_dist_l1: Option<f64>,
    pub trace: EvolutionTrace,
}

/// `long_time_verdict`: classify the trajectory from `u0` at time `T`.
/// `stationary` is the reference state (zero or positive) on the same grid.
pub fn long_time_verdict(
    op: &DiscreteOperator,
    reaction: &Reaction,
    lambda: &SpectralEstimate,
    u0: &[f64],
    stationary: Option<&[f64]>,
    horizon: f64,
    tol: f64,
) -> Result<LongTimeReport> {
    long_time_verdict_with(op, reaction, lambda, u0, stationary, &EvolutionOptions::with_horizon(horizon), tol)
}

/// `long_time_verdict` with explicit step, stride and convolution path.
pub fn long_time_verdict_with(
    op: &DiscreteOperator,
    reaction: &Reaction,
    lambda: &SpectralEstimate,
    u0: &[f64],
    stationary: Option<&[f64]>,
    opts: &EvolutionOptions,
    tol: f64,
) -> Result<LongTimeReport> {
    let (trace, u) = evolve(op, reaction, u0, opts, stationary)?;
    let final_sup = sup_norm(&u);
    let final_dist_sup = stationary.map(|s| sup_distance(&u, s));
    let final_dist_l1 = trace.dist_to_stationary_l1.as_ref().and_then(|v| v.last().copied());
    let tail = &trace.sup_norm[trace.sup_norm.len().saturating_sub(4)..];
    let eventually_decreasing = tail.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let positive_reference = stationary.is_some_and(|s| sup_norm(s) > 0.0);
    let verdict = if lambda.sign() == Sign::Indeterminate {
        LongTimeVerdict::Undecided
    } else if !positive_reference && final_sup <= tol && eventually_decreasing {
        LongTimeVerdict::Extinction
    } else if positive_reference
        && final_dist_sup.is_some_and(|d| d <= tol)
        && final_dist_l1.is_some_and(|d| d <= tol)
    {
        LongTimeVerdict::PersistenceConverged
    } else {
        LongTimeVerdict::Undecided
    };
    Ok(LongTimeReport {
        verdict,
        final_sup,
        final_dist_sup,
        final_dist_l1,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, Topology};
    use crate::kernel::{rescale_kernel, Kernel};

    fn torus_op(c: f64) -> DiscreteOperator {
        let g = build_grid(1, 2.0, 0.1, Topology::Torus).unwrap();
        let k = rescale_kernel(&Kernel::tent(1), 0.5, 0.0, 1.0).unwrap();
        DiscreteOperator::new(&g, &k, vec![c; g.len()]).unwrap()
    }

    #[test]
    fn uniform_logistic_matches_closed_form() {
        let (c, u0) = (0.8, 0.1);
        let op = torus_op(c);
        let opts = EvolutionOptions::with_horizon(10.0);
        let (trace, u) = evolve(&op, &Reaction::default(), &vec![u0; op.len()], &opts, None).unwrap();
        let t = 10.0;
        let exact = c * u0 * (c * t).exp() / (c + u0 * ((c * t).exp() - 1.0));
        assert!((u[0] - exact).abs() <= 5.0 * trace.dt);
        assert_eq!(trace.monotone_flag, MonotoneFlag::Increasing);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let op = torus_op(0.5);
        let opts = EvolutionOptions {
            dt: Some(10.0),
            ..Default::default()
        };
        match evolve(&op, &Reaction::default(), &vec![0.1; op.len()], &opts, None) {
            Err(Error::StepTooLarge { bound, .. }) => assert!(bound < 10.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_growth_decays_under_envelope() {
        let op = torus_op(-0.2);
        let (trace, _) = evolve(&op, &Reaction::default(), &vec![1.0; op.len()], &EvolutionOptions::with_horizon(5.0), None).unwrap();
        for (t, s) in trace.times.iter().zip(&trace.sup_norm) {
            assert!(*s <= (-0.2 * t).exp() + 1e-12);
        }
        assert_eq!(trace.monotone_flag, MonotoneFlag::Decreasing);
    }
}
