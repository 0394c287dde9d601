use rayon::prelude::*;
use serde::Serialize;

use super::{check_resolution, check_schedule, GridCoupling};
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::spectral::{principal_eigenvalue, Sign, SpectralEstimate};
use crate::stationary::{solve_with_estimate, StationaryOptions, StationarySolution, Verdict};

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub eps: f64,
    pub radius: f64,
    pub spacing: f64,
    /// Reason the entry was skipped, if it was.
    pub skipped: Option<String>,
    pub lambda_p: Option<SpectralEstimate>,
    pub verdict: Option<Verdict>,
    pub u_sup: f64,
    pub u_l2: f64,
    pub u_l1: f64,
    /// `(1/2) sum_i sum_j w_i w_j J_eps(x_i - x_j) (u_i - u_j)^2`
    pub energy: f64,
    /// Distances to the named limit targets.
    pub limit_errors: Vec<(String, f64)>,
    #[serde(skip)]
    pub solution: Option<StationarySolution>,
    #[serde(skip)]
    pub problem: Option<Problem>,
}

impl SweepEntry {
    pub fn error(&self, name: &str) -> Option<f64> {
        self.limit_errors.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    fn skipped(eps: f64, p: &Problem, reason: String) -> Self {
        SweepEntry {
            eps,
            radius: p.radius,
            spacing: p.spacing,
            skipped: Some(reason),
            lambda_p: None,
            verdict: None,
            u_sup: f64::NAN,
            u_l2: f64::NAN,
            u_l1: f64::NAN,
            energy: f64::NAN,
            limit_errors: Vec::new(),
            solution: None,
            problem: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub m: f64,
    pub epsilons: Vec<f64>,
    pub entries: Vec<SweepEntry>,
}

/// Counts for the persistence dichotomy over a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct Coherence {
    pub agree: usize,
    pub disagree: usize,
    pub straddling: usize,
}

impl SweepResult {
    /// `(certified lambda_p < 0) <=> (sup u > 10 tol)`, straddling brackets counted apart.
    pub fn coherence(&self, tol: f64) -> Coherence {
        let mut c = Coherence::default();
        for e in &self.entries {
            let Some(l) = &e.lambda_p else { continue };
            match l.sign() {
                Sign::Indeterminate => c.straddling += 1,
                s => {
                    if (s == Sign::Negative) == (e.u_sup > 10.0 * tol) {
                        c.agree += 1;
                    } else {
                        c.disagree += 1;
                    }
                }
            }
        }
        c
    }

    pub fn errors(&self, name: &str) -> Vec<f64> {
        self.entries.iter().filter_map(|e| e.error(name)).collect()
    }
}

pub const TARGET_A_MINUS_ONE: &str = "(a-1)+";
pub const TARGET_A_PLUS: &str = "a+";
pub const TARGET_LAMBDA_M0: &str = "lambda:1-sup a";
pub const TARGET_LAMBDA_SUP: &str = "lambda:-sup a";

fn sweep_one(base: &Problem, eps: f64, m: f64, coupling: &GridCoupling, opts: &StationaryOptions) -> Result<SweepEntry> {
    let p = coupling.problem_at(base, eps, m);
    if let Err(e @ Error::UnderResolvedKernel { .. }) = check_resolution(&p) {
        return Ok(SweepEntry::skipped(eps, &p, e.to_string()));
    }
    let op = match p.operator() {
        Ok(op) => op,
        Err(e @ Error::UnderResolvedKernel { .. }) => return Ok(SweepEntry::skipped(eps, &p, e.to_string())),
        Err(e) => return Err(e),
    };
    let est = principal_eigenvalue(&op, &opts.spectral)?;
    let sol = solve_with_estimate(&op, &p.reaction, Some(&p.growth), est.clone(), opts)?;
    let grid = op.grid();
    let a = op.growth();
    let u = &sol.values;
    let minus_one: Vec<f64> = u.iter().zip(a).map(|(u, a)| u - (a - 1.0).max(0.0)).collect();
    let plus: Vec<f64> = u.iter().zip(a).map(|(u, a)| u - a.max(0.0)).collect();
    let sup_a = p.growth.sup();
    let limit_errors = vec![
        (TARGET_A_MINUS_ONE.to_string(), crate::linalg::sup_norm(&minus_one)),
        (TARGET_A_PLUS.to_string(), grid.norm_l2(&plus)),
        (TARGET_LAMBDA_M0.to_string(), (est.value - (1.0 - sup_a)).abs()),
        (TARGET_LAMBDA_SUP.to_string(), (est.value + sup_a).abs()),
    ];
    Ok(SweepEntry {
        eps,
        radius: p.radius,
        spacing: p.spacing,
        skipped: None,
        lambda_p: Some(est),
        verdict: Some(sol.verdict),
        u_sup: sol.sup(),
        u_l2: sol.l2(),
        u_l1: sol.l1(),
        energy: op.dirichlet_energy(u),
        limit_errors,
        solution: Some(sol),
        problem: Some(p),
    })
}

/// `epsilon_sweep`: one job per range, run concurrently and merged by index.
pub fn epsilon_sweep(
    base: &Problem,
    m: f64,
    eps: &[f64],
    coupling: &GridCoupling,
    opts: &StationaryOptions,
) -> Result<SweepResult> {
    check_schedule(eps)?;
    let entries: Vec<Result<SweepEntry>> = eps.par_iter().map(|&e| sweep_one(base, e, m, coupling, opts)).collect();
    Ok(SweepResult {
        m,
        epsilons: eps.to_vec(),
        entries: entries.into_iter().collect::<Result<_>>()?,
    })
}
