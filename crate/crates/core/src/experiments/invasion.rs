use rayon::prelude::*;
use serde::Serialize;

use super::check_resolution;
use crate::error::{Error, Result};
use crate::nonlocal_op::DiscreteOperator;
use crate::problem::Problem;
use crate::spectral::{principal_eigenvalue, Sign, SpectralEstimate};
use crate::stationary::{StationaryOptions, Verdict};

/// Resident strategy at equilibrium on the shared strategy grid.
#[derive(Debug, Clone, Serialize)]
pub struct Resident {
    pub eps: f64,
    pub verdict: Verdict,
    pub u_sup: f64,
    pub lambda_p: SpectralEstimate,
    #[serde(skip)]
    pub values: Vec<f64>,
}

impl Resident {
    pub fn solve(base: &Problem, eps: f64, m: f64, opts: &StationaryOptions) -> Result<Self> {
        let p = base.clone().with_scaling(eps, m);
        check_resolution(&p)?;
        let sol = p.stationary(opts)?;
        Ok(Resident {
            eps,
            verdict: sol.verdict,
            u_sup: sol.sup(),
            lambda_p: sol.lambda_p_used.clone(),
            values: sol.values,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvasionVerdict {
    /// Certified `lambda_p < 0`: the mutant grows when rare.
    Invades,
    /// Certified `lambda_p >= 0`.
    Resisted,
    /// Bracket contains zero.
    Neutral,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvasionEntry {
    pub eps1: f64,
    pub eps2: f64,
    pub lambda_p: Option<SpectralEstimate>,
    pub verdict: InvasionVerdict,
    pub skipped: Option<String>,
}

/// `invasion_fitness`: bracketed `lambda_p(M_{eps2,m} + a - u*_{eps1})` on the resident's grid.
pub fn invasion_fitness(base: &Problem, resident: &Resident, eps2: f64, m: f64, opts: &StationaryOptions) -> Result<InvasionEntry> {
    let p2 = base.clone().with_scaling(eps2, m);
    let skipped = |reason: String| InvasionEntry {
        eps1: resident.eps,
        eps2,
        lambda_p: None,
        verdict: InvasionVerdict::Skipped,
        skipped: Some(reason),
    };
    if let Err(e) = check_resolution(&p2) {
        return Ok(skipped(e.to_string()));
    }
    let grid = p2.grid()?;
    if grid.len() != resident.values.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            actual: resident.values.len(),
        });
    }
    let a_eff: Vec<f64> = p2
        .growth
        .sample(&grid)
        .iter()
        .zip(&resident.values)
        .map(|(a, u)| a - p2.reaction.crowding * u)
        .collect();
    let op = match DiscreteOperator::with_tail_tol(&grid, &p2.scaled_kernel()?, a_eff, p2.tail_tol) {
        Ok(op) => op,
        Err(e @ Error::UnderResolvedKernel { .. }) => return Ok(skipped(e.to_string())),
        Err(e) => return Err(e),
    };
    let est = principal_eigenvalue(&op, &opts.spectral)?;
    let verdict = match est.sign() {
        Sign::Negative => InvasionVerdict::Invades,
        Sign::NonNegative => InvasionVerdict::Resisted,
        Sign::Indeterminate => InvasionVerdict::Neutral,
    };
    Ok(InvasionEntry {
        eps1: resident.eps,
        eps2,
        lambda_p: Some(est),
        verdict,
        skipped: None,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct InvasionMatrix {
    pub m: f64,
    pub eps1: Vec<f64>,
    pub eps2: Vec<f64>,
    pub residents: Vec<Resident>,
    /// Row-major over `eps1` x `eps2`.
    pub entries: Vec<InvasionEntry>,
}

impl InvasionMatrix {
    pub fn entry(&self, i: usize, j: usize) -> &InvasionEntry {
        &self.entries[i * self.eps2.len() + j]
    }

    /// `(|lambda_p|, bracket width)` for every entry with `eps1 == eps2` and a
    /// nontrivial resident.
    pub fn diagonal(&self) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .zip(self.entries.iter().map(|e| {
                self.residents
                    .iter()
                    .find(|r| r.eps == e.eps1)
                    .is_some_and(|r| r.verdict == Verdict::Persistence)
            }))
            .filter(|(e, alive)| *alive && e.eps1 == e.eps2)
            .filter_map(|(e, _)| e.lambda_p.as_ref().map(|l| (l.value.abs(), l.width())))
            .collect()
    }
}

/// Fills the `eps1` x `eps2` grid; residents and entries run concurrently.
pub fn invasion_matrix(base: &Problem, eps1: &[f64], eps2: &[f64], m: f64, opts: &StationaryOptions) -> Result<InvasionMatrix> {
    let residents: Vec<Resident> = eps1
        .par_iter()
        .map(|&e| Resident::solve(base, e, m, opts))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..eps1.len()).flat_map(|i| (0..eps2.len()).map(move |j| (i, j))).collect();
    let entries: Vec<InvasionEntry> = jobs
        .par_iter()
        .map(|&(i, j)| invasion_fitness(base, &residents[i], eps2[j], m, opts))
        .collect::<Result<_>>()?;
    Ok(InvasionMatrix {
        m,
        eps1: eps1.to_vec(),
        eps2: eps2.to_vec(),
        residents,
        entries,
    })
}
