use serde::Serialize;

use super::{log_log_slope, SweepEntry};
use crate::nonlocal_op::DiscreteOperator;
use crate::spectral::Sign;
use crate::stationary::StationarySolution;

#[derive(Debug, Clone, Serialize)]
pub struct AuditItem {
    pub name: &'static str,
    pub pass: bool,
    pub value: f64,
    pub bound: f64,
    /// `bound - value` for upper bounds, `value - bound` for lower bounds.
    pub margin: f64,
    pub applicable: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub eps: f64,
    pub m: f64,
    pub energy: f64,
    pub c1: f64,
    pub c2: f64,
    pub items: Vec<AuditItem>,
}

impl AuditReport {
    pub fn item(&self, name: &str) -> Option<&AuditItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass || !i.applicable)
    }
}

fn upper(name: &'static str, value: f64, bound: f64) -> AuditItem {
    AuditItem {
        name,
        pass: value <= bound,
        value,
        bound,
        margin: bound - value,
        applicable: true,
    }
}

fn lower(name: &'static str, value: f64, bound: f64) -> AuditItem {
    AuditItem {
        name,
        pass: value >= bound,
        value,
        bound,
        margin: value - bound,
        applicable: true,
    }
}

/// `apriori_estimate_audit`: the four a-priori estimates on one solve.
///
/// * (i) `||u||_2 <= C1 = sqrt(M int a^+)` with `M = ||a||_inf`;
/// * (ii) energy `<= C2 eps^m / alpha0` with `C2 = 4 M (M int a^+)`, the
///   constant obtained from the energy identity and `int u^2 <= M int a^+`;
/// * (iii) `max_{a > 0} u >= -lambda_upper / 2 - tol` when `lambda_p < 0`;
/// * (iv) `u >= (a - rate)^+ - tol` pointwise.
pub fn apriori_estimate_audit(op: &DiscreteOperator, sol: &StationarySolution, tol: f64) -> AuditReport {
    let grid = op.grid();
    let a = op.growth();
    let u = &sol.values;
    let kernel = op.kernel();
    let big_m = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let int_a_plus = grid.integrate(&a.iter().map(|v| v.max(0.0)).collect::<Vec<_>>());
    let c1 = (big_m * int_a_plus).sqrt();
    let c2 = 4.0 * big_m * c1 * c1;
    let energy = op.dirichlet_energy(u);
    let mut items = vec![
        upper("i", sol.l2(), c1 + tol),
        upper("ii", energy, c2 * kernel.epsilon().powf(kernel.m()) / kernel.alpha0()),
    ];
    let lam = &sol.lambda_p_used;
    let niche_max = u
        .iter()
        .zip(a)
        .filter(|(_, a)| **a > 0.0)
        .map(|(u, _)| *u)
        .fold(0.0, f64::max);
    let mut iii = lower("iii", niche_max, -lam.upper / 2.0 - tol);
    if lam.sign() != Sign::Negative {
        iii.applicable = false;
        iii.pass = true;
    }
    items.push(iii);
    let rate = op.rate();
    let worst = u
        .iter()
        .zip(a)
        .map(|(u, a)| u - (a - rate).max(0.0))
        .fold(f64::INFINITY, f64::min);
    items.push(AuditItem {
        name: "iv",
        pass: worst >= -tol,
        value: worst,
        bound: -tol,
        margin: worst + tol,
        applicable: true,
    });
    AuditReport {
        eps: kernel.epsilon(),
        m: kernel.m(),
        energy,
        c1,
        c2,
        items,
    }
}

/// Log-log slope of the energy against `eps` over the converged entries.
pub fn energy_slope(entries: &[SweepEntry]) -> Option<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) = entries
        .iter()
        .filter(|e| e.skipped.is_none() && e.energy.is_finite())
        .map(|e| (e.eps, e.energy))
        .unzip();
    log_log_slope(&x, &y)
}
