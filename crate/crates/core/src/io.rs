//! Plain CSV and JSON artifacts. Numbers use Rust's shortest round-trip
//! formatting, so identical results give identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::evolution::EvolutionTrace;
use crate::experiments::{Direction, InvasionMatrix, LimitReport, SweepResult};
use crate::stationary::StationarySolution;

pub const SCHEMA_VERSION: u32 = 1;

/// Comma-separated table with a header row.
#[derive(Debug, Clone, Default)]
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Csv { out }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: std::fmt::Display,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.out.push(',');
            }
            first = false;
            write!(self.out, "{f}").expect("writing to a String");
        }
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Number cell; non-finite values are written as `nan`, `inf`, `-inf`.
/// Magnitudes outside `[1e-5, 1e16)` use exponent notation.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".into(), num)
}

/// Sweep table: `m, eps, lambda_lo, lambda_hi, u_sup, u_l2, u_l1, err_target, target_name`.
pub fn sweep_csv(sweep: &SweepResult, target: &str) -> String {
    let mut csv = Csv::new(&[
        "m",
        "eps",
        "lambda_lo",
        "lambda_hi",
        "u_sup",
        "u_l2",
        "u_l1",
        "err_target",
        "target_name",
    ]);
    for e in &sweep.entries {
        let (lo, hi) = e.lambda_p.as_ref().map_or((None, None), |l| (Some(l.lower), Some(l.upper)));
        csv.row([
            num(sweep.m),
            num(e.eps),
            opt(lo),
            opt(hi),
            num(e.u_sup),
            num(e.u_l2),
            num(e.u_l1),
            opt(e.error(target)),
            target.to_string(),
        ]);
    }
    csv.finish()
}

/// Sweep table of a limit study with the rows ordered along the limit
/// direction, so the `err_target` tail reads toward the limit.
pub fn limit_csv(report: &LimitReport) -> String {
    let mut csv = Csv::new(&[
        "m",
        "eps",
        "lambda_lo",
        "lambda_hi",
        "u_sup",
        "u_l2",
        "u_l1",
        "err_target",
        "target_name",
    ]);
    let mut order: Vec<usize> = (0..report.entries.len()).collect();
    if report.direction == Direction::ToZero {
        order.reverse();
    }
    for k in order {
        let e = &report.entries[k];
        let (lo, hi) = e.lambda_p.as_ref().map_or((None, None), |l| (Some(l.lower), Some(l.upper)));
        csv.row([
            num(report.m),
            num(e.eps),
            opt(lo),
            opt(hi),
            num(e.u_sup),
            num(e.u_l2),
            num(e.u_l1),
            num(report.errors[k]),
            report.target_name.clone(),
        ]);
    }
    csv.finish()
}

/// Invasion table: `eps1, eps2, lambda_lo, lambda_hi, verdict`.
pub fn invasion_csv(matrix: &InvasionMatrix) -> String {
    let mut csv = Csv::new(&["eps1", "eps2", "lambda_lo", "lambda_hi", "verdict"]);
    for e in &matrix.entries {
        let (lo, hi) = e.lambda_p.as_ref().map_or((None, None), |l| (Some(l.lower), Some(l.upper)));
        let verdict = serde_json::to_value(e.verdict).expect("serializable");
        csv.row([num(e.eps1), num(e.eps2), opt(lo), opt(hi), verdict.as_str().unwrap_or("").to_string()]);
    }
    csv.finish()
}

/// Trace table: `t, sup_norm, dist_sup, dist_l1, mass`.
pub fn trace_csv(trace: &EvolutionTrace) -> String {
    let mut csv = Csv::new(&["t", "sup_norm", "dist_sup", "dist_l1", "mass"]);
    for k in 0..trace.times.len() {
        let ds = trace.dist_to_stationary_sup.as_ref().map(|v| v[k]);
        let dl = trace.dist_to_stationary_l1.as_ref().map(|v| v[k]);
        csv.row([num(trace.times[k]), num(trace.sup_norm[k]), opt(ds), opt(dl), num(trace.mass[k])]);
    }
    csv.finish()
}

/// Solution table: `x` (or `x,y`), `u, sub, super, a`.
pub fn solution_csv(sol: &StationarySolution, a: &[f64]) -> String {
    let two_d = sol.grid.dimension() == 2;
    let header: &[&str] = if two_d {
        &["x", "y", "u", "sub", "super", "a"]
    } else {
        &["x", "u", "sub", "super", "a"]
    };
    let mut csv = Csv::new(header);
    for i in 0..sol.grid.len() {
        let c = sol.grid.coords(i);
        let mut row = vec![num(c[0])];
        if two_d {
            row.push(num(c[1]));
        }
        row.extend([num(sol.values[i]), num(sol.sub[i]), num(sol.super_[i]), num(a[i])]);
        csv.row(row);
    }
    csv.finish()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    label: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// One JSON summary object with `schema: 1`, pretty-printed with a trailing newline.
pub fn json_summary<T: Serialize>(command: &str, label: &str, body: &T) -> Result<String> {
    let env = Envelope {
        schema: SCHEMA_VERSION,
        command,
        label,
        body,
    };
    let mut s = serde_json::to_string_pretty(&env)
        .map_err(|e| crate::error::Error::NumericalFailure(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}
