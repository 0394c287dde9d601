//! One function per command. Each writes its artifacts and returns the
//! one-line summary printed on success.

use std::fs;
use std::path::PathBuf;

use nichewave_core::evolution::{long_time_verdict_with, step_bounds};
use nichewave_core::experiments::{
    apriori_estimate_audit, asymptotic_limit_check, energy_slope, epsilon_sweep, fat_tail_verdict, find_eps_star,
    invasion_matrix, EpsStar, LimitOptions, TARGET_A_MINUS_ONE, TARGET_A_PLUS, TARGET_LAMBDA_M0, TARGET_LAMBDA_SUP,
};
use nichewave_core::io::{invasion_csv, json_summary, limit_csv, num, solution_csv, sweep_csv, trace_csv, Csv};
use nichewave_core::{
    rayleigh_lambda_v, validate_kernel, Error, EvolutionOptions, GrowthProfile, Kernel, Problem, Reaction, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{Config, InitialData};

/// Tolerance of the kernel hypothesis checks.
const VALIDATION_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    /// Invalid or incomplete configuration; the message names the key.
    Config(String),
    /// Non-convergence or a broken certificate.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

/// Maps a core error raised while handling `section` to an exit class.
fn classify(section: &str, e: Error) -> CliError {
    match e {
        Error::InvalidParameter { name, reason } => CliError::Config(format!("`{section}.{name}`: {reason}")),
        Error::InvalidKernel(_)
        | Error::InfiniteMoment { .. }
        | Error::UnderResolvedKernel { .. }
        | Error::DimensionMismatch { .. }
        | Error::Reducible
        | Error::ResourceLimit(_)
        | Error::TailHypothesisViolated
        | Error::StepTooLarge { .. } => CliError::Config(format!("`{section}`: {e}")),
        other => CliError::Numerical(format!("{section}: {other}")),
    }
}

fn missing(section: &str) -> CliError {
    CliError::Config(format!("missing section `{section}`"))
}

struct Artifacts {
    dir: PathBuf,
    stem: String,
}

impl Artifacts {
    fn write(&self, ext: &str, body: &str) -> Result<(), CliError> {
        let path = self.dir.join(format!("{}.{ext}", self.stem));
        fs::write(&path, body).map_err(|e| CliError::Config(format!("`output_dir`: cannot write {}: {e}", path.display())))
    }

    fn csv(&self, body: &str) -> Result<(), CliError> {
        self.write("csv", body)
    }

    fn json(&self, command: &str, label: &str, body: &serde_json::Value) -> Result<(), CliError> {
        let text = json_summary(command, label, body).map_err(|e| classify("output", e))?;
        self.write("json", &text)
    }
}

pub struct Runner {
    config: Config,
    output_dir: PathBuf,
}

impl Runner {
    pub fn new(config: Config, output_dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&output_dir)
            .map_err(|e| CliError::Config(format!("`output_dir`: cannot create {}: {e}", output_dir.display())))?;
        Ok(Runner { config, output_dir })
    }

    fn artifacts(&self, command: &str) -> Artifacts {
        Artifacts {
            dir: self.output_dir.clone(),
            stem: format!("{command}-{}", self.config.label),
        }
    }

    fn kernel(&self) -> Result<Kernel, CliError> {
        Kernel::new(self.config.kernel.clone(), self.config.grid.dimension).map_err(|e| classify("kernel", e))
    }

    fn problem(&self) -> Result<Problem, CliError> {
        let c = &self.config;
        let growth = GrowthProfile::new(c.growth.clone()).map_err(|e| classify("growth", e))?;
        let mut p = Problem::new(self.kernel()?, growth)
            .with_grid(c.grid.radius, c.grid.spacing)
            .with_scaling(c.scaling.epsilon, c.scaling.m)
            .with_topology(c.grid.topology);
        p.alpha0 = c.scaling.alpha0;
        p.reaction = Reaction::new(c.reaction.crowding).map_err(|e| classify("reaction", e))?;
        Ok(p)
    }

    pub fn run(&self, command: &str) -> Result<String, CliError> {
        match command {
            "validate" => self.validate(),
            "spectrum" => self.spectrum(),
            "stationary" => self.stationary(),
            "evolve" => self.evolve(),
            "sweep" => self.sweep(),
            "eps-star" => self.eps_star(),
            "ess" => self.ess(),
            "fat-tail" => self.fat_tail(),
            "audit" => self.audit(),
            other => Err(CliError::Config(format!("unknown command `{other}`"))),
        }
    }

    fn validate(&self) -> Result<String, CliError> {
        let out = self.artifacts("validate");
        let kernel = self.kernel()?;
        let report = validate_kernel(&kernel, VALIDATION_TOL).map_err(|e| classify("kernel", e))?;
        let problem = self.problem()?;
        let grid = problem.grid().map_err(|e| classify("grid", e))?;
        let op = problem.operator();
        out.json(
            "validate",
            &self.config.label,
            &json!({
                "kernel": report,
                "h1": report.h1(),
                "h2": report.h2(),
                "h5": report.h5(),
                "grid_points": grid.len(),
                "operator": op.as_ref().map(|_| "ok").unwrap_or("rejected"),
                "rate": problem.scaled_kernel().map(|k| k.rate()).ok(),
            }),
        )?;
        if !report.h1() || !report.h2() {
            return Err(CliError::Config(format!("`kernel`: hypotheses fail: {}", report.messages.join("; "))));
        }
        op.map_err(|e| classify("grid", e))?;
        Ok(format!(
            "validate: kernel {} satisfies H1 and H2 (H5 {}); {} grid points",
            report.family,
            if report.h5() { "holds" } else { "fails" },
            grid.len()
        ))
    }

    fn spectrum(&self) -> Result<String, CliError> {
        let out = self.artifacts("spectrum");
        let opts = self.config.spectral.options();
        let op = self.problem()?.operator().map_err(|e| classify("grid", e))?;
        let est = nichewave_core::principal_eigenvalue(&op, &opts).map_err(|e| classify("spectral", e))?;
        let ray = rayleigh_lambda_v(&op, &opts).map_err(|e| classify("spectral", e))?;
        let (lo, hi) = op.eigenvalue_bounds();
        let mut csv = Csv::new(&["x", "phi", "a"]);
        for i in 0..op.len() {
            csv.row([num(op.grid().coords(i)[0]), num(est.eigenvector[i]), num(op.growth()[i])]);
        }
        out.csv(&csv.finish())?;
        out.json(
            "spectrum",
            &self.config.label,
            &json!({
                "value": est.value,
                "lower": est.lower,
                "upper": est.upper,
                "sign": est.sign(),
                "method": est.method,
                "residual": est.residual,
                "iterations": est.iterations,
                "rayleigh": { "value": ray.value, "lower": ray.lower, "upper": ray.upper },
                "a_priori_interval": [lo, hi],
                "grid_points": op.len(),
            }),
        )?;
        Ok(format!(
            "spectrum: lambda_p = {:.10e} in [{:.6e}, {:.6e}] ({:?})",
            est.value,
            est.lower,
            est.upper,
            est.sign()
        ))
    }

    fn stationary(&self) -> Result<String, CliError> {
        let out = self.artifacts("stationary");
        let problem = self.problem()?;
        let op = problem.operator().map_err(|e| classify("grid", e))?;
        let sol = problem.stationary(&self.config.stationary_options()).map_err(|e| classify("stationary", e))?;
        out.csv(&solution_csv(&sol, op.growth()))?;
        out.json(
            "stationary",
            &self.config.label,
            &json!({
                "solution": sol,
                "sup": sol.sup(),
                "l1": sol.l1(),
                "l2": sol.l2(),
            }),
        )?;
        Ok(format!(
            "stationary: {:?}, sup u = {:.6e}, residual {:.2e}, lambda_p in [{:.6e}, {:.6e}]",
            sol.verdict, sol.sup(), sol.residual, sol.lambda_p_used.lower, sol.lambda_p_used.upper
        ))
    }

    fn evolve(&self) -> Result<String, CliError> {
        let out = self.artifacts("evolve");
        let cfg = self.config.evolution.as_ref().ok_or_else(|| missing("evolution"))?;
        let problem = self.problem()?;
        let op = problem.operator().map_err(|e| classify("grid", e))?;
        let sol = problem.stationary(&self.config.stationary_options()).map_err(|e| classify("stationary", e))?;
        let a = op.growth();
        let u0: Vec<f64> = match cfg.initial {
            InitialData::Constant { value } => vec![value; op.len()],
            InitialData::Niche { value } => a.iter().map(|v| if *v > 0.0 { value } else { 0.0 }).collect(),
            InitialData::Random { amplitude } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
                (0..op.len()).map(|_| rng.gen_range(0.0..=amplitude)).collect()
            }
        };
        if u0.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CliError::Config("`evolution.initial`: initial data must be finite and non-negative".into()));
        }
        let reference = match sol.verdict {
            Verdict::Indeterminate => None,
            _ => Some(sol.values.as_slice()),
        };
        let opts = EvolutionOptions {
            dt: cfg.dt,
            stride: cfg.stride,
            ..EvolutionOptions::with_horizon(cfg.horizon)
        };
        let report = long_time_verdict_with(&op, &problem.reaction, &sol.lambda_p_used, &u0, reference, &opts, cfg.tol)
            .map_err(|e| classify("evolution", e))?;
        let (auto_dt, bound) = step_bounds(&op, &problem.reaction, &u0);
        out.csv(&trace_csv(&report.trace))?;
        out.json(
            "evolve",
            &self.config.label,
            &json!({
                "verdict": report.verdict,
                "stationary_verdict": sol.verdict,
                "final_sup": report.final_sup,
                "final_dist_sup": report.final_dist_sup,
                "final_dist_l1": report.final_dist_l1,
                "dt": report.trace.dt,
                "dt_auto": auto_dt,
                "dt_bound": bound,
                "monotone": report.trace.monotone_flag,
                "horizon": cfg.horizon,
            }),
        )?;
        Ok(format!(
            "evolve: {:?} at T = {}, sup u = {:.3e}, distance to stationary {}",
            report.verdict,
            cfg.horizon,
            report.final_sup,
            report.final_dist_sup.map_or("n/a".into(), |d| format!("{d:.3e}"))
        ))
    }

    fn sweep(&self) -> Result<String, CliError> {
        let out = self.artifacts("sweep");
        let cfg = self.config.sweep.as_ref().ok_or_else(|| missing("sweep"))?;
        let base = self.problem()?;
        let opts = self.config.stationary_options();
        if let Some(direction) = cfg.direction {
            let mut limit = LimitOptions::default();
            if let Some(h) = cfg.fd_spacing {
                limit.fd_spacing = h;
            }
            limit.core_radius = cfg.core_radius;
            let report = asymptotic_limit_check(&base, cfg.m, direction, &cfg.epsilons, &cfg.coupling, &limit, &opts)
                .map_err(|e| classify("sweep", e))?;
            out.csv(&limit_csv(&report))?;
            out.json("sweep", &self.config.label, &serde_json::to_value(&report).expect("serializable"))?;
            return Ok(format!(
                "sweep: limit {} over {} ranges, monotone tail {}, rate {}",
                report.target_name,
                report.eps.len(),
                report.monotone_tail,
                report.rate.map_or("n/a".into(), |r| format!("{r:.3}"))
            ));
        }
        let target = match &cfg.target {
            Some(t) => {
                let known = [TARGET_A_MINUS_ONE, TARGET_A_PLUS, TARGET_LAMBDA_M0, TARGET_LAMBDA_SUP];
                if !known.contains(&t.as_str()) {
                    return Err(CliError::Config(format!("`sweep.target`: expected one of {known:?}")));
                }
                t.clone()
            }
            None if cfg.m == 0.0 => TARGET_A_MINUS_ONE.into(),
            None => TARGET_A_PLUS.into(),
        };
        let sweep = epsilon_sweep(&base, cfg.m, &cfg.epsilons, &cfg.coupling, &opts).map_err(|e| classify("sweep", e))?;
        let coherence = sweep.coherence(opts.tol);
        out.csv(&sweep_csv(&sweep, &target))?;
        out.json(
            "sweep",
            &self.config.label,
            &json!({ "sweep": sweep, "coherence": coherence, "target": target }),
        )?;
        Ok(format!(
            "sweep: {} ranges, dichotomy consistent {}, inconsistent {}, straddling {}",
            sweep.entries.len(),
            coherence.agree,
            coherence.disagree,
            coherence.straddling
        ))
    }

    fn eps_star(&self) -> Result<String, CliError> {
        let out = self.artifacts("eps-star");
        let cfg = self.config.eps_star.as_ref().ok_or_else(|| missing("eps_star"))?;
        let base = self.problem()?;
        let report = find_eps_star(&base, cfg.lo, cfg.hi, cfg.tol, &cfg.coupling, &self.config.spectral.options())
            .map_err(|e| classify("eps_star", e))?;
        let mut csv = Csv::new(&["eps", "sign"]);
        for (eps, sign) in &report.samples {
            csv.row([num(*eps), serde_json::to_value(sign).expect("serializable").as_str().unwrap_or("").to_string()]);
        }
        out.csv(&csv.finish())?;
        out.json("eps-star", &self.config.label, &serde_json::to_value(&report).expect("serializable"))?;
        let verdict = match report.result {
            EpsStar::Infinite => "infinite (persistence for every range)".to_string(),
            EpsStar::Finite { eps, lower, upper } => format!("{eps:.6} in [{lower:.6}, {upper:.6}]"),
            EpsStar::NoThresholdInRange { sign_lo, sign_hi } => {
                format!("no threshold in [{}, {}] (signs {sign_lo:?}, {sign_hi:?})", cfg.lo, cfg.hi)
            }
        };
        Ok(format!("eps-star: {verdict}"))
    }

    fn ess(&self) -> Result<String, CliError> {
        let out = self.artifacts("ess");
        let cfg = self.config.ess.as_ref().ok_or_else(|| missing("ess"))?;
        let base = self.problem()?;
        let matrix = invasion_matrix(&base, &cfg.eps1, &cfg.eps2, cfg.m, &self.config.stationary_options())
            .map_err(|e| classify("ess", e))?;
        out.csv(&invasion_csv(&matrix))?;
        out.json(
            "ess",
            &self.config.label,
            &json!({ "matrix": matrix, "diagonal": matrix.diagonal() }),
        )?;
        let invades = matrix
            .entries
            .iter()
            .filter(|e| serde_json::to_value(e.verdict).ok().and_then(|v| v.as_str().map(|s| s == "invades")).unwrap_or(false))
            .count();
        Ok(format!("ess: {} pairs evaluated, {invades} invasions", matrix.entries.len()))
    }

    fn fat_tail(&self) -> Result<String, CliError> {
        let out = self.artifacts("fat-tail");
        let cfg = self.config.fat_tail.as_ref().ok_or_else(|| missing("fat_tail"))?;
        let base = self.problem()?;
        let report =
            fat_tail_verdict(&base, &cfg.radii, cfg.tol, &self.config.spectral.options()).map_err(|e| classify("fat_tail", e))?;
        let mut csv = Csv::new(&["radius", "lambda_lo", "lambda_hi"]);
        for (r, est) in report.extrapolation.radii.iter().zip(&report.extrapolation.estimates) {
            csv.row([num(*r), num(est.lower), num(est.upper)]);
        }
        out.csv(&csv.finish())?;
        out.json("fat-tail", &self.config.label, &serde_json::to_value(&report).expect("serializable"))?;
        Ok(format!(
            "fat-tail: {:?} (whole-space lower bound {:.6e}, limit upper bound {:.6e})",
            report.verdict, report.whole_space_lower, report.limit_upper
        ))
    }

    fn audit(&self) -> Result<String, CliError> {
        let out = self.artifacts("audit");
        let cfg = self.config.audit.as_ref().ok_or_else(|| missing("audit"))?;
        let base = self.problem()?;
        let opts = self.config.stationary_options();
        let sweep = epsilon_sweep(&base, cfg.m, &cfg.epsilons, &cfg.coupling, &opts).map_err(|e| classify("audit", e))?;
        let mut csv = Csv::new(&["eps", "item", "value", "bound", "margin", "applicable", "pass"]);
        let mut reports = Vec::new();
        for e in &sweep.entries {
            let (Some(p), Some(sol)) = (&e.problem, &e.solution) else { continue };
            let op = p.operator().map_err(|e| classify("audit", e))?;
            let rep = apriori_estimate_audit(&op, sol, opts.tol);
            for item in &rep.items {
                csv.row([
                    num(e.eps),
                    item.name.to_string(),
                    num(item.value),
                    num(item.bound),
                    num(item.margin),
                    item.applicable.to_string(),
                    item.pass.to_string(),
                ]);
            }
            reports.push(rep);
        }
        let slope = energy_slope(&sweep.entries);
        let failures = reports.iter().filter(|r| !r.all_pass()).count();
        out.csv(&csv.finish())?;
        out.json(
            "audit",
            &self.config.label,
            &json!({ "reports": reports, "energy_slope": slope, "m": cfg.m }),
        )?;
        Ok(format!(
            "audit: {} solves audited, {failures} with a failing item, energy slope {}",
            reports.len(),
            slope.map_or("n/a".into(), |s| format!("{s:.3}"))
        ))
    }
}
