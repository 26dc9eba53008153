//! Command-line driver.
//!
//! Every run loads a flat `key = value` configuration over the embedded
//! defaults, validates it, and emits a deterministic report. Exit codes: 0
//! success, 1 failed verification, 2 configuration, feasibility or I/O
//! error, 3 numerical failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::identities::{identity_suite, michelsohn_round_trip, random_points, IdentityCheck, Injection};
use crate::analysis::{
    balancedness_check, cdlo_decay, chern_ricci_decay, cutoff_volume_decay, log_corrected, log_radii, samples_csv, shell, singular_side_decay, to_json,
    BalancednessReport, Sampling,
};
use crate::cdlo::{solve_radial_cy, ProfileSettings, RadialProfile};
use crate::config::parse_key_values;
use crate::error::{Error, Result};
use crate::gluing::{CutoffMetric, DerivedParams, GluingParams, TailSource};
use crate::solver::{
    compact_side_kernel, contraction_diagnostic, fixed_point_solve, inverse_norm, limit_kernel, preglued_problem, ContractionReport,
    FixedPointResult, KernelReport, SolverSettings, SolverSetup,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Validated run configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: GluingParams,
    pub sampling: Sampling,
    pub setup: SolverSetup,
    pub settings: SolverSettings,
    /// Random pairs per `ε` in the contraction sweep.
    pub trials: usize,
    /// Multiplies every identity tolerance.
    pub tolerance_scale: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let params = GluingParams::default();
        Self {
            params,
            sampling: Sampling::default(),
            setup: SolverSetup::default(),
            settings: SolverSettings { b: params.b, ..Default::default() },
            trials: 8,
            tolerance_scale: 1.0,
        }
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 10] =
        ["seed", "directions", "shells", "density", "r_eval", "max_iterations", "residual_tol", "update_tol", "trials", "tolerance_scale"];

    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for e in parse_key_values(text)? {
            if c.params.apply(&e)? {
                continue;
            }
            match e.key.as_str() {
                "seed" => c.sampling.seed = e.value.parse().map_err(|_| e.error(format!("`{}` is not a seed", e.value)))?,
                "directions" => c.sampling.directions = e.parse_usize()?,
                "shells" => c.sampling.shells = e.parse_usize()?,
                "density" => c.setup.density = e.parse_f64()?,
                "r_eval" => c.setup.r_eval = e.parse_f64()?,
                "max_iterations" => c.settings.max_iterations = e.parse_usize()?,
                "residual_tol" => c.settings.residual_tol = e.parse_f64()?,
                "update_tol" => c.settings.update_tol = e.parse_f64()?,
                "trials" => c.trials = e.parse_usize()?,
                "tolerance_scale" => c.tolerance_scale = e.parse_f64()?,
                _ => return Err(e.error(format!("unknown key `{}`", e.key))),
            }
        }
        c.sync();
        c.validate()?;
        Ok(c)
    }

    fn sync(&mut self) {
        self.setup.seed = self.sampling.seed;
        self.settings.b = self.params.b;
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.sampling.seed = seed;
        self.sync();
        self
    }

    /// Range checks; feasibility is left to the commands that need it.
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if self.sampling.directions == 0 {
            return bad("directions must be positive");
        }
        if self.sampling.shells < 4 {
            return bad("shells must be at least 4");
        }
        if !(self.setup.density >= 1.0) {
            return bad("density must be at least 1");
        }
        if !(self.setup.r_eval > 0.0 && self.setup.r_eval < self.setup.r_max) {
            return bad("r_eval must lie in (0, 0.9)");
        }
        if self.settings.max_iterations == 0 || self.trials == 0 {
            return bad("max_iterations and trials must be positive");
        }
        if !(self.settings.residual_tol > 0.0 && self.settings.update_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.tolerance_scale > 0.0) {
            return bad("tolerance_scale must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "conifold-lab", version, about = "Balanced gluing on the resolved conifold: identities, decay rates and the radial solver")]
pub struct Cli {
    /// Configuration file (`key = value`, `#` comments).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory for report.json and CSV tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Print the JSON report instead of the summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Angular sampling seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tolerance_scale: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pointwise identities, Michelsohn round trip and balancedness.
    Verify {
        #[arg(long, hide = true)]
        inject_sign_error: bool,
    },
    /// Log-log decay rate of one quantity.
    Decay {
        #[arg(value_enum)]
        which: DecayKind,
    },
    /// Fixed-point solve of the preglued problem.
    Solve {
        /// Inverse norms, kernel and contraction over ε ∈ {0.2, 0.1, 0.05}.
        #[arg(long)]
        sweep: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayKind {
    Cdlo,
    CutoffVolume,
    ChernRicci,
    SingularSide,
}

pub const SWEEP_EPSILONS: [f64; 3] = [0.2, 0.1, 0.05];
pub const CHERN_RICCI_RADII: [f64; 4] = [32.0, 64.0, 128.0, 256.0];
pub const CUTOFF_RADII: [f64; 4] = [10.0, 20.0, 40.0, 80.0];

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub identities: Vec<IdentityCheck>,
    pub balancedness: BalancednessReport,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct DecayOutcome {
    pub which: DecayKind,
    pub reports: Vec<crate::analysis::DecayReport>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InverseNormRow {
    pub b: f64,
    pub epsilon: f64,
    pub inverse_norm: f64,
}

#[derive(Debug, Serialize)]
pub struct SweepReport {
    pub inverse_norms: Vec<InverseNormRow>,
    /// `max/min` over `ε` for each `b`.
    pub spreads: Vec<(f64, f64)>,
    pub limit_kernel: KernelReport,
    pub compact_side_kernel: KernelReport,
    pub contraction: ContractionReport,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub psi_s: f64,
    pub psi_max: f64,
    pub nodes: usize,
    pub sweep: Option<SweepReport>,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Verify(VerifyReport),
    Decay(DecayOutcome),
    Solve(SolveReport),
}

/// Everything a run emits; serializes identically for identical input.
#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub derived: DerivedParams,
    pub pass: bool,
    pub result: Outcome,
}

/// Tables written next to `report.json`.
#[derive(Debug)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

fn profile() -> Result<Arc<RadialProfile>> {
    Ok(Arc::new(solve_radial_cy(&ProfileSettings::default())?))
}

fn identities_csv(checks: &[IdentityCheck]) -> String {
    let mut s = String::from("name,samples,max_residual,tolerance,pass\n");
    for c in checks {
        let _ = writeln!(s, "{},{},{:.17e},{:.17e},{}", c.name, c.samples, c.max_residual, c.tolerance, c.pass);
    }
    s
}

pub fn run_verify(config: &RunConfig, inject_sign_error: bool) -> Result<(VerifyReport, Artifacts)> {
    let seed = config.sampling.seed;
    let pts = random_points(seed, 100, 0.5, 50.0);
    let mut identities = identity_suite(&pts, config.tolerance_scale, Injection { wedge_sign: inject_sign_error })?;
    identities.push(michelsohn_round_trip(seed, 1000, 1e3, config.tolerance_scale)?);
    let r_cut = 20.0;
    let field = CutoffMetric::new(r_cut, TailSource::Profile(profile()?))?;
    let seeds = crate::analysis::angular_seeds(seed, 10);
    let annulus: Vec<_> = log_radii(0.27 * r_cut, 0.46 * r_cut, 5).into_iter().flat_map(|r| shell(&seeds, r)).collect();
    let balancedness = balancedness_check(&field, &annulus, 1e-2)?;
    let pass = identities.iter().all(|c| c.pass) && balancedness.pass;
    let mut bal = String::from("r,coarse,fine,ratio\n");
    for s in &balancedness.samples {
        let _ = writeln!(bal, "{:.17e},{:.17e},{:.17e},{:.17e}", s.r, s.coarse, s.fine, s.ratio);
    }
    let files = vec![("identities.csv".into(), identities_csv(&identities)), ("balancedness.csv".into(), bal)];
    Ok((VerifyReport { identities, balancedness, pass }, Artifacts { files }))
}

pub fn run_decay(config: &RunConfig, which: DecayKind) -> Result<(DecayOutcome, Artifacts)> {
    let sampling = &config.sampling;
    let reports = match which {
        DecayKind::Cdlo => vec![cdlo_decay(&*profile()?, sampling)?],
        DecayKind::CutoffVolume => {
            let (vol, dev) = cutoff_volume_decay(profile()?, &CUTOFF_RADII, sampling)?;
            vec![vol, dev]
        }
        DecayKind::ChernRicci => {
            let raw = chern_ricci_decay(&config.params, profile()?, &CHERN_RICCI_RADII, sampling)?;
            let corrected = log_corrected(&raw)?;
            vec![raw, corrected]
        }
        DecayKind::SingularSide => {
            let eps = log_radii(0.1, 0.4, sampling.shells.clamp(4, 8));
            vec![singular_side_decay(&config.params, &eps, sampling)?]
        }
    };
    let pass = match which {
        // cut-off dominated when 4q/p ≤ λ₀: the logarithm is then part of the prediction
        DecayKind::ChernRicci if 4.0 * config.params.q / config.params.p <= config.params.lambda0 => reports[1].pass == Some(true),
        DecayKind::ChernRicci => reports[0].pass == Some(true),
        _ => reports.iter().all(|r| r.pass != Some(false)),
    };
    let files = reports
        .iter()
        .enumerate()
        .map(|(k, r)| (format!("decay_{k}.csv"), samples_csv("r,value", &r.data)))
        .collect();
    Ok((DecayOutcome { which, reports, pass }, Artifacts { files }))
}

fn run_sweep(config: &RunConfig, tail: &TailSource) -> Result<SweepReport> {
    let mut inverse_norms = Vec::new();
    let mut spreads = Vec::new();
    for b in [0.5, 1.5] {
        let mut vals = Vec::new();
        for &epsilon in &SWEEP_EPSILONS {
            let g = GluingParams { epsilon, b, ..config.params };
            let problem = preglued_problem(&g, tail.clone(), &config.setup)?;
            let v = inverse_norm(&problem, b)?;
            vals.push(v);
            inverse_norms.push(InverseNormRow { b, epsilon, inverse_norm: v });
        }
        spreads.push((b, vals.iter().cloned().fold(0.0, f64::max) / vals.iter().cloned().fold(f64::INFINITY, f64::min)));
    }
    let smallest = GluingParams { epsilon: SWEEP_EPSILONS[2], ..config.params };
    let kernel = limit_kernel(&preglued_problem(&smallest, tail.clone(), &config.setup)?)?;
    let compact = compact_side_kernel(&smallest, &config.setup)?;
    let contraction = contraction_diagnostic(&config.params, tail, &SWEEP_EPSILONS, config.trials, &config.setup)?;
    let pass = spreads.iter().all(|s| s.1 < 2.0) && kernel.pass && contraction.lipschitz_decreasing;
    Ok(SweepReport { inverse_norms, spreads, limit_kernel: kernel, compact_side_kernel: compact, contraction, pass })
}

fn sweep_csv(s: &SweepReport) -> String {
    let mut out = String::from("epsilon,r_cutoff,nodes,ball_radius,n0_norm,lipschitz,self_map,positivity_failures,inverse_norm\n");
    for r in &s.contraction.rows {
        let _ = writeln!(
            out,
            "{},{:.17e},{},{:.17e},{:.17e},{:.17e},{},{},{:.17e}",
            r.epsilon, r.r_cutoff, r.nodes, r.ball_radius, r.n0_norm, r.lipschitz, r.self_map, r.positivity_failures, r.inverse_norm
        );
    }
    out
}

pub fn run_solve(config: &RunConfig, sweep: bool) -> Result<(SolveReport, Artifacts)> {
    config.params.check_feasible()?;
    let tail = TailSource::Profile(profile()?);
    let problem = preglued_problem(&config.params, tail.clone(), &config.setup)?;
    let result: FixedPointResult = fixed_point_solve(&problem, &config.settings)?;
    let mut files = vec![("trace.csv".into(), result.trace_csv()), ("psi.txt".into(), result.psi.to_table())];
    let sweep = if sweep { Some(run_sweep(config, &tail)?) } else { None };
    if let Some(s) = &sweep {
        files.push(("sweep.csv".into(), sweep_csv(s)));
    }
    let report = SolveReport {
        converged: result.residual <= config.settings.residual_tol,
        iterations: result.iterations,
        residual: result.residual,
        psi_s: result.psi_s,
        psi_max: result.psi.max_abs(),
        nodes: problem.len(),
        sweep,
    };
    Ok((report, Artifacts { files }))
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Infeasible(_) | Error::InvalidParameter(_) | Error::Io(_) | Error::TooFewSamples(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn summary(report: &Report) -> String {
    let mut s = String::new();
    let verdict = |p: bool| if p { "PASS" } else { "FAIL" };
    match &report.result {
        Outcome::Verify(v) => {
            for c in &v.identities {
                let _ = writeln!(s, "{:<24} {:.3e} (tol {:.1e})  {}", c.name, c.max_residual, c.tolerance, verdict(c.pass));
            }
            let b = &v.balancedness;
            let _ = writeln!(s, "{:<24} ratio ∈ [{:.3}, {:.3}]  {}", "balancedness", b.min_ratio, b.max_ratio, verdict(b.pass));
        }
        Outcome::Decay(d) => {
            for r in &d.reports {
                let _ = write!(s, "{}: slope {:.4} over [{:.3e}, {:.3e}]", r.quantity, r.slope, r.r_min, r.r_max);
                if let (Some(p), Some(t), Some(ok)) = (r.predicted, r.tolerance, r.pass) {
                    let _ = write!(s, ", predicted {p} ± {t}  {}", verdict(ok));
                }
                let _ = writeln!(s);
            }
        }
        Outcome::Solve(r) => {
            let _ = writeln!(s, "nodes {}  iterations {}  residual {:.3e}  ψ(s) {:.6e}  max|ψ| {:.3e}", r.nodes, r.iterations, r.residual, r.psi_s, r.psi_max);
            if let Some(w) = &r.sweep {
                let _ = writeln!(s, "b     ε      inverse norm");
                for row in &w.inverse_norms {
                    let _ = writeln!(s, "{:<5} {:<6} {:.6e}", row.b, row.epsilon, row.inverse_norm);
                }
                for (b, spread) in &w.spreads {
                    let _ = writeln!(s, "spread b = {b}: {spread:.4}");
                }
                let _ = writeln!(s, "limit kernel dimension {} (without evaluation term {})", w.limit_kernel.kernel_dimension, w.limit_kernel.control_kernel_dimension);
                let _ = writeln!(s, "ε      Lipschitz    ‖N(0)‖       δ            self-map");
                for row in &w.contraction.rows {
                    let _ = writeln!(s, "{:<6} {:.5e}  {:.5e}  {:.5e}  {}", row.epsilon, row.lipschitz, row.n0_norm, row.ball_radius, row.self_map);
                }
                let _ = writeln!(s, "Lipschitz decreasing: {}", w.contraction.lipschitz_decreasing);
            }
        }
    }
    let _ = writeln!(s, "{}", verdict(report.pass));
    s
}

fn write_outputs(dir: &Path, json: &str, artifacts: &Artifacts) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), json)?;
    for (name, body) in &artifacts.files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut config = RunConfig::from_config_str(&text)?;
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    if let Some(t) = cli.tolerance_scale {
        config.tolerance_scale = t;
    }
    config.validate()?;
    Ok(config)
}

/// Runs one command and returns its report, artifacts and exit code.
pub fn execute(cli: &Cli) -> Result<(Report, Artifacts)> {
    let config = load_config(cli)?;
    let (command, pass, result, artifacts) = match &cli.command {
        Command::Verify { inject_sign_error } => {
            let (r, a) = run_verify(&config, *inject_sign_error)?;
            ("verify".to_string(), r.pass, Outcome::Verify(r), a)
        }
        Command::Decay { which } => {
            let (r, a) = run_decay(&config, *which)?;
            let name = serde_json::to_value(which).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
            (format!("decay {name}"), r.pass, Outcome::Decay(r), a)
        }
        Command::Solve { sweep } => {
            let (r, a) = run_solve(&config, *sweep)?;
            let pass = r.converged && r.sweep.as_ref().is_none_or(|s| s.pass);
            (if *sweep { "solve --sweep" } else { "solve" }.to_string(), pass, Outcome::Solve(r), a)
        }
    };
    Ok((Report { command, derived: config.params.derived(), config, pass, result }, artifacts))
}

/// Entry point used by the binary; prints to stdout/stderr and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = execute(cli).and_then(|(report, artifacts)| {
        let json = to_json(&report);
        if let Some(dir) = &cli.out {
            write_outputs(dir, &json, &artifacts)?;
        }
        Ok((report, json))
    });
    match outcome {
        Ok((report, json)) => {
            if cli.json {
                println!("{json}");
            } else {
                print!("{}", summary(&report));
            }
            if report.pass {
                EXIT_OK
            } else {
                if let Outcome::Verify(v) = &report.result {
                    for c in v.identities.iter().filter(|c| !c.pass) {
                        eprintln!("failed identity: {} ({})", c.name, c.display);
                    }
                }
                EXIT_VERIFY
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
