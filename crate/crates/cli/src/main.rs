//! Command-line driver: fit measured counts, cross-check forms, inspect
//! seeds, or generate synthetic datasets.
//!
//! Exit codes: 0 success, 2 unphysical input rejected, 1 anything else
//! (parse failures, usage errors, internal errors).

mod formats;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use tomofit_core::forms::FormId;
use tomofit_core::mle::{
    cross_form_check_opts, fit_with_policy_opts, CheckOptions, FitConfig, ObjectiveKind,
};
use tomofit_core::seeding::{seed_single_qubit, Region, SeedOptions, SeedResult};
use tomofit_core::stokes::{
    density_from_stokes, estimate_stokes, sample_counts, MeasurementSet, StokesEstimate,
    StokesVector,
};
use tomofit_core::Error as CoreError;

use formats::{digest, parse_counts_csv, parse_stokes_json, read_input, write_counts_csv};
use report::{
    apply_consistency, objective_name, FitReport, Report, SeedReport, StokesReport, Thresholds,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Fit,
    Check,
    Seed,
    Simulate,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fit" => Ok(Mode::Fit),
            "check" => Ok(Mode::Check),
            "seed" => Ok(Mode::Seed),
            "simulate" => Ok(Mode::Simulate),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Fit => "fit",
            Mode::Check => "check",
            Mode::Seed => "seed",
            Mode::Simulate => "simulate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    CountsCsv,
    StokesJson,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "counts-csv" => Ok(Format::CountsCsv),
            "stokes-json" => Ok(Format::StokesJson),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

fn parse_stokes_triple(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err("expected three comma-separated values, e.g. 0.3,0.4,0.5".to_string());
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts.iter()) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("invalid number `{part}`"))?;
    }
    Ok(out)
}

#[derive(Parser, Debug)]
#[command(
    name = "tomofit",
    version,
    about = "Quantum state tomography via T-matrix maximum-likelihood fits"
)]
struct Args {
    /// What to do: fit | check | seed | simulate
    #[arg(long)]
    mode: Mode,

    /// Input file (counts CSV or Stokes JSON)
    #[arg(long)]
    input: Option<PathBuf>,

    /// Input format: counts-csv | stokes-json
    #[arg(long, default_value = "counts-csv")]
    format: Format,

    /// Forms to use, comma separated (A,B,C,D,A_multi,B_multi)
    #[arg(long, value_delimiter = ',')]
    forms: Option<Vec<FormId>>,

    /// Likelihood objective: multinomial-nll | gaussian-ls
    #[arg(long, default_value = "multinomial-nll")]
    objective: ObjectiveKind,

    /// Shots per setting (simulate mode)
    #[arg(long)]
    shots: Option<u64>,

    /// True state for simulation as s1,s2,s3
    #[arg(long, value_parser = parse_stokes_triple)]
    true_stokes: Option<[f64; 3]>,

    /// Seed for the simulation generator
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,

    /// Where to write the report (or CSV in simulate mode); stdout if omitted
    #[arg(long)]
    output: Option<PathBuf>,

    /// Width of the seed-instability window
    #[arg(long, default_value_t = tomofit_core::tol::DEFAULT_EPSILON_FALLBACK)]
    epsilon_fallback: f64,

    /// Pairwise trace-distance threshold for check mode; default 3/sqrt(min shots)
    #[arg(long)]
    consistency_threshold: Option<f64>,

    /// Objective-spread termination threshold for the minimizer
    #[arg(long, default_value_t = tomofit_core::tol::DEFAULT_F_TOL)]
    f_tol: f64,

    /// Iteration cap for the minimizer (default: 20000 per parameter)
    #[arg(long)]
    max_iter: Option<usize>,
}

/// Error with the exit-code classification attached.
#[derive(Debug)]
pub struct CliError {
    message: String,
    /// true → exit 2 (physically impossible input), false → exit 1
    pub unphysical: bool,
}

impl CliError {
    fn new(message: String, unphysical: bool) -> Self {
        Self {
            message,
            unphysical,
        }
    }

    pub fn internal(message: &str) -> Self {
        Self::new(message.to_string(), false)
    }

    pub fn parse(message: &str, line: usize) -> Self {
        Self::new(format!("parse error at line {line}: {message}"), false)
    }

    pub fn from_core(err: CoreError) -> Self {
        let unphysical = matches!(
            err,
            CoreError::UnphysicalStokes(_)
                | CoreError::CountExceedsShots { .. }
                | CoreError::NegativeCount { .. }
                | CoreError::NonFinite { .. }
        );
        Self::new(err.to_string(), unphysical)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            if matches!(
                e.kind(),
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion
            ) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.unphysical { 2 } else { 1 })
        }
    }
}

fn run(args: &Args) -> Result<(), CliError> {
    if args.epsilon_fallback <= 0.0 || args.f_tol <= 0.0 {
        return Err(CliError::internal("thresholds must be positive"));
    }
    if let Some(t) = args.consistency_threshold {
        if t <= 0.0 {
            return Err(CliError::internal("thresholds must be positive"));
        }
    }
    match args.mode {
        Mode::Simulate => simulate(args),
        Mode::Fit => fit(args),
        Mode::Check => check(args),
        Mode::Seed => seed(args),
    }
}

fn seed_opts(args: &Args) -> SeedOptions {
    SeedOptions {
        epsilon_fallback: args.epsilon_fallback,
        ..SeedOptions::default()
    }
}

fn fit_cfg(args: &Args) -> FitConfig {
    FitConfig {
        f_tol: args.f_tol,
        max_iter: args.max_iter,
    }
}

fn thresholds(args: &Args) -> Thresholds {
    Thresholds {
        epsilon_fallback: args.epsilon_fallback,
        consistency_threshold: args.consistency_threshold,
        f_tol: args.f_tol,
        max_iter: args.max_iter,
    }
}

fn emit(args: &Args, text: &str) -> Result<(), CliError> {
    match &args.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::internal(&format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_report(args: &Args, report: &Report) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::internal(&format!("report serialization failed: {e}")))?;
    text.push('\n');
    emit(args, &text)
}

fn require_input(args: &Args) -> Result<String, CliError> {
    let path = args
        .input
        .as_ref()
        .ok_or_else(|| CliError::internal("--input is required for this mode"))?;
    read_input(path)
}

fn load_counts(args: &Args) -> Result<(MeasurementSet, String), CliError> {
    if args.format != Format::CountsCsv {
        return Err(CliError::internal(
            "this mode needs count data; use --format counts-csv",
        ));
    }
    let text = require_input(args)?;
    let set = parse_counts_csv(&text)?;
    Ok((set, digest(text.as_bytes())))
}

fn push_fit_events(events: &mut Vec<String>, fits: &[&tomofit_core::mle::FitResult]) {
    for fit in fits {
        match fit.seed_region {
            Region::Fallback => events.push(format!("fallback seed used for form {}", fit.form)),
            Region::Clamped => events.push(format!(
                "form {} seeded from a clamped Stokes estimate",
                fit.form
            )),
            Region::Stable => {}
        }
    }
}

fn simulate(args: &Args) -> Result<(), CliError> {
    let triple = args
        .true_stokes
        .ok_or_else(|| CliError::internal("--true-stokes is required in simulate mode"))?;
    let shots = args
        .shots
        .ok_or_else(|| CliError::internal("--shots is required in simulate mode"))?;
    let stokes =
        StokesVector::new(triple[0], triple[1], triple[2]).map_err(CliError::from_core)?;
    let rho = density_from_stokes(&stokes);
    let set = sample_counts(&rho, shots, args.rng_seed).map_err(CliError::from_core)?;
    emit(args, &write_counts_csv(&set))
}

fn fit(args: &Args) -> Result<(), CliError> {
    let (data, input_digest) = load_counts(args)?;
    let est = estimate_stokes(&data).map_err(CliError::from_core)?;
    let fit = fit_with_policy_opts(&data, args.objective, &fit_cfg(args), &seed_opts(args))
        .map_err(CliError::from_core)?;

    let mut report = Report::new("fit", input_digest, thresholds(args));
    report.objective = Some(objective_name(args.objective));
    report.estimated_stokes = Some(StokesReport::from(&est));
    if est.clamped {
        report
            .events
            .push("stokes estimate clamped onto the unit ball".to_string());
    }
    push_fit_events(&mut report.events, &[&fit]);
    report.fit = Some(FitReport::from(&fit));
    emit_report(args, &report)
}

fn default_forms(n_qubits: usize) -> Vec<FormId> {
    if n_qubits == 1 {
        FormId::ALL_SINGLE.to_vec()
    } else {
        vec![FormId::AMulti, FormId::BMulti]
    }
}

fn check(args: &Args) -> Result<(), CliError> {
    let (data, input_digest) = load_counts(args)?;
    let forms = args
        .forms
        .clone()
        .unwrap_or_else(|| default_forms(data.n_qubits()));
    let opts = CheckOptions {
        kind: args.objective,
        fit: fit_cfg(args),
        seeds: seed_opts(args),
        threshold: args.consistency_threshold,
    };
    let outcome = cross_form_check_opts(&data, &forms, &opts).map_err(CliError::from_core)?;

    let mut report = Report::new("check", input_digest, thresholds(args));
    report.objective = Some(objective_name(args.objective));
    report.thresholds.consistency_threshold = Some(outcome.threshold);
    if data.n_qubits() == 1 {
        let est = estimate_stokes(&data).map_err(CliError::from_core)?;
        if est.clamped {
            report
                .events
                .push("stokes estimate clamped onto the unit ball".to_string());
        }
        report.estimated_stokes = Some(StokesReport::from(&est));
    }
    let fit_refs: Vec<&tomofit_core::mle::FitResult> = outcome.fits.iter().collect();
    push_fit_events(&mut report.events, &fit_refs);
    apply_consistency(&mut report, &outcome);
    emit_report(args, &report)
}

fn seed(args: &Args) -> Result<(), CliError> {
    let text = require_input(args)?;
    let input_digest = digest(text.as_bytes());

    let estimate: StokesEstimate = match args.format {
        Format::StokesJson => {
            let (vector, clamped) = parse_stokes_json(&text)?;
            StokesEstimate { vector, clamped }
        }
        Format::CountsCsv => {
            let set = parse_counts_csv(&text)?;
            estimate_stokes(&set).map_err(CliError::from_core)?
        }
    };

    let forms = args.forms.clone().unwrap_or_else(|| default_forms(1));
    let opts = seed_opts(args);
    let seeds: Vec<SeedResult> = forms
        .iter()
        .map(|&form| seed_single_qubit(form, &estimate.vector, &opts))
        .collect();

    let mut report = Report::new("seed", input_digest, thresholds(args));
    report.estimated_stokes = Some(StokesReport::from(&estimate));
    if estimate.clamped {
        report
            .events
            .push("stokes estimate clamped onto the unit ball".to_string());
    }
    for s in &seeds {
        if s.region == Region::Fallback {
            report.events.push(format!(
                "fallback seed used for form {}",
                s.params.form()
            ));
        }
    }
    report.seeds = Some(seeds.iter().map(SeedReport::from).collect());
    emit_report(args, &report)
}
