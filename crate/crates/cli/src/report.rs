//! Serializable report schema, version 1.
//!
//! Reports carry enough provenance (thresholds, objective, seeds) to
//! reproduce any fit or consistency verdict from the report alone, and no
//! timestamps, so identical inputs produce byte-identical documents.

use serde::Serialize;

use tomofit_core::linalg::DensityMatrix;
use tomofit_core::mle::{ConsistencyReport, FitResult, ObjectiveKind};
use tomofit_core::seeding::SeedResult;
use tomofit_core::stokes::StokesEstimate;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub mode: String,
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<String>,
    pub thresholds: Thresholds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimated_stokes: Option<StokesReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fits: Option<Vec<FitReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<SeedReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise_trace_distance: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairwise_fidelity: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_pairwise_trace_distance: Option<f64>,
    pub events: Vec<String>,
}

impl Report {
    pub fn new(mode: &str, input_digest: String, thresholds: Thresholds) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            mode: mode.to_string(),
            input_digest,
            objective: None,
            thresholds,
            estimated_stokes: None,
            fit: None,
            fits: None,
            seeds: None,
            pairwise_trace_distance: None,
            pairwise_fidelity: None,
            consistent: None,
            max_pairwise_trace_distance: None,
            events: Vec::new(),
        }
    }
}

#[derive(Serialize)]
pub struct Thresholds {
    pub epsilon_fallback: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub consistency_threshold: Option<f64>,
    pub f_tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

#[derive(Serialize)]
pub struct StokesReport {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub clamped: bool,
}

impl From<&StokesEstimate> for StokesReport {
    fn from(est: &StokesEstimate) -> Self {
        let [s1, s2, s3] = est.vector.components();
        Self {
            s1,
            s2,
            s3,
            clamped: est.clamped,
        }
    }
}

#[derive(Serialize)]
pub struct FitReport {
    pub form: String,
    pub seed_region: String,
    pub seed_t: Vec<f64>,
    pub t_hat: Vec<f64>,
    /// Row-major matrix of [re, im] pairs.
    pub rho_hat: Vec<Vec<[f64; 2]>>,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&FitResult> for FitReport {
    fn from(fit: &FitResult) -> Self {
        Self {
            form: fit.form.to_string(),
            seed_region: fit.seed_region.to_string(),
            seed_t: fit.seed_params.values().to_vec(),
            t_hat: fit.params.values().to_vec(),
            rho_hat: matrix_entries(&fit.rho),
            objective_value: fit.objective_value,
            iterations: fit.iterations,
            converged: fit.converged,
        }
    }
}

#[derive(Serialize)]
pub struct SeedReport {
    pub form: String,
    pub region: String,
    pub notes: String,
    pub t: Vec<f64>,
    /// The state the seed reconstructs through the T†T construction.
    pub rho: Vec<Vec<[f64; 2]>>,
}

impl From<&SeedResult> for SeedReport {
    fn from(seed: &SeedResult) -> Self {
        Self {
            form: seed.params.form().to_string(),
            region: seed.region.to_string(),
            notes: seed.notes.clone(),
            t: seed.params.values().to_vec(),
            rho: matrix_entries(&seed.params.density()),
        }
    }
}

pub fn matrix_entries(rho: &DensityMatrix) -> Vec<Vec<[f64; 2]>> {
    let m = rho.matrix();
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .map(|j| {
                    let z = m[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect()
}

/// Fill the consistency fields of a report from a core check result.
pub fn apply_consistency(report: &mut Report, check: &ConsistencyReport) {
    report.fits = Some(check.fits.iter().map(FitReport::from).collect());
    report.pairwise_trace_distance = Some(check.pairwise_trace_distance.clone());
    report.pairwise_fidelity = Some(check.pairwise_fidelity.clone());
    report.consistent = Some(check.consistent);
    report.max_pairwise_trace_distance = Some(check.max_pairwise_distance);
}

pub fn objective_name(kind: ObjectiveKind) -> String {
    kind.to_string()
}
