//! Likelihood objectives over T-matrix parameters, the fit driver and
//! cross-form consistency reporting.
//!
//! Because ρ(t) = T†T / Tr(T†T) is physical for every nonzero t, the
//! likelihood can be minimized over raw parameter vectors with no
//! constraint handling; the only care needed is flooring probabilities
//! inside logarithms. Two objectives are provided: a per-setting binomial
//! negative log-likelihood (the statistically principled choice for count
//! data) and a Gaussian least-squares form whose exact-zero minimum on
//! noiseless counts makes sharp assertions possible in tests.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forms::{density_from_raw, FormId, TParams};
use crate::linalg::{fidelity, trace_distance, ComplexMatrix, DensityMatrix};
use crate::seeding::{
    seed_multiqubit, seed_single_qubit, Region, SeedOptions, SeedResult,
};
use crate::simplex::{self, SimplexConfig};
use crate::stokes::{estimate_stokes, linear_inversion, trace_product_re, MeasurementSet};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjectiveKind {
    /// −Σ [count·ln p + (shots−count)·ln(1−p)], probabilities floored.
    MultinomialNll,
    /// Σ (shots·p − count)² / (2·max(shots·p, floor)); zero at a perfect fit.
    GaussianLs,
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::MultinomialNll => "multinomial_nll",
            ObjectiveKind::GaussianLs => "gaussian_ls",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "multinomial_nll" | "nll" => Ok(ObjectiveKind::MultinomialNll),
            "gaussian_ls" | "ls" => Ok(ObjectiveKind::GaussianLs),
            other => Err(Error::UnknownSetting(other.to_string())),
        }
    }
}

/// A count dataset bound to an objective kind, with per-setting projectors
/// precomputed once so repeated evaluation inside the minimizer stays cheap.
pub struct Objective {
    kind: ObjectiveKind,
    data: MeasurementSet,
    projectors: Vec<ComplexMatrix>,
    counts: Vec<f64>,
    shots: Vec<f64>,
}

impl Objective {
    pub fn new(kind: ObjectiveKind, data: MeasurementSet) -> Self {
        let projectors = data.records().iter().map(|r| r.setting.matrix()).collect();
        let counts = data.records().iter().map(|r| r.count).collect();
        let shots = data.records().iter().map(|r| r.shots as f64).collect();
        Self {
            kind,
            data,
            projectors,
            counts,
            shots,
        }
    }

    pub fn kind(&self) -> ObjectiveKind {
        self.kind
    }

    pub fn data(&self) -> &MeasurementSet {
        &self.data
    }

    pub fn n_qubits(&self) -> usize {
        self.data.n_qubits()
    }

    fn dim(&self) -> usize {
        1 << self.data.n_qubits()
    }

    /// Objective value at a validated parameter point.
    pub fn evaluate(&self, params: &TParams) -> Result<f64> {
        if params.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: params.dim(),
                right: self.dim(),
            });
        }
        self.evaluate_raw(params.form(), params.n_qubits(), params.values())
    }

    /// Objective at a raw vector. The all-zero vector evaluates to +inf
    /// (rejected by comparison, never an error); a NaN result is reported
    /// as a genuine failure with the offending parameters attached.
    fn evaluate_raw(&self, form: FormId, n_qubits: usize, values: &[f64]) -> Result<f64> {
        let rho = match density_from_raw(form, n_qubits, values) {
            Some(rho) => rho,
            None => return Ok(f64::INFINITY),
        };
        let value = self.value_for_density(&rho);
        if value.is_nan() {
            return Err(Error::NonFiniteObjective {
                params: values.to_vec(),
            });
        }
        Ok(value)
    }

    fn value_for_density(&self, rho: &DensityMatrix) -> f64 {
        let mut total = 0.0;
        for ((proj, &count), &shots) in self
            .projectors
            .iter()
            .zip(self.counts.iter())
            .zip(self.shots.iter())
        {
            let p = trace_product_re(rho.matrix(), proj).clamp(0.0, 1.0);
            match self.kind {
                ObjectiveKind::MultinomialNll => {
                    total -= count * p.max(tol::PROB_FLOOR).ln()
                        + (shots - count) * (1.0 - p).max(tol::PROB_FLOOR).ln();
                }
                ObjectiveKind::GaussianLs => {
                    let predicted = shots * p;
                    let gap = predicted - count;
                    total += gap * gap / (2.0 * predicted.max(tol::LS_VAR_FLOOR));
                }
            }
        }
        total
    }
}

/// Termination settings for the simplex search. `max_iter` of `None`
/// resolves to 20 000 iterations per parameter dimension.
#[derive(Clone, Copy, Debug)]
pub struct FitConfig {
    pub f_tol: f64,
    pub max_iter: Option<usize>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            f_tol: tol::DEFAULT_F_TOL,
            max_iter: None,
        }
    }
}

/// Outcome of one likelihood minimization.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub form: FormId,
    /// Fitted parameter vector.
    pub params: TParams,
    /// ρ reconstructed from the fitted parameters.
    pub rho: DensityMatrix,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Which seeding rule produced the starting point.
    pub seed_region: Region,
    /// The starting point itself, kept for provenance.
    pub seed_params: TParams,
}

/// Simplex descent from a seed. Deterministic for fixed inputs; the
/// returned objective value never exceeds the value at the seed.
pub fn minimize(objective: &Objective, seed: &TParams, cfg: &FitConfig) -> Result<FitResult> {
    if seed.dim() != 1 << objective.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: seed.dim(),
            right: 1 << objective.n_qubits(),
        });
    }
    let form = seed.form();
    let n_qubits = seed.n_qubits();
    let norm = seed.values().iter().map(|v| v * v).sum::<f64>().sqrt();
    let simplex_cfg = SimplexConfig {
        f_tol: cfg.f_tol,
        max_iter: cfg
            .max_iter
            .unwrap_or(tol::MAX_ITER_PER_PARAM * seed.values().len()),
        initial_edge: (0.05 * norm).max(0.05),
    };
    let outcome = simplex::minimize(
        |values| objective.evaluate_raw(form, n_qubits, values),
        seed.values(),
        &simplex_cfg,
    )?;
    if !outcome.best_value.is_finite() {
        return Err(Error::NonFiniteObjective {
            params: outcome.best,
        });
    }
    let params = TParams::new(form, n_qubits, outcome.best)?;
    let rho = params.density();
    Ok(FitResult {
        form,
        rho,
        objective_value: outcome.best_value,
        iterations: outcome.iterations,
        converged: outcome.converged,
        seed_region: Region::Stable,
        seed_params: seed.clone(),
        params,
    })
}

/// [`minimize`] with the seed's region recorded on the result.
pub fn fit_seeded(objective: &Objective, seed: &SeedResult, cfg: &FitConfig) -> Result<FitResult> {
    let mut fit = minimize(objective, &seed.params, cfg)?;
    fit.seed_region = seed.region;
    Ok(fit)
}

/// One-stop fit of a single form against a dataset: seeds from the Stokes
/// estimate (single qubit) or from linear inversion (multiqubit), then
/// minimizes.
pub fn fit_form(
    data: &MeasurementSet,
    form: FormId,
    kind: ObjectiveKind,
    cfg: &FitConfig,
    seed_opts: &SeedOptions,
) -> Result<FitResult> {
    let seed = seed_for(data, form, seed_opts)?;
    let objective = Objective::new(kind, data.clone());
    fit_seeded(&objective, &seed, cfg)
}

fn seed_for(data: &MeasurementSet, form: FormId, seed_opts: &SeedOptions) -> Result<SeedResult> {
    if data.n_qubits() == 1 {
        let est = estimate_stokes(data)?;
        let mut seed = seed_single_qubit(form, &est.vector, seed_opts);
        if est.clamped && seed.region == Region::Stable {
            seed.region = Region::Clamped;
            seed.notes = format!("{}; estimate clamped onto the unit ball", seed.notes);
        }
        Ok(seed)
    } else {
        let rho_linear = linear_inversion(data)?;
        seed_multiqubit(&rho_linear, form)
    }
}

/// The recommended single-qubit policy: fit form B when the estimated
/// s₃ ≥ 0 and form A otherwise, so the seed denominator stays far from
/// zero; if the fit fails to converge or had to start from a fallback
/// seed, refit with the complementary form and keep the lower objective.
pub fn fit_with_policy(data: &MeasurementSet) -> Result<FitResult> {
    fit_with_policy_opts(
        data,
        ObjectiveKind::MultinomialNll,
        &FitConfig::default(),
        &SeedOptions::default(),
    )
}

pub fn fit_with_policy_opts(
    data: &MeasurementSet,
    kind: ObjectiveKind,
    cfg: &FitConfig,
    seed_opts: &SeedOptions,
) -> Result<FitResult> {
    if data.n_qubits() != 1 {
        return Err(Error::SingleQubitOnly("the A/B fit policy"));
    }
    let est = estimate_stokes(data)?;
    let primary = if est.vector.s3() >= 0.0 {
        FormId::B
    } else {
        FormId::A
    };
    let objective = Objective::new(kind, data.clone());

    let run = |form: FormId| -> Result<FitResult> {
        let mut seed = seed_single_qubit(form, &est.vector, seed_opts);
        if est.clamped && seed.region == Region::Stable {
            seed.region = Region::Clamped;
        }
        fit_seeded(&objective, &seed, cfg)
    };

    let first = run(primary)?;
    if first.converged && first.seed_region != Region::Fallback {
        return Ok(first);
    }
    let backup = if primary == FormId::B { FormId::A } else { FormId::B };
    let second = run(backup)?;
    Ok(if second.objective_value < first.objective_value {
        second
    } else {
        first
    })
}

/// Settings for [`cross_form_check_opts`].
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub kind: ObjectiveKind,
    pub fit: FitConfig,
    pub seeds: SeedOptions,
    /// Agreement threshold on pairwise trace distances; `None` resolves to
    /// 3/√(min shots), roughly three standard errors of one frequency.
    pub threshold: Option<f64>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            kind: ObjectiveKind::MultinomialNll,
            fit: FitConfig::default(),
            seeds: SeedOptions::default(),
            threshold: None,
        }
    }
}

/// Independent fits of several forms on the same data with pairwise
/// agreement metrics.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub fits: Vec<FitResult>,
    pub pairwise_trace_distance: Vec<Vec<f64>>,
    pub pairwise_fidelity: Vec<Vec<f64>>,
    pub threshold: f64,
    pub max_pairwise_distance: f64,
    pub consistent: bool,
}

pub fn cross_form_check(data: &MeasurementSet, forms: &[FormId]) -> Result<ConsistencyReport> {
    cross_form_check_opts(data, forms, &CheckOptions::default())
}

pub fn cross_form_check_opts(
    data: &MeasurementSet,
    forms: &[FormId],
    opts: &CheckOptions,
) -> Result<ConsistencyReport> {
    // deterministic merge order, duplicates dropped
    let mut forms: Vec<FormId> = forms.to_vec();
    forms.sort();
    forms.dedup();

    let mut fits = Vec::with_capacity(forms.len());
    for &form in &forms {
        fits.push(fit_form(data, form, opts.kind, &opts.fit, &opts.seeds)?);
    }

    let k = fits.len();
    let mut dist = vec![vec![0.0; k]; k];
    let mut fid = vec![vec![1.0; k]; k];
    let mut max_distance: f64 = 0.0;
    for i in 0..k {
        for j in (i + 1)..k {
            let d = trace_distance(&fits[i].rho, &fits[j].rho)?;
            let f = fidelity(&fits[i].rho, &fits[j].rho)?;
            dist[i][j] = d;
            dist[j][i] = d;
            fid[i][j] = f;
            fid[j][i] = f;
            max_distance = max_distance.max(d);
        }
    }

    let threshold = opts
        .threshold
        .unwrap_or_else(|| 3.0 / (data.min_shots() as f64).sqrt());
    Ok(ConsistencyReport {
        fits,
        pairwise_trace_distance: dist,
        pairwise_fidelity: fid,
        threshold,
        max_pairwise_distance: max_distance,
        consistent: max_distance <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DensityMatrix;
    use crate::seeding::seed_form_b;
    use crate::stokes::{
        density_from_stokes, expected_counts, sample_counts, stokes_from_density,
        MeasurementRecord, Setting, StokesVector,
    };

    fn sv(s1: f64, s2: f64, s3: f64) -> StokesVector {
        StokesVector::new(s1, s2, s3).unwrap()
    }

    #[test]
    fn gaussian_objective_is_zero_at_perfect_fit() {
        let s = sv(0.3, -0.4, 0.2);
        let rho = density_from_stokes(&s);
        let data = expected_counts(&rho, 10_000).unwrap();
        let objective = Objective::new(ObjectiveKind::GaussianLs, data);
        let seed = seed_form_b(&s, &SeedOptions::default());
        let value = objective.evaluate(&seed.params).unwrap();
        assert!(value < 1e-18, "value {value}");
    }

    #[test]
    fn all_stable_seeds_sit_at_the_gaussian_minimum() {
        let opts = SeedOptions::default();
        let states = [
            sv(0.3, -0.4, 0.2),
            sv(-0.5, 0.1, -0.6),
            sv(0.2, 0.7, 0.0),
            sv(0.0, 0.0, 0.8),
        ];
        for s in states {
            let data = expected_counts(&density_from_stokes(&s), 10_000).unwrap();
            let objective = Objective::new(ObjectiveKind::GaussianLs, data);
            for form in FormId::ALL_SINGLE {
                let seed = crate::seeding::seed_single_qubit(form, &s, &opts);
                if seed.region != Region::Stable {
                    continue;
                }
                let value = objective.evaluate(&seed.params).unwrap();
                assert!(value <= 1e-9, "form {form} at {:?}: {value}", s.components());
            }
        }
    }

    #[test]
    fn fallback_seeds_give_finite_objectives() {
        let south = density_from_stokes(&sv(0.0, 0.0, -1.0));
        let data = sample_counts(&south, 1_000, 8).unwrap();
        let opts = SeedOptions::default();
        for kind in [ObjectiveKind::MultinomialNll, ObjectiveKind::GaussianLs] {
            let objective = Objective::new(kind, data.clone());
            for form in FormId::ALL_SINGLE {
                let seed = crate::seeding::seed_single_qubit(
                    form,
                    &sv(0.0, 0.0, -1.0),
                    &opts,
                );
                let value = objective.evaluate(&seed.params).unwrap();
                assert!(value.is_finite(), "form {form} under {kind}");
            }
        }
    }

    #[test]
    fn gaussian_objective_single_perturbation() {
        // mixed-state counts with one perturbed setting: the objective is
        // the lone term delta²/(2·shots·p)
        let shots = 1000u64;
        let delta = 3.0;
        let mut records = Vec::new();
        for (i, setting) in Setting::all(1).into_iter().enumerate() {
            let count = shots as f64 * 0.5 + if i == 0 { delta } else { 0.0 };
            records.push(MeasurementRecord::new(setting, count, shots).unwrap());
        }
        let data = MeasurementSet::new(1, records).unwrap();
        let objective = Objective::new(ObjectiveKind::GaussianLs, data);
        let params = TParams::new(FormId::B, 1, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let value = objective.evaluate(&params).unwrap();
        let expect = delta * delta / (2.0 * shots as f64 * 0.5);
        assert!((value - expect).abs() < 1e-12, "value {value} expect {expect}");
    }

    #[test]
    fn objective_is_scale_invariant() {
        let rho = density_from_stokes(&sv(0.2, 0.1, -0.3));
        let data = sample_counts(&rho, 10_000, 5).unwrap();
        for kind in [ObjectiveKind::MultinomialNll, ObjectiveKind::GaussianLs] {
            let objective = Objective::new(kind, data.clone());
            let p1 = TParams::new(FormId::A, 1, vec![0.4, 1.0, -0.2, 0.7]).unwrap();
            let p3 = TParams::new(FormId::A, 1, vec![1.2, 3.0, -0.6, 2.1]).unwrap();
            let v1 = objective.evaluate(&p1).unwrap();
            let v3 = objective.evaluate(&p3).unwrap();
            assert!((v1 - v3).abs() < 1e-10 * v1.abs().max(1.0), "{kind}");
        }
    }

    #[test]
    fn nll_finite_at_pure_boundary() {
        let data = expected_counts(&DensityMatrix::basis_state(2, 0), 1000).unwrap();
        let objective = Objective::new(ObjectiveKind::MultinomialNll, data);
        // candidate predicting p_H = 0 where count is maximal
        let params = TParams::new(FormId::B, 1, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let value = objective.evaluate(&params).unwrap();
        assert!(value.is_finite());
    }

    #[test]
    fn objective_dimension_mismatch() {
        let data = expected_counts(&DensityMatrix::maximally_mixed(2), 100).unwrap();
        let objective = Objective::new(ObjectiveKind::GaussianLs, data);
        let params = TParams::new(FormId::BMulti, 2, vec![1.0; 16]).unwrap();
        assert!(matches!(
            objective.evaluate(&params),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn minimize_stays_at_exact_seed() {
        let s = sv(0.3, 0.2, 0.4);
        let truth = density_from_stokes(&s);
        let data = expected_counts(&truth, 10_000).unwrap();
        let objective = Objective::new(ObjectiveKind::GaussianLs, data);
        let seed = seed_form_b(&s, &SeedOptions::default());
        let fit = fit_seeded(&objective, &seed, &FitConfig::default()).unwrap();
        assert!(fit.converged);
        let d = trace_distance(&fit.rho, &truth).unwrap();
        assert!(d <= 1e-6, "trace distance {d}");
        // descent never worsens the seed value
        let at_seed = objective.evaluate(&seed.params).unwrap();
        assert!(fit.objective_value <= at_seed);
    }

    #[test]
    fn minimize_recovers_maximally_mixed() {
        let truth = DensityMatrix::maximally_mixed(2);
        let data = expected_counts(&truth, 10_000).unwrap();
        let objective = Objective::new(ObjectiveKind::GaussianLs, data);
        let seed = TParams::new(FormId::B, 1, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let fit = minimize(&objective, &seed, &FitConfig::default()).unwrap();
        assert!(fit.converged);
        assert!(trace_distance(&fit.rho, &truth).unwrap() < 1e-6);
    }

    #[test]
    fn minimize_on_sampled_data_recovers_state() {
        let s = sv(0.8 / 3f64.sqrt(), 0.8 / 3f64.sqrt(), 0.8 / 3f64.sqrt());
        let truth = density_from_stokes(&s);
        let data = sample_counts(&truth, 10_000, 99).unwrap();
        for form in FormId::ALL_SINGLE {
            let fit = fit_form(
                &data,
                form,
                ObjectiveKind::MultinomialNll,
                &FitConfig::default(),
                &SeedOptions::default(),
            )
            .unwrap();
            assert!(fit.converged, "form {form}");
            let f = fidelity(&fit.rho, &truth).unwrap();
            assert!(f >= 0.99, "form {form} fidelity {f}");
        }
    }

    #[test]
    fn scale_gauge_robustness() {
        let s = sv(0.4, -0.1, 0.3);
        let truth = density_from_stokes(&s);
        let data = sample_counts(&truth, 10_000, 17).unwrap();
        let objective = Objective::new(ObjectiveKind::MultinomialNll, data);
        let base = seed_form_b(&s, &SeedOptions::default()).params;
        let reference = minimize(&objective, &base, &FitConfig::default()).unwrap();
        for scale in [0.1, 10.0] {
            let scaled = TParams::new(
                FormId::B,
                1,
                base.values().iter().map(|v| v * scale).collect(),
            )
            .unwrap();
            let fit = minimize(&objective, &scaled, &FitConfig::default()).unwrap();
            let d = trace_distance(&fit.rho, &reference.rho).unwrap();
            assert!(d < 1e-5, "scale {scale}: distance {d}");
        }
    }

    #[test]
    fn policy_selects_stable_form() {
        let north = density_from_stokes(&sv(0.0, 0.0, 0.999));
        let data = expected_counts(&north, 100_000).unwrap();
        let fit = fit_with_policy(&data).unwrap();
        assert_eq!(fit.form, FormId::B);
        assert_eq!(fit.seed_region, Region::Stable);

        let south = density_from_stokes(&sv(0.0, 0.0, -0.999));
        let data = expected_counts(&south, 100_000).unwrap();
        let fit = fit_with_policy(&data).unwrap();
        assert_eq!(fit.form, FormId::A);
        assert_eq!(fit.seed_region, Region::Stable);
    }

    #[test]
    fn policy_on_maximally_mixed_samples() {
        let truth = DensityMatrix::maximally_mixed(2);
        let data = sample_counts(&truth, 1_000_000, 3).unwrap();
        let fit = fit_with_policy(&data).unwrap();
        assert!(fit.converged);
        assert!(trace_distance(&fit.rho, &truth).unwrap() < 1e-3);
    }

    #[test]
    fn cross_form_check_noiseless() {
        let s = sv(0.3, 0.4, 0.5);
        let truth = density_from_stokes(&s);
        let data = expected_counts(&truth, 10_000).unwrap();
        let opts = CheckOptions {
            kind: ObjectiveKind::GaussianLs,
            ..CheckOptions::default()
        };
        let report = cross_form_check_opts(&data, &FormId::ALL_SINGLE, &opts).unwrap();
        assert!(report.consistent);
        assert!(report.max_pairwise_distance <= 1e-6);
        assert_eq!(report.fits.len(), 4);
        // symmetric, zero diagonal
        for i in 0..4 {
            assert_eq!(report.pairwise_trace_distance[i][i], 0.0);
            for j in 0..4 {
                assert_eq!(
                    report.pairwise_trace_distance[i][j],
                    report.pairwise_trace_distance[j][i]
                );
            }
        }
    }

    #[test]
    fn cross_form_check_sampled() {
        let truth = density_from_stokes(&sv(0.2, -0.3, 0.4));
        let data = sample_counts(&truth, 10_000, 11).unwrap();
        let opts = CheckOptions {
            threshold: Some(0.03),
            ..CheckOptions::default()
        };
        let report = cross_form_check_opts(&data, &FormId::ALL_SINGLE, &opts).unwrap();
        assert!(report.consistent, "max {}", report.max_pairwise_distance);
    }

    #[test]
    fn cross_form_check_single_form() {
        let data = expected_counts(&DensityMatrix::maximally_mixed(2), 1000).unwrap();
        let report = cross_form_check(&data, &[FormId::A]).unwrap();
        assert_eq!(report.fits.len(), 1);
        assert_eq!(report.pairwise_trace_distance, vec![vec![0.0]]);
        assert!(report.consistent);
    }

    #[test]
    fn fitted_state_matches_estimate_direction() {
        // sanity: the fitted Stokes vector should sit near the estimator's
        let truth = density_from_stokes(&sv(0.5, 0.1, -0.2));
        let data = sample_counts(&truth, 100_000, 23).unwrap();
        let fit = fit_with_policy(&data).unwrap();
        let est = estimate_stokes(&data).unwrap();
        let fitted = stokes_from_density(&fit.rho).unwrap();
        for (a, b) in fitted.components().iter().zip(est.vector.components()) {
            assert!((a - b).abs() < 5e-3);
        }
    }
}
