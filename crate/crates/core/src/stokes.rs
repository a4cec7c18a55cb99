//! The experimental-data side: Stokes parameters, the six-way projective
//! measurement model, Born probabilities, count-based estimation and
//! synthetic count generation.
//!
//! A single qubit is measured along three bases with two outcomes each:
//! H/V (computational), D/A (diagonal) and R/L (circular). The normalized
//! Stokes parameters are the three difference frequencies
//! s₁ = p_D − p_A, s₂ = p_R − p_L, s₃ = p_H − p_V, and the state is
//! ρ = ½ [[1+s₃, s₁−is₂], [s₁+is₂, 1−s₃]], physical exactly when
//! s₁² + s₂² + s₃² ≤ 1. Multi-qubit settings are tensor products of the
//! single-qubit projectors, labelled by joined letters (`HD`, `RL`, …).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64Mcg;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, DensityMatrix};
use crate::tol;

/// Normalized Stokes parameters of one qubit, validated to lie in the unit
/// ball (within a small slack for raw boundary estimates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesVector {
    s1: f64,
    s2: f64,
    s3: f64,
}

impl StokesVector {
    pub fn new(s1: f64, s2: f64, s3: f64) -> Result<Self> {
        if !(s1.is_finite() && s2.is_finite() && s3.is_finite()) {
            return Err(Error::NonFinite {
                context: "Stokes vector",
            });
        }
        let norm_sq = s1 * s1 + s2 * s2 + s3 * s3;
        if norm_sq > 1.0 + tol::STOKES_BALL_SLACK {
            return Err(Error::UnphysicalStokes(norm_sq));
        }
        Ok(Self { s1, s2, s3 })
    }

    /// Radially rescale onto the unit sphere when outside the ball.
    /// Returns the vector and whether clamping occurred.
    pub fn clamped(s1: f64, s2: f64, s3: f64) -> Result<(Self, bool)> {
        if !(s1.is_finite() && s2.is_finite() && s3.is_finite()) {
            return Err(Error::NonFinite {
                context: "Stokes vector",
            });
        }
        let norm = (s1 * s1 + s2 * s2 + s3 * s3).sqrt();
        if norm > 1.0 {
            Ok((
                Self {
                    s1: s1 / norm,
                    s2: s2 / norm,
                    s3: s3 / norm,
                },
                true,
            ))
        } else {
            Ok((Self { s1, s2, s3 }, false))
        }
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn s3(&self) -> f64 {
        self.s3
    }

    pub fn components(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn norm_sq(&self) -> f64 {
        self.s1 * self.s1 + self.s2 * self.s2 + self.s3 * self.s3
    }
}

/// ρ = ½ [[1+s₃, s₁−is₂], [s₁+is₂, 1−s₃]].
pub fn density_from_stokes(s: &StokesVector) -> DensityMatrix {
    let mat = ComplexMatrix::from_rows(&[
        vec![c(0.5 * (1.0 + s.s3), 0.0), c(0.5 * s.s1, -0.5 * s.s2)],
        vec![c(0.5 * s.s1, 0.5 * s.s2), c(0.5 * (1.0 - s.s3), 0.0)],
    ])
    .expect("fixed 2x2 layout");
    DensityMatrix::from_construction(mat)
}

/// Exact inverse of [`density_from_stokes`] for a single qubit.
pub fn stokes_from_density(rho: &DensityMatrix) -> Result<StokesVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    let m = rho.matrix();
    StokesVector::new(
        2.0 * m[(1, 0)].re,
        2.0 * m[(1, 0)].im,
        m[(0, 0)].re - m[(1, 1)].re,
    )
}

/// One of the six single-qubit projective outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Projector {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Projector {
    pub const ALL: [Projector; 6] = [
        Projector::H,
        Projector::V,
        Projector::D,
        Projector::A,
        Projector::R,
        Projector::L,
    ];

    /// The opposite outcome in the same basis.
    pub fn complement(self) -> Projector {
        match self {
            Projector::H => Projector::V,
            Projector::V => Projector::H,
            Projector::D => Projector::A,
            Projector::A => Projector::D,
            Projector::R => Projector::L,
            Projector::L => Projector::R,
        }
    }

    /// The rank-1 projector matrix onto this outcome.
    pub fn matrix(self) -> ComplexMatrix {
        let rows = match self {
            Projector::H => [vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]],
            Projector::V => [vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
            Projector::D => [vec![c(0.5, 0.0), c(0.5, 0.0)], vec![c(0.5, 0.0), c(0.5, 0.0)]],
            Projector::A => [
                vec![c(0.5, 0.0), c(-0.5, 0.0)],
                vec![c(-0.5, 0.0), c(0.5, 0.0)],
            ],
            Projector::R => [
                vec![c(0.5, 0.0), c(0.0, -0.5)],
                vec![c(0.0, 0.5), c(0.5, 0.0)],
            ],
            Projector::L => [
                vec![c(0.5, 0.0), c(0.0, 0.5)],
                vec![c(0.0, -0.5), c(0.5, 0.0)],
            ],
        };
        ComplexMatrix::from_rows(&rows).expect("fixed 2x2 layout")
    }

    pub fn letter(self) -> char {
        match self {
            Projector::H => 'H',
            Projector::V => 'V',
            Projector::D => 'D',
            Projector::A => 'A',
            Projector::R => 'R',
            Projector::L => 'L',
        }
    }

    pub fn from_letter(ch: char) -> Result<Projector> {
        match ch.to_ascii_uppercase() {
            'H' => Ok(Projector::H),
            'V' => Ok(Projector::V),
            'D' => Ok(Projector::D),
            'A' => Ok(Projector::A),
            'R' => Ok(Projector::R),
            'L' => Ok(Projector::L),
            other => Err(Error::UnknownSetting(other.to_string())),
        }
    }
}

/// A tensor-product measurement setting, one projector per qubit.
/// Labels join the per-qubit letters with no separator: `H`, `HD`, `RLV`, …
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Setting(Vec<Projector>);

impl Setting {
    pub fn new(projectors: Vec<Projector>) -> Result<Self> {
        if projectors.is_empty() {
            return Err(Error::ZeroQubits);
        }
        Ok(Self(projectors))
    }

    pub fn single(p: Projector) -> Self {
        Self(vec![p])
    }

    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.0
    }

    /// The full 2ⁿ×2ⁿ projector, first letter most significant.
    pub fn matrix(&self) -> ComplexMatrix {
        let mut m = self.0[0].matrix();
        for p in &self.0[1..] {
            m = m.kron(&p.matrix());
        }
        m
    }

    /// All 6ⁿ settings in canonical order (per-qubit order H,V,D,A,R,L,
    /// leftmost qubit slowest).
    pub fn all(n_qubits: usize) -> Vec<Setting> {
        assert!(n_qubits >= 1);
        let mut out: Vec<Vec<Projector>> = vec![vec![]];
        for _ in 0..n_qubits {
            let mut next = Vec::with_capacity(out.len() * 6);
            for prefix in &out {
                for p in Projector::ALL {
                    let mut s = prefix.clone();
                    s.push(p);
                    next.push(s);
                }
            }
            out = next;
        }
        out.into_iter().map(Setting).collect()
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Setting {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::UnknownSetting(s.to_string()));
        }
        let projectors = s
            .chars()
            .map(Projector::from_letter)
            .collect::<Result<Vec<_>>>()
            .map_err(|_| Error::UnknownSetting(s.to_string()))?;
        Setting::new(projectors)
    }
}

/// One measurement setting with its observed count and trial total.
///
/// Counts are stored as `f64`: detector events are integers, but exact
/// expected counts (`shots · p`) are routinely fed through the same code
/// path when validating fits on noiseless data.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub setting: Setting,
    pub count: f64,
    pub shots: u64,
}

impl MeasurementRecord {
    pub fn new(setting: Setting, count: f64, shots: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::ZeroShots(setting.to_string()));
        }
        if !count.is_finite() || count < 0.0 {
            if count.is_finite() {
                return Err(Error::NegativeCount {
                    setting: setting.to_string(),
                    count,
                });
            }
            return Err(Error::NonFinite { context: "count" });
        }
        if count > shots as f64 {
            return Err(Error::CountExceedsShots {
                setting: setting.to_string(),
                count,
                shots,
            });
        }
        Ok(Self {
            setting,
            count,
            shots,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.count / self.shots as f64
    }
}

/// An informationally complete set of records: all 6ⁿ tensor settings,
/// each exactly once.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    n_qubits: usize,
    records: Vec<MeasurementRecord>,
}

impl MeasurementSet {
    pub fn new(n_qubits: usize, records: Vec<MeasurementRecord>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::ZeroQubits);
        }
        let mut seen: HashMap<Setting, ()> = HashMap::new();
        for r in &records {
            if r.setting.n_qubits() != n_qubits {
                return Err(Error::UnknownSetting(r.setting.to_string()));
            }
            if seen.insert(r.setting.clone(), ()).is_some() {
                return Err(Error::DuplicateSetting(r.setting.to_string()));
            }
        }
        for s in Setting::all(n_qubits) {
            if !seen.contains_key(&s) {
                return Err(Error::MissingSetting(s.to_string()));
            }
        }
        Ok(Self { n_qubits, records })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn records(&self) -> &[MeasurementRecord] {
        &self.records
    }

    pub fn min_shots(&self) -> u64 {
        self.records.iter().map(|r| r.shots).min().unwrap_or(0)
    }

    pub fn frequency(&self, setting: &Setting) -> Result<f64> {
        self.records
            .iter()
            .find(|r| &r.setting == setting)
            .map(MeasurementRecord::frequency)
            .ok_or_else(|| Error::MissingSetting(setting.to_string()))
    }
}

/// A Stokes estimate from counts, flagged when the raw difference
/// frequencies had to be rescaled onto the unit ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StokesEstimate {
    pub vector: StokesVector,
    pub clamped: bool,
}

/// Difference-frequency estimator ŝ = (p̂_D−p̂_A, p̂_R−p̂_L, p̂_H−p̂_V),
/// radially clamped onto the ball if sampling noise pushed it outside.
pub fn estimate_stokes(set: &MeasurementSet) -> Result<StokesEstimate> {
    if set.n_qubits() != 1 {
        return Err(Error::SingleQubitOnly("Stokes estimation"));
    }
    let f = |p: Projector| set.frequency(&Setting::single(p));
    let s1 = f(Projector::D)? - f(Projector::A)?;
    let s2 = f(Projector::R)? - f(Projector::L)?;
    let s3 = f(Projector::H)? - f(Projector::V)?;
    let (vector, clamped) = StokesVector::clamped(s1, s2, s3)?;
    Ok(StokesEstimate { vector, clamped })
}

/// pᵥ = Tr(ρ Πᵥ) for each requested setting.
pub fn born_probabilities(rho: &DensityMatrix, settings: &[Setting]) -> Result<Vec<f64>> {
    settings
        .iter()
        .map(|s| born_probability(rho, s))
        .collect()
}

pub fn born_probability(rho: &DensityMatrix, setting: &Setting) -> Result<f64> {
    let proj = setting.matrix();
    if proj.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: proj.dim(),
        });
    }
    Ok(trace_product_re(rho.matrix(), &proj))
}

/// Re Tr(a·b) without forming the product matrix.
pub(crate) fn trace_product_re(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for k in 0..n {
            sum += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    sum
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw binomial counts for every canonical setting.
///
/// Each setting gets its own generator seeded from (`seed`, setting index),
/// so results are bit-exact for a fixed seed and independent of any
/// parallel evaluation order.
pub fn sample_counts(rho: &DensityMatrix, shots_per_setting: u64, seed: u64) -> Result<MeasurementSet> {
    let n_qubits = rho.dim().trailing_zeros() as usize;
    if 1usize << n_qubits != rho.dim() || n_qubits == 0 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 1 << n_qubits.max(1),
        });
    }
    if shots_per_setting == 0 {
        return Err(Error::ZeroShots("all".to_string()));
    }
    let mut records = Vec::new();
    for (idx, setting) in Setting::all(n_qubits).into_iter().enumerate() {
        let p = born_probability(rho, &setting)?.clamp(0.0, 1.0);
        let stream = splitmix64(seed ^ splitmix64(idx as u64));
        let mut rng = Pcg64Mcg::seed_from_u64(stream);
        let mut count: u64 = 0;
        for _ in 0..shots_per_setting {
            if rng.gen::<f64>() < p {
                count += 1;
            }
        }
        records.push(MeasurementRecord::new(
            setting,
            count as f64,
            shots_per_setting,
        )?);
    }
    MeasurementSet::new(n_qubits, records)
}

/// Exact expected counts (`shots · p`) for every canonical setting; the
/// noiseless counterpart of [`sample_counts`].
pub fn expected_counts(rho: &DensityMatrix, shots_per_setting: u64) -> Result<MeasurementSet> {
    let n_qubits = rho.dim().trailing_zeros() as usize;
    if 1usize << n_qubits != rho.dim() || n_qubits == 0 {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: 2,
        });
    }
    if shots_per_setting == 0 {
        return Err(Error::ZeroShots("all".to_string()));
    }
    let mut records = Vec::new();
    for setting in Setting::all(n_qubits) {
        let p = born_probability(rho, &setting)?.clamp(0.0, 1.0);
        records.push(MeasurementRecord::new(
            setting,
            shots_per_setting as f64 * p,
            shots_per_setting,
        )?);
    }
    MeasurementSet::new(n_qubits, records)
}

const PAULIS: [[[(f64, f64); 2]; 2]; 4] = [
    // I
    [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (1.0, 0.0)]],
    // X
    [[(0.0, 0.0), (1.0, 0.0)], [(1.0, 0.0), (0.0, 0.0)]],
    // Y
    [[(0.0, 0.0), (0.0, -1.0)], [(0.0, 1.0), (0.0, 0.0)]],
    // Z
    [[(1.0, 0.0), (0.0, 0.0)], [(0.0, 0.0), (-1.0, 0.0)]],
];

fn pauli_matrix(which: usize) -> ComplexMatrix {
    let entries = &PAULIS[which];
    let mut m = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = Complex64::new(entries[i][j].0, entries[i][j].1);
        }
    }
    m
}

/// Outcome pair measuring each Pauli axis: (+1 letter, −1 letter).
/// Identity slots read the computational pair with both outcomes positive.
fn axis_pair(which: usize) -> (Projector, Projector) {
    match which {
        0 | 3 => (Projector::H, Projector::V),
        1 => (Projector::D, Projector::A),
        2 => (Projector::R, Projector::L),
        _ => unreachable!(),
    }
}

/// Direct linear-inversion estimate ρ = 2⁻ⁿ Σ_w ⟨w⟩ σ_w over all Pauli
/// words w, with ⟨I…I⟩ fixed at 1.
///
/// The result is Hermitian with unit trace but may have slightly negative
/// eigenvalues; it exists to seed the multiqubit fit, not to be a state.
pub fn linear_inversion(set: &MeasurementSet) -> Result<ComplexMatrix> {
    let n = set.n_qubits();
    let dim = 1usize << n;
    let words = 4usize.pow(n as u32);
    let mut rho = ComplexMatrix::zeros(dim);

    for word in 0..words {
        // decode base-4 digits, leftmost qubit first
        let mut digits = vec![0usize; n];
        let mut w = word;
        for i in (0..n).rev() {
            digits[i] = w % 4;
            w /= 4;
        }

        let expectation = if word == 0 {
            1.0
        } else {
            // sum over outcome choices with product of per-slot signs
            let mut total = 0.0;
            for choice in 0..(1usize << n) {
                let mut sign = 1.0;
                let mut letters = Vec::with_capacity(n);
                for (i, &digit) in digits.iter().enumerate() {
                    let (plus, minus) = axis_pair(digit);
                    let take_minus = (choice >> i) & 1 == 1;
                    letters.push(if take_minus { minus } else { plus });
                    if digit != 0 && take_minus {
                        sign = -sign;
                    }
                }
                total += sign * set.frequency(&Setting::new(letters)?)?;
            }
            total
        };

        let mut op = pauli_matrix(digits[0]);
        for &digit in &digits[1..] {
            op = op.kron(&pauli_matrix(digit));
        }
        let weight = expectation / dim as f64;
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += op[(i, j)] * weight;
            }
        }
    }
    Ok(rho)
}
