//! The catalogue of T-matrix parameterizations.
//!
//! A 2×2 matrix with one corner zeroed and the two remaining same-row/column
//! entries real leaves exactly four real parameters, the right number for a
//! single-qubit density matrix plus one overall scale. Zeroing each of the
//! four corners in turn gives four structurally different layouts:
//!
//! ```text
//!   A: [[t1,      0],      B: [[t2, t3+it4],
//!       [t3+it4, t2]]          [0,       t1]]
//!
//!   C: [[0,      t1],      D: [[t2, t3+it4],
//!       [t3+it4, t2]]          [t1,       0]]
//! ```
//!
//! For every layout, ρ = T†T / Tr(T†T) is Hermitian, positive semidefinite
//! and trace-one for any nonzero real parameter vector, which is what makes
//! these parameterizations useful as unconstrained likelihood coordinates.
//!
//! Form B generalizes to n qubits as an upper-triangular 2ⁿ×2ⁿ matrix over
//! 4ⁿ parameters ([`FormId::BMulti`]); its diagonal runs t_{2ⁿ}, …, t₁ from
//! the top-left corner down, and the off-diagonal complex pairs fill
//! superdiagonals in ascending offset order, top row first, consuming
//! consecutive (real, imaginary) index pairs. [`FormId::AMulti`] is the
//! lower-triangular mirror: the same layout rotated by 180°, which reduces
//! to layout A at n = 1.

use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};

/// Identifier for one of the T-matrix layouts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormId {
    A,
    B,
    C,
    D,
    /// n-qubit lower-triangular layout; equals `A` at n = 1.
    AMulti,
    /// n-qubit upper-triangular layout; equals `B` at n = 1.
    BMulti,
}

impl FormId {
    /// Forms C and D exist only for a single qubit.
    pub fn single_qubit_only(self) -> bool {
        matches!(self, FormId::C | FormId::D)
    }

    pub fn is_multiqubit(self) -> bool {
        matches!(self, FormId::AMulti | FormId::BMulti)
    }

    pub const ALL_SINGLE: [FormId; 4] = [FormId::A, FormId::B, FormId::C, FormId::D];
}

impl fmt::Display for FormId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FormId::A => "A",
            FormId::B => "B",
            FormId::C => "C",
            FormId::D => "D",
            FormId::AMulti => "A_multi",
            FormId::BMulti => "B_multi",
        };
        f.write_str(s)
    }
}

impl FromStr for FormId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(FormId::A),
            "b" => Ok(FormId::B),
            "c" => Ok(FormId::C),
            "d" => Ok(FormId::D),
            "a_multi" | "amulti" => Ok(FormId::AMulti),
            "b_multi" | "bmulti" => Ok(FormId::BMulti),
            _ => Err(Error::UnknownSetting(s.to_string())),
        }
    }
}

/// Number of real parameters of an n-qubit T-matrix: 4ⁿ.
pub fn param_count(n_qubits: usize) -> Result<usize> {
    if n_qubits == 0 {
        return Err(Error::ZeroQubits);
    }
    4usize
        .checked_pow(u32::try_from(n_qubits).map_err(|_| Error::TooManyQubits(n_qubits))?)
        .ok_or(Error::TooManyQubits(n_qubits))
}

/// A form identifier together with its real parameter vector.
///
/// Validated on construction: the vector has length 4ⁿ, every entry is
/// finite, and the entries are not all zero (the T†T normalization divides
/// by their sum of squares).
#[derive(Clone, Debug, PartialEq)]
pub struct TParams {
    form: FormId,
    n_qubits: usize,
    values: Vec<f64>,
}

impl TParams {
    pub fn new(form: FormId, n_qubits: usize, values: Vec<f64>) -> Result<Self> {
        let expected = param_count(n_qubits)?;
        if form.single_qubit_only() && n_qubits != 1 {
            return Err(Error::FormArityMismatch { form, n_qubits });
        }
        if values.len() != expected {
            return Err(Error::BadParameterCount {
                expected,
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "T-matrix parameters",
            });
        }
        let sum_sq: f64 = values.iter().map(|v| v * v).sum();
        if !sum_sq.is_finite() {
            return Err(Error::NonFinite {
                context: "T-matrix parameter norm",
            });
        }
        if sum_sq <= 0.0 {
            return Err(Error::ZeroParameters);
        }
        Ok(Self {
            form,
            n_qubits,
            values,
        })
    }

    pub fn form(&self) -> FormId {
        self.form
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Matrix dimension 2ⁿ.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    /// Lay the parameters out as the form's T-matrix.
    pub fn t_matrix(&self) -> ComplexMatrix {
        build_t(self.form, self.n_qubits, &self.values)
    }

    /// ρ = T†T / Tr(T†T).
    pub fn density(&self) -> DensityMatrix {
        density_from_raw(self.form, self.n_qubits, &self.values)
            .expect("validated parameters always produce a density matrix")
    }
}

/// Upper-triangular layout shared by B and its n-qubit generalization.
fn upper_triangular(n_qubits: usize, values: &[f64]) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let mut m = ComplexMatrix::zeros(dim);
    for k in 0..dim {
        m[(k, k)] = Complex64::new(values[dim - 1 - k], 0.0);
    }
    let mut idx = dim;
    for offset in 1..dim {
        for row in 0..(dim - offset) {
            m[(row, row + offset)] = Complex64::new(values[idx], values[idx + 1]);
            idx += 2;
        }
    }
    debug_assert_eq!(idx, dim * dim);
    m
}

/// 180° rotation; maps the upper-triangular layout onto its lower mirror.
pub(crate) fn rotate_180(m: &ComplexMatrix) -> ComplexMatrix {
    let dim = m.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            out[(i, j)] = m[(dim - 1 - i, dim - 1 - j)];
        }
    }
    out
}

pub(crate) fn build_t(form: FormId, n_qubits: usize, values: &[f64]) -> ComplexMatrix {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    match form {
        FormId::A => ComplexMatrix::from_rows(&[
            vec![z(values[0], 0.0), z(0.0, 0.0)],
            vec![z(values[2], values[3]), z(values[1], 0.0)],
        ])
        .expect("fixed 2x2 layout"),
        FormId::B => ComplexMatrix::from_rows(&[
            vec![z(values[1], 0.0), z(values[2], values[3])],
            vec![z(0.0, 0.0), z(values[0], 0.0)],
        ])
        .expect("fixed 2x2 layout"),
        FormId::C => ComplexMatrix::from_rows(&[
            vec![z(0.0, 0.0), z(values[0], 0.0)],
            vec![z(values[2], values[3]), z(values[1], 0.0)],
        ])
        .expect("fixed 2x2 layout"),
        FormId::D => ComplexMatrix::from_rows(&[
            vec![z(values[1], 0.0), z(values[2], values[3])],
            vec![z(values[0], 0.0), z(0.0, 0.0)],
        ])
        .expect("fixed 2x2 layout"),
        FormId::BMulti => upper_triangular(n_qubits, values),
        FormId::AMulti => rotate_180(&upper_triangular(n_qubits, values)),
    }
}

/// Read parameters back off a triangular matrix in the form's layout;
/// exact inverse of [`build_t`] for `AMulti`/`BMulti`.
pub(crate) fn t_from_matrix(form: FormId, n_qubits: usize, t: &ComplexMatrix) -> Result<Vec<f64>> {
    let dim = 1usize << n_qubits;
    let source = match form {
        FormId::BMulti => t.clone(),
        FormId::AMulti => rotate_180(t),
        other => return Err(Error::NotMultiqubitForm(other)),
    };
    let mut values = vec![0.0; dim * dim];
    for k in 0..dim {
        values[dim - 1 - k] = source[(k, k)].re;
    }
    let mut idx = dim;
    for offset in 1..dim {
        for row in 0..(dim - offset) {
            let entry = source[(row, row + offset)];
            values[idx] = entry.re;
            values[idx + 1] = entry.im;
            idx += 2;
        }
    }
    Ok(values)
}

/// ρ from a raw parameter slice; `None` when the vector is identically zero.
pub(crate) fn density_from_raw(
    form: FormId,
    n_qubits: usize,
    values: &[f64],
) -> Option<DensityMatrix> {
    let t = build_t(form, n_qubits, values);
    let product = t.dagger().mul(&t).expect("square matrices");
    let norm = product.trace().re;
    if !norm.is_finite() || norm <= 0.0 {
        return None;
    }
    Some(DensityMatrix::from_construction(product.scale(1.0 / norm)))
}

/// Explicit closed-form density for the four single-qubit layouts,
/// evaluated without any matrix multiplication. Serves as an independent
/// oracle against [`TParams::density`].
pub fn closed_form_density(form: FormId, t: &[f64; 4]) -> Result<DensityMatrix> {
    if t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            context: "T-matrix parameters",
        });
    }
    let norm: f64 = t.iter().map(|v| v * v).sum();
    if norm <= 0.0 {
        return Err(Error::ZeroParameters);
    }
    let (t1, t2, t3, t4) = (t[0], t[1], t[2], t[3]);
    let z = |re: f64, im: f64| Complex64::new(re / norm, im / norm);
    let rows = match form {
        FormId::A => [
            vec![z(t1 * t1 + t3 * t3 + t4 * t4, 0.0), z(t2 * t3, -t2 * t4)],
            vec![z(t2 * t3, t2 * t4), z(t2 * t2, 0.0)],
        ],
        FormId::B => [
            vec![z(t2 * t2, 0.0), z(t2 * t3, t2 * t4)],
            vec![z(t2 * t3, -t2 * t4), z(t1 * t1 + t3 * t3 + t4 * t4, 0.0)],
        ],
        FormId::C => [
            vec![z(t3 * t3 + t4 * t4, 0.0), z(t2 * t3, -t2 * t4)],
            vec![z(t2 * t3, t2 * t4), z(t1 * t1 + t2 * t2, 0.0)],
        ],
        FormId::D => [
            vec![z(t1 * t1 + t2 * t2, 0.0), z(t2 * t3, t2 * t4)],
            vec![z(t2 * t3, -t2 * t4), z(t3 * t3 + t4 * t4, 0.0)],
        ],
        other => return Err(Error::NoClosedForm(other)),
    };
    let mat = ComplexMatrix::from_rows(&rows)?;
    Ok(DensityMatrix::from_construction(mat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn params(form: FormId, t: [f64; 4]) -> TParams {
        TParams::new(form, 1, t.to_vec()).unwrap()
    }

    #[test]
    fn layout_a() {
        let t = params(FormId::A, [1.0, 2.0, 3.0, 4.0]).t_matrix();
        assert_eq!(t[(0, 0)], c(1.0, 0.0));
        assert_eq!(t[(0, 1)], c(0.0, 0.0));
        assert_eq!(t[(1, 0)], c(3.0, 4.0));
        assert_eq!(t[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn layout_b_multi_n1() {
        let t = TParams::new(FormId::BMulti, 1, vec![1.0, 2.0, 3.0, 4.0])
            .unwrap()
            .t_matrix();
        assert_eq!(t[(0, 0)], c(2.0, 0.0));
        assert_eq!(t[(0, 1)], c(3.0, 4.0));
        assert_eq!(t[(1, 0)], c(0.0, 0.0));
        assert_eq!(t[(1, 1)], c(1.0, 0.0));
        // identical to the single-qubit B layout
        let b = params(FormId::B, [1.0, 2.0, 3.0, 4.0]).t_matrix();
        assert_eq!(t, b);
    }

    #[test]
    fn layout_a_multi_n1_matches_a() {
        let a_multi = TParams::new(FormId::AMulti, 1, vec![1.0, 2.0, 3.0, 4.0])
            .unwrap()
            .t_matrix();
        let a = params(FormId::A, [1.0, 2.0, 3.0, 4.0]).t_matrix();
        assert_eq!(a_multi, a);
    }

    #[test]
    fn layout_b_multi_n2() {
        let values: Vec<f64> = (1..=16).map(f64::from).collect();
        let t = TParams::new(FormId::BMulti, 2, values).unwrap().t_matrix();
        // diagonal t4, t3, t2, t1
        assert_eq!(t[(0, 0)], c(4.0, 0.0));
        assert_eq!(t[(1, 1)], c(3.0, 0.0));
        assert_eq!(t[(2, 2)], c(2.0, 0.0));
        assert_eq!(t[(3, 3)], c(1.0, 0.0));
        // first superdiagonal: (t5,t6), (t7,t8), (t9,t10)
        assert_eq!(t[(0, 1)], c(5.0, 6.0));
        assert_eq!(t[(1, 2)], c(7.0, 8.0));
        assert_eq!(t[(2, 3)], c(9.0, 10.0));
        // second: (t11,t12), (t13,t14); third: (t15,t16)
        assert_eq!(t[(0, 2)], c(11.0, 12.0));
        assert_eq!(t[(1, 3)], c(13.0, 14.0));
        assert_eq!(t[(0, 3)], c(15.0, 16.0));
        // strictly lower part vanishes
        for i in 0..4 {
            for j in 0..i {
                assert_eq!(t[(i, j)], c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn t_from_matrix_inverts_build() {
        let values: Vec<f64> = (1..=16).map(f64::from).collect();
        for form in [FormId::BMulti, FormId::AMulti] {
            let p = TParams::new(form, 2, values.clone()).unwrap();
            let back = t_from_matrix(form, 2, &p.t_matrix()).unwrap();
            assert_eq!(back, values);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            TParams::new(FormId::C, 2, vec![0.0; 16]),
            Err(Error::FormArityMismatch { .. })
        ));
        assert!(matches!(
            TParams::new(FormId::D, 2, vec![1.0; 16]),
            Err(Error::FormArityMismatch { .. })
        ));
        assert!(matches!(
            TParams::new(FormId::B, 1, vec![0.0; 4]),
            Err(Error::ZeroParameters)
        ));
        assert!(matches!(
            TParams::new(FormId::B, 1, vec![1.0; 3]),
            Err(Error::BadParameterCount { .. })
        ));
        assert!(matches!(
            TParams::new(FormId::B, 1, vec![1.0, f64::NAN, 0.0, 0.0]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn density_examples() {
        // lone t1 in layout A picks out |0⟩⟨0|
        let rho = params(FormId::A, [1.0, 0.0, 0.0, 0.0]).density();
        assert_eq!(rho.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(rho.matrix()[(1, 1)], c(0.0, 0.0));

        // lone t1 in layout B picks out |1⟩⟨1|, exactly
        let rho = params(FormId::B, [1.0, 0.0, 0.0, 0.0]).density();
        assert_eq!(rho.matrix()[(0, 0)], c(0.0, 0.0));
        assert_eq!(rho.matrix()[(0, 1)], c(0.0, 0.0));
        assert_eq!(rho.matrix()[(1, 0)], c(0.0, 0.0));
        assert_eq!(rho.matrix()[(1, 1)], c(1.0, 0.0));

        // all-ones layout A: (1/4)[[3, 1-i], [1+i, 1]]
        let rho = params(FormId::A, [1.0, 1.0, 1.0, 1.0]).density();
        let expect = ComplexMatrix::from_rows(&[
            vec![c(0.75, 0.0), c(0.25, -0.25)],
            vec![c(0.25, 0.25), c(0.25, 0.0)],
        ])
        .unwrap();
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn closed_form_examples() {
        let rho = closed_form_density(FormId::C, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let expect = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);

        let rho = closed_form_density(FormId::D, &[0.0, 1.0, 0.0, -1.0]).unwrap();
        let expect = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(0.5, 0.0)],
        ])
        .unwrap();
        assert!(rho.matrix().max_abs_diff(&expect) < 1e-15);

        let rho = closed_form_density(FormId::B, &[1.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(
            rho.matrix()
                .max_abs_diff(&ComplexMatrix::identity(2).scale(0.5))
                < 1e-15
        );

        assert!(matches!(
            closed_form_density(FormId::BMulti, &[1.0, 1.0, 0.0, 0.0]),
            Err(Error::NoClosedForm(_))
        ));
        assert!(matches!(
            closed_form_density(FormId::A, &[0.0; 4]),
            Err(Error::ZeroParameters)
        ));
    }

    #[test]
    fn closed_form_agrees_with_product_on_fixed_grid() {
        // spot-check the oracle pair on a deterministic set of vectors;
        // the acceptance suite covers 10k random draws per form
        let grid = [-2.0, -0.5, 0.0, 0.5, 1.0, 3.0];
        for form in FormId::ALL_SINGLE {
            for &a in &grid {
                for &b in &grid {
                    let t = [a, b, 1.0 - a, 0.5 * b + 0.25];
                    if t.iter().map(|v| v * v).sum::<f64>() == 0.0 {
                        continue;
                    }
                    let via_product = params(form, t).density();
                    let via_closed = closed_form_density(form, &t).unwrap();
                    assert!(
                        via_product.matrix().max_abs_diff(via_closed.matrix()) < 1e-14,
                        "form {form} t {t:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn param_counts() {
        assert_eq!(param_count(1).unwrap(), 4);
        assert_eq!(param_count(2).unwrap(), 16);
        assert_eq!(param_count(3).unwrap(), 64);
        assert!(matches!(param_count(0), Err(Error::ZeroQubits)));
    }

    #[test]
    fn form_id_parsing() {
        assert_eq!("a".parse::<FormId>().unwrap(), FormId::A);
        assert_eq!("B_multi".parse::<FormId>().unwrap(), FormId::BMulti);
        assert!("E".parse::<FormId>().is_err());
    }
}
