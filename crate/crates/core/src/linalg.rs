//! Small dense complex matrices and the Hermitian diagnostics the rest of
//! the crate relies on.
//!
//! Dimensions here are tiny powers of two (2ⁿ for n qubits, n ≤ a handful),
//! so every routine is a plain O(dim³) dense loop. The eigensolver is a
//! cyclic Jacobi sweep for Hermitian matrices; at these sizes it is both
//! faster to get right and easier to audit than anything more clever.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Shorthand constructor used throughout the crate and its tests.
#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from explicit rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch { left: 0, right: 1 });
        }
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: dim,
                });
            }
            for (j, &z) in row.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Standard matrix product.
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        let mut out = self.clone();
        for z in out.data.iter_mut() {
            *z *= factor;
        }
        out
    }

    /// Kronecker product, ordered so `self` indexes the most significant
    /// qubit block.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (n, m) = (self.dim, other.dim);
        let mut out = ComplexMatrix::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let aij = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = aij * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from the other matrix; dimensions must
    /// already agree.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise violation of `m[i][j] = conj(m[j][i])`.
    pub fn hermiticity_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermiticity_violation() <= tolerance
    }

    /// Sum of squared entry magnitudes; equals Tr(m²) for Hermitian m.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Determinant of a 2×2 matrix.
    pub fn det2(&self) -> Result<Complex64> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: 2,
            });
        }
        Ok(self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)])
    }

    /// Real spectrum of a Hermitian matrix, ascending.
    ///
    /// dim 1 and 2 use the closed form from trace and determinant; larger
    /// matrices run the Jacobi sweep.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(tol::STRUCTURAL) {
            return Err(Error::NotHermitian(self.hermiticity_violation()));
        }
        match self.dim {
            1 => Ok(vec![self[(0, 0)].re]),
            2 => {
                let a = self[(0, 0)].re;
                let d = self[(1, 1)].re;
                let mid = 0.5 * (a + d);
                let rad = (0.25 * (a - d) * (a - d) + self[(0, 1)].norm_sqr()).sqrt();
                Ok(vec![mid - rad, mid + rad])
            }
            _ => {
                let (vals, _) = self.jacobi_eigen()?;
                Ok(vals)
            }
        }
    }

    /// Full Hermitian eigendecomposition: ascending eigenvalues and the
    /// unitary whose columns are the matching eigenvectors.
    pub fn hermitian_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        if !self.is_hermitian(tol::STRUCTURAL) {
            return Err(Error::NotHermitian(self.hermiticity_violation()));
        }
        self.jacobi_eigen()
    }

    /// Cyclic Jacobi sweeps; assumes hermiticity was already checked.
    fn jacobi_eigen(&self) -> Result<(Vec<f64>, ComplexMatrix)> {
        let n = self.dim;
        let mut a = self.clone();
        let mut v = ComplexMatrix::identity(n);
        const MAX_SWEEPS: usize = 100;

        let off = |m: &ComplexMatrix| -> f64 {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        s += m[(i, j)].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };

        let mut residual = off(&a);
        let mut sweeps = 0;
        while residual > tol::JACOBI_OFF_DIAG {
            if sweeps >= MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    what: "Jacobi eigensolver",
                    residual,
                });
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r == 0.0 {
                        continue;
                    }
                    let phase = apq / r;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let tau = (aqq - app) / (2.0 * r);
                    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                    let cos = 1.0 / (1.0 + t * t).sqrt();
                    let sin = t * cos;
                    // Plane rotation G: G[p][p]=c, G[p][q]=s·phase,
                    // G[q][p]=-s·conj(phase), G[q][q]=c; a ← G† a G, v ← v G.
                    let s_ph = sin * phase;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = akp * cos - akq * s_ph.conj();
                        a[(k, q)] = akp * s_ph + akq * cos;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = apk * cos - aqk * s_ph;
                        a[(q, k)] = apk * s_ph.conj() + aqk * cos;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * cos - vkq * s_ph.conj();
                        v[(k, q)] = vkp * s_ph + vkq * cos;
                    }
                }
            }
            residual = off(&a);
            sweeps += 1;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
        let vals: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
        let mut vecs = ComplexMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                vecs[(row, new_col)] = v[(row, old_col)];
            }
        }
        Ok((vals, vecs))
    }

    /// Lower-triangular Cholesky factor L with L L† = self.
    ///
    /// The input must be Hermitian positive definite; a non-positive pivot
    /// is reported as a factorization failure.
    pub(crate) fn cholesky_lower(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let mut l = ComplexMatrix::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return Err(Error::FactorizationFailed(d));
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(l)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// A validated quantum state: Hermitian, trace one, positive semidefinite
/// within the shared tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validate and wrap an arbitrary matrix.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let herm = mat.hermiticity_violation();
        if herm > tol::STRUCTURAL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::STRUCTURAL || tr.im.abs() > tol::STRUCTURAL {
            return Err(Error::NotUnitTrace(tr.re));
        }
        let eigs = mat.hermitian_eigenvalues()?;
        if eigs[0] < -tol::SPECTRAL {
            return Err(Error::NotPositiveSemidefinite(eigs[0]));
        }
        Ok(Self { mat })
    }

    /// Wrap a matrix that is Hermitian PSD trace-one by construction
    /// (a normalized T†T product, or a Stokes expansion inside the ball).
    pub(crate) fn from_construction(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_violation() <= 1e-9);
        debug_assert!((mat.trace().re - 1.0).abs() <= 1e-9);
        Self { mat }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// Tr(ρ²); 1 exactly for pure states, 1/dim for the maximally mixed one.
    pub fn purity(&self) -> f64 {
        self.mat.frobenius_sq()
    }

    /// I/dim.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_construction(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// |k⟩⟨k| in the computational basis.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        assert!(k < dim);
        let mut m = ComplexMatrix::zeros(dim);
        m[(k, k)] = Complex64::new(1.0, 0.0);
        Self::from_construction(m)
    }
}

/// Agreement score in [0, 1] between two states.
///
/// When either state is rank-1 the exact pure-state expression
/// ⟨ψ|ρ|ψ⟩ = Tr(ab) is used; otherwise the superfidelity surrogate
/// Tr(ab) + √((1 − Tr a²)(1 − Tr b²)), which is a monotone agreement score
/// and exact for single qubits.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = a.dim();
    let mut overlap = 0.0;
    for i in 0..n {
        for k in 0..n {
            overlap += (a.matrix()[(i, k)] * b.matrix()[(k, i)]).re;
        }
    }
    let pa = a.purity();
    let pb = b.purity();
    let value = if pa >= tol::PURITY_PURE || pb >= tol::PURITY_PURE {
        overlap
    } else {
        overlap + ((1.0 - pa).max(0.0) * (1.0 - pb).max(0.0)).sqrt()
    };
    Ok(value.clamp(0.0, 1.0))
}

/// ½ Σ |eigenvalues of (a − b)|, in [0, 1].
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    let diff = a.matrix().sub(b.matrix())?;
    let eigs = diff.hermitian_eigenvalues()?;
    Ok(0.5 * eigs.iter().map(|l| l.abs()).sum::<f64>())
}
