//! Dense complex-matrix kernel: Hermitian eigendecomposition, operator
//! functions, tensor products, partial traces.
//!
//! Matrices are row-major over `Complex<f64>`. The eigensolver is a cyclic
//! Jacobi iteration specialized to Hermitian input, which is simple and very
//! accurate at the dimensions this crate targets (d ≤ 64 for single systems,
//! a few thousand for materialized tensor powers).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

pub type C64 = num_complex::Complex<f64>;

/// Deviation from Hermiticity tolerated by `eigh` and validators.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Off-diagonal Frobenius norm (relative to scale) at which Jacobi stops.
pub const OFF_DIAG_TARGET: f64 = 1e-12;
/// Jacobi sweep cap.
pub const MAX_SWEEPS: usize = 100;
/// Eigenvalues in `[-EIG_CLIP, 0)` are treated as exact zeros; anything
/// further negative is an error for positive-semidefinite operations.
pub const EIG_CLIP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("eigensolver hit the sweep cap with off-diagonal norm {0:.3e}")]
    ConvergenceFailure(f64),
    #[error("eigenvalue {0:.6e} is below the positive-semidefinite clip")]
    NegativeEigenvalue(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("partial trace keep set is empty")]
    EmptyKeepSet,
    #[error("entries must be finite")]
    NonFinite,
}

pub type Result<T> = core::result::Result<T, MatrixError>;

/// Complex column vector; carrier for pure states, codewords and purifications.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<C64>,
}

impl ComplexVector {
    pub fn new(data: Vec<C64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![C64::new(0.0, 0.0); dim],
        }
    }

    /// Computational basis state |index⟩.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(reals: &[f64]) -> Self {
        Self {
            data: reals.iter().map(|&r| C64::new(r, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n <= 0.0 {
            return self.clone();
        }
        self.scale(C64::new(1.0 / n, 0.0))
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &ComplexVector) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &ComplexVector) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexVector) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &ComplexVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    /// Projector |self⟩⟨self|.
    pub fn projector(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] = self.data[i] * self.data[j].conj();
            }
        }
        m
    }
}

impl core::ops::Index<usize> for ComplexVector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl core::ops::IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.data[i]
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting length mismatches
    /// and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(MatrixError::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(entries: &[f64]) -> Self {
        let d = entries.len();
        let mut m = Self::zeros(d, d);
        for (i, &x) in entries.iter().enumerate() {
            m.data[i * d + i] = C64::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector::new((0..self.rows).map(|i| self.data[i * self.cols + j]).collect())
    }

    pub fn add(&self, other: &ComplexMatrix) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &ComplexMatrix) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            for l in 0..k {
                let a = self.data[i * k + l];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[l * m..(l + 1) * m];
                let dst = &mut out.data[i * m..(i + 1) * m];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        debug_assert_eq!(self.cols, v.dim());
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * v.data[j];
            }
            out.data[i] = acc;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| {
            self.data[j * self.cols + i].conj()
        })
    }

    pub fn trace(&self) -> C64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Tr(self · other) for square matrices of equal dimension; O(n²).
    pub fn trace_prod(&self, other: &ComplexMatrix) -> C64 {
        debug_assert_eq!((self.rows, self.cols), (other.cols, other.rows));
        let n = self.rows;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..self.cols {
                acc += self.data[i * self.cols + j] * other.data[j * n + i];
            }
        }
        acc
    }

    /// ⟨v|M|v⟩.
    pub fn quad_form(&self, v: &ComplexVector) -> C64 {
        v.inner(&self.mul_vec(v))
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|c| libm::hypot(c.re, c.im))
            .fold(0.0, f64::max)
    }

    /// ‖self − other‖_max.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::hypot(a.re - b.re, a.im - b.im))
            .fold(0.0, f64::max)
    }

    /// ‖self − self†‖_max; zero for exactly Hermitian input.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i].conj();
                worst = worst.max(libm::hypot(a.re - b.re, a.im - b.im));
            }
        }
        worst
    }
}

impl core::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigensystem of a Hermitian matrix: eigenvalues ascending, eigenvectors as
/// the columns of a unitary matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// V f(Λ) V†.
    pub fn apply_fn(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let flambda = f(lambda);
            if flambda == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v.data[i * n + k] * flambda;
                for j in 0..n {
                    out.data[i * n + j] += vik * v.data[j * n + k].conj();
                }
            }
        }
        out
    }

    /// VΛV†, for round-trip checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come back ascending; the accumulated rotations form a unitary
/// whose columns are the eigenvectors. Errors on non-square or non-Hermitian
/// input and when the sweep cap is hit before the off-diagonal norm target.
pub fn eigh(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare(m.rows, m.cols));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(MatrixError::NotHermitian(defect));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    // Work on the Hermitian average so the iteration sees an exactly
    // Hermitian matrix even when the input drifts within tolerance.
    let mut a: Vec<C64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            (m.data[i * n + j] + m.data[j * n + i].conj()) * 0.5
        })
        .collect();
    let mut v = ComplexMatrix::identity(n);

    let scale = m.max_abs().max(1.0);
    let target = OFF_DIAG_TARGET * scale;

    let off_norm = |a: &[C64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                acc += 2.0 * a[i * n + j].norm_sqr();
            }
        }
        libm::sqrt(acc)
    };

    let mut off = off_norm(&a);
    let mut sweeps = 0;
    while off > target {
        if sweeps >= MAX_SWEEPS {
            return Err(MatrixError::ConvergenceFailure(off));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let r = libm::hypot(apq.re, apq.im);
                if r <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let u = apq / r; // e^{iφ}
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                let su = u * s;

                // B = A·G (columns p, q).
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * c - akq * su.conj();
                    a[k * n + q] = akp * su + akq * c;
                }
                // A' = G†·B (rows p, q).
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = apk * c - aqk * su;
                    a[q * n + k] = apk * su.conj() + aqk * c;
                }
                // Pin the rotated pair to its analytic values.
                a[p * n + q] = C64::new(0.0, 0.0);
                a[q * n + p] = C64::new(0.0, 0.0);
                a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

                // V ← V·G.
                for k in 0..n {
                    let vkp = v.data[k * n + p];
                    let vkq = v.data[k * n + q];
                    v.data[k * n + p] = vkp * c - vkq * su.conj();
                    v.data[k * n + q] = vkp * su + vkq * c;
                }
            }
        }
        sweeps += 1;
        off = off_norm(&a);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap_or(core::cmp::Ordering::Equal));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v.data[i * n + order[j]]);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Operator function f applied in the eigenbasis: V f(Λ) V†.
pub fn matrix_func(m: &ComplexMatrix, f: impl FnMut(f64) -> f64) -> Result<ComplexMatrix> {
    Ok(eigh(m)?.apply_fn(f))
}

/// Base-2 operator logarithm of a positive-semidefinite Hermitian matrix,
/// computed on the support only: zero eigenvalues (after clipping) map to 0
/// in the function slot, so the caller combines with projectors to make
/// ρ log ρ vanish on the kernel.
pub fn matrix_log2(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eigh(m)?;
    if spec.min_eigenvalue() < -EIG_CLIP {
        return Err(MatrixError::NegativeEigenvalue(spec.min_eigenvalue()));
    }
    Ok(spec.apply_fn(|x| if x > 0.0 { libm::log2(x) } else { 0.0 }))
}

/// Kronecker product a ⊗ b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = (a.rows, a.cols);
    let (rb, cb) = (b.rows, b.cols);
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let aij = a.data[i * ca + j];
            if aij.re == 0.0 && aij.im == 0.0 {
                continue;
            }
            for k in 0..rb {
                for l in 0..cb {
                    out.data[(i * rb + k) * (ca * cb) + (j * cb + l)] = aij * b.data[k * cb + l];
                }
            }
        }
    }
    out
}

/// Partial trace of a square matrix over the factors *not* listed in `keep`.
///
/// `dims` gives the tensor-factor dimensions (their product must match the
/// matrix dimension); `keep` lists factor indices to retain, in any order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(MatrixError::NotSquare(m.rows, m.cols));
    }
    let total: usize = dims.iter().product();
    if total != m.rows {
        return Err(MatrixError::DimensionMismatch(format!(
            "factor dimensions multiply to {}, matrix is {}",
            total, m.rows
        )));
    }
    if keep.is_empty() {
        return Err(MatrixError::EmptyKeepSet);
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.iter().any(|&f| f >= dims.len()) {
        return Err(MatrixError::DimensionMismatch(format!(
            "keep set references factor {} of {}",
            keep.iter().max().unwrap(),
            dims.len()
        )));
    }

    let strides: Vec<usize> = {
        let mut s = vec![1usize; dims.len()];
        for f in (0..dims.len().saturating_sub(1)).rev() {
            s[f] = s[f + 1] * dims[f + 1];
        }
        s
    };
    let traced: Vec<usize> = (0..dims.len()).filter(|f| !keep.contains(f)).collect();
    let dk: usize = keep.iter().map(|&f| dims[f]).product();
    let dt: usize = traced.iter().map(|&f| dims[f]).product();

    // Offset of every kept (resp. traced) multi-index inside the full index.
    let offsets = |factors: &[usize], count: usize| -> Vec<usize> {
        let mut out = vec![0usize; count];
        for (idx, slot) in out.iter_mut().enumerate() {
            let mut rem = idx;
            let mut acc = 0usize;
            for &f in factors.iter().rev() {
                acc += (rem % dims[f]) * strides[f];
                rem /= dims[f];
            }
            *slot = acc;
        }
        out
    };
    let kept_off = offsets(&keep, dk);
    let traced_off = offsets(&traced, dt);

    let mut out = ComplexMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += m.data[(kept_off[i] + t) * m.cols + (kept_off[j] + t)];
            }
            out.data[i * dk + j] = acc;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_hermitian(n: usize, rng: &mut SplitMix64) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |_, _| rng.next_c64_gaussian());
        g.add(&g.adjoint()).scale_re(0.5)
    }

    #[test]
    fn eigh_diagonal_input() {
        let m = ComplexMatrix::diag(&[3.0, 1.0]);
        let s = eigh(&m).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-12);
        // Eigenvectors are a permuted identity.
        let v = &s.eigenvectors;
        assert!((v[(1, 0)].re.abs() - 1.0).abs() < 1e-12);
        assert!((v[(0, 1)].re.abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_pauli_x() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let s = eigh(&m).unwrap();
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((s.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_random_8x8_reconstructs() {
        let mut rng = SplitMix64::new(7);
        let m = random_hermitian(8, &mut rng);
        let s = eigh(&m).unwrap();
        assert!(s.reconstruct().max_abs_diff(&m) < 1e-9);
        // Ascending order.
        for w in s.eigenvalues.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
        // Unitarity of the eigenvector matrix.
        let v = &s.eigenvectors;
        let gram = v.adjoint().mul(v);
        assert!(gram.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-10);
    }

    #[test]
    fn eigh_round_trip_sweep_up_to_32() {
        let mut rng = SplitMix64::new(0xfeed);
        for trial in 0..1000 {
            let n = 2 + (trial % 31);
            let m = random_hermitian(n, &mut rng);
            let s = eigh(&m).unwrap();
            let err = s.reconstruct().max_abs_diff(&m);
            assert!(err < 1e-9, "round-trip error {err:.3e} at n={n}");
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(matches!(eigh(&m), Err(MatrixError::NotHermitian(_))));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigh(&r), Err(MatrixError::NotSquare(2, 3))));
    }

    #[test]
    fn log2_of_identity_is_zero() {
        let m = ComplexMatrix::identity(5);
        assert!(matrix_log2(&m).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn log2_of_diagonal() {
        let m = ComplexMatrix::diag(&[0.5, 0.5]);
        let l = matrix_log2(&m).unwrap();
        assert!(l.max_abs_diff(&ComplexMatrix::diag(&[-1.0, -1.0])) < 1e-12);

        let m = ComplexMatrix::diag(&[0.25, 0.75]);
        let l = matrix_log2(&m).unwrap();
        let expect = ComplexMatrix::diag(&[-2.0, libm::log2(0.75)]);
        assert!(l.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn log2_rejects_negative_eigenvalue() {
        let m = ComplexMatrix::diag(&[2.0, -1.0]);
        assert!(matches!(
            matrix_log2(&m),
            Err(MatrixError::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn log2_exponentiates_back_on_support() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..20 {
            let g = ComplexMatrix::from_fn(4, 4, |_, _| rng.next_c64_gaussian());
            let psd = g.mul(&g.adjoint());
            let psd = psd.scale_re(1.0 / psd.trace().re);
            let l = matrix_log2(&psd).unwrap();
            let back = matrix_func(&l, libm::exp2).unwrap();
            assert!(back.max_abs_diff(&psd) < 1e-8);
        }
    }

    #[test]
    fn tensor_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert!(tensor(&i2, &i2).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);

        let p = ComplexMatrix::diag(&[1.0, 0.0]);
        let expect = ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]);
        assert!(tensor(&p, &p).max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn tensor_matches_index_formula() {
        let mut rng = SplitMix64::new(11);
        let a = ComplexMatrix::from_fn(2, 2, |_, _| rng.next_c64_gaussian());
        let b = ComplexMatrix::from_fn(2, 2, |_, _| rng.next_c64_gaussian());
        let t = tensor(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    for l in 0..2 {
                        let direct = a[(i, j)] * b[(k, l)];
                        let got = t[(i * 2 + k, j * 2 + l)];
                        assert!((direct - got).norm_sqr() < 1e-24);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_is_associative() {
        let mut rng = SplitMix64::new(12);
        let a = ComplexMatrix::from_fn(2, 2, |_, _| rng.next_c64_gaussian());
        let b = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_c64_gaussian());
        let c = ComplexMatrix::from_fn(2, 2, |_, _| rng.next_c64_gaussian());
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        // Entrywise products agree to the last rounding step.
        assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn partial_trace_product_state() {
        let mut rng = SplitMix64::new(21);
        let a = {
            let g = ComplexMatrix::from_fn(2, 2, |_, _| rng.next_c64_gaussian());
            g.mul(&g.adjoint())
        };
        let b = {
            let g = ComplexMatrix::from_fn(3, 3, |_, _| rng.next_c64_gaussian());
            g.mul(&g.adjoint())
        };
        let ab = tensor(&a, &b);
        let got = partial_trace(&ab, &[2, 3], &[0]).unwrap();
        let expect = a.scale(b.trace());
        assert!(got.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn partial_trace_epr_marginal_is_maximally_mixed() {
        let mut epr = ComplexVector::zeros(4);
        epr[0] = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        epr[3] = C64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        let rho = epr.projector();
        let marg = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(marg.max_abs_diff(&ComplexMatrix::identity(2).scale_re(0.5)) < 1e-12);
    }

    #[test]
    fn partial_trace_three_factors_matches_contraction() {
        let mut rng = SplitMix64::new(31);
        let dims = [2usize, 3, 2];
        let total: usize = dims.iter().product();
        let g = ComplexMatrix::from_fn(total, total, |_, _| rng.next_c64_gaussian());
        let m = g.add(&g.adjoint()).scale_re(0.5);
        let got = partial_trace(&m, &dims, &[0, 2]).unwrap();

        // Brute-force index contraction over the middle factor.
        let mut expect = ComplexMatrix::zeros(4, 4);
        for i0 in 0..2 {
            for i2 in 0..2 {
                for j0 in 0..2 {
                    for j2 in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for t in 0..3 {
                            let r = i0 * 6 + t * 2 + i2;
                            let c = j0 * 6 + t * 2 + j2;
                            acc += m[(r, c)];
                        }
                        expect[(i0 * 2 + i2, j0 * 2 + j2)] = acc;
                    }
                }
            }
        }
        assert!(got.max_abs_diff(&expect) < 1e-12);
        // Trace preserved.
        assert!((got.trace() - m.trace()).norm_sqr() < 1e-24);
    }

    #[test]
    fn partial_trace_iterated_reduces_to_scalar_trace() {
        let mut rng = SplitMix64::new(41);
        let g = ComplexMatrix::from_fn(8, 8, |_, _| rng.next_c64_gaussian());
        let m = g.add(&g.adjoint()).scale_re(0.5);
        let step = partial_trace(&m, &[2, 2, 2], &[1]).unwrap();
        assert!((step.trace() - m.trace()).norm_sqr() < 1e-22);
    }

    #[test]
    fn partial_trace_rejects_bad_input() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[0]),
            Err(MatrixError::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[]),
            Err(MatrixError::EmptyKeepSet)
        ));
    }

    #[test]
    fn matrix_new_rejects_non_finite() {
        let bad = vec![C64::new(f64::NAN, 0.0); 4];
        assert!(matches!(
            ComplexMatrix::new(2, 2, bad),
            Err(MatrixError::NonFinite)
        ));
    }
}
