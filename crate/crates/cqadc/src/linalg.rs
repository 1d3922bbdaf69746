//! Dense complex matrices sized for multi-qubit block computations.
//!
//! Everything downstream works with operators on spaces of dimension at most
//! a few hundred (blocks of up to seven qubits, i.e. dimension 128), so a
//! simple row-major dense representation is the right tool. Matrix products
//! go through a BLAS-grade complex GEMM kernel and Hermitian
//! eigendecompositions through a dedicated tridiagonalization-based solver;
//! both were chosen because the certified-optimality pipeline needs
//! eigendecompositions accurate to well below `1e-10` at dimension 128.
//!
//! Matrices are immutable after construction: all operations return new
//! values, which keeps every public type `Send + Sync` and makes results
//! reproducible run to run.

use num_complex::Complex64;

use crate::{Error, Result};

/// Hard cap on the dimension of any operator built by [`ComplexMatrix::kron`].
///
/// Tensor-product dimensions grow exponentially in the block length; this
/// guard (2^14) rejects products that would silently exhaust memory while
/// still allowing blocks well beyond the seven qubits the bundled codes use.
pub const MAX_KRON_DIM: usize = 1 << 14;

/// Tolerance on `‖a − a†‖_F` below which a matrix is accepted as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Dense complex matrix, row-major, immutable after construction.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and sorted in descending order; `eigenvectors`
/// holds the matching orthonormal eigenvectors as its columns, so
/// `a ≈ V diag(λ) V†`.
#[derive(Clone)]
pub struct HermitianSpectrum {
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose `k`-th column is the eigenvector for
    /// `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    ///
    /// Rejects empty shapes, shape/length mismatches, and non-finite
    /// entries; every matrix in the crate is finite by construction.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::validation(format!(
                "entry count {} does not match shape {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::validation("matrix entries must be finite"));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::validation("matrix must have at least one row"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("rows must all have the same length"));
        }
        let entries: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, entries)
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        let entries = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::new(rows, cols, entries)
    }

    /// The `n × n` zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    /// The `n × n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Rank-one projector `v v† / ⟨v|v⟩` onto a nonzero vector.
    pub fn outer_normalized(v: &[Complex64]) -> Result<Self> {
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 || !norm_sq.is_finite() {
            return Err(Error::validation(
                "projector vector must be nonzero and finite",
            ));
        }
        let n = v.len();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(v[i] * v[j].conj() / norm_sq);
            }
        }
        Self::new(n, n, entries)
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether the matrix is square.
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] = value;
    }

    pub(crate) fn add_assign_entry(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.cols + j] += value;
    }

    /// Matrix sum; dimensions must match.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Matrix difference; dimensions must match.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::validation(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Scalar multiple.
    pub fn scale(&self, factor: Complex64) -> Self {
        let entries = self.entries.iter().map(|&z| z * factor).collect();
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        }
    }

    /// Scalar multiple by a real factor.
    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Matrix product via the complex GEMM kernel.
    ///
    /// Inner dimensions must agree.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::validation(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let (m, k, n) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); m * n];
        // Safety: `Complex64` is layout-compatible with `[f64; 2]`
        // (documented by num-complex), the strides describe the row-major
        // buffers exactly, and the output buffer is sized `m * n`.
        unsafe {
            matrixmultiply::zgemm(
                matrixmultiply::CGemmOption::Standard,
                matrixmultiply::CGemmOption::Standard,
                m,
                k,
                n,
                [1.0, 0.0],
                self.entries.as_ptr() as *const [f64; 2],
                k as isize,
                1,
                other.entries.as_ptr() as *const [f64; 2],
                n as isize,
                1,
                [0.0, 0.0],
                out.as_mut_ptr() as *mut [f64; 2],
                n as isize,
                1,
            );
        }
        Ok(ComplexMatrix {
            rows: m,
            cols: n,
            entries: out,
        })
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` without forming the product.
    ///
    /// For `A`, `B` with compatible square shapes this is
    /// `Σ_ij A[i,j] B[j,i]`, an `O(n²)` contraction that the decoding and
    /// certification loops call far more often than full products.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::validation(format!(
                "trace of product undefined for {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += self[(i, j)] * other[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Frobenius norm `√Σ|a_ij|²`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entrywise absolute difference against another matrix of the
    /// same shape; panics on shape mismatch (intended for tests and
    /// assertions on matrices built to matching shapes).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "max_abs_diff requires matching shapes"
        );
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖a − a†‖_F`, the distance from the Hermitian cone used by all
    /// Hermiticity checks in the crate.
    pub fn hermiticity_defect(&self) -> f64 {
        assert!(
            self.is_square(),
            "hermiticity is defined for square matrices"
        );
        let mut acc = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Hermitian part `(a + a†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "hermitian part requires a square matrix");
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * self.cols + j] = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
            }
        }
        out
    }

    /// Kronecker product, left factor most significant: the result acts on
    /// the composite space with `self` on the leading tensor slot, so
    /// `(a ⊗ b)[(i_a·rows_b + i_b, j_a·cols_b + j_b)] = a[i_a,j_a]·b[i_b,j_b]`.
    ///
    /// Errors with [`Error::TooLarge`] if either output dimension would
    /// exceed [`MAX_KRON_DIM`].
    pub fn kron(&self, other: &Self) -> Result<Self> {
        let rows = self
            .rows
            .checked_mul(other.rows)
            .filter(|&r| r <= MAX_KRON_DIM)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "Kronecker product rows {}x{} exceed the {} limit",
                    self.rows, other.rows, MAX_KRON_DIM
                ))
            })?;
        let cols = self
            .cols
            .checked_mul(other.cols)
            .filter(|&c| c <= MAX_KRON_DIM)
            .ok_or_else(|| {
                Error::TooLarge(format!(
                    "Kronecker product cols {}x{} exceed the {} limit",
                    self.cols, other.cols, MAX_KRON_DIM
                ))
            })?;
        let mut entries = vec![Complex64::new(0.0, 0.0); rows * cols];
        for ia in 0..self.rows {
            for ja in 0..self.cols {
                let a = self[(ia, ja)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for ib in 0..other.rows {
                    let row = ia * other.rows + ib;
                    let base = row * cols + ja * other.cols;
                    for jb in 0..other.cols {
                        entries[base + jb] = a * other[(ib, jb)];
                    }
                }
            }
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Eigendecomposition of a Hermitian matrix.
    ///
    /// The input must be square with Hermiticity defect at most
    /// [`HERMITICITY_TOL`]; it is then explicitly symmetrized before the
    /// decomposition so roundoff-level asymmetry cannot leak into the
    /// spectrum. Eigenvalues come back sorted in descending order with the
    /// eigenvector columns permuted to match.
    pub fn hermitian_eig(&self) -> Result<HermitianSpectrum> {
        if !self.is_square() {
            return Err(Error::validation(
                "eigendecomposition requires a square matrix",
            ));
        }
        let defect = self.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (defect {:.3e})",
                defect
            )));
        }
        let n = self.rows;
        let h = self.hermitian_part();
        let fa = faer::Mat::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = fa
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| Error::validation("eigendecomposition failed to converge"))?;

        // faer returns eigenvalues in nondecreasing order; flip to the
        // descending convention used throughout this crate.
        let u = eig.U();
        let s = eig.S();
        let eigenvalues: Vec<f64> = (0..n).map(|k| s[n - 1 - k].re).collect();
        let mut vectors = ComplexMatrix::zeros(n, n);
        for dst in 0..n {
            let src = n - 1 - dst;
            for i in 0..n {
                vectors.set(i, dst, u[(i, src)]);
            }
        }
        Ok(HermitianSpectrum {
            eigenvalues,
            eigenvectors: vectors,
        })
    }

    /// Trace norm `‖a‖₁ = Σ|λ_i|` of a Hermitian matrix.
    pub fn trace_norm(&self) -> Result<f64> {
        let spectrum = self.hermitian_eig()?;
        Ok(spectrum.eigenvalues.iter().map(|l| l.abs()).sum())
    }

    /// Whether a Hermitian matrix is positive semidefinite up to `tol`:
    /// every eigenvalue must be at least `-tol`.
    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        let spectrum = self.hermitian_eig()?;
        Ok(spectrum.min_eigenvalue() >= -tol)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl HermitianSpectrum {
    /// Smallest eigenvalue (the last one, given descending order).
    pub fn min_eigenvalue(&self) -> f64 {
        *self
            .eigenvalues
            .last()
            .expect("spectra always carry at least one eigenvalue")
    }

    /// Reassembles `Σ_k f(λ_k) v_k v_k†` for a real spectral function `f`.
    ///
    /// This is how the crate computes operator functions (inverse square
    /// roots, support projectors) without a general matrix-function
    /// library.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.eigenvectors[(i, k)] * w;
                for j in 0..n {
                    out.add_assign_entry(i, j, vi * self.eigenvectors[(j, k)].conj());
                }
            }
        }
        out
    }
}
