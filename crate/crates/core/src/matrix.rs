//! Dense complex matrices, Hermitian eigendecomposition, von Neumann entropy
//! and majorization.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::{Error, Result};

/// Tolerance on `|rho - rho^dagger|` and `|tr rho - 1|` for a [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues in `[-EIGEN_FLOOR, 0)` are treated as round-off and clipped to zero.
pub const EIGEN_FLOOR: f64 = 1e-10;
/// Symmetry tolerance accepted by [`hermitian_eigs`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::BadParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch(data.len(), rows * cols));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Matrix unit `|row><col|` of shape `rows x cols`.
    pub fn unit(rows: usize, cols: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(row, col)] = ONE;
        m
    }

    /// Builds a matrix from nested real rows. Panics on ragged input; meant for tests and literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let c = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == c), "ragged rows");
        Self::from_fn(n, c, |i, j| Complex64::new(rows[i][j], 0.0))
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Real parts of the diagonal.
    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].re).collect()
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max |a_ij - b_ij|`; errors if the shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |H - H^dagger|`, or an error for non-square input.
    pub fn hermiticity_residual(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::dims("square matrix", self.shape_str()));
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        Ok(worst)
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                format!("{} rows on the right", self.cols),
                rhs.shape_str(),
            ));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self * rho * self^dagger`.
    pub fn conjugate(&self, rho: &Self) -> Result<Self> {
        self.matmul(rho)?.matmul(&self.adjoint())
    }

    /// Integer power of a square matrix.
    pub fn pow(&self, exp: usize) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::dims("square matrix", self.shape_str()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..exp {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Block-diagonal direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self[(r, c)];
            }
        }
        for r in 0..other.rows {
            for c in 0..other.cols {
                out[(self.rows + r, self.cols + c)] = other[(r, c)];
            }
        }
        out
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_residual(&self) -> Result<f64> {
        let g = self.adjoint().matmul(self)?;
        g.max_abs_diff(&Self::identity(self.cols))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(self.shape_str(), other.shape_str()));
        }
        Ok(())
    }

    fn shape_str(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on shape mismatch, like the other arithmetic operators.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs).expect("shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.check_same_shape(rhs).expect("shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in mul")
    }
}

impl Mul for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        &self * &rhs
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let v = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Real eigenvalues in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values ascending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest elementwise distance to another spectrum of the same length.
    pub fn max_abs_diff(&self, other: &Spectrum) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::LengthMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Shannon entropy in bits with `0 log 0 = 0`; values in `[-EIGEN_FLOOR, 0)` count as zero.
    pub fn entropy_bits(&self) -> Result<f64> {
        let mut s = 0.0;
        for &v in &self.values {
            if v < -EIGEN_FLOOR {
                return Err(Error::NegativeEigenvalue(v));
            }
            s -= xlog2x(v.max(0.0));
        }
        Ok(s)
    }
}

/// `p log2 p` with the convention `0 log 0 = 0`.
pub fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Spectrum plus eigenvectors (columns of `vectors`, same order as the spectrum).
#[derive(Debug, Clone)]
pub struct Eigendecomposition {
    pub spectrum: Spectrum,
    pub vectors: ComplexMatrix,
}

impl Eigendecomposition {
    /// `V diag(values) V^dagger`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::from_diagonal(self.spectrum.values());
        let vd = &self.vectors * &d;
        &vd * &self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigs(h: &ComplexMatrix) -> Result<Eigendecomposition> {
    let residual = h.hermiticity_residual()?;
    if residual > HERMITIAN_TOL {
        return Err(Error::NonHermitian { residual });
    }
    let n = h.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = ComplexMatrix::from_fn(n, n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    let eig = SymmetricEigen::new(sym.to_nalgebra());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Eigendecomposition {
        spectrum: Spectrum { values },
        vectors,
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Spectrum> {
    Ok(hermitian_eigs(h)?.spectrum)
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herm = matrix.hermiticity_residual()?;
        if herm > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!(
                "hermiticity residual {herm:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr - ONE).norm() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let spec = hermitian_eigenvalues(&matrix)?;
        if spec.min() < -EIGEN_FLOOR {
            return Err(Error::NegativeEigenvalue(spec.min()));
        }
        Ok(Self { matrix })
    }

    /// Skips validation. The caller guarantees the invariants hold up to round-off,
    /// e.g. for the image of a density matrix under a CPTP map.
    pub fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `diag(p)` for a probability vector `p`.
    pub fn diagonal(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::BadParameter("empty probability vector".into()));
        }
        if let Some(&v) = p.iter().find(|&&v| v < 0.0 || !v.is_finite()) {
            return Err(Error::NotDensityMatrix(format!("diagonal entry {v}")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {total}")));
        }
        Ok(Self {
            matrix: ComplexMatrix::from_diagonal(p),
        })
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    /// `|i><i|` in dimension `d`.
    pub fn basis_state(d: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(d, d, i, i),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eigenvalues(&self.matrix)
    }
}

/// `S(rho) = -tr rho log2 rho` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    rho.spectrum()?.entropy_bits()
}

/// Entropy in bits of any Hermitian PSD matrix (no trace check).
pub fn matrix_entropy_bits(m: &ComplexMatrix) -> Result<f64> {
    hermitian_eigenvalues(m)?.entropy_bits()
}

const MAJORIZATION_TOL: f64 = 1e-9;

/// `true` iff `a` majorizes `b`: every partial sum of the `m` largest entries of `a`
/// dominates that of `b` and the totals agree.
pub fn majorizes(a: &Spectrum, b: &Spectrum) -> Result<bool> {
    Ok(majorization_deficit(a, b)? <= MAJORIZATION_TOL)
}

/// Largest violation of the majorization inequalities of `a` over `b`
/// (`<= 0` when `a` majorizes `b` exactly). Includes the total-sum mismatch.
pub fn majorization_deficit(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::LengthMismatch(a.dim(), b.dim()));
    }
    let mut sa = 0.0;
    let mut sb = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in a.values().iter().rev().zip(b.values().iter().rev()) {
        sa += x;
        sb += y;
        worst = worst.max(sb - sa);
    }
    Ok(worst.max((sa - sb).abs()))
}
