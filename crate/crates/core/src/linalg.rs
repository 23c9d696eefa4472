//! Dense complex linear algebra for small Hermitian positive-definite systems.
//!
//! Every matrix inverted in this crate has the form `σ²I + XᴴX` with `σ² > 0`,
//! so a Cholesky factorization is always applicable. The module also carries
//! the rank-one inverse update used when a receive antenna is appended.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use thiserror::Error;

/// Symmetry tolerance accepted by the Hermitian factorizations.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Smallest accepted magnitude of `1 + ρAρᴴ` in a rank-one update.
pub const DEGENERATE_DENOMINATOR_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max |M - Mᴴ| = {max_deviation:e})")]
    NotHermitian { max_deviation: f64 },
    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("rank-one update denominator 1 + ρAρᴴ is degenerate ({0:e})")]
    DegenerateDenominator(f64),
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

fn check_finite(data: &[Complex64]) -> Result<()> {
    match data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(LinalgError::NonFinite(i)),
        None => Ok(()),
    }
}

/// Dense complex vector.
#[derive(Clone, PartialEq, Default)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Result<Self> {
        check_finite(&data)?;
        Ok(Self { data })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Builds a vector from `(re, im)` pairs.
    pub fn from_parts(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.data.iter()
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// `‖v‖²`
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Conjugate-linear inner product `selfᴴ other`.
    pub fn dot(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.len() != other.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "inner product of lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every entry by a real factor.
    pub fn scaled(&self, factor: f64) -> ComplexVector {
        ComplexVector {
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Concatenates vectors end to end.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a ComplexVector>) -> ComplexVector {
        ComplexVector {
            data: parts
                .into_iter()
                .flat_map(|p| p.data.iter().copied())
                .collect(),
        }
    }

    /// Returns the vector as an `n × 1` matrix.
    pub fn to_column(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.len(),
            cols: 1,
            data: self.data.clone(),
        }
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.data[i]
    }
}

impl fmt::Debug for ComplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.data).finish()
    }
}

/// Dense complex matrix, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of `(re, im)` pairs.
    pub fn from_rows(rows: &[&[(f64, f64)]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch(
                "ragged rows in matrix literal".into(),
            ));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&(re, im)| Complex64::new(re, im)))
            .collect();
        Self::new(rows.len(), cols, data)
    }

    /// Stacks column vectors side by side. All columns must share a length;
    /// with no columns the result is `rows × 0`.
    pub fn from_columns(rows: usize, columns: &[ComplexVector]) -> Result<Self> {
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(LinalgError::DimensionMismatch(format!(
                "column of length {} in a matrix with {rows} rows",
                bad.len()
            )));
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i]))
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

    pub fn row(&self, i: usize) -> ComplexVector {
        ComplexVector {
            data: self.data[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        ComplexVector {
            data: (0..self.rows).map(|i| self[(i, j)]).collect(),
        }
    }

    /// First `n` rows.
    pub fn top_rows(&self, n: usize) -> ComplexMatrix {
        let n = n.min(self.rows);
        ComplexMatrix {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    /// Appends a row at the bottom.
    pub fn push_row(&mut self, row: &ComplexVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "row of length {} appended to a matrix with {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.extend_from_slice(row.as_slice());
        self.rows += 1;
        Ok(())
    }

    pub fn conj_transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(ComplexVector {
            data: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
                .collect(),
        })
    }

    /// `selfᴴ v`, without forming the conjugate transpose.
    pub fn adjoint_matvec(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if self.rows != v.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply the adjoint of {}x{} by a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = ComplexVector::zeros(self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j] += self[(i, j)].conj() * v[i];
            }
        }
        Ok(out)
    }

    /// `shift·I + selfᴴ self`, filled so the result is exactly Hermitian.
    pub fn regularized_gram(&self, shift: f64) -> ComplexMatrix {
        let n = self.cols;
        let mut g = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let s: Complex64 = (0..self.rows)
                    .map(|k| self[(k, i)].conj() * self[(k, j)])
                    .sum();
                g[(i, j)] = s;
                g[(j, i)] = s.conj();
            }
            g[(i, i)] = Complex64::new(g[(i, i)].re + shift, 0.0);
        }
        g
    }

    /// `shift·I + self selfᴴ`, filled so the result is exactly Hermitian.
    pub fn regularized_outer_gram(&self, shift: f64) -> ComplexMatrix {
        self.conj_transpose().regularized_gram(shift)
    }

    /// Largest entry magnitude; zero for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "comparing {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest `|M_ij − conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )));
        }
        let mut dev = 0.0_f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        Ok(dev)
    }

    /// Replaces `self` with `(self + selfᴴ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)].im = 0.0;
            for j in i + 1..n {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }

    /// Hermitian form `ρ M ρᴴ` with `ρ` a row vector.
    pub fn row_quadratic_form(&self, rho: &ComplexVector) -> Result<Complex64> {
        let u = self.matvec(&conj(rho))?;
        Ok(rho.iter().zip(u.iter()).map(|(r, x)| r * x).sum())
    }
}

fn conj(v: &ComplexVector) -> ComplexVector {
    ComplexVector {
        data: v.iter().map(|z| z.conj()).collect(),
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<_> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        f.debug_struct("ComplexMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("data", &rows)
            .finish()
    }
}

/// Lower-triangular Cholesky factor `L` with `M = L Lᴴ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: ComplexMatrix,
}

impl Cholesky {
    pub fn factor(m: &ComplexMatrix) -> Result<Self> {
        let dev = m.hermitian_deviation()?;
        if dev > HERMITIAN_TOL {
            return Err(LinalgError::NotHermitian { max_deviation: dev });
        }
        let n = m.rows();
        let mut l = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = m[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if d.is_nan() || d <= 0.0 {
                return Err(LinalgError::NotPositiveDefinite { index: j, pivot: d });
            }
            let ljj = d.sqrt();
            l[(j, j)] = Complex64::new(ljj, 0.0);
            for i in j + 1..n {
                let mut s = m[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn lower(&self) -> &ComplexMatrix {
        &self.l
    }

    /// Diagonal of `L`; all entries are strictly positive.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.l[(i, i)].re).collect()
    }

    /// Solves `L Lᴴ x = b` in place.
    fn solve_in_place(&self, x: &mut [Complex64]) {
        let n = self.dim();
        let l = &self.l;
        for i in 0..n {
            let mut s = x[i];
            for k in 0..i {
                s -= l[(i, k)] * x[k];
            }
            x[i] = s / l[(i, i)].re;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= l[(k, i)].conj() * x[k];
            }
            x[i] = s / l[(i, i)].re;
        }
    }

    pub fn solve_vector(&self, b: &ComplexVector) -> Result<ComplexVector> {
        if b.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side of length {} for a {}x{} system",
                b.len(),
                self.dim(),
                self.dim()
            )));
        }
        let mut x = b.clone().into_vec();
        self.solve_in_place(&mut x);
        Ok(ComplexVector { data: x })
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.rows() != self.dim() {
            return Err(LinalgError::DimensionMismatch(format!(
                "right-hand side with {} rows for a {}x{} system",
                b.rows(),
                self.dim(),
                self.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols());
        let mut col = vec![Complex64::new(0.0, 0.0); b.rows()];
        for j in 0..b.cols() {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            self.solve_in_place(&mut col);
            for (i, c) in col.iter().enumerate() {
                out[(i, j)] = *c;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let mut inv = self
            .solve(&ComplexMatrix::identity(self.dim()))
            .expect("identity has matching dimension");
        inv.symmetrize();
        inv
    }
}

/// Solves `M X = B` for Hermitian positive-definite `M`.
pub fn hermitian_solve(m: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if m.is_square() && b.rows() != m.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "right-hand side with {} rows for a {}x{} system",
            b.rows(),
            m.rows(),
            m.cols()
        )));
    }
    Cholesky::factor(m)?.solve(b)
}

/// Explicit inverse of a Hermitian positive-definite matrix. A `0×0` input
/// returns itself.
pub fn hermitian_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Cholesky::factor(m)?.inverse())
}

/// Inverse of `A⁻¹ + ρᴴρ` given `A`, with `ρ` read as a row vector:
///
/// `A₁ = A − (Aρᴴ)(ρA) / (1 + ρAρᴴ)`
///
/// The result is symmetrized before it is returned.
pub fn rank_one_inverse_update(a: &ComplexMatrix, rho: &ComplexVector) -> Result<ComplexMatrix> {
    let dev = a.hermitian_deviation()?;
    if dev > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian { max_deviation: dev });
    }
    if rho.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "update vector of length {} for a {}x{} inverse",
            rho.len(),
            a.rows(),
            a.cols()
        )));
    }
    // u = Aρᴴ; for Hermitian A, ρA = uᴴ.
    let u = a.matvec(&conj(rho))?;
    let t: Complex64 = rho.iter().zip(u.iter()).map(|(r, x)| r * x).sum();
    let denom = 1.0 + t;
    if denom.norm() < DEGENERATE_DENOMINATOR_TOL {
        return Err(LinalgError::DegenerateDenominator(denom.norm()));
    }
    let n = a.rows();
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] -= u[i] * u[j].conj() / denom;
        }
    }
    out.symmetrize();
    Ok(out)
}
