use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::HERMITICITY_TOL;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    ///
    /// # Panics
    /// If `data.len() != rows * cols` or an entry is not finite.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count must equal rows * cols");
        assert!(
            data.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "matrix entries must be finite"
        );
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. All rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::from_vec(n_rows, n_cols, rows.concat())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// `|psi><psi|` for a (not necessarily normalized) state vector.
    pub fn outer(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut m = Self::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = psi[r] * psi[c].conj();
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).collect()
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn trace(&self) -> Complex64 {
        self.diagonal().into_iter().sum()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Applies `f(row, col, value)` to every entry.
    pub fn map_indexed(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let cols = self.cols;
        Self {
            rows: self.rows,
            cols,
            data: self
                .data
                .iter()
                .enumerate()
                .map(|(k, &z)| f(k / cols, k % cols, z))
                .collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Entrywise maximum modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Induced infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * self.max_abs().max(1.0)
    }

    /// Errors with `NotHermitian` unless the matrix is Hermitian to [`HERMITICITY_TOL`].
    pub fn ensure_hermitian(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if self.is_hermitian(HERMITICITY_TOL) {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                asymmetry: self.hermitian_defect(),
            })
        }
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = (self[(r, c)] + self[(c, r)].conj()) * 0.5;
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in addition");
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
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in subtraction");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// # Panics
    /// On incompatible shapes; use [`ComplexMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("shape mismatch in product")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product, left factor outermost.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out[(ar * b.rows + br, ac * b.cols + bc)] = x * b[(br, bc)];
                }
            }
        }
    }
    out
}

/// Hilbert-Schmidt inner product `Tr(a^dagger b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(a.data.iter().zip(&b.data).map(|(x, y)| x.conj() * y).sum())
}

/// `Tr(a b)` without forming the product.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if a.cols != b.rows || a.rows != b.cols {
        return Err(Error::ShapeMismatch {
            left: a.shape(),
            right: b.shape(),
        });
    }
    let mut acc = ZERO;
    for r in 0..a.rows {
        for k in 0..a.cols {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_dagger() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, 2.0)], vec![c(3.0, 0.0), c(0.0, 0.0)]]);
        let ad = a.dagger();
        assert_eq!(ad[(0, 1)], c(3.0, 0.0));
        assert_eq!(ad[(1, 0)], c(0.0, -2.0));
        let p = &a * &ad;
        assert!(p.is_hermitian(1e-15));
        assert_eq!(p[(0, 0)], c(6.0, 0.0));
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn trace_of_product_matches_full_product() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 2.0), c(0.5, -1.0)], vec![c(0.0, 1.0), c(2.0, 0.0)]]);
        let b = ComplexMatrix::from_rows(&[vec![c(0.3, 0.0), c(1.0, 1.0)], vec![c(-2.0, 0.5), c(0.0, -1.0)]]);
        let direct = (&a * &b).trace();
        let fast = trace_of_product(&a, &b).unwrap();
        assert!((direct - fast).norm() < 1e-15);
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let mut a = ComplexMatrix::identity(3);
        assert!(a.ensure_hermitian().is_ok());
        a[(0, 2)] = c(0.0, 1e-6);
        assert!(matches!(a.ensure_hermitian(), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            ComplexMatrix::zeros(2, 3).ensure_hermitian(),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    #[should_panic(expected = "finite")]
    fn rejects_non_finite_entries() {
        ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]);
    }
}
