//! Dense matrices over one uniform scalar domain.

use crate::error::{AlgebraError, Result};
use crate::fraction::SeriesFraction;
use crate::rational::Rational;
use crate::scalar::Scalar;
use crate::series::TruncSeries;

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Matrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows_entries: Vec<Vec<T>>) -> Result<Self> {
        let rows = rows_entries.len();
        let cols = rows_entries.first().map(|r| r.len()).unwrap_or(0);
        if rows_entries.iter().any(|r| r.len() != cols) {
            return Err(AlgebraError::MatrixShape("ragged row lengths".into()));
        }
        Ok(Matrix {
            rows,
            cols,
            entries: rows_entries.into_iter().flatten().collect(),
        })
    }

    /// Square zero matrix using `like` as the scalar shape witness.
    pub fn zero(rows: usize, cols: usize, like: &T) -> Self {
        Self::from_fn(rows, cols, |_, _| like.zero_like())
    }

    pub fn identity(n: usize, like: &T) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                like.one_like()
            } else {
                like.zero_like()
            }
        })
    }

    pub fn diagonal(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                values[r].clone()
            } else {
                values[r].zero_like()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut T {
        &mut self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.rows).all(|r| (0..r.min(self.cols)).all(|c| self.at(r, c).is_zero()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Some entry to copy scalar shape from; matrices are never empty here.
    pub fn witness(&self) -> &T {
        &self.entries[0]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(AlgebraError::MatrixShape(format!(
                "add of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, self.cols, |r, c| {
            self.at(r, c).add(other.at(r, c))
        }))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.negated())
    }

    pub fn negated(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).neg())
    }

    pub fn scaled(&self, q: &Rational) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).scale(q))
    }

    pub fn scale_by(&self, s: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).mul(s))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(AlgebraError::MatrixShape(format!(
                "mul of {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = self.at(r, 0).mul(other.at(0, c));
            for k in 1..self.cols {
                let term = self.at(r, k).mul(other.at(k, c));
                if !term.is_zero() {
                    acc = acc.add(&term);
                }
            }
            acc
        }))
    }

    pub fn pow(&self, exp: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(AlgebraError::MatrixShape("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows, self.witness());
        for _ in 0..exp {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// Entry-wise map into another scalar domain.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix::from_fn(self.rows, self.cols, |r, c| f(self.at(r, c)))
    }

    /// Entry-wise fallible map.
    pub fn try_map<U: Scalar>(&self, f: impl Fn(&T) -> Result<U>) -> Result<Matrix<U>> {
        let mut entries = Vec::with_capacity(self.rows * self.cols);
        for e in &self.entries {
            entries.push(f(e)?);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// The contiguous diagonal submatrix on index range [start, start+size).
    pub fn diagonal_submatrix(&self, start: usize, size: usize) -> Result<Self> {
        if start + size > self.rows || start + size > self.cols {
            return Err(AlgebraError::IndexOutOfBounds(format!(
                "diagonal submatrix [{start}, {}) of a {}x{} matrix",
                start + size,
                self.rows,
                self.cols
            )));
        }
        Ok(Self::from_fn(size, size, |r, c| {
            self.at(start + r, start + c).clone()
        }))
    }

    pub fn diagonal_entries(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self.at(i, i).clone())
            .collect()
    }
}

impl Matrix<TruncSeries> {
    /// Lifts a series matrix into the fraction field.
    pub fn to_fractions(&self) -> Matrix<SeriesFraction> {
        self.map(|s| SeriesFraction::from_series(s.clone()))
    }

    /// All entries have zero constant term.
    pub fn has_zero_constant_terms(&self) -> bool {
        self.entries
            .iter()
            .all(|s| num_traits::Zero::is_zero(&s.constant_term()))
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.entries[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}
