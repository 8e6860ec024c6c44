//! Small dense linear algebra over any [`Scalar`].
//!
//! Matrices are row-major `Vec<Vec<T>>`. Elimination pivots on the entry of
//! largest magnitude in the column, which is partial pivoting in binary64 and
//! simply "first usable pivot" in exact arithmetic.

use crate::scalar::Scalar;

/// Square matrix as a vector of rows.
pub type Matrix<T> = Vec<Vec<T>>;

/// Determinant by Gaussian elimination. The empty matrix has determinant one.
pub fn determinant<T: Scalar>(matrix: &Matrix<T>) -> T {
    let size = matrix.len();
    let mut work = matrix.clone();
    let mut det = T::one();
    for col in 0..size {
        let pivot = (col..size)
            .filter(|&row| !work[row][col].is_zero())
            .max_by(|&a, &b| {
                work[a][col]
                    .approx()
                    .abs()
                    .total_cmp(&work[b][col].approx().abs())
            });
        let Some(pivot) = pivot else {
            return T::zero();
        };
        if pivot != col {
            work.swap(pivot, col);
            det = -det;
        }
        let pivot_value = work[col][col].clone();
        det = det * pivot_value.clone();
        for row in col + 1..size {
            if work[row][col].is_zero() {
                continue;
            }
            let factor = work[row][col].clone() / pivot_value.clone();
            for k in col..size {
                let delta = factor.clone() * work[col][k].clone();
                work[row][k] = work[row][k].clone() - delta;
            }
        }
    }
    det
}

/// Solves `matrix · x = rhs`; returns `None` when the matrix is singular.
pub fn solve<T: Scalar>(matrix: &Matrix<T>, rhs: &[T]) -> Option<Vec<T>> {
    let size = matrix.len();
    let mut work: Matrix<T> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut row = row.clone();
            row.push(b.clone());
            row
        })
        .collect();
    for col in 0..size {
        let pivot = (col..size)
            .filter(|&row| !work[row][col].is_zero())
            .max_by(|&a, &b| {
                work[a][col]
                    .approx()
                    .abs()
                    .total_cmp(&work[b][col].approx().abs())
            })?;
        work.swap(pivot, col);
        let pivot_value = work[col][col].clone();
        for row in 0..size {
            if row == col || work[row][col].is_zero() {
                continue;
            }
            let factor = work[row][col].clone() / pivot_value.clone();
            for k in col..=size {
                let delta = factor.clone() * work[col][k].clone();
                work[row][k] = work[row][k].clone() - delta;
            }
        }
    }
    Some(
        (0..size)
            .map(|i| work[i][size].clone() / work[i][i].clone())
            .collect(),
    )
}

/// Matrix with row `skip_row` and column `skip_col` removed.
pub fn minor_matrix<T: Scalar>(matrix: &Matrix<T>, skip_row: usize, skip_col: usize) -> Matrix<T> {
    matrix
        .iter()
        .enumerate()
        .filter(|(r, _)| *r != skip_row)
        .map(|(_, row)| {
            row.iter()
                .enumerate()
                .filter(|(c, _)| *c != skip_col)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// Submatrix on the given row and column index sets.
pub fn submatrix<T: Scalar>(matrix: &Matrix<T>, rows: &[usize], cols: &[usize]) -> Matrix<T> {
    rows.iter()
        .map(|&r| cols.iter().map(|&c| matrix[r][c].clone()).collect())
        .collect()
}

/// Matrix product.
pub fn matmul<T: Scalar>(left: &Matrix<T>, right: &Matrix<T>) -> Matrix<T> {
    let inner = right.len();
    let cols = right.first().map_or(0, Vec::len);
    left.iter()
        .map(|row| {
            (0..cols)
                .map(|c| {
                    (0..inner).fold(T::zero(), |acc, k| {
                        acc + row[k].clone() * right[k][c].clone()
                    })
                })
                .collect()
        })
        .collect()
}

/// 2-norm condition number of a binary64 matrix (infinite when singular).
pub fn condition_number(matrix: &Matrix<f64>) -> f64 {
    let size = matrix.len();
    if size == 0 {
        return 1.0;
    }
    let dense = nalgebra::DMatrix::from_fn(size, size, |r, c| matrix[r][c]);
    let singular = dense.singular_values();
    let largest = singular.max();
    let smallest = singular.min();
    if smallest == 0.0 {
        f64::INFINITY
    } else {
        largest / smallest
    }
}
