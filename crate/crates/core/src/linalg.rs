//! Dense symmetric positive definite solves.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::Real;

const BLOCK: usize = 48;

/// Largest condition estimate accepted by [`Cholesky::factor`].
pub const MAX_CONDITION: f64 = 1e13;

/// Lower Cholesky factor of a row-major `n × n` matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T> {
    n: usize,
    /// Row `i` holds `L[i][0..=i]`.
    rows: Vec<Vec<T>>,
    condition: f64,
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let n = a.len().min(b.len());
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..n {
        s += a[i] * b[i];
    }
    s
}

impl<T: Real> Cholesky<T> {
    /// Factors the symmetric matrix `a` (only the lower triangle is read).
    ///
    /// Rows are processed in blocks; within a block the columns left of the
    /// block are eliminated in parallel, the remaining triangle serially.
    pub fn factor(a: &[T], n: usize) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Internal(format!(
                "matrix has {} entries, expected {n}x{n}",
                a.len()
            )));
        }
        let mut rows: Vec<Vec<T>> = (0..n).map(|i| a[i * n..=i * n + i].to_vec()).collect();
        let mut start = 0;
        while start < n {
            let end = (start + BLOCK).min(n);
            let (done, block) = rows.split_at_mut(start);
            let done = &*done;
            block[..end - start].par_iter_mut().for_each(|row| {
                for j in 0..start {
                    let s = row[j] - dot(&row[..j], &done[j][..j]);
                    row[j] = s / done[j][j];
                }
            });
            for i in start..end {
                let (head, tail) = rows.split_at_mut(i);
                let row = &mut tail[0];
                for j in start..i {
                    let s = row[j] - dot(&row[..j], &head[j][..j]);
                    row[j] = s / head[j][j];
                }
                let pivot = row[i] - dot(&row[..i], &row[..i]);
                if !(pivot > T::zero()) || !pivot.is_finite() {
                    return Err(Error::Conditioning {
                        condition: f64::INFINITY,
                    });
                }
                row[i] = pivot.sqrt();
            }
            start = end;
        }
        // The pivot spread squared bounds cond(A) from below.
        let (lo, hi) = rows
            .iter()
            .enumerate()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), (i, r)| {
                let d = r[i].f64();
                (lo.min(d), hi.max(d))
            });
        let condition = (hi / lo).powi(2);
        if condition > MAX_CONDITION {
            return Err(Error::Conditioning { condition });
        }
        Ok(Cholesky { n, rows, condition })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower estimate of the 2-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let r = &self.rows[i];
            y[i] = (y[i] - dot(&r[..i], &y[..i])) / r[i];
        }
        for i in (0..n).rev() {
            y[i] /= self.rows[i][i];
            let yi = y[i];
            for (j, v) in y[..i].iter_mut().enumerate() {
                *v -= self.rows[i][j] * yi;
            }
        }
        y
    }
}

/// `A x` for a row-major square matrix.
pub fn mat_vec<T: Real>(a: &[T], x: &[T]) -> Vec<T> {
    let n = x.len();
    a.par_chunks(n).map(|row| dot(row, x)).collect()
}
