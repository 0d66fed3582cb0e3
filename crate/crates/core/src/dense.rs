//! Dense square matrices in column-major order.
//!
//! Every N x N object in the library (transition matrices, Psi, matrix
//! states) is stored this way so that per-column kernels walk memory
//! contiguously.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Edge length of the tiles used by the blocked transpose.
const TRANSPOSE_BLOCK: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            n,
            data: vec![T::default(); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for col in 0..n {
            for row in 0..n {
                data.push(f(row, col));
            }
        }
        SquareMatrix { n, data }
    }

    /// Builds a matrix from row slices, rejecting ragged or non-square input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            let cols = r.as_ref().len();
            if cols != n {
                return Err(Error::NonSquare { rows: n, row, cols });
            }
        }
        Ok(Self::from_fn(n, |row, col| rows[row].as_ref()[col]))
    }

    /// Wraps column-major data; `data.len()` must equal `n * n`.
    pub fn from_column_major(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(SquareMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[col * self.n + row]
    }

    pub fn column(&self, col: usize) -> &[T] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn column_mut(&mut self, col: usize) -> &mut [T] {
        let n = self.n;
        &mut self.data[col * n..(col + 1) * n]
    }

    pub fn columns(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.n.max(1))
    }

    pub fn columns_mut(&mut self) -> std::slice::ChunksExactMut<'_, T> {
        let n = self.n.max(1);
        self.data.chunks_exact_mut(n)
    }

    pub fn row(&self, row: usize) -> Vec<T> {
        (0..self.n).map(|col| self.get(row, col)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|row| self.row(row)).collect()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy + Default>(&self, mut f: impl FnMut(T) -> U) -> SquareMatrix<U> {
        SquareMatrix {
            n: self.n,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Plain transpose, in place, tile by tile. Off-diagonal tile pairs go
    /// through two small buffers so that main memory is only touched in
    /// contiguous column runs.
    pub fn transpose_in_place(&mut self) {
        let n = self.n;
        let b = TRANSPOSE_BLOCK;
        let data = &mut self.data;
        let mut lower = vec![T::default(); b * b];
        let mut upper = vec![T::default(); b * b];
        for jb in (0..n).step_by(b) {
            let j_end = (jb + b).min(n);
            for j in jb..j_end {
                for i in (j + 1)..j_end {
                    data.swap(j * n + i, i * n + j);
                }
            }
            for ib in ((jb + b)..n).step_by(b) {
                let i_end = (ib + b).min(n);
                let (w, h) = (j_end - jb, i_end - ib);
                // lower tile: rows ib.., columns jb..; upper: rows jb.., columns ib..
                for c in 0..w {
                    lower[c * h..(c + 1) * h]
                        .copy_from_slice(&data[(jb + c) * n + ib..(jb + c) * n + i_end]);
                }
                for c in 0..h {
                    upper[c * w..(c + 1) * w]
                        .copy_from_slice(&data[(ib + c) * n + jb..(ib + c) * n + j_end]);
                }
                for c in 0..w {
                    let col = &mut data[(jb + c) * n + ib..(jb + c) * n + i_end];
                    for (r, x) in col.iter_mut().enumerate() {
                        *x = upper[r * w + c];
                    }
                }
                for c in 0..h {
                    let col = &mut data[(ib + c) * n + jb..(ib + c) * n + j_end];
                    for (r, x) in col.iter_mut().enumerate() {
                        *x = lower[r * h + c];
                    }
                }
            }
        }
    }

    pub fn transposed(&self) -> Self {
        let mut t = self.clone();
        t.transpose_in_place();
        t
    }
}

impl<T> Index<(usize, usize)> for SquareMatrix<T> {
    type Output = T;

    fn index(&self, (row, col): (usize, usize)) -> &T {
        &self.data[col * self.n + row]
    }
}

impl<T> IndexMut<(usize, usize)> for SquareMatrix<T> {
    fn index_mut(&mut self, (row, col): (usize, usize)) -> &mut T {
        &mut self.data[col * self.n + row]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_major_layout() {
        let m = SquareMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
        assert_eq!(m.as_slice(), &[1.0, 3.0, 2.0, 4.0]);
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m.column(1), &[2.0, 4.0]);
        assert_eq!(m.row(1), vec![3.0, 4.0]);
    }

    #[test]
    fn ragged_rows_rejected() {
        let rows = vec![vec![1.0, 2.0], vec![3.0]];
        assert_eq!(
            SquareMatrix::from_rows(&rows),
            Err(Error::NonSquare {
                rows: 2,
                row: 1,
                cols: 1
            })
        );
    }

    #[test]
    fn blocked_transpose_matches_naive() {
        for n in [0, 1, 2, 31, 32, 33, 70] {
            let m = SquareMatrix::from_fn(n, |r, c| (r * 1000 + c) as f64);
            let t = m.transposed();
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(t[(r, c)], m[(c, r)]);
                }
            }
            assert_eq!(t.transposed(), m);
        }
    }
}
