//! Small dense matrices and Gaussian elimination over a [`Scalar`] field.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Row-major dense matrix with 0-based indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// Reduces `self` to reduced row echelon form in place and returns the
    /// pivot columns. Exact scalars take the first nonzero pivot; floating
    /// scalars take the largest one.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let candidates = (r..self.rows).filter(|&i| !self[(i, c)].is_negligible());
            let pick = if S::EXACT {
                candidates.into_iter().next()
            } else {
                candidates.max_by(|&a, &b| self[(a, c)].magnitude().total_cmp(&self[(b, c)].magnitude()))
            };
            let Some(p) = pick else { continue };
            self.swap_rows(r, p);
            let inv = S::one() / self[(r, c)].clone();
            for k in c..self.cols {
                self[(r, k)] = self[(r, k)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for k in c..self.cols {
                    if !self[(r, k)].is_zero() {
                        self[(i, k)] = self[(i, k)].clone() - f.clone() * self[(r, k)].clone();
                    }
                }
                if !S::EXACT {
                    self[(i, c)] = S::zero();
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;

    fn index(&self, (r, c): (usize, usize)) -> &S {
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_ratio(n, 1)
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = Matrix::from_fn(3, 3, |r, c| q(((r + 1) * (c + 1)) as i64));
        assert_eq!(m.rank(), 1);
        assert_eq!(Matrix::<Rational>::identity(4).rank(), 4);
        assert_eq!(Matrix::<Rational>::zeros(2, 5).rank(), 0);
    }

    #[test]
    fn rref_solves_a_system() {
        // x + y = 3, x - y = 1
        let mut m = Matrix::from_fn(2, 3, |r, c| q([[1, 1, 3], [1, -1, 1]][r][c]));
        assert_eq!(m.rref(), vec![0, 1]);
        assert_eq!(m[(0, 2)], q(2));
        assert_eq!(m[(1, 2)], q(1));
    }

    #[test]
    fn float_rank_with_partial_pivoting() {
        let m = Matrix::from_fn(3, 2, |r, c| [[1e-3, 1.0], [1.0, 1.0], [2.0, 2.0]][r][c]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn product() {
        let a = Matrix::from_fn(2, 2, |r, c| q([[1, 2], [3, 4]][r][c]));
        let b = a.mul(&Matrix::identity(2));
        assert_eq!(a, b);
        let sq = a.mul(&a);
        assert_eq!(sq[(1, 0)], q(15));
    }
}
