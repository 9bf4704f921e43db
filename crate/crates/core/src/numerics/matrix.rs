use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Square row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    /// Panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// `self + s I`
    pub fn shifted(&self, s: T) -> Self {
        let mut m = self.clone();
        for i in 0..self.n {
            m[(i, i)] = m[(i, i)] + s;
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> T {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> T {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Solves `self * X = rhs` by LU with partial pivoting. `None` if singular.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let n = self.n;
        let mut a = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| {
                    a[(p, col)]
                        .abs()
                        .partial_cmp(&a[(q, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if a[(pivot, col)] == T::zero() || !a[(pivot, col)].is_finite() {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    a.data.swap(pivot * n + j, col * n + j);
                    x.data.swap(pivot * n + j, col * n + j);
                }
            }
            let d = a[(col, col)];
            for row in col + 1..n {
                let f = a[(row, col)] / d;
                if f == T::zero() {
                    continue;
                }
                for j in col..n {
                    a[(row, j)] = a[(row, j)] - f * a[(col, j)];
                }
                for j in 0..n {
                    x[(row, j)] = x[(row, j)] - f * x[(col, j)];
                }
            }
        }
        for col in (0..n).rev() {
            let d = a[(col, col)];
            for j in 0..n {
                let mut s = x[(col, j)];
                for k in col + 1..n {
                    s = s - a[(col, k)] * x[(k, j)];
                }
                x[(col, j)] = s / d;
            }
        }
        Some(x)
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_inverse() {
        let a = DenseMatrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 1.0]]);
        let inv = a.solve(&DenseMatrix::identity(2)).unwrap();
        let prod = a.matmul(&inv);
        assert!(prod.sub(&DenseMatrix::identity(2)).norm_inf() < 1e-15);
        assert!(DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]])
            .solve(&DenseMatrix::identity(2))
            .is_none());
    }

    #[test]
    fn norms_and_products() {
        let a = DenseMatrix::from_rows(&[vec![1.0, -2.0], vec![3.0, 4.0]]);
        assert_eq!(a.norm_inf(), 7.0);
        assert_eq!(a.norm_1(), 6.0);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![-1.0, 7.0]);
        assert_eq!(a.transpose()[(0, 1)], 3.0);
        assert_eq!(a.shifted(1.0)[(1, 1)], 5.0);
    }
}
