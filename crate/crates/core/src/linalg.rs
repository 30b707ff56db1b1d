//! Dense exact matrices and Gauss-Jordan elimination.

use num_traits::{One, Zero};

use crate::scalar::{self, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        Matrix::from_fn(self.rows, o.cols, |i, j| {
            let mut s = Scalar::zero();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if !a.is_zero() {
                    s += a * o.get(k, j);
                }
            }
            s
        })
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + o.get(i, j))
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - o.get(i, j))
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn commutator(&self, o: &Matrix) -> Matrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| (self.get(i, j) + self.get(j, i)).is_zero()))
    }

    pub fn max_abs(&self) -> Scalar {
        scalar::max_abs(self.data.iter())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else { continue };
            m.swap_rows(row, p);
            let inv = m.get(row, col).recip();
            for j in col..m.cols {
                let v = m.get(row, j) * &inv;
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = m.get(r, j) - &factor * m.get(row, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn det(&self) -> Scalar {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = Scalar::one();
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !m.get(r, col).is_zero()) else { return Scalar::zero() };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let piv = m.get(col, col).clone();
            det *= &piv;
            for r in col + 1..n {
                let factor = m.get(r, col) / &piv;
                if factor.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = m.get(r, j) - &factor * m.get(col, j);
                    m.set(r, j, v);
                }
            }
        }
        det
    }
}

/// Affine solution set of `a x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Scalar>,
    /// Null-space basis, itself in reduced row echelon form.
    pub basis: Vec<Vec<Scalar>>,
}

/// Exact Gauss-Jordan solve. `None` when inconsistent.
pub fn solve_affine(a: &Matrix, b: &[Scalar]) -> Option<AffineSolution> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let aug = Matrix::from_fn(a.rows(), n + 1, |i, j| if j < n { a.get(i, j).clone() } else { b[i].clone() });
    let (r, piv) = aug.rref();
    if piv.last() == Some(&n) {
        return None;
    }
    let mut particular = vec![Scalar::zero(); n];
    for (row, &c) in piv.iter().enumerate() {
        particular[c] = r.get(row, n).clone();
    }
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let mut basis = Vec::new();
    for &f in &free {
        let mut v = vec![Scalar::zero(); n];
        v[f] = Scalar::one();
        for (row, &c) in piv.iter().enumerate() {
            v[c] = -r.get(row, f).clone();
        }
        basis.push(v);
    }
    if !basis.is_empty() {
        let (bm, bp) = Matrix::from_rows(basis).rref();
        basis = (0..bp.len()).map(|i| bm.row(i).to_vec()).collect();
    }
    Some(AffineSolution { particular, basis })
}
