//! Dense matrices over the engine's coefficient rings, with exact
//! elimination where the ring is a field.

use crate::scalar::{Field, Ring};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("underdetermined linear system ({0} free columns)")]
    Underdetermined(usize),
    #[error("singular matrix")]
    Singular,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = R::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[R] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<R> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c.clone())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.clone() * b.clone();
                    let cur = out[(i, j)].clone();
                    out[(i, j)] = cur + prod;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = R::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc = acc + self[(i, j)].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product: (A kron B)[(i1*br+i2),(j1*bc+j2)] = A[i1,j1] B[i2,j2].
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                if self[(i1, j1)].is_zero() {
                    continue;
                }
                for i2 in 0..rhs.rows {
                    for j2 in 0..rhs.cols {
                        out[(i1 * rhs.rows + i2, j1 * rhs.cols + j2)] =
                            self[(i1, j1)].clone() * rhs[(i2, j2)].clone();
                    }
                }
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn trace(&self) -> R {
        assert_eq!(self.rows, self.cols);
        let mut t = R::zero();
        for i in 0..self.rows {
            t = t + self[(i, i)].clone();
        }
        t
    }

    /// Horizontal concatenation [self | rhs].
    pub fn hcat(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows);
        Self::from_fn(self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                rhs[(i, j - self.cols)].clone()
            }
        })
    }
}

impl<R> std::ops::Index<(usize, usize)> for Matrix<R> {
    type Output = R;
    fn index(&self, (i, j): (usize, usize)) -> &R {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl<R> std::ops::IndexMut<(usize, usize)> for Matrix<R> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut R {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl<R: Field> Matrix<R> {
    /// Reduced row echelon form; returns the pivot column of each pivot row.
    pub fn rref(mut self) -> (Self, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row >= self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            if p != row {
                for j in 0..self.cols {
                    self.data.swap(row * self.cols + j, p * self.cols + j);
                }
            }
            let inv = self[(row, col)].inv();
            for j in col..self.cols {
                let v = self[(row, j)].clone() * inv.clone();
                self[(row, j)] = v;
            }
            for r in 0..self.rows {
                if r != row && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for j in col..self.cols {
                        let v = self[(r, j)].clone()
                            - factor.clone() * self[(row, j)].clone();
                        self[(r, j)] = v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (self, pivots)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().1.len()
    }

    pub fn inverse(&self) -> Result<Self, SolveError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hcat(&Self::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return Err(SolveError::Singular);
        }
        Ok(Self::from_fn(n, n, |i, j| r[(i, j + n)].clone()))
    }

    /// Solve self * X = B exactly, demanding a unique solution.
    pub fn solve_unique(&self, b: &Self) -> Result<Self, SolveError> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hcat(b);
        let (r, pivots) = aug.rref();
        let struct_pivots: Vec<usize> =
            pivots.iter().copied().filter(|&p| p < self.cols).collect();
        // Any pivot in the augmented block witnesses inconsistency.
        if pivots.iter().any(|&p| p >= self.cols) {
            return Err(SolveError::Inconsistent);
        }
        if struct_pivots.len() < self.cols {
            return Err(SolveError::Underdetermined(self.cols - struct_pivots.len()));
        }
        let mut x = Self::zeros(self.cols, b.cols);
        for (row, &col) in struct_pivots.iter().enumerate() {
            for j in 0..b.cols {
                x[(col, j)] = r[(row, self.cols + j)].clone();
            }
        }
        Ok(x)
    }

    /// Basis of the right kernel.
    pub fn kernel_basis(&self) -> Vec<Vec<R>> {
        let (r, pivots) = self.clone().rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> =
            (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![R::zero(); self.cols];
            v[fc] = R::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = R::zero() - r[(row, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Characteristic polynomial det(t I - A), ascending coefficients,
    /// monic of degree n. Faddeev-LeVerrier: exact, divisions only by
    /// integer step counts.
    pub fn charpoly(&self) -> Vec<R> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![R::zero(); n + 1];
        coeffs[n] = R::one();
        let mut mk = self.clone();
        let mut int_k = R::zero();
        for k in 1..=n {
            int_k = int_k + R::one();
            let ck = R::zero() - mk.trace() * int_k.inv();
            coeffs[n - k] = ck.clone();
            if k < n {
                let mut shifted = mk;
                for i in 0..n {
                    let v = shifted[(i, i)].clone() + ck.clone();
                    shifted[(i, i)] = v;
                }
                mk = self.matmul(&shifted);
            }
        }
        coeffs
    }
}

impl<R: Ring> Matrix<R> {
    pub fn to_json(&self, enc: impl Fn(&R) -> serde_json::Value) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| {
                    serde_json::Value::Array(
                        (0..self.cols).map(|j| enc(&self[(i, j)])).collect(),
                    )
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, QRat, Rat};
    use num_traits::Zero;

    fn qm(entries: &[&[i64]]) -> Matrix<QRat> {
        Matrix::from_rows(
            entries
                .iter()
                .map(|r| r.iter().map(|&x| QRat::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn inverse_round_trip() {
        let a = qm(&[&[1, 2], &[3, 5]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.matmul(&inv), Matrix::identity(2));
    }

    #[test]
    fn solve_and_kernel() {
        let a = qm(&[&[1, 0, 1], &[0, 1, 1]]);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(a.apply(v).iter().all(|x| x.is_zero()));
        }
        let sq = qm(&[&[2, 1], &[1, 1]]);
        let b = qm(&[&[3], &[2]]);
        let x = sq.solve_unique(&b).unwrap();
        assert_eq!(sq.matmul(&x), b);
        // Inconsistent system is reported as such.
        let bad = qm(&[&[1, 1], &[1, 1]]);
        let rhs = qm(&[&[1], &[2]]);
        assert_eq!(bad.solve_unique(&rhs), Err(SolveError::Inconsistent));
    }

    #[test]
    fn charpoly_small() {
        // [[2,1],[1,2]]: t^2 - 4t + 3.
        let a: Matrix<Rat> = Matrix::from_rows(vec![
            vec![rat_int(2), rat_int(1)],
            vec![rat_int(1), rat_int(2)],
        ]);
        let p = a.charpoly();
        assert_eq!(p, vec![rat_int(3), rat_int(-4), rat_int(1)]);
    }

    #[test]
    fn kron_shape() {
        let a = qm(&[&[1, 0], &[0, 1]]);
        let b = qm(&[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k[(0, 1)], QRat::from_int(1));
        assert_eq!(k[(2, 3)], QRat::from_int(1));
    }
}
