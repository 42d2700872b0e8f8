//! Dense matrices over the exact scalar field and the elimination
//! routines the subspace lattice is built on.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Row-major dense matrix of exact scalars.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    /// Builds a matrix from integer entries, row by row.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Mat::from_fn(r, c, |i, j| Scalar::from_int(rows[i][j]))
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Self {
        for col in cols {
            assert_eq!(col.len(), rows, "column length mismatch");
        }
        Mat::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j { self.at(i, j).is_one() } else { self.at(i, j).is_zero() }
                })
            })
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Scalar>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    /// Entrywise conjugation (including `tp ↦ -tp`).
    pub fn conj(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(Scalar::conj).collect(),
        }
    }

    pub fn scalar_mul(&self, s: &Scalar) -> Mat {
        if s.is_zero() {
            return Mat::zero(self.rows, self.cols);
        }
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Scalar::zero();
                for c in 0..self.cols {
                    let a = self.at(r, c);
                    if !a.is_zero() && !v[c].is_zero() {
                        acc += a * &v[c];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn commutator(&self, other: &Mat) -> Mat {
        &(self * other) - &(other * self)
    }

    /// Smallest `k ≥ 1` with `self^k = 0`, or `None` if not nilpotent.
    pub fn nilpotency_index(&self) -> Option<usize> {
        assert_eq!(self.rows, self.cols);
        let mut p = self.clone();
        for k in 1..=self.rows.max(1) {
            if p.is_zero() {
                return Some(k);
            }
            p = &p * self;
        }
        // a nilpotent n x n matrix vanishes by power n
        None
    }

    pub fn is_nilpotent(&self) -> bool {
        self.nilpotency_index().is_some()
    }

    pub fn pow(&self, mut k: usize) -> Mat {
        assert_eq!(self.rows, self.cols);
        let mut acc = Mat::identity(self.rows);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut lead = 0usize;
        for col in 0..m.cols {
            if lead >= m.rows {
                break;
            }
            let Some(pr) = (lead..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(pr, lead);
            let inv = m.at(lead, col).inv().unwrap();
            for c in col..m.cols {
                let v = m.at(lead, c) * &inv;
                m.set(lead, c, v);
            }
            for r in 0..m.rows {
                if r != lead && !m.at(r, col).is_zero() {
                    let f = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(r, c) - &(&f * m.at(lead, c));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            lead += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space `{x : Mx = 0}` as matrix columns.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(i, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Solves `Mx = b`; `None` when inconsistent. Returns one solution.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let aug = Mat::from_fn(self.rows, self.cols + 1, |i, j| {
            if j < self.cols { self.at(i, j).clone() } else { b[i].clone() }
        });
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = r.at(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = Mat::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.at(i, j).clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Mat::from_fn(n, n, |i, j| r.at(i, n + j).clone()))
    }

    /// Row-major flattening of a square matrix, for linear algebra on
    /// endomorphism space.
    pub fn flatten(&self) -> Vec<Scalar> {
        self.data.clone()
    }

    pub fn unflatten(n: usize, v: &[Scalar]) -> Mat {
        assert_eq!(v.len(), n * n);
        Mat { rows: n, cols: n, data: v.to_vec() }
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Mat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl Neg for &Mat {
    type Output = Mat;
    fn neg(self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}{}", self.at(r, c), if c + 1 < self.cols { ", " } else { "" })?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_rank() {
        let m = Mat::from_ints(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        for v in &ker {
            assert!(m.apply(v).iter().all(Scalar::is_zero));
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_ints(&[&[1, 2], &[3, 5]]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).is_identity());
        let sing = Mat::from_ints(&[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = Mat::from_ints(&[&[1, 1], &[0, 1], &[1, 2]]);
        let b = vec![Scalar::from_int(3), Scalar::from_int(1), Scalar::from_int(4)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.apply(&x), b);
        let bad = vec![Scalar::from_int(3), Scalar::from_int(1), Scalar::from_int(5)];
        assert!(m.solve(&bad).is_none());
    }

    #[test]
    fn nilpotency() {
        let n = Mat::from_ints(&[&[0, 1], &[0, 0]]);
        assert_eq!(n.nilpotency_index(), Some(2));
        assert!(Mat::identity(2).nilpotency_index().is_none());
        assert_eq!(Mat::zero(2, 2).nilpotency_index(), Some(1));
    }
}
