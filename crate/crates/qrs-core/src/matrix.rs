//! Dense matrices over GF(2^s) and the Gaussian elimination they need.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::gf::{FieldCtx, FieldElement};

/// Row-major dense matrix over a field.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for x in self.row(r) {
                write!(f, "{:>5}", x.bits())?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Result of reducing a matrix to reduced row echelon form.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub reduced: Matrix,
    /// Pivot column of each nonzero row, in row order.
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Build from rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<FieldElement>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        Matrix { rows: rows.len(), cols, data: rows.concat() }
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
    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FieldElement) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [FieldElement] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn column(&self, c: usize) -> Vec<FieldElement> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// Submatrix made of the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                m.set(r, j, self.get(r, c));
            }
        }
        m
    }

    pub fn mul(&self, f: &FieldCtx, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = f.add(out.get(r, c), f.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// `self · v`.
    pub fn mul_vec(&self, f: &FieldCtx, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|r| f.dot(self.row(r), v)).collect()
    }

    /// Reduced row echelon form over the field.
    pub fn echelon(&self, f: &FieldCtx) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for x in m.row_mut(r) {
                *x = f.mul(*x, inv);
            }
            for i in 0..m.rows {
                if i != r {
                    let factor = m.get(i, c);
                    if !factor.is_zero() {
                        m.axpy_row(f, i, r, factor);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { reduced: m, pivots }
    }

    pub fn rank(&self, f: &FieldCtx) -> usize {
        self.echelon(f).pivots.len()
    }

    /// Basis of `{x : self · x = 0}`.
    pub fn nullspace(&self, f: &FieldCtx) -> Vec<Vec<FieldElement>> {
        let Echelon { reduced, pivots } = self.echelon(f);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[fc] = FieldElement::ONE;
                for (i, &pc) in pivots.iter().enumerate() {
                    // x_pc + reduced[i][fc] = 0 in characteristic 2.
                    v[pc] = reduced.get(i, fc);
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self · x = b`, or `None` when inconsistent.
    pub fn solve(&self, f: &FieldCtx, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
        assert_eq!(b.len(), self.rows, "right-hand side has wrong length");
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            aug.set(r, self.cols, b[r]);
        }
        let Echelon { reduced, pivots } = aug.echelon(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![FieldElement::ZERO; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = reduced.get(i, self.cols);
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self, f: &FieldCtx) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for r in 0..n {
            aug.row_mut(r)[..n].copy_from_slice(self.row(r));
            aug.set(r, n + r, FieldElement::ONE);
        }
        let Echelon { reduced, pivots } = aug.echelon(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(reduced.select_columns(&cols))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    /// `row[dst] += factor · row[src]`.
    pub fn axpy_row(&mut self, f: &FieldCtx, dst: usize, src: usize, factor: FieldElement) {
        for c in 0..self.cols {
            let v = f.add(self.get(dst, c), f.mul(factor, self.get(src, c)));
            self.set(dst, c, v);
        }
    }
}

/// Hamming weight of a vector.
pub fn weight(v: &[FieldElement]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, SeedableRng};

    #[test]
    fn solve_and_nullspace_agree() {
        let f = FieldCtx::with_degree(4).unwrap();
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let rows: Vec<Vec<_>> =
                (0..3).map(|_| (0..5).map(|_| f.random(&mut rng)).collect()).collect();
            let m = Matrix::from_rows(&rows);
            for v in m.nullspace(&f) {
                assert!(m.mul_vec(&f, &v).iter().all(|x| x.is_zero()));
            }
            assert_eq!(m.nullspace(&f).len() + m.rank(&f), 5);
            let x: Vec<_> = (0..5).map(|_| f.random(&mut rng)).collect();
            let b = m.mul_vec(&f, &x);
            let y = m.solve(&f, &b).unwrap();
            assert_eq!(m.mul_vec(&f, &y), b);
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let f = FieldCtx::with_degree(3).unwrap();
        let mut rng = StdRng::seed_from_u64(9);
        let mut found = 0;
        for _ in 0..100 {
            let rows: Vec<Vec<_>> =
                (0..3).map(|_| (0..3).map(|_| f.random(&mut rng)).collect()).collect();
            let m = Matrix::from_rows(&rows);
            match m.inverse(&f) {
                Some(inv) => {
                    found += 1;
                    assert_eq!(m.mul(&f, &inv), Matrix::identity(3));
                }
                None => assert!(m.rank(&f) < 3),
            }
        }
        assert!(found > 50);
    }
}
