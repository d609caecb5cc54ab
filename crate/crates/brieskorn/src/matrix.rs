//! Dense exact matrices over the rationals.
//!
//! Just enough linear algebra for frame bookkeeping at small rank:
//! products, inverses, ranks, nilpotency checks. Everything is exact
//! Gauss-Jordan over arbitrary-precision rationals; nothing here is
//! meant for matrices larger than a few dozen rows.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::rational::Rational;
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(
            rows.iter().all(|r| r.len() == ncols),
            "ragged rows in matrix construction"
        );
        RatMat {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Shift matrix `e_i -> e_{i+1}` (and `e_{n-1} -> 0`) on an
    /// `n`-dimensional space, in the column convention: entry `(i, j)`
    /// is the `e_i`-coefficient of the image of `e_j`.
    pub fn shift(n: usize) -> Self {
        let mut m = RatMat::zeros(n, n);
        for j in 0..n.saturating_sub(1) {
            m[(j + 1, j)] = Rational::one();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rational::is_zero)
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i..self.cols).all(|j| self[(i, j)].is_zero()))
    }

    pub fn is_unit_lower_triangular(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                self[(i, i)].is_one()
                    && ((i + 1)..self.cols).all(|j| self[(i, j)].is_zero())
            })
    }

    pub fn mul(&self, rhs: &RatMat) -> RatMat {
        assert_eq!(self.cols, rhs.rows, "matrix dimension mismatch");
        let mut out = RatMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.mul(&rhs[(k, j)]);
                    if !prod.is_zero() {
                        let cur = out[(i, j)].add(&prod);
                        out[(i, j)] = cur;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RatMat {
        let mut out = RatMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rational::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc = acc.add(&self[(i, j)].mul(&v[j]));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn pow(&self, exp: u32) -> RatMat {
        assert_eq!(self.rows, self.cols, "power of a non-square matrix");
        let mut acc = RatMat::identity(self.rows);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Exact Gauss-Jordan inverse; `None` for singular matrices.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = RatMat::identity(n);
        for col in 0..n {
            let pivot_row = (col..n).find(|&i| !work[(i, col)].is_zero())?;
            if pivot_row != col {
                work.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let scale = work[(col, col)].recip().expect("pivot is nonzero");
            work.scale_row(col, &scale);
            inv.scale_row(col, &scale);
            for row in 0..n {
                if row == col || work[(row, col)].is_zero() {
                    continue;
                }
                let factor = work[(row, col)].clone();
                work.sub_scaled_row(row, col, &factor);
                inv.sub_scaled_row(row, col, &factor);
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(pivot_row) = (rank..self.rows).find(|&i| !work[(i, col)].is_zero()) else {
                continue;
            };
            work.swap_rows(pivot_row, rank);
            let scale = work[(rank, col)].recip().expect("pivot is nonzero");
            work.scale_row(rank, &scale);
            for row in 0..self.rows {
                if row == rank || work[(row, col)].is_zero() {
                    continue;
                }
                let factor = work[(row, col)].clone();
                work.sub_scaled_row(row, col, &factor);
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, row: usize, factor: &Rational) {
        for j in 0..self.cols {
            let v = self[(row, j)].mul(factor);
            self[(row, j)] = v;
        }
    }

    fn sub_scaled_row(&mut self, target: usize, source: usize, factor: &Rational) {
        for j in 0..self.cols {
            let delta = self[(source, j)].mul(factor);
            let v = self[(target, j)].sub(&delta);
            self[(target, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for RatMat {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "matrix index out of range");
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for RatMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Rational::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
