use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::GaussianRational;
use crate::error::Error;

/// Dense matrix over Q(i), row-major.  All arithmetic is exact; there is no
/// floating point anywhere in the crate.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(
    try_from = "Vec<Vec<GaussianRational>>",
    into = "Vec<Vec<GaussianRational>>"
)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<GaussianRational>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![GaussianRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for k in 0..n {
            *m.at_mut(k, k) = GaussianRational::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> GaussianRational,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Mat {
            rows,
            cols,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<GaussianRational>>) -> Self {
        assert!(!rows.is_empty(), "no rows");
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Mat {
            rows: rows.len(),
            cols,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    /// Integer literal rows, handy in tests and fixtures.
    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        Mat::from_fn(rows.len(), rows[0].len(), |r, c| {
            GaussianRational::from_int(rows[r][c])
        })
    }

    /// Build from a list of column vectors.
    pub fn from_cols(ambient: usize, cols: &[Vec<GaussianRational>]) -> Self {
        assert!(cols.iter().all(|c| c.len() == ambient), "bad column length");
        Mat::from_fn(ambient, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &GaussianRational {
        &self.entries[r * self.cols + c]
    }

    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut GaussianRational {
        &mut self.entries[r * self.cols + c]
    }

    pub fn col(&self, c: usize) -> Vec<GaussianRational> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<GaussianRational>> {
        (0..self.cols).map(|c| self.col(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when every entry has zero imaginary part.
    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(|e| e.is_real())
    }

    pub fn add(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "add shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "sub shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Mat {
        self.scale(&-GaussianRational::one())
    }

    pub fn scale(&self, s: &GaussianRational) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e * s).collect(),
        }
    }

    pub fn mul(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.cols, rhs.rows, "mul shape");
        let mut out = Mat::zero(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    let cell = out.at_mut(r, c);
                    *cell = &*cell + &prod;
                }
            }
        }
        out
    }

    /// Matrix applied to a column vector.
    pub fn apply(&self, v: &[GaussianRational]) -> Vec<GaussianRational> {
        assert_eq!(self.cols, v.len(), "apply shape");
        (0..self.rows)
            .map(|r| {
                let mut acc = GaussianRational::zero();
                for (c, vc) in v.iter().enumerate() {
                    if !vc.is_zero() && !self.at(r, c).is_zero() {
                        acc = &acc + &(self.at(r, c) * vc);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn conj(&self) -> Mat {
        Mat {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.conj()).collect(),
        }
    }

    pub fn conj_transpose(&self) -> Mat {
        self.transpose().conj()
    }

    pub fn trace(&self) -> GaussianRational {
        assert!(self.is_square(), "trace of non-square");
        let mut t = GaussianRational::zero();
        for k in 0..self.rows {
            t = &t + self.at(k, k);
        }
        t
    }

    pub fn pow(&self, e: usize) -> Mat {
        assert!(self.is_square(), "pow of non-square");
        let mut out = Mat::identity(self.rows);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// ab - ba.
    pub fn commutator(&self, rhs: &Mat) -> Mat {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn hstack(&self, rhs: &Mat) -> Mat {
        assert_eq!(self.rows, rhs.rows, "hstack shape");
        Mat::from_fn(self.rows, self.cols + rhs.cols, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                rhs.at(r, c - self.cols).clone()
            }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Mat {
        Mat::from_fn(rows.len(), cols.len(), |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    /// Flatten row-major into a single column of length rows*cols.
    pub fn vectorize(&self) -> Vec<GaussianRational> {
        self.entries.clone()
    }

    /// Inverse of [`Mat::vectorize`].
    pub fn from_vectorized(rows: usize, cols: usize, v: &[GaussianRational]) -> Mat {
        assert_eq!(v.len(), rows * cols, "vectorized length");
        Mat {
            rows,
            cols,
            entries: v.to_vec(),
        }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, rhs: &Mat) -> Mat {
        Mat::from_fn(self.rows + rhs.rows, self.cols + rhs.cols, |r, c| {
            if r < self.rows && c < self.cols {
                self.at(r, c).clone()
            } else if r >= self.rows && c >= self.cols {
                rhs.at(r - self.rows, c - self.cols).clone()
            } else {
                GaussianRational::zero()
            }
        })
    }

    /// In-place reduced row echelon form; returns pivot column indices.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.at(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..m.cols {
                    let tmp = m.at(p, c).clone();
                    *m.at_mut(p, c) = m.at(row, c).clone();
                    *m.at_mut(row, c) = tmp;
                }
            }
            let inv = m.at(row, col).inv();
            for c in col..m.cols {
                let v = m.at(row, c) * &inv;
                *m.at_mut(row, c) = v;
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let f = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(row, c) * &f;
                        let cell = m.at_mut(r, c);
                        *cell = &*cell - &v;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as columns.  May have zero columns.
    pub fn kernel_basis(&self) -> Mat {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut cols: Vec<Vec<GaussianRational>> = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![GaussianRational::zero(); self.cols];
            v[f] = GaussianRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r.at(i, f).clone();
            }
            cols.push(v);
        }
        Mat::from_cols(self.cols, &cols)
    }

    /// Solve self * X = rhs for X (column by column).  `None` when any
    /// column is inconsistent.  Returns one particular solution.
    pub fn solve(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows, "solve shape");
        let aug = self.hstack(rhs);
        let (r, pivots) = aug.rref();
        // any pivot in the rhs block means inconsistency
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut out = Mat::zero(self.cols, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                *out.at_mut(p, c) = r.at(i, self.cols + c).clone();
            }
        }
        Some(out)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let sol = self.solve(&Mat::identity(n))?;
        if self.mul(&sol) == Mat::identity(n) {
            Some(sol)
        } else {
            None
        }
    }

    pub fn require_square(&self, context: &'static str) -> Result<usize, Error> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch { context });
        }
        Ok(self.rows)
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl From<Mat> for Vec<Vec<GaussianRational>> {
    fn from(m: Mat) -> Self {
        (0..m.rows)
            .map(|r| (0..m.cols).map(|c| m.at(r, c).clone()).collect())
            .collect()
    }
}

impl TryFrom<Vec<Vec<GaussianRational>>> for Mat {
    type Error = String;
    fn try_from(rows: Vec<Vec<GaussianRational>>) -> Result<Self, String> {
        if rows.is_empty() {
            return Err("matrix with no rows".into());
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err("matrix with no columns".into());
        }
        if !rows.iter().all(|r| r.len() == cols) {
            return Err("ragged matrix rows".into());
        }
        Ok(Mat::from_rows(rows))
    }
}
