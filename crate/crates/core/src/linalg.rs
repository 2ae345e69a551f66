//! Exact dense linear algebra over the rationals.
//!
//! Every matrix that appears in a degreewise evaluation is tiny (its size is
//! bounded by generator counts), so the routines here favour exactness and
//! determinism over asymptotics. Ranks are computed by fraction-free
//! (Bareiss) elimination on integer rows; kernels, solutions and quotient
//! bases use a rational reduced row echelon form.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Q>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count does not match shape");
        QMatrix { rows, cols, data: entries }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_rows(rows, cols, entries.iter().map(|&x| q(x)).collect())
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, columns: &[Vec<Q>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (r, v) in col.iter().enumerate() {
                m.set(r, c, v.clone());
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &Q {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Q) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Q) {
        let slot = &mut self.data[r * self.cols + c];
        *slot += v;
    }

    pub fn row(&self, r: usize) -> &[Q] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Q> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Q::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.shape(), other.shape());
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, s: &Q) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    /// Rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<BigInt>> = (0..self.rows).map(|r| integer_row(self.row(r))).collect();
        bareiss_rank(&mut rows, self.cols)
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut prow = 0;
        for c in 0..m.cols {
            if prow == m.rows {
                break;
            }
            let Some(sel) = (prow..m.rows).find(|&r| !m.get(r, c).is_zero()) else {
                continue;
            };
            m.swap_rows(prow, sel);
            let inv = m.get(prow, c).recip();
            for j in c..m.cols {
                let v = m.get(prow, j) * &inv;
                m.set(prow, j, v);
            }
            for r in 0..m.rows {
                if r == prow {
                    continue;
                }
                let f = m.get(r, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(r, j) - &f * m.get(prow, j);
                    m.set(r, j, v);
                }
            }
            pivots.push(c);
            prow += 1;
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

    /// Basis of the right null space, one vector of length `ncols` per free column.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(i, f).clone();
                }
                v
            })
            .collect()
    }

    /// Some solution `x` of `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (i, &p) in pivots.iter().enumerate() {
            x[p] = red.get(i, self.cols).clone();
        }
        Some(x)
    }
}

/// A chosen basis of `Q^n / span(relations)`.
///
/// `projection` (dim × n) kills the relation span; `section` (n × dim) is a
/// right inverse of it, picking out the non-pivot coordinates.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    pub ambient: usize,
    pub projection: QMatrix,
    pub section: QMatrix,
}

impl QuotientBasis {
    pub fn dim(&self) -> usize {
        self.projection.nrows()
    }

    pub fn new(ambient: usize, relations: &[Vec<Q>]) -> Self {
        let rel_rows = QMatrix::from_columns(ambient, relations).transpose();
        let (red, pivots) = rel_rows.rref();
        let free: Vec<usize> = (0..ambient).filter(|c| !pivots.contains(c)).collect();
        let dim = free.len();
        // Reduce e_j modulo the relation rows, read off free coordinates.
        let mut projection = QMatrix::zeros(dim, ambient);
        for j in 0..ambient {
            let mut v = vec![Q::zero(); ambient];
            v[j] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                if v[p].is_zero() {
                    continue;
                }
                let f = v[p].clone();
                for (k, slot) in v.iter_mut().enumerate() {
                    let e = red.get(i, k);
                    if !e.is_zero() {
                        *slot -= &f * e;
                    }
                }
            }
            for (fi, &fc) in free.iter().enumerate() {
                projection.set(fi, j, v[fc].clone());
            }
        }
        let mut section = QMatrix::zeros(ambient, dim);
        for (fi, &fc) in free.iter().enumerate() {
            section.set(fc, fi, Q::one());
        }
        QuotientBasis { ambient, projection, section }
    }
}

fn integer_row(row: &[Q]) -> Vec<BigInt> {
    let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    row.iter().map(|x| (x * Q::from_integer(lcm.clone())).to_integer()).collect()
}

fn bareiss_rank(rows: &mut [Vec<BigInt>], ncols: usize) -> usize {
    let nrows = rows.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(sel) = (rank..nrows).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, sel);
        let pivot = rows[rank][c].clone();
        for r in rank + 1..nrows {
            let f = rows[r][c].clone();
            for j in c..ncols {
                let v = (&pivot * &rows[r][j] - &f * &rows[rank][j]) / &prev;
                rows[r][j] = v;
            }
        }
        prev = pivot.abs();
        if prev.is_zero() {
            prev = BigInt::one();
        }
        rank += 1;
    }
    rank
}

/// Rank of an integer matrix given row by row.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss_rank(&mut big, ncols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(QMatrix::from_i64(2, 2, &[1, 2, 2, 4]).rank(), 1);
        assert_eq!(QMatrix::from_i64(2, 3, &[1, 0, 1, 0, 1, 1]).rank(), 2);
        assert_eq!(QMatrix::zeros(3, 0).rank(), 0);
        assert_eq!(QMatrix::from_i64(3, 3, &[2, 4, 6, 1, 3, 5, 3, 7, 11]).rank(), 2);
    }

    #[test]
    fn rank_handles_fractions() {
        let m = QMatrix::from_rows(
            2,
            2,
            vec![Q::new(1.into(), 2.into()), Q::new(1.into(), 3.into()), q(3), q(2)],
        );
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = QMatrix::from_i64(2, 4, &[1, 2, 0, -1, 0, 1, 1, 1]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in ker {
            assert!(m.mul_vec(&v).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = QMatrix::from_i64(2, 2, &[1, 1, 1, 1]);
        assert!(m.solve(&[q(1), q(2)]).is_none());
        let x = m.solve(&[q(3), q(3)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(3), q(3)]);
    }

    #[test]
    fn quotient_projection_kills_relations() {
        let rels = vec![vec![q(1), q(1), q(0)]];
        let qb = QuotientBasis::new(3, &rels);
        assert_eq!(qb.dim(), 2);
        assert!(qb.projection.mul_vec(&rels[0]).iter().all(Zero::is_zero));
        assert_eq!(qb.projection.mul(&qb.section), QMatrix::identity(2));
    }
}
