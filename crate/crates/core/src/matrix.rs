//! Dense row-major matrices and exact elimination.

use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        Mat { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: E) -> Self {
        Mat { rows, cols, data: vec![v; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &E {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.get(r, c).clone());
            }
        }
        Mat { rows: self.cols, cols: self.rows, data }
    }

    pub fn from_columns(rows: usize, cols: &[Vec<E>], fill: E) -> Self {
        let mut m = Mat::filled(rows, cols.len(), fill);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, v) in col.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    /// Columns `range` as a new matrix.
    pub fn column_slice(&self, start: usize, end: usize) -> Self {
        let mut data = Vec::with_capacity(self.rows * (end - start));
        for r in 0..self.rows {
            data.extend_from_slice(&self.data[r * self.cols + start..r * self.cols + end]);
        }
        Mat { rows: self.rows, cols: end - start, data }
    }

    pub fn row_slice(&self, start: usize, end: usize) -> Self {
        Mat {
            rows: end - start,
            cols: self.cols,
            data: self.data[start * self.cols..end * self.cols].to_vec(),
        }
    }

    pub fn hcat(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Mat { rows: self.rows, cols, data }
    }

    pub fn vcat(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn map<G: Clone>(&self, f: impl Fn(&E) -> G) -> Mat<G> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

pub fn zeros<F: Field>(f: &F, rows: usize, cols: usize) -> Mat<F::Elem> {
    Mat::filled(rows, cols, f.zero())
}

pub fn identity<F: Field>(f: &F, n: usize) -> Mat<F::Elem> {
    let mut m = zeros(f, n, n);
    for i in 0..n {
        m.set(i, i, f.one());
    }
    m
}

pub fn from_i64<F: Field>(f: &F, rows: usize, cols: usize, vals: &[i64]) -> Mat<F::Elem> {
    Mat::from_vec(rows, cols, vals.iter().map(|&v| f.from_i64(v)).collect())
}

pub fn is_zero<F: Field>(f: &F, m: &Mat<F::Elem>) -> bool {
    m.data.iter().all(|e| f.is_zero(e))
}

pub fn mul<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!(a.cols, b.rows, "inner dimensions differ");
    let mut out = zeros(f, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = a.get(i, k);
            if f.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let bkj = b.get(k, j);
                if f.is_zero(bkj) {
                    continue;
                }
                let v = f.mul_add(out.get(i, j), aik, bkj);
                out.set(i, j, v);
            }
        }
    }
    out
}

pub fn add<F: Field>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    Mat {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(x, y)| f.add(x, y)).collect(),
    }
}

pub fn scale<F: Field>(f: &F, c: &F::Elem, a: &Mat<F::Elem>) -> Mat<F::Elem> {
    a.map(|x| f.mul(c, x))
}

/// Block diagonal matrix.
pub fn block_diag<F: Field>(f: &F, blocks: &[Mat<F::Elem>]) -> Mat<F::Elem> {
    let rows = blocks.iter().map(|b| b.rows).sum();
    let cols = blocks.iter().map(|b| b.cols).sum();
    let mut out = zeros(f, rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
        r0 += b.rows;
        c0 += b.cols;
    }
    out
}

/// Reduced row echelon form with pivot columns. Pivots are chosen as the
/// first nonzero entry scanning columns left to right, rows top to bottom.
pub fn rref<F: Field>(f: &F, m: &Mat<F::Elem>) -> (Mat<F::Elem>, Vec<usize>) {
    let mut a = m.clone();
    let pivots = rref_in_place(f, &mut a, m.cols);
    (a, pivots)
}

/// Row-reduces `a` using pivots only among the first `pivot_cols` columns.
fn rref_in_place<F: Field>(f: &F, a: &mut Mat<F::Elem>, pivot_cols: usize) -> Vec<usize> {
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
        for j in c..cols {
            let v = f.mul(a.get(r, j), &inv);
            a.set(r, j, v);
        }
        let pivot_row: Vec<F::Elem> = a.row(r)[c..].to_vec();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a.get(i, c).clone();
            if f.is_zero(&factor) {
                continue;
            }
            for (off, pv) in pivot_row.iter().enumerate() {
                if f.is_zero(pv) {
                    continue;
                }
                let j = c + off;
                let v = f.sub(a.get(i, j), &f.mul(&factor, pv));
                a.set(i, j, v);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank by forward elimination only.
pub fn rank<F: Field>(f: &F, m: &Mat<F::Elem>) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    // Eliminate along the shorter side.
    let mut a = if m.rows > m.cols { m.transpose() } else { m.clone() };
    let (rows, cols) = (a.rows, a.cols);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| !f.is_zero(a.get(i, c))) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                a.data.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a.get(r, c)).expect("pivot is nonzero");
        for i in r + 1..rows {
            let factor = f.mul(a.get(i, c), &inv);
            if f.is_zero(&factor) {
                continue;
            }
            for j in c..cols {
                let prj = a.get(r, j).clone();
                if f.is_zero(&prj) {
                    continue;
                }
                let v = f.sub(a.get(i, j), &f.mul(&factor, &prj));
                a.set(i, j, v);
            }
        }
        r += 1;
    }
    r
}

/// Basis of the right kernel, one vector per column.
pub fn kernel_basis<F: Field>(f: &F, m: &Mat<F::Elem>) -> Mat<F::Elem> {
    let (red, pivots) = rref(f, m);
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = zeros(f, m.cols, free.len());
    for (j, &fc) in free.iter().enumerate() {
        k.set(fc, j, f.one());
        for (r, &pc) in pivots.iter().enumerate() {
            k.set(pc, j, f.neg(red.get(r, fc)));
        }
    }
    debug_assert_eq!(pivots.len() + free.len(), m.cols);
    k
}

/// Basis of the left kernel, one vector per row: rows `y` with `y m = 0`.
pub fn left_kernel_basis<F: Field>(f: &F, m: &Mat<F::Elem>) -> Mat<F::Elem> {
    kernel_basis(f, &m.transpose()).transpose()
}

/// Solves `m x = rhs`; `None` when the system is inconsistent.
pub fn solve<F: Field>(f: &F, m: &Mat<F::Elem>, rhs: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    assert_eq!(m.rows, rhs.rows, "right-hand side has the wrong row count");
    let mut aug = m.hcat(rhs);
    let pivots = rref_in_place(f, &mut aug, m.cols);
    let rk = pivots.len();
    for r in rk..m.rows {
        if (m.cols..aug.cols).any(|j| !f.is_zero(aug.get(r, j))) {
            return None;
        }
    }
    let mut x = zeros(f, m.cols, rhs.cols);
    for (r, &pc) in pivots.iter().enumerate() {
        for j in 0..rhs.cols {
            x.set(pc, j, aug.get(r, m.cols + j).clone());
        }
    }
    Some(x)
}

/// Column indices forming a basis of the column space (leftmost choice).
pub fn independent_columns<F: Field>(f: &F, m: &Mat<F::Elem>) -> Vec<usize> {
    rref(f, m).1
}

/// Columns of a basis of the column space.
pub fn column_space<F: Field>(f: &F, m: &Mat<F::Elem>) -> Mat<F::Elem> {
    let idx = independent_columns(f, m);
    let cols: Vec<Vec<F::Elem>> = idx.iter().map(|&c| m.column(c)).collect();
    Mat::from_columns(m.rows, &cols, f.zero())
}

/// Extends the independent columns of `base` by columns of `pool` to a basis
/// of span(base, pool); returns the indices of the chosen `pool` columns.
pub fn extend_basis<F: Field>(f: &F, base: &Mat<F::Elem>, pool: &Mat<F::Elem>) -> Vec<usize> {
    let all = base.hcat(pool);
    rref(f, &all)
        .1
        .into_iter()
        .filter(|&c| c >= base.cols)
        .map(|c| c - base.cols)
        .collect()
}

/// Inverse of a square matrix.
pub fn inverse<F: Field>(f: &F, m: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    assert_eq!(m.rows, m.cols);
    let x = solve(f, m, &identity(f, m.rows))?;
    if rank(f, m) == m.rows {
        Some(x)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn trivial_ranks() {
        let q = Rationals;
        assert_eq!(rank(&q, &identity(&q, 2)), 2);
        assert_eq!(rank(&q, &zeros(&q, 3, 5)), 0);
        assert_eq!(kernel_basis(&q, &identity(&q, 3)).cols(), 0);
        assert_eq!(kernel_basis(&q, &zeros(&q, 2, 4)).cols(), 4);
    }

    #[test]
    fn solve_identity_and_inconsistent() {
        let f = PrimeField::new(101).unwrap();
        let rhs = from_i64(&f, 3, 2, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(solve(&f, &identity(&f, 3), &rhs), Some(rhs.clone()));
        assert_eq!(solve(&f, &zeros(&f, 3, 3), &rhs), None);
    }

    #[test]
    fn inverse_round_trip() {
        let q = Rationals;
        let m = from_i64(&q, 3, 3, &[2, 1, 0, 0, 1, 3, 1, 0, 1]);
        let inv = inverse(&q, &m).unwrap();
        assert_eq!(mul(&q, &m, &inv), identity(&q, 3));
        let sing = from_i64(&q, 2, 2, &[1, 2, 2, 4]);
        assert!(inverse(&q, &sing).is_none());
    }
}
