use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::field::{Scalar, Valuation, ValuedField};

/// Dense row-major matrix over an exact field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;

    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Scalar> Matrix<E> {
    pub fn new(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<E>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn diagonal(entries: Vec<E>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<E>) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::<E>::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add_ref(&a.mul_ref(b));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[E]) -> Result<Vec<E>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(E::zero(), |acc, (a, b)| acc.add_ref(&a.mul_ref(b)))
            })
            .collect())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let data = rows.iter().flat_map(|&i| cols.iter().map(move |&j| self[(i, j)].clone())).collect();
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.cols).collect();
        self.submatrix(rows, &all)
    }

    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let all: Vec<usize> = (0..self.rows).collect();
        self.submatrix(&all, cols)
    }

    /// `[self | other]`.
    pub fn hcat(&self, other: &Matrix<E>) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hcat with different row counts".into()));
        }
        let data = (0..self.rows).flat_map(|i| self.row(i).iter().chain(other.row(i)).cloned()).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols + other.cols, data })
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// `col[dst] += c * col[src]`.
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, c: &E) {
        for i in 0..self.rows {
            let s = &self[(i, src)];
            if !s.is_zero() {
                let v = self[(i, dst)].add_ref(&c.mul_ref(s));
                self[(i, dst)] = v;
            }
        }
    }

    /// `row[dst] += c * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, c: &E) {
        for j in 0..self.cols {
            let s = &self[(src, j)];
            if !s.is_zero() {
                let v = self[(dst, j)].add_ref(&c.mul_ref(s));
                self[(dst, j)] = v;
            }
        }
    }

    pub fn scale_col(&mut self, j: usize, c: &E) {
        for i in 0..self.rows {
            let v = self[(i, j)].mul_ref(c);
            self[(i, j)] = v;
        }
    }

    pub fn scale_row(&mut self, i: usize, c: &E) {
        for j in 0..self.cols {
            let v = self[(i, j)].mul_ref(c);
            self[(i, j)] = v;
        }
    }

    /// Determinant by exact Gaussian elimination. The empty (0x0) case is
    /// never constructed; callers handle it as `1`.
    pub fn det(&self) -> Result<E> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = E::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
                return Ok(E::zero());
            };
            if p != k {
                m.swap_rows(p, k);
                det = det.neg_ref();
            }
            let pivot = m[(k, k)].clone();
            det = det.mul_ref(&pivot);
            let inv = pivot.inv()?;
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let f = m[(i, k)].mul_ref(&inv).neg_ref();
                for j in k..n {
                    let s = &m[(k, j)];
                    if !s.is_zero() {
                        let v = m[(i, j)].add_ref(&f.mul_ref(s));
                        m[(i, j)] = v;
                    }
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = Matrix::identity(n);
        for k in 0..n {
            let p = (k..n).find(|&i| !m[(i, k)].is_zero()).ok_or(Error::Singular)?;
            m.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pinv = m[(k, k)].inv()?;
            m.scale_row(k, &pinv);
            inv.scale_row(k, &pinv);
            for i in 0..n {
                if i != k && !m[(i, k)].is_zero() {
                    let f = m[(i, k)].neg_ref();
                    m.add_row_multiple(i, k, &f);
                    inv.add_row_multiple(i, k, &f);
                }
            }
        }
        Ok(inv)
    }

    pub fn map<F: Fn(&E) -> E>(&self, f: F) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Minimum entry valuation (`+inf` for the zero matrix).
    pub fn min_valuation<F: ValuedField<Elem = E>>(&self, field: &F) -> Valuation {
        self.data.iter().map(|e| field.valuation(e)).min().unwrap_or(Valuation::Infinite)
    }

    /// All entries in the valuation ring.
    pub fn is_integral<F: ValuedField<Elem = E>>(&self, field: &F) -> bool {
        self.min_valuation(field) >= Valuation::zero()
    }

    /// Member of `GL_n(O)`: integral with integral inverse.
    pub fn is_unimodular<F: ValuedField<Elem = E>>(&self, field: &F) -> bool {
        self.is_square() && self.is_integral(field) && self.inverse().is_ok_and(|inv| inv.is_integral(field))
    }
}

impl<E: Scalar> fmt::Display for Matrix<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("]\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{int, rat, PAdic};
    use num_rational::BigRational;

    fn m(rows: &[&[i64]]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    /// Leibniz expansion over all permutations.
    fn leibniz(a: &Matrix<BigRational>) -> BigRational {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = vec![];
            for p in perms(n - 1) {
                for pos in 0..n {
                    let mut q = p.clone();
                    q.insert(pos, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = a.rows();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let prod = (0..n).fold(int(1), |acc, i| acc * &a[(i, p[i])]);
                if inversions % 2 == 0 {
                    prod
                } else {
                    -prod
                }
            })
            .fold(int(0), |a, b| a + b)
    }

    #[test]
    fn det_matches_leibniz() {
        let a = m(&[&[2, -1, 0, 3], &[1, 0, 4, 1], &[0, 5, -2, 2], &[7, 1, 1, 0]]);
        assert_eq!(a.det().unwrap(), leibniz(&a));
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(b.det().unwrap(), int(-1));
        let s = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.det().unwrap(), int(0));
    }

    #[test]
    fn inverse_round_trips() {
        let a = m(&[&[1, 0], &[3, 9]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, Matrix::from_rows(vec![vec![int(1), int(0)], vec![rat(-1, 3), rat(1, 9)]]).unwrap());
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(m(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
    }

    #[test]
    fn unimodularity() {
        let f = PAdic::new(3).unwrap();
        assert!(m(&[&[1, 5], &[0, 2]]).is_unimodular(&f));
        assert!(!m(&[&[1, 5], &[0, 3]]).is_unimodular(&f));
        assert!(!Matrix::diagonal(vec![rat(1, 3), int(3)]).is_unimodular(&f));
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Matrix::<BigRational>::from_rows(vec![vec![int(1)], vec![int(1), int(2)]]).is_err());
        assert!(Matrix::<BigRational>::new(2, 2, vec![int(1)]).is_err());
        assert!(m(&[&[1, 2]]).mul(&m(&[&[1, 2]])).is_err());
    }
}
