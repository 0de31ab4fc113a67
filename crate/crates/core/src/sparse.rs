//! Column-compressed sparse matrices over any [`Scalar`].

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::scalar::{Coeff, Laurent, Scalar};

/// Sparse matrix stored by columns; every column is sorted by row and holds
/// no explicit zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<S> {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, S)>>,
}

fn normalize_column<S: Scalar>(mut col: Vec<(usize, S)>) -> Vec<(usize, S)> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, S)> = Vec::with_capacity(col.len());
    for (r, v) in col {
        match out.last_mut() {
            Some((lr, lv)) if *lr == r => *lv = lv.plus(&v),
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| !v.is_zero());
    out
}

impl<S: Scalar> SparseMat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMat {
            rows,
            cols,
            data: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMat {
            rows: n,
            cols: n,
            data: (0..n).map(|i| vec![(i, S::one())]).collect(),
        }
    }

    /// Builds from unsorted columns; duplicate rows are summed and zeros dropped.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, S)>>) -> Self {
        let cols = columns.len();
        let data = columns
            .into_iter()
            .map(|c| {
                debug_assert!(c.iter().all(|(r, _)| *r < rows));
                normalize_column(c)
            })
            .collect();
        SparseMat { rows, cols, data }
    }

    pub fn from_triplets(rows: usize, cols: usize, entries: Vec<(usize, usize, S)>) -> Self {
        let mut columns = vec![Vec::new(); cols];
        for (r, c, v) in entries {
            columns[c].push((r, v));
        }
        Self::from_columns(rows, columns)
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

    pub fn column(&self, j: usize) -> &[(usize, S)] {
        &self.data[j]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[(usize, S)]> {
        self.data.iter().map(Vec::as_slice)
    }

    pub fn get(&self, r: usize, c: usize) -> S {
        match self.data[c].binary_search_by_key(&r, |e| e.0) {
            Ok(k) => self.data[c][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().flatten().all(|(_, v)| v.is_exact())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (r, c, v) in self.entries() {
            columns[r].push((c, v.conj()));
        }
        SparseMat {
            rows: self.cols,
            cols: self.rows,
            data: columns,
        }
    }

    pub fn transpose(&self) -> Self {
        let mut columns = vec![Vec::new(); self.rows];
        for (r, c, v) in self.entries() {
            columns[r].push((c, v.clone()));
        }
        SparseMat {
            rows: self.cols,
            cols: self.rows,
            data: columns,
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let data = rhs
            .data
            .iter()
            .map(|bcol| {
                let mut acc: BTreeMap<usize, S> = BTreeMap::new();
                for (k, b) in bcol {
                    for (r, a) in &self.data[*k] {
                        let t = a.times(b);
                        acc.entry(*r).and_modify(|x| *x = x.plus(&t)).or_insert(t);
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        SparseMat {
            rows: self.rows,
            cols: rhs.cols,
            data,
        }
    }

    fn zip(&self, rhs: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "dimension mismatch"
        );
        let zero = S::zero();
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| {
                let mut out = Vec::with_capacity(a.len() + b.len());
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let (r, v) = match (a.get(i), b.get(j)) {
                        (Some(x), Some(y)) if x.0 == y.0 => {
                            i += 1;
                            j += 1;
                            (x.0, f(&x.1, &y.1))
                        }
                        (Some(x), Some(y)) if x.0 < y.0 => {
                            i += 1;
                            (x.0, f(&x.1, &zero))
                        }
                        (Some(x), None) => {
                            i += 1;
                            (x.0, f(&x.1, &zero))
                        }
                        (_, Some(y)) => {
                            j += 1;
                            (y.0, f(&zero, &y.1))
                        }
                        (None, None) => unreachable!(),
                    };
                    if !v.is_zero() {
                        out.push((r, v));
                    }
                }
                out
            })
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.plus(b))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.zip(rhs, |a, b| a.minus(b))
    }

    pub fn scale(&self, c: &Coeff) -> Self {
        let data = self
            .data
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(r, v)| (*r, v.scaled(c)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![S::zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (r, a) in &self.data[c] {
                out[*r] = out[*r].plus(&a.times(x));
            }
        }
        out
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        SparseMat {
            rows: self.rows,
            cols: cols.len(),
            data: cols.iter().map(|&c| self.data[c].clone()).collect(),
        }
    }

    /// Largest entry magnitude.
    pub fn max_magnitude(&self) -> f64 {
        self.data
            .iter()
            .flatten()
            .map(|(_, v)| v.magnitude())
            .fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> SparseMat<T> {
        let data = self
            .data
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(r, v)| (*r, f(v)))
                    .filter(|(_, v)| !v.is_zero())
                    .collect()
            })
            .collect();
        SparseMat {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl SparseMat<Coeff> {
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (r, c, v) in self.entries() {
            m[(r, c)] = v.to_c64();
        }
        m
    }

    pub fn from_dense(m: &DMatrix<Complex64>, tol: f64) -> Self {
        let mut columns = vec![Vec::new(); m.ncols()];
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let v = m[(r, c)];
                if v.norm() > tol {
                    columns[c].push((r, Coeff::Float(v)));
                }
            }
        }
        SparseMat {
            rows: m.nrows(),
            cols: m.ncols(),
            data: columns,
        }
    }

    pub fn mul_vec_c64(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (c, x) in v.iter().enumerate() {
            if *x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (r, a) in &self.data[c] {
                out[*r] += a.to_c64() * x;
            }
        }
        out
    }

    /// `M^* v` without forming the adjoint.
    pub fn adjoint_mul_vec_c64(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .iter()
            .map(|col| col.iter().map(|(r, a)| a.to_c64().conj() * v[*r]).sum())
            .collect()
    }

    /// Largest Euclidean column norm: a certified lower bound for the operator norm.
    pub fn max_column_norm(&self) -> f64 {
        self.data
            .iter()
            .map(|col| {
                col.iter()
                    .map(|(_, v)| v.to_c64().norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

impl SparseMat<Laurent> {
    /// Specializes the gauge variable to a number.
    pub fn at(&self, z: &Coeff) -> SparseMat<Coeff> {
        self.map(|p| p.eval(z))
    }

    /// Substitutes `z -> w z` in every entry.
    pub fn rescaled(&self, w: &Coeff) -> SparseMat<Laurent> {
        self.map(|p| p.rescale(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[(usize, usize, i64)]) -> SparseMat<Coeff> {
        SparseMat::from_triplets(
            rows,
            cols,
            e.iter().map(|&(r, c, v)| (r, c, Coeff::int(v))).collect(),
        )
    }

    #[test]
    fn product_and_adjoint() {
        let a = m(2, 3, &[(0, 0, 1), (1, 2, 2)]);
        let b = m(3, 2, &[(0, 1, 3), (2, 0, 1)]);
        let ab = a.mul(&b);
        assert_eq!(ab, m(2, 2, &[(0, 1, 3), (1, 0, 2)]));
        assert_eq!(ab.adjoint(), b.adjoint().mul(&a.adjoint()));
    }

    #[test]
    fn duplicates_are_merged_and_zeros_dropped() {
        let a = m(2, 1, &[(0, 0, 1), (0, 0, -1), (1, 0, 2)]);
        assert_eq!(a.nnz(), 1);
        assert!(a.sub(&a).is_zero());
        assert_eq!(a.add(&a).get(1, 0), Coeff::int(4));
    }

    #[test]
    fn dense_round_trip() {
        let a = m(3, 3, &[(0, 1, 1), (2, 2, -5)]);
        let d = a.to_dense();
        assert_eq!(SparseMat::from_dense(&d, 0.0).to_dense(), d);
        assert_eq!(a.max_column_norm(), 5.0);
    }
}
