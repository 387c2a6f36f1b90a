//! Compressed sparse row storage for the rectangular and normal systems.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-compressed sparse matrix.
///
/// Column indices are strictly increasing inside each row and explicit zeros
/// are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(order: usize) -> Self {
        Self {
            rows: order,
            cols: order,
            row_ptr: (0..=order).collect(),
            col_idx: (0..order).collect(),
            values: vec![T::one(); order],
        }
    }

    /// Builds a matrix from per-row `(column, value)` lists.
    ///
    /// Entries inside a row may come in any order; duplicates are an error and
    /// zero values are dropped.
    pub fn from_rows<R>(cols: usize, rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = (usize, T)>,
    {
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (r, row) in rows.into_iter().enumerate() {
            let mut entries: Vec<(usize, T)> = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            entries.sort_by_key(|&(c, _)| c);
            for w in entries.windows(2) {
                if w[0].0 == w[1].0 {
                    return Err(Error::domain(format!("duplicate column {} in row {r}", w[0].0)));
                }
            }
            for (c, v) in entries {
                if c >= cols {
                    return Err(Error::domain(format!("column {c} out of range in row {r} ({cols} columns)")));
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows: row_ptr.len() - 1,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::domain("ragged dense rows"));
        }
        Self::from_rows(cols, rows.iter().map(|r| r.iter().copied().enumerate()))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Stored `(column, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn row_len(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn to_dense_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|r| {
                let mut dense = vec![T::zero(); self.cols];
                for (c, v) in self.row(r) {
                    dense[c] = v;
                }
                dense
            })
            .collect()
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::domain(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut out = vec![T::zero(); self.rows];
        self.mul_vec_into(x, &mut out);
        Ok(out)
    }

    /// `out = self * x` without length checks (callers validate once).
    pub(crate) fn mul_vec_into(&self, x: &[T], out: &mut [T]) {
        for (r, o) in out.iter_mut().enumerate() {
            *o = self.row(r).fold(T::zero(), |acc, (c, v)| acc + v * x[c]);
        }
    }

    /// `self^T * y`.
    pub fn transpose_mul_vec(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.rows {
            return Err(Error::domain(format!(
                "vector length {} does not match {} rows",
                y.len(),
                self.rows
            )));
        }
        let mut out = vec![T::zero(); self.cols];
        for (r, &yr) in y.iter().enumerate() {
            for (c, v) in self.row(r) {
                out[c] += v * yr;
            }
        }
        Ok(out)
    }

    /// Exact symmetry: every stored `(r, c, v)` has a stored `(c, r, v)`.
    /// Stored values are nonzero, so `==` here means bit equality.
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                self.row(r).all(|(c, v)| self.get(c, r) == v)
            })
    }

    /// Hop distance from `sources` in the graph whose edges are the
    /// off-diagonal nonzeros of this (square) matrix. Unreachable vertices get
    /// `usize::MAX`.
    pub fn pattern_distance(&self, sources: &BTreeSet<usize>) -> Result<Vec<usize>> {
        if !self.is_square() {
            return Err(Error::domain("pattern distance needs a square matrix"));
        }
        if sources.is_empty() {
            return Err(Error::domain("pattern distance needs at least one source"));
        }
        let mut dist = vec![usize::MAX; self.rows];
        let mut queue = VecDeque::new();
        for &s in sources {
            if s >= self.rows {
                return Err(Error::domain(format!("source {s} out of range")));
            }
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for (w, _) in self.row(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Converts every coefficient to another scalar type.
    pub fn cast<U: Scalar>(&self) -> SparseMatrix<U> {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_rows_sorts_and_drops_zeros() {
        let m = SparseMatrix::<f64>::from_rows(4, vec![vec![(3, 1.0), (0, 2.0), (1, 0.0)], vec![]]).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.row(0).collect::<Vec<_>>(), vec![(0, 2.0), (3, 1.0)]);
        assert_eq!(m.row_len(1), 0);
    }

    #[test]
    fn rejects_duplicates_and_out_of_range() {
        assert!(SparseMatrix::<f64>::from_rows(3, vec![vec![(1, 1.0), (1, 2.0)]]).is_err());
        assert!(SparseMatrix::<f64>::from_rows(3, vec![vec![(3, 1.0)]]).is_err());
    }

    #[test]
    fn products() {
        let m = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0], vec![4.0, 0.0]]).unwrap();
        assert_eq!(m.mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 3.0, 4.0]);
        assert_eq!(m.transpose_mul_vec(&[1.0, 1.0, 1.0]).unwrap(), vec![5.0, 5.0]);
        assert!(m.mul_vec(&[1.0]).is_err());
    }

    #[test]
    fn symmetry_check() {
        let s = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        assert!(s.is_symmetric());
        let a = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![-1.5, 2.0]]).unwrap();
        assert!(!a.is_symmetric());
        let p = SparseMatrix::from_dense(&[vec![2.0, -1.0], vec![0.0, 2.0]]).unwrap();
        assert!(!p.is_symmetric());
    }

    #[test]
    fn pattern_distance_on_path() {
        let m = SparseMatrix::from_dense(&[
            vec![2.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 2.0],
        ])
        .unwrap();
        assert_eq!(m.pattern_distance(&[0].into()).unwrap(), vec![0, 1, 2]);
    }
}
