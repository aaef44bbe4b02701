//! Compressed sparse row storage with a shared, immutable pattern.
//!
//! Entries are never inserted after construction, so matrices assembled on
//! the same pattern can be combined value-wise and the symbolic
//! factorization of one serves them all.

use std::sync::Arc;

#[derive(Debug, PartialEq, Eq)]
pub struct Pattern {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl Pattern {
    /// Build from per-row column lists. Duplicates are merged and every
    /// diagonal entry is stored explicitly.
    pub fn from_rows(mut rows: Vec<Vec<usize>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for (i, row) in rows.iter_mut().enumerate() {
            row.push(i);
            row.sort_unstable();
            row.dedup();
            debug_assert!(row.last().is_none_or(|&c| c < n));
            col_idx.extend_from_slice(row);
            row_ptr.push(col_idx.len());
        }
        Self { n, row_ptr, col_idx }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    /// Position of `(i, j)` in the value array.
    #[inline]
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let (s, e) = (self.row_ptr[i], self.row_ptr[i + 1]);
        self.col_idx[s..e].binary_search(&j).ok().map(|k| s + k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pattern: Arc<Pattern>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(pattern: Arc<Pattern>) -> Self {
        let values = vec![0.0; pattern.nnz()];
        Self { pattern, values }
    }

    pub fn from_dense(a: &[Vec<f64>]) -> Self {
        let rows = a
            .iter()
            .map(|r| r.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(j, _)| j).collect())
            .collect();
        let mut m = Self::zeros(Arc::new(Pattern::from_rows(rows)));
        for (i, r) in a.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                if v != 0.0 {
                    m.add(i, j, v);
                }
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(Arc::new(Pattern::from_rows(vec![Vec::new(); n])));
        m.values.fill(1.0);
        m
    }

    pub fn pattern(&self) -> &Arc<Pattern> {
        &self.pattern
    }

    pub fn n(&self) -> usize {
        self.pattern.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Add `v` to entry `(i, j)`, which must be in the pattern.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .pattern
            .find(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) is outside the sparsity pattern"));
        self.values[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pattern.find(i, j).map_or(0.0, |k| self.values[k])
    }

    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.pattern.row_ptr[i], self.pattern.row_ptr[i + 1]);
        (&self.pattern.col_idx[s..e], &self.values[s..e])
    }

    /// `self += a * other`; both must share the same pattern.
    pub fn axpy(&mut self, a: f64, other: &CsrMatrix) {
        assert!(
            Arc::ptr_eq(&self.pattern, &other.pattern) || self.pattern == other.pattern,
            "axpy requires identical sparsity patterns"
        );
        self.values.iter_mut().zip(&other.values).for_each(|(x, y)| *x += a * y);
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n());
        (0..self.n())
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n())
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        (0..self.n())
            .map(|i| {
                let (cols, vals) = self.row(i);
                x[i] * cols.iter().zip(vals).map(|(&j, &v)| v * y[j]).sum::<f64>()
            })
            .sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n()]; self.n()];
        for (i, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_keeps_diagonal_and_merges_duplicates() {
        let p = Pattern::from_rows(vec![vec![1, 1], vec![], vec![0, 2, 0]]);
        assert_eq!(p.row_ptr(), &[0, 2, 3, 5]);
        assert_eq!(p.col_idx(), &[0, 1, 1, 0, 2]);
        assert_eq!(p.find(2, 1), None);
    }

    #[test]
    fn dense_round_trip_and_products() {
        let a = vec![vec![2.0, 0.0, 1.0], vec![0.0, 3.0, 0.0], vec![-1.0, 0.0, 4.0]];
        let m = CsrMatrix::from_dense(&a);
        assert_eq!(m.to_dense(), a);
        assert_eq!(m.matvec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0, 3.0]);
        assert_eq!(m.bilinear(&[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]), 1.0);
        assert_eq!(m.norm_inf(), 5.0);
    }

    #[test]
    #[should_panic(expected = "outside the sparsity pattern")]
    fn adding_outside_pattern_panics() {
        let mut m = CsrMatrix::identity(2);
        m.add(0, 1, 1.0);
    }
}
