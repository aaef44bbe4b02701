//! Sparse direct solves backed by faer's supernodal LU.
//!
//! faer detects structural singularity only. Numerical singularity is caught
//! by a probe solve: with `b = A 1` the computed solution must reproduce the
//! ones vector, and the worst entry names the offending row.

use std::sync::Arc;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::MatMut;

use crate::error::{Error, Result};
use crate::fe_space::DofLayout;
use crate::sparse::{CsrMatrix, Pattern};

/// Largest deviation from the ones vector accepted by the probe solve.
const PROBE_TOLERANCE: f64 = 1e-6;

/// Column-major copy of a row pattern.
#[derive(Debug)]
struct CscStructure {
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    /// CSR value position to CSC value position.
    perm: Vec<usize>,
}

impl CscStructure {
    fn new(p: &Pattern) -> Self {
        let n = p.n();
        let mut col_ptr = vec![0usize; n + 1];
        for &j in p.col_idx() {
            col_ptr[j + 1] += 1;
        }
        for j in 0..n {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut next = col_ptr.clone();
        let mut row_idx = vec![0usize; p.nnz()];
        let mut perm = vec![0usize; p.nnz()];
        for i in 0..n {
            for k in p.row_ptr()[i]..p.row_ptr()[i + 1] {
                let j = p.col_idx()[k];
                row_idx[next[j]] = i;
                perm[k] = next[j];
                next[j] += 1;
            }
        }
        Self { col_ptr, row_idx, perm }
    }
}

/// Factorizes matrices and reuses the symbolic analysis while the sparsity
/// pattern stays the same. Numeric factors are never reused.
#[derive(Default)]
pub struct LinearSolver {
    cache: Option<(Arc<Pattern>, Arc<CscStructure>, SymbolicLu<usize>)>,
}

impl std::fmt::Debug for LinearSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearSolver")
            .field("cached_symbolic", &self.cache.is_some())
            .finish()
    }
}

pub struct Factorization {
    lu: Lu<usize, f64>,
    matrix: CsrMatrix,
    n: usize,
    nnz: usize,
}

impl std::fmt::Debug for Factorization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Factorization")
            .field("n", &self.n)
            .field("nnz", &self.nnz)
            .finish_non_exhaustive()
    }
}

impl LinearSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// LU factorization of `a`. `layout` is used only to name the field of a
    /// singular row.
    pub fn factorize(&mut self, a: &CsrMatrix, layout: Option<&DofLayout>) -> Result<Factorization> {
        let n = a.n();
        if a.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("system matrix"));
        }
        let hit = matches!(&self.cache, Some((p, _, _)) if Arc::ptr_eq(p, a.pattern()) || **p == **a.pattern());
        if !hit {
            let csc = Arc::new(CscStructure::new(a.pattern()));
            let sym = SymbolicSparseColMatRef::new_checked(n, n, &csc.col_ptr, None, &csc.row_idx);
            let symbolic = SymbolicLu::try_new(sym).map_err(|e| Error::LinearSolver(format!("{e:?}")))?;
            self.cache = Some((a.pattern().clone(), csc, symbolic));
        }
        let (_, csc, symbolic) = self.cache.as_ref().expect("cache filled above");
        let mut values = vec![0.0; a.values().len()];
        for (k, &v) in a.values().iter().enumerate() {
            values[csc.perm[k]] = v;
        }
        let sym = SymbolicSparseColMatRef::new_checked(n, n, &csc.col_ptr, None, &csc.row_idx);
        let mat = SparseColMatRef::new(sym, &values);
        let field = |row: usize| layout.filter(|l| row < l.dim()).map(|l| l.field_of(row));
        let lu = Lu::try_new_with_symbolic(symbolic.clone(), mat).map_err(|e| match e {
            LuError::SymbolicSingular { index } => Error::SingularMatrix {
                row: index,
                field: field(index),
            },
            LuError::Generic(g) => Error::LinearSolver(format!("{g:?}")),
        })?;
        let fact = Factorization {
            lu,
            matrix: a.clone(),
            n,
            nnz: a.values().len(),
        };

        let ones = vec![1.0; n];
        let x = fact.solve_unchecked(&a.matvec(&ones));
        let (worst, dev) = x
            .iter()
            .map(|v| if v.is_finite() { (v - 1.0).abs() } else { f64::INFINITY })
            .enumerate()
            .fold((0, 0.0), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
        if dev > PROBE_TOLERANCE {
            return Err(Error::SingularMatrix {
                row: worst,
                field: field(worst),
            });
        }
        Ok(fact)
    }
}

/// One-shot factorization without symbolic reuse.
pub fn factorize(a: &CsrMatrix, layout: Option<&DofLayout>) -> Result<Factorization> {
    LinearSolver::new().factorize(a, layout)
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the factorized matrix.
    pub fn nnz(&self) -> usize {
        self.nnz
    }

    fn solve_unchecked(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.lu.solve_in_place(MatMut::from_column_major_slice_mut(&mut x, self.n, 1));
        x
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::Dimension {
                context: "right-hand side",
                expected: self.n,
                got: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("right-hand side"));
        }
        let x = self.solve_unchecked(b);
        if cfg!(debug_assertions) {
            let r = self.matrix.matvec(&x);
            let res = r.iter().zip(b).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let scale = self.matrix.norm_inf() * inf_norm(&x) + inf_norm(b);
            if !(res <= 1e-10 * scale) {
                return Err(Error::LinearSolver(format!(
                    "residual check failed: {res:e} > 1e-10 * {scale:e}"
                )));
            }
        }
        Ok(x)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
