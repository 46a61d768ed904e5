//! Sparse direct factorization and solve.
//!
//! Each time-stepping scheme factorizes its Stokes saddle matrix (LU) and its
//! Darcy matrix (Cholesky) once per (mesh, dt, scheme) and reuses both
//! factorizations for every step, which is where the per-step cost of the
//! decoupled schemes comes from. Backed by `faer`'s sparse solvers.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::LuError;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

enum Factor {
    Lu(faer::sparse::linalg::solvers::Lu<usize, f64>),
    Cholesky(faer::sparse::linalg::solvers::Llt<usize, f64>),
}

/// Reusable factorization of one square sparse matrix.
pub struct Factorization {
    factor: Factor,
    dim: usize,
}

fn to_faer(a: &SparseMatrix) -> Result<SparseColMat<usize, f64>> {
    let (row_ptr, col_idx, values) = a.raw();
    let mut triplets = Vec::with_capacity(values.len());
    for r in 0..a.nrows() {
        for k in row_ptr[r]..row_ptr[r + 1] {
            triplets.push(Triplet::new(r, col_idx[k], values[k]));
        }
    }
    SparseColMat::try_new_from_triplets(a.nrows(), a.ncols(), &triplets)
        .map_err(|_| Error::Singular { row: 0 })
}

/// Structurally empty row or column means a guaranteed zero pivot; report it
/// before handing the matrix to the factorization.
fn find_empty_row_or_col(a: &SparseMatrix) -> Option<usize> {
    let mut col_nonzero = vec![false; a.ncols()];
    for r in 0..a.nrows() {
        let (cols, vals) = a.row(r);
        if cols.is_empty() || vals.iter().all(|v| *v == 0.0) {
            return Some(r);
        }
        for c in cols {
            col_nonzero[*c] = true;
        }
    }
    col_nonzero.iter().position(|&nz| !nz)
}

/// Sparse LU with pivoting, for general (in particular saddle) matrices.
pub fn factorize(a: &SparseMatrix) -> Result<Factorization> {
    assert_eq!(a.nrows(), a.ncols(), "factorize needs a square matrix");
    if let Some(row) = find_empty_row_or_col(a) {
        return Err(Error::Singular { row });
    }
    let mat = to_faer(a)?;
    let lu = mat.sp_lu().map_err(|e| match e {
        LuError::SymbolicSingular { index } => Error::Singular { row: index },
        LuError::Generic(_) => Error::Singular { row: 0 },
    })?;
    Ok(Factorization {
        factor: Factor::Lu(lu),
        dim: a.nrows(),
    })
}

/// Sparse Cholesky for matrices tagged symmetric positive definite.
pub fn factorize_spd(a: &SparseMatrix) -> Result<Factorization> {
    assert_eq!(a.nrows(), a.ncols(), "factorize needs a square matrix");
    if let Some(row) = find_empty_row_or_col(a) {
        return Err(Error::Singular { row });
    }
    let mat = to_faer(a)?;
    let llt = mat
        .sp_cholesky(faer::Side::Lower)
        .map_err(|_| Error::Singular { row: 0 })?;
    Ok(Factorization {
        factor: Factor::Cholesky(llt),
        dim: a.nrows(),
    })
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Solve A x = rhs with the stored factors.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.len(),
            });
        }
        let b = faer::Mat::from_fn(self.dim, 1, |i, _| rhs[i]);
        let x = match &self.factor {
            Factor::Lu(lu) => lu.solve(&b),
            Factor::Cholesky(llt) => llt.solve(&b),
        };
        Ok((0..self.dim).map(|i| x[(i, 0)]).collect())
    }
}
