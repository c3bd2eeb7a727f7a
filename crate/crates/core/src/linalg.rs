//! Dense complex matrix helpers built on nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix; the representation of every operator in the crate.
pub type ComplexMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { c(values[i], 0.0) } else { c(0.0, 0.0) })
}

pub fn diag_complex(values: &[Complex64]) -> ComplexMatrix {
    let n = values.len();
    ComplexMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { c(0.0, 0.0) })
}

/// Builds a matrix from real row-major rows.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let r = rows.len();
    let cols = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, cols, |i, j| c(rows[i][j], 0.0))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_square(m: &ComplexMatrix, side: usize) -> Result<()> {
    if m.nrows() != side {
        return Err(Error::DimensionMismatch { expected: side, found: m.nrows() });
    }
    if m.ncols() != side {
        return Err(Error::DimensionMismatch { expected: side, found: m.ncols() });
    }
    Ok(())
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// `‖T*T − I‖`.
pub fn isometry_residual(t: &ComplexMatrix) -> f64 {
    let n = t.ncols();
    op_norm(&(t.adjoint() * t - identity(n)))
}

/// `max(‖T*T − I‖, ‖TT* − I‖)`.
pub fn unitarity_residual(t: &ComplexMatrix) -> f64 {
    let n = t.nrows();
    isometry_residual(t).max(op_norm(&(t * t.adjoint() - identity(n))))
}

/// `‖XY − YX‖`.
pub fn commutator_norm(x: &ComplexMatrix, y: &ComplexMatrix) -> f64 {
    op_norm(&(x * y - y * x))
}

/// `‖XX* − X*X‖`.
pub fn normality_residual(x: &ComplexMatrix) -> f64 {
    op_norm(&(x * x.adjoint() - x.adjoint() * x))
}

pub fn matrix_power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// Orthonormal basis of `{x : ‖Mx‖ ≈ 0}`: right singular vectors whose
/// singular value does not exceed `tol`.
pub fn null_space(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let n = m.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    let padded = if m.nrows() < n {
        let mut p = zeros(n, n);
        p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v = svd.v_t.expect("v_t requested").adjoint();
    let keep: Vec<usize> = (0..n).filter(|&i| svd.singular_values[i] <= tol).collect();
    select_columns(&v, &keep)
}

/// Orthonormal basis of the column space: left singular vectors whose
/// singular value exceeds `tol`.
pub fn range_basis(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > tol).collect();
    select_columns(&u, &keep)
}

pub fn select_columns(m: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Vertically stacks blocks that share a column count.
pub fn vstack(blocks: &[ComplexMatrix], cols: usize) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut offset = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), cols);
        out.view_mut((offset, 0), (b.nrows(), cols)).copy_from(b);
        offset += b.nrows();
    }
    out
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), b.shape()).copy_from(b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Hermitian part `(M + M*)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues with their
/// orthonormal eigenvectors as columns.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    (eig.eigenvalues.iter().cloned().collect(), eig.eigenvectors)
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    hermitian_part(m).symmetric_eigenvalues().iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}
