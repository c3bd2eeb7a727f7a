//! Closed subspaces of `C^d` and the reducing-subspace primitives.
//!
//! A [`Subspace`] keeps an orthonormal frame together with its orthogonal
//! projection. Frames are unique only up to unitary mixing of columns, so
//! identity is always decided on the projection.

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, identity, null_space, op_norm, range_basis, vstack, zeros,
    ComplexMatrix,
};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone)]
pub struct Subspace {
    frame: ComplexMatrix,
    projection: ComplexMatrix,
    tol: f64,
}

impl Subspace {
    /// Wraps a frame whose columns are already orthonormal.
    pub(crate) fn from_orthonormal(frame: ComplexMatrix, tol: f64) -> Self {
        let projection = &frame * frame.adjoint();
        Self { frame, projection, tol }
    }

    pub fn full(dim: usize) -> Self {
        Self::from_orthonormal(identity(dim), 0.0)
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_orthonormal(zeros(dim, 0), 0.0)
    }

    /// Span of the coordinate vectors `e_i` for the listed indices.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Self {
        let mut frame = zeros(dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            frame[(i, j)] = crate::linalg::c(1.0, 0.0);
        }
        Self::from_orthonormal(frame, 0.0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn frame(&self) -> &ComplexMatrix {
        &self.frame
    }

    pub fn projection(&self) -> &ComplexMatrix {
        &self.projection
    }

    /// Tolerance that was used to build this subspace.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `‖P_self − P_other‖`.
    pub fn distance(&self, other: &Subspace) -> f64 {
        op_norm(&(&self.projection - &other.projection))
    }

    /// Equality of projections within the combined tolerance of both sides.
    pub fn approx_eq(&self, other: &Subspace) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.distance(other) <= (self.tol + other.tol).max(f64::EPSILON * 64.0)
    }

    /// `‖P_other − P_self·P_other‖`, zero iff `other ⊆ self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        op_norm(&(&other.projection - &self.projection * &other.projection))
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        let d = self.ambient_dim();
        if self.is_zero() {
            return Subspace { tol: self.tol, ..Subspace::full(d) };
        }
        // singular values of the frame are all 1, any cut in (0,1) works
        let basis = null_space(&self.frame.adjoint(), 0.5);
        Subspace::from_orthonormal(basis, self.tol)
    }

    /// Pushes a subspace of `C^k` given in this subspace's frame
    /// coordinates back into the ambient space.
    pub fn embed(&self, inner: &Subspace) -> Result<Subspace> {
        if inner.ambient_dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: inner.ambient_dim() });
        }
        Ok(Subspace::from_orthonormal(&self.frame * &inner.frame, self.tol.max(inner.tol)))
    }

    /// Conjugates by a unitary `Q`: returns `Q·S`.
    pub fn rotated(&self, q: &ComplexMatrix) -> Subspace {
        Subspace::from_orthonormal(q * &self.frame, self.tol)
    }

    /// Direct sum of mutually orthogonal subspaces.
    pub fn orthogonal_sum(dim: usize, parts: &[&Subspace]) -> Subspace {
        let k: usize = parts.iter().map(|s| s.dim()).sum();
        let mut frame = zeros(dim, k);
        let mut col = 0;
        let mut tol: f64 = 0.0;
        for s in parts {
            frame.view_mut((0, col), (dim, s.dim())).copy_from(&s.frame);
            col += s.dim();
            tol = tol.max(s.tol);
        }
        Subspace::from_orthonormal(frame, tol)
    }
}

/// Column span of `m`, with rank decided by singular values above the
/// effective tolerance.
pub fn orthonormalize(m: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let eff = tol.effective(m.nrows(), op_norm(m));
    Ok(Subspace::from_orthonormal(range_basis(m, eff), eff))
}

/// `S1 ∩ S2` as the kernel of `[(I − P1); (I − P2)]`.
pub fn intersect(s1: &Subspace, s2: &Subspace) -> Result<Subspace> {
    let d = s1.ambient_dim();
    if s2.ambient_dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: s2.ambient_dim() });
    }
    if s1.is_zero() || s2.is_zero() {
        return Ok(Subspace { tol: s1.tol.max(s2.tol), ..Subspace::zero(d) });
    }
    let tol = s1.tol.max(s2.tol).max(Tolerance::default().effective(d, 1.0));
    let id = identity(d);
    let stacked = vstack(&[&id - &s1.projection, &id - &s2.projection], d);
    Ok(Subspace::from_orthonormal(null_space(&stacked, tol), tol))
}

/// Kernel of a square operator, as a subspace.
pub fn kernel(m: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_finite(m)?;
    let eff = tol.effective(m.ncols(), op_norm(m));
    Ok(Subspace::from_orthonormal(null_space(m, eff), eff))
}

/// Largest subspace of `seed` left invariant by every operator in `ops`
/// and by every adjoint.
///
/// Refines `S ← {h ∈ S : T h ∈ S, T* h ∈ S}` until the dimension stops
/// dropping. In exact arithmetic this takes at most `dim` rounds; the
/// iteration is capped at `dim + 1` and fails loudly beyond that.
pub fn maximal_reducing_core(
    seed: &Subspace,
    ops: &[ComplexMatrix],
    tol: Tolerance,
) -> Result<Subspace> {
    let d = seed.ambient_dim();
    let mut max_norm: f64 = 0.0;
    for op in ops {
        ensure_square(op, d)?;
        ensure_finite(op)?;
        max_norm = max_norm.max(op_norm(op));
    }
    let eff = tol.effective(d, max_norm);
    let id = identity(d);
    let mut current = seed.clone();
    for _ in 0..=d + 1 {
        if current.is_zero() || ops.is_empty() {
            return Ok(current);
        }
        let k = current.dim();
        let leak = &id - current.projection();
        let mut blocks = Vec::with_capacity(2 * ops.len());
        for op in ops {
            blocks.push(&leak * op * current.frame());
            blocks.push(&leak * op.adjoint() * current.frame());
        }
        let coeffs = null_space(&vstack(&blocks, k), eff);
        if coeffs.ncols() == k {
            return Ok(Subspace { tol: eff.max(current.tol), ..current });
        }
        current = Subspace::from_orthonormal(current.frame() * coeffs, eff.max(current.tol));
    }
    Err(Error::IterationCap { cap: d + 1 })
}

/// `frame* · T · frame`; the matrix of `T|_S` when `S` reduces `T`.
pub fn compress(t: &ComplexMatrix, s: &Subspace) -> Result<ComplexMatrix> {
    ensure_square(t, s.ambient_dim())?;
    Ok(s.frame().adjoint() * t * s.frame())
}

/// Residuals of the reducing test `‖(I−P)TP‖`, `‖(I−P)T*P‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionReport {
    pub reduces: bool,
    pub forward_residual: f64,
    pub adjoint_residual: f64,
    pub tol: f64,
}

impl ReductionReport {
    pub fn max_residual(&self) -> f64 {
        self.forward_residual.max(self.adjoint_residual)
    }
}

pub fn reduces(t: &ComplexMatrix, s: &Subspace, tol: Tolerance) -> Result<ReductionReport> {
    let d = s.ambient_dim();
    ensure_square(t, d)?;
    let eff = tol.effective(d, op_norm(t));
    if s.is_zero() || s.dim() == d {
        return Ok(ReductionReport { reduces: true, forward_residual: 0.0, adjoint_residual: 0.0, tol: eff });
    }
    let leak = identity(d) - s.projection();
    let forward = op_norm(&(&leak * t * s.frame()));
    let adjoint = op_norm(&(&leak * t.adjoint() * s.frame()));
    Ok(ReductionReport {
        reduces: forward <= eff && adjoint <= eff,
        forward_residual: forward,
        adjoint_residual: adjoint,
        tol: eff,
    })
}
