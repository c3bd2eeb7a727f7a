//! Defect operator, fundamental operators and the sufficient conditions
//! for the E-isometric dilation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator_norm, hermitian_eigen, identity, op_norm, select_columns, ComplexMatrix};
use crate::subspace::Subspace;
use crate::tetrablock::radius::numerical_radius;
use crate::tetrablock::triple::ETriple;

/// `D_P = (I − P*P)^{1/2}` together with the tolerance-thresholded
/// pseudoinverse and the frame of its range.
#[derive(Debug, Clone)]
pub struct Defect {
    pub operator: ComplexMatrix,
    pub pseudo_inverse: ComplexMatrix,
    pub space: Subspace,
}

/// Eigenvalues of `I − P*P` are clamped at zero before the square root.
/// Directions whose eigenvalue does not exceed `tol` are treated as
/// isometric: they are dropped from the defect space and the pseudoinverse.
pub fn defect(p: &ComplexMatrix, tol: f64) -> Defect {
    let d = p.nrows();
    let (values, vectors) = hermitian_eigen(&(identity(d) - p.adjoint() * p));
    let kept: Vec<usize> = (0..d).filter(|&i| values[i] > tol).collect();
    let mut root = ComplexMatrix::zeros(d, d);
    let mut pinv = ComplexMatrix::zeros(d, d);
    for (i, &value) in values.iter().enumerate() {
        let lambda = value.max(0.0);
        let v = vectors.column(i);
        let outer = v * v.adjoint();
        root += &outer * Complex64::new(lambda.sqrt(), 0.0);
        if kept.contains(&i) {
            pinv += outer * Complex64::new(1.0 / lambda.sqrt(), 0.0);
        }
    }
    Defect {
        operator: root,
        pseudo_inverse: pinv,
        space: Subspace::from_orthonormal(select_columns(&vectors, &kept), tol),
    }
}

/// Fundamental operators in defect-frame coordinates.
#[derive(Debug, Clone)]
pub struct FundamentalPair {
    pub defect: Defect,
    pub f1: ComplexMatrix,
    pub f2: ComplexMatrix,
    /// `‖A − B*P − D_P F̂₁ D_P‖`
    pub residual1: f64,
    /// `‖B − A*P − D_P F̂₂ D_P‖`
    pub residual2: f64,
    pub tol: f64,
}

impl FundamentalPair {
    pub fn defect_dim(&self) -> usize {
        self.defect.space.dim()
    }

    /// `F̂ᵢ = frame · Fᵢ · frame*` on the ambient space.
    pub fn ambient(&self, f: &ComplexMatrix) -> ComplexMatrix {
        let frame = self.defect.space.frame();
        frame * f * frame.adjoint()
    }
}

pub fn fundamental_operators(triple: &ETriple) -> Result<FundamentalPair> {
    let (a, b, p) = (triple.a(), triple.b(), triple.p());
    let tol = triple.effective_tol();
    let defect = defect(p, tol);
    let frame = defect.space.frame();
    let x1 = a - b.adjoint() * p;
    let x2 = b - a.adjoint() * p;
    let solve = |x: &ComplexMatrix| -> (ComplexMatrix, f64) {
        let ambient = &defect.pseudo_inverse * x * &defect.pseudo_inverse;
        let rebuilt = &defect.operator * &ambient * &defect.operator;
        (frame.adjoint() * ambient * frame, op_norm(&(x - rebuilt)))
    };
    let (f1, residual1) = solve(&x1);
    let (f2, residual2) = solve(&x2);
    for (name, residual) in [("A − B*P", residual1), ("B − A*P", residual2)] {
        if residual > tol {
            return Err(Error::NotAnEContraction {
                what: format!("{name} does not factor through the defect operator"),
                residual,
            });
        }
    }
    Ok(FundamentalPair { defect, f1, f2, residual1, residual2, tol })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// `‖[F₁, F₂]‖`
    pub commutator: f64,
    /// `‖[F₁*, F₁] − [F₂*, F₂]‖`
    pub normal_balance: f64,
    /// Largest `ω(F₁ + zF₂)` over the sampled unimodular `z`.
    pub max_radius: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Angles used for each numerical-radius evaluation.
const RADIUS_ANGLES: usize = 64;

/// Checks the commutator and numerical-radius hypotheses on the
/// fundamental operators. `ω(F₁ + zF₂)` is convex in `z`, so its maximum
/// over the closed disc lives on the circle.
pub fn sufficient_dilation_hypotheses(pair: &FundamentalPair, n_z: usize) -> HypothesisReport {
    let (f1, f2) = (&pair.f1, &pair.f2);
    let commutator = commutator_norm(f1, f2);
    let self_comm = |f: &ComplexMatrix| f.adjoint() * f - f * f.adjoint();
    let normal_balance = op_norm(&(self_comm(f1) - self_comm(f2)));
    let n_z = n_z.max(1);
    let max_radius = (0..n_z)
        .map(|j| {
            let z = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n_z as f64);
            numerical_radius(&(f1 + f2 * z), RADIUS_ANGLES)
        })
        .fold(0.0, f64::max);
    let tol = pair.tol;
    HypothesisReport {
        commutator,
        normal_balance,
        max_radius,
        tol,
        pass: commutator <= tol && normal_balance <= tol && max_radius <= 1.0 + tol,
    }
}
