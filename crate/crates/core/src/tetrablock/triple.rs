//! Commuting operator triples `(A, B, P)` and their E-unitary /
//! E-isometry classification.

use serde::Serialize;

use crate::decomp::unitary_part;
use crate::error::{Error, Result};
use crate::linalg::{
    commutator_norm, ensure_finite, ensure_square, isometry_residual, normality_residual, op_norm,
    ComplexMatrix,
};
use crate::subspace::{compress, reduces, Subspace};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone)]
pub struct ETriple {
    a: ComplexMatrix,
    b: ComplexMatrix,
    p: ComplexMatrix,
    tol: Tolerance,
}

impl ETriple {
    /// Checks shapes, finiteness, pairwise commutation and contractivity.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, p: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let triple = Self::new_unchecked(a, b, p, tol)?;
        let eff = triple.effective_tol();
        for (index, m) in [&triple.a, &triple.b, &triple.p].into_iter().enumerate() {
            let norm = op_norm(m);
            if norm > 1.0 + eff {
                return Err(Error::NotAContraction { index, norm, tol: eff });
            }
        }
        let pairs = [(0, 1, &triple.a, &triple.b), (0, 2, &triple.a, &triple.p), (1, 2, &triple.b, &triple.p)];
        for (i, j, x, y) in pairs {
            let residual = commutator_norm(x, y);
            if residual > eff {
                return Err(Error::NotCommuting { i, j, residual });
            }
        }
        Ok(triple)
    }

    /// Shape and finiteness checks only. Used to feed deliberately invalid
    /// triples to the falsification checks.
    pub fn new_unchecked(a: ComplexMatrix, b: ComplexMatrix, p: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        let d = p.nrows();
        for m in [&a, &b, &p] {
            ensure_square(m, d)?;
            ensure_finite(m)?;
        }
        Ok(Self { a, b, p, tol })
    }

    pub fn dim(&self) -> usize {
        self.p.nrows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn p(&self) -> &ComplexMatrix {
        &self.p
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn effective_tol(&self) -> f64 {
        let norm = op_norm(&self.a).max(op_norm(&self.b)).max(op_norm(&self.p));
        self.tol.effective(self.dim(), norm)
    }

    pub fn adjoint(&self) -> ETriple {
        Self { a: self.a.adjoint(), b: self.b.adjoint(), p: self.p.adjoint(), tol: self.tol }
    }

    /// Compression of all three operators to a subspace.
    pub fn restrict(&self, s: &Subspace) -> Result<ETriple> {
        Self::new_unchecked(compress(&self.a, s)?, compress(&self.b, s)?, compress(&self.p, s)?, self.tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EKind {
    EUnitary,
    EIsometry,
    ECoIsometry,
    Neither,
}

/// Residuals behind a classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EEvidence {
    /// `‖P*P − I‖`
    pub p_isometry: f64,
    /// `‖PP* − I‖`
    pub p_coisometry: f64,
    pub b_norm: f64,
    /// `‖A − B*P‖`
    pub a_minus_bstar_p: f64,
    /// `‖A* − BP*‖`
    pub adjoint_a_minus_b_pstar: f64,
    pub a_normality: f64,
    pub b_normality: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EClassification {
    pub kind: EKind,
    pub evidence: EEvidence,
}

pub fn classify_e_triple(triple: &ETriple) -> EClassification {
    let (a, b, p) = (triple.a(), triple.b(), triple.p());
    let eff = triple.effective_tol();
    let d = triple.dim();
    let p_coisometry = op_norm(&(p * p.adjoint() - ComplexMatrix::identity(d, d)));
    let evidence = EEvidence {
        p_isometry: isometry_residual(p),
        p_coisometry,
        b_norm: op_norm(b),
        a_minus_bstar_p: op_norm(&(a - b.adjoint() * p)),
        adjoint_a_minus_b_pstar: op_norm(&(a.adjoint() - b * p.adjoint())),
        a_normality: normality_residual(a),
        b_normality: normality_residual(b),
        tol: eff,
    };
    let ev = &evidence;
    let b_contractive = ev.b_norm <= 1.0 + eff;
    let isometric = ev.p_isometry <= eff && b_contractive && ev.a_minus_bstar_p <= eff;
    let coisometric = ev.p_coisometry <= eff && b_contractive && ev.adjoint_a_minus_b_pstar <= eff;
    let normal = ev.a_normality <= eff && ev.b_normality <= eff;
    let kind = if isometric && ev.p_coisometry <= eff && normal {
        EKind::EUnitary
    } else if isometric {
        EKind::EIsometry
    } else if coisometric {
        EKind::ECoIsometry
    } else {
        EKind::Neither
    };
    EClassification { kind, evidence }
}

/// Canonical split of an E-contraction along the unitary part of `P`.
#[derive(Debug, Clone)]
pub struct ECanonical {
    pub unitary: Subspace,
    pub cnu: Subspace,
    pub unitary_triple: ETriple,
    pub cnu_triple: ETriple,
    pub unitary_class: EClassification,
    pub max_reducing_residual: f64,
}

pub fn e_canonical_decomposition(triple: &ETriple) -> Result<ECanonical> {
    let tol = triple.tol();
    let unitary = unitary_part(triple.p(), tol)?;
    let cnu = unitary.orthogonal_complement();
    let mut worst: f64 = 0.0;
    for (name, m) in [("A", triple.a()), ("B", triple.b())] {
        let r = reduces(m, &unitary, tol)?;
        if !r.reduces {
            return Err(Error::NotReducing {
                what: format!("unitary part of P vs {name}"),
                residual: r.max_residual(),
                tol: r.tol,
            });
        }
        worst = worst.max(r.max_residual());
    }
    let unitary_triple = triple.restrict(&unitary)?;
    let cnu_triple = triple.restrict(&cnu)?;
    let unitary_class = classify_e_triple(&unitary_triple);
    if !unitary.is_zero() && unitary_class.kind != EKind::EUnitary {
        return Err(Error::NotAnEContraction {
            what: "restriction to the unitary part of P is not an E-unitary".into(),
            residual: unitary_class.evidence.a_minus_bstar_p,
        });
    }
    if !cnu.is_zero() && !unitary_part(cnu_triple.p(), tol)?.is_zero() {
        return Err(Error::NotAnEContraction {
            what: "P restricted to the complement keeps a unitary part".into(),
            residual: 0.0,
        });
    }
    Ok(ECanonical { unitary, cnu, unitary_triple, cnu_triple, unitary_class, max_reducing_residual: worst })
}
