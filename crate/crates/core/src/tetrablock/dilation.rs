//! Truncated E-isometric dilation on `H ⊕ D_P^{⊕N}`.
//!
//! Block layout: level 0 is `H` (dimension `d`), levels `1..=N` are copies
//! of the defect space in its frame coordinates (dimension `k`). With
//! `δ = frame*·D_P : H → D_P`,
//!
//! ```text
//! V3: (0,0) = P,  (1,0) = δ,        (j+1,j) = I
//! V1: (0,0) = A,  (1,0) = F2*·δ,    (j,j) = F1,  (j+1,j) = F2*
//! V2: (0,0) = B,  (1,0) = F1*·δ,    (j,j) = F2,  (j+1,j) = F1*
//! ```
//!
//! Each operator moves content down at most one level, so words of length
//! at most `N` applied to `H` never see the dropped levels.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity, op_norm, zeros, ComplexMatrix};
use crate::subspace::Subspace;
use crate::tetrablock::fundamental::{fundamental_operators, FundamentalPair};
use crate::tetrablock::triple::ETriple;

#[derive(Debug, Clone)]
pub struct DilationModel {
    pub depth: usize,
    pub base_dim: usize,
    pub defect_dim: usize,
    pub v1: ComplexMatrix,
    pub v2: ComplexMatrix,
    pub v3: ComplexMatrix,
    /// `H` inside `K` (the first `d` coordinates).
    pub embed: Subspace,
}

impl DilationModel {
    pub fn block_dim(&self) -> usize {
        self.base_dim + self.depth * self.defect_dim
    }

    /// `H ⊕ D_P^{⊕(N−1)}`: everything except the last defect level.
    pub fn non_terminal(&self) -> Subspace {
        let dim = self.block_dim();
        let keep = if self.defect_dim == 0 { dim } else { dim - self.defect_dim };
        Subspace::coordinate(dim, &(0..keep).collect::<Vec<_>>())
    }
}

fn level_offset(d: usize, k: usize, level: usize) -> usize {
    if level == 0 {
        0
    } else {
        d + (level - 1) * k
    }
}

fn level_dim(d: usize, k: usize, level: usize) -> usize {
    if level == 0 {
        d
    } else {
        k
    }
}

fn put(m: &mut ComplexMatrix, d: usize, k: usize, row: usize, col: usize, block: &ComplexMatrix) {
    let (r, c) = (level_offset(d, k, row), level_offset(d, k, col));
    debug_assert_eq!(block.shape(), (level_dim(d, k, row), level_dim(d, k, col)));
    m.view_mut((r, c), block.shape()).copy_from(block);
}

pub fn dilation_construct(triple: &ETriple, depth: usize) -> Result<DilationModel> {
    let pair = fundamental_operators(triple)?;
    dilation_from_pair(triple, &pair, depth)
}

/// Same as [`dilation_construct`] with precomputed fundamental operators.
pub fn dilation_from_pair(triple: &ETriple, pair: &FundamentalPair, depth: usize) -> Result<DilationModel> {
    if depth == 0 {
        return Err(Error::Input("dilation depth must be at least 1".into()));
    }
    let d = triple.dim();
    let k = pair.defect_dim();
    let n = d + depth * k;
    let delta = pair.defect.space.frame().adjoint() * &pair.defect.operator;
    let (f1, f2) = (&pair.f1, &pair.f2);
    let mut v1 = zeros(n, n);
    let mut v2 = zeros(n, n);
    let mut v3 = zeros(n, n);
    put(&mut v1, d, k, 0, 0, triple.a());
    put(&mut v2, d, k, 0, 0, triple.b());
    put(&mut v3, d, k, 0, 0, triple.p());
    if k > 0 {
        put(&mut v1, d, k, 1, 0, &(f2.adjoint() * &delta));
        put(&mut v2, d, k, 1, 0, &(f1.adjoint() * &delta));
        put(&mut v3, d, k, 1, 0, &delta);
        let id = identity(k);
        for level in 1..=depth {
            put(&mut v1, d, k, level, level, f1);
            put(&mut v2, d, k, level, level, f2);
            if level < depth {
                put(&mut v1, d, k, level + 1, level, &f2.adjoint());
                put(&mut v2, d, k, level + 1, level, &f1.adjoint());
                put(&mut v3, d, k, level + 1, level, &id);
            }
        }
    }
    Ok(DilationModel {
        depth,
        base_dim: d,
        defect_dim: k,
        v1,
        v2,
        v3,
        embed: Subspace::coordinate(n, &(0..d).collect::<Vec<_>>()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonomialResidual {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DilationReport {
    pub max_total_degree: usize,
    pub monomials_checked: usize,
    pub worst: MonomialResidual,
    /// Monomials whose residual exceeds `tol`.
    pub failures: Vec<MonomialResidual>,
    /// `‖(V1 − V2*V3)R‖` on the non-terminal range `R`.
    pub structure_residual: f64,
    /// `‖(V3*V3 − I)R‖`.
    pub isometry_residual: f64,
    /// `‖[Vi, Vj]R‖`, worst pair.
    pub commutator_residual: f64,
    pub tol: f64,
}

impl DilationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.structure_residual <= self.tol
            && self.isometry_residual <= self.tol
            && self.commutator_residual <= self.tol
    }
}

/// Compares `embed*·V1^a V2^b V3^c·embed` with `A^a B^b P^c` for every
/// monomial of total degree at most `max_total_degree`, and checks the
/// E-isometry structure on the non-terminal range.
pub fn dilation_verify(model: &DilationModel, triple: &ETriple, max_total_degree: usize) -> Result<DilationReport> {
    if max_total_degree > model.depth {
        return Err(Error::Input(format!(
            "verification degree {max_total_degree} exceeds dilation depth {}",
            model.depth
        )));
    }
    let tol = triple.effective_tol();
    let e = model.embed.frame();
    let powers = |m: &ComplexMatrix| {
        let mut out = vec![identity(m.nrows())];
        for j in 1..=max_total_degree {
            let next = &out[j - 1] * m;
            out.push(next);
        }
        out
    };
    let (pa, pb, pp) = (powers(triple.a()), powers(triple.b()), powers(triple.p()));
    let (w1, w2, w3) = (powers(&model.v1), powers(&model.v2), powers(&model.v3));
    let mut worst = MonomialResidual { a: 0, b: 0, c: 0, residual: 0.0 };
    let mut failures = Vec::new();
    let mut checked = 0;
    for total in 0..=max_total_degree {
        for a in 0..=total {
            for b in 0..=total - a {
                let c = total - a - b;
                let lifted = e.adjoint() * &w1[a] * &w2[b] * &w3[c] * e;
                let base = &pa[a] * &pb[b] * &pp[c];
                let residual = op_norm(&(lifted - base));
                let entry = MonomialResidual { a, b, c, residual };
                if residual > worst.residual {
                    worst = entry;
                }
                if residual > tol {
                    failures.push(entry);
                }
                checked += 1;
            }
        }
    }
    let r = model.non_terminal();
    let rf = r.frame();
    let structure_residual = op_norm(&((&model.v1 - model.v2.adjoint() * &model.v3) * rf));
    let n = model.block_dim();
    let isometry_residual = op_norm(&((model.v3.adjoint() * &model.v3 - identity(n)) * rf));
    let comm = |x: &ComplexMatrix, y: &ComplexMatrix| op_norm(&((x * y - y * x) * rf));
    let commutator_residual = comm(&model.v1, &model.v2)
        .max(comm(&model.v1, &model.v3))
        .max(comm(&model.v2, &model.v3));
    Ok(DilationReport {
        max_total_degree,
        monomials_checked: checked,
        worst,
        failures,
        structure_residual,
        isometry_residual,
        commutator_residual,
        tol,
    })
}
