//! Ground-truth instances: Haar unitaries, strict contractions, truncated
//! shifts and doubly commuting tensor / direct-sum families with planted
//! atom tables.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::decomp::{AtomMode, AtomTable, AtomType, ContractionTuple, TypeSignature};
use crate::error::{Error, Result};
use crate::linalg::{identity, kron, op_norm, zeros, ComplexMatrix};
use crate::modelgen::rng::{CounterRng, Stream};
use crate::subspace::Subspace;
use crate::tolerance::Tolerance;

pub const DEFAULT_DIM_CAP: usize = 512;

/// Operator norm of the strict contractions planted as A2 factors.
pub const STRICT_NORM: f64 = 0.9;

/// Haar-distributed unitary: QR of a complex Gaussian matrix, with the
/// phases chosen so that `R` has a positive real diagonal.
pub fn haar_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_from(d, &mut CounterRng::new(seed, Stream::Haar))
}

pub(crate) fn haar_from(d: usize, rng: &mut CounterRng) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::Input("unitary dimension must be at least 1".into()));
    }
    let g = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal());
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// Seeded Gaussian matrix rescaled to operator norm `max_norm`.
pub fn random_contraction(d: usize, seed: u64, max_norm: f64) -> Result<ComplexMatrix> {
    if !(max_norm > 0.0 && max_norm < 1.0) {
        return Err(Error::Input(format!("max_norm must lie in (0, 1), got {max_norm}")));
    }
    if d == 0 {
        return Err(Error::Input("contraction dimension must be at least 1".into()));
    }
    let mut rng = CounterRng::new(seed, Stream::Contraction);
    let g = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal());
    let norm = op_norm(&g);
    Ok(g * Complex64::new(max_norm / norm, 0.0))
}

/// Unilateral shift of multiplicity `m` cut off after `depth` levels:
/// identity blocks on the block subdiagonal.
pub fn truncated_shift(multiplicity: usize, depth: usize) -> Result<ComplexMatrix> {
    if multiplicity == 0 || depth == 0 {
        return Err(Error::Input("shift multiplicity and depth must be at least 1".into()));
    }
    let n = multiplicity * depth;
    let mut s = zeros(n, n);
    for i in multiplicity..n {
        s[(i, i - multiplicity)] = Complex64::new(1.0, 0.0);
    }
    Ok(s)
}

/// One tensor factor of a planted family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSpec {
    /// Haar unitary (A1).
    Unitary(usize),
    /// Random contraction of norm [`STRICT_NORM`] (A2).
    Strict(usize),
    /// Truncated shift of multiplicity one (A2).
    Shift(usize),
}

impl FactorSpec {
    pub fn dim(self) -> usize {
        match self {
            FactorSpec::Unitary(d) | FactorSpec::Strict(d) | FactorSpec::Shift(d) => d,
        }
    }

    pub fn label(self) -> AtomType {
        match self {
            FactorSpec::Unitary(_) => AtomType::A1,
            FactorSpec::Strict(_) | FactorSpec::Shift(_) => AtomType::A2,
        }
    }

    fn build(self, seed: u64) -> Result<ComplexMatrix> {
        match self {
            FactorSpec::Unitary(d) => haar_unitary(d, seed),
            FactorSpec::Strict(d) => random_contraction(d, seed, STRICT_NORM),
            FactorSpec::Shift(d) => truncated_shift(1, d),
        }
    }
}

/// A doubly commuting tuple together with its known atom table.
#[derive(Debug, Clone)]
pub struct PlantedFamily {
    pub tuple: ContractionTuple,
    pub truth: AtomTable,
    /// Accumulated conjugating unitary (identity when unscrambled).
    pub scramble: ComplexMatrix,
    pub seed: u64,
}

/// `T_i = I ⊗ … ⊗ A_i ⊗ … ⊗ I`; one nonzero truth leaf.
pub fn tensor_family(specs: &[FactorSpec], seed: u64) -> Result<PlantedFamily> {
    direct_sum_family(&[specs.to_vec()], seed, DEFAULT_DIM_CAP)
}

/// Direct sum of tensor families sharing the same arity.
pub fn direct_sum_family(summands: &[Vec<FactorSpec>], seed: u64, dim_cap: usize) -> Result<PlantedFamily> {
    let n = summands.first().map_or(0, |s| s.len());
    if summands.is_empty() || n == 0 {
        return Err(Error::Input("family needs at least one summand and one factor".into()));
    }
    if summands.iter().any(|s| s.len() != n) {
        return Err(Error::Input("all summands must have the same number of factors".into()));
    }
    if summands.iter().flatten().any(|f| f.dim() == 0) {
        return Err(Error::Input("factor dimensions must be at least 1".into()));
    }
    let mut total = 0usize;
    for s in summands {
        let block = s.iter().try_fold(1usize, |acc, f| acc.checked_mul(f.dim()));
        total = block.and_then(|b| total.checked_add(b)).unwrap_or(usize::MAX);
        if total > dim_cap {
            return Err(Error::Size { dim: total, cap: dim_cap });
        }
    }

    let mut rng = CounterRng::new(seed, Stream::Family);
    let mut ops = vec![zeros(total, total); n];
    let mut coords: BTreeMap<TypeSignature, Vec<usize>> = BTreeMap::new();
    let mut offset = 0;
    for summand in summands {
        let dims: Vec<usize> = summand.iter().map(|f| f.dim()).collect();
        let block = dims.iter().product::<usize>();
        for (i, factor) in summand.iter().enumerate() {
            let m = factor.build(rng.next_u64())?;
            let mut t = identity(1);
            for (j, &dj) in dims.iter().enumerate() {
                t = if i == j { kron(&t, &m) } else { kron(&t, &identity(dj)) };
            }
            ops[i].view_mut((offset, offset), (block, block)).copy_from(&t);
        }
        let sig = TypeSignature(summand.iter().map(|f| f.label()).collect());
        coords.entry(sig).or_default().extend(offset..offset + block);
        offset += block;
    }

    let tol = Tolerance::default();
    let leaves = TypeSignature::all(AtomMode::UnitaryCnu.alphabet(), n)
        .into_iter()
        .map(|sig| {
            let idx = coords.get(&sig).cloned().unwrap_or_default();
            (sig, Subspace::coordinate(total, &idx))
        })
        .collect();
    Ok(PlantedFamily {
        tuple: ContractionTuple::new(total, ops, tol)?,
        truth: AtomTable { mode: AtomMode::UnitaryCnu, ambient_dim: total, leaves },
        scramble: identity(total),
        seed,
    })
}

/// Conjugates every member and every truth leaf by a fresh Haar unitary
/// `Q` (or by the identity when `seed` is `None`).
pub fn scramble(family: &PlantedFamily, seed: Option<u64>) -> Result<PlantedFamily> {
    let Some(seed) = seed else {
        return Ok(family.clone());
    };
    let d = family.tuple.dim();
    let q = haar_from(d, &mut CounterRng::new(seed, Stream::Scramble))?;
    let ops = family.tuple.ops().iter().map(|t| &q * t * q.adjoint()).collect();
    let leaves = family.truth.leaves.iter().map(|(sig, s)| (sig.clone(), s.rotated(&q))).collect();
    Ok(PlantedFamily {
        tuple: ContractionTuple::new(d, ops, family.tuple.tol())?,
        truth: AtomTable { leaves, ..family.truth.clone() },
        scramble: &q * &family.scramble,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::classify_atom;
    use crate::linalg::unitarity_residual;

    #[test]
    fn haar_is_unitary_and_deterministic() {
        for (d, seed) in [(1, 3), (3, 7), (8, 11)] {
            let u = haar_unitary(d, seed).unwrap();
            assert!(unitarity_residual(&u) <= 1e-12);
            assert_eq!(u, haar_unitary(d, seed).unwrap());
        }
        let s = haar_unitary(1, 5).unwrap()[(0, 0)];
        assert!((s.norm() - 1.0).abs() < 1e-14);
        assert!(haar_unitary(0, 1).is_err());
    }

    #[test]
    fn haar_r_factor_has_positive_diagonal() {
        // Q = G R⁻¹ with R's diagonal positive ⇒ Q*G is upper triangular
        // with positive diagonal.
        let d = 4;
        let mut rng = CounterRng::new(9, Stream::Haar);
        let g = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal());
        let q = haar_unitary(d, 9).unwrap();
        let r = q.adjoint() * g;
        for j in 0..d {
            assert!(r[(j, j)].re > 0.0 && r[(j, j)].im.abs() < 1e-12);
            for i in j + 1..d {
                assert!(r[(i, j)].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn contraction_has_requested_norm() {
        let t = random_contraction(4, 2, 0.7).unwrap();
        assert!((op_norm(&t) - 0.7).abs() <= 1e-12);
        assert_eq!(classify_atom(&t, Tolerance::default()).unwrap(), AtomType::A2);
        let s = random_contraction(1, 2, 0.3).unwrap()[(0, 0)];
        assert!((s.norm() - 0.3).abs() < 1e-14);
        assert!(random_contraction(2, 2, 1.0).is_err());
    }

    #[test]
    fn shift_structure() {
        let s = truncated_shift(1, 3).unwrap();
        assert_eq!(s[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(s[(2, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(s.iter().filter(|z| z.norm() > 0.0).count(), 2);
        let s2 = truncated_shift(2, 3).unwrap();
        let mut expected = identity(6);
        expected[(4, 4)] = Complex64::new(0.0, 0.0);
        expected[(5, 5)] = Complex64::new(0.0, 0.0);
        assert_eq!(s2.adjoint() * &s2, expected);
        assert_eq!(classify_atom(&s2, Tolerance::default()).unwrap(), AtomType::A2);
    }

    #[test]
    fn family_truth_by_construction() {
        let f = tensor_family(&[FactorSpec::Unitary(2), FactorSpec::Strict(2)], 1).unwrap();
        assert_eq!(f.tuple.dim(), 4);
        assert!(f.tuple.is_doubly_commuting());
        let sig: TypeSignature = "A1,A2".parse().unwrap();
        assert_eq!(f.truth.leaf(&sig).unwrap().dim(), 4);
        assert_eq!(f.truth.nonzero_leaves().count(), 1);

        let f = direct_sum_family(
            &[
                vec![FactorSpec::Unitary(2), FactorSpec::Unitary(2)],
                vec![FactorSpec::Strict(2), FactorSpec::Unitary(2)],
            ],
            3,
            DEFAULT_DIM_CAP,
        )
        .unwrap();
        assert_eq!(f.truth.nonzero_leaves().map(|(_, s)| s.dim()).collect::<Vec<_>>(), vec![4, 4]);

        let f = tensor_family(&[FactorSpec::Shift(3)], 1).unwrap();
        assert_eq!(f.tuple.arity(), 1);
        assert_eq!(f.truth.leaf(&TypeSignature(vec![AtomType::A2])).unwrap().dim(), 3);
    }

    #[test]
    fn family_errors() {
        assert!(matches!(
            tensor_family(&[FactorSpec::Unitary(0)], 1),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            tensor_family(&[FactorSpec::Unitary(32), FactorSpec::Strict(32)], 1),
            Err(Error::Size { dim: 1024, cap: 512 })
        ));
        assert!(direct_sum_family(&[vec![FactorSpec::Unitary(2)], vec![]], 1, 64).is_err());
    }

    #[test]
    fn scramble_preserves_double_commutation() {
        let f = tensor_family(&[FactorSpec::Unitary(2), FactorSpec::Shift(3)], 5).unwrap();
        let s = scramble(&f, Some(17)).unwrap();
        assert!(s.tuple.worst_double_commutator().unwrap().residual <= 1e-10);
        assert!(unitarity_residual(&s.scramble) <= 1e-12);
        let same = scramble(&f, None).unwrap();
        assert_eq!(same.tuple.ops(), f.tuple.ops());
    }
}
