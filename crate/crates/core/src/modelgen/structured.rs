//! Structured operators: formal direct sums of finite atom blocks and
//! symbolic unilateral shifts.
//!
//! Dense finite matrices cannot represent a pure isometry, so B1 blocks
//! carry only a multiplicity and every split involving them is exact
//! bookkeeping on block labels.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{classify_atom, isometric_part, AtomMode, AtomType, TypeSignature};
use crate::error::{Error, Result};
use crate::linalg::{diag_complex, direct_sum, isometry_residual, unitarity_residual, ComplexMatrix};
use crate::modelgen::rng::{CounterRng, Stream};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq)]
pub enum StructuredBlock {
    /// A1, A2 or B2 block with its matrix.
    Finite { label: AtomType, payload: ComplexMatrix },
    /// Unilateral shift of the given multiplicity (B1).
    Shift { multiplicity: usize },
}

impl StructuredBlock {
    pub fn label(&self) -> AtomType {
        match self {
            StructuredBlock::Finite { label, .. } => *label,
            StructuredBlock::Shift { .. } => AtomType::B1,
        }
    }
}

/// Formal direct sum of labelled blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredOperator {
    blocks: Vec<StructuredBlock>,
}

impl StructuredOperator {
    /// Checks that each finite payload really has its label: A1 unitary,
    /// A2 without unitary part, B2 without isometric part.
    pub fn new(blocks: Vec<StructuredBlock>, tol: Tolerance) -> Result<Self> {
        for (i, block) in blocks.iter().enumerate() {
            match block {
                StructuredBlock::Shift { multiplicity: 0 } => {
                    return Err(Error::Input(format!("block {i}: shift multiplicity must be at least 1")));
                }
                StructuredBlock::Shift { .. } => {}
                StructuredBlock::Finite { label, payload } => {
                    let ok = match label {
                        AtomType::A1 => unitarity_residual(payload) <= tol.effective(payload.nrows(), 1.0),
                        AtomType::A2 => classify_atom(payload, tol)? == AtomType::A2,
                        AtomType::B2 => isometric_part(payload, tol)?.is_zero(),
                        AtomType::B1 | AtomType::NonAtom => {
                            return Err(Error::Input(format!(
                                "block {i}: label {label} cannot carry a finite payload"
                            )));
                        }
                    };
                    if !ok {
                        return Err(Error::Input(format!("block {i}: payload is not of type {label}")));
                    }
                }
            }
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[StructuredBlock] {
        &self.blocks
    }

    pub fn labels(&self) -> Vec<AtomType> {
        self.blocks.iter().map(|b| b.label()).collect()
    }

    /// Block-diagonal matrix, or `None` if any block is a shift.
    pub fn to_dense(&self) -> Option<ComplexMatrix> {
        let payloads: Option<Vec<ComplexMatrix>> = self
            .blocks
            .iter()
            .map(|b| match b {
                StructuredBlock::Finite { payload, .. } => Some(payload.clone()),
                StructuredBlock::Shift { .. } => None,
            })
            .collect();
        payloads.map(|p| direct_sum(&p))
    }
}

/// Size of one block of the shared partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockShape {
    Finite(usize),
    /// Infinite-dimensional block carrying a shift of this multiplicity in
    /// at least one member.
    Shift(usize),
}

/// Checks that all members use one block partition and returns it.
pub fn block_partition(members: &[StructuredOperator]) -> Result<Vec<BlockShape>> {
    let Some(first) = members.first() else {
        return Ok(Vec::new());
    };
    let count = first.blocks.len();
    if let Some(m) = members.iter().find(|m| m.blocks.len() != count) {
        return Err(Error::Input(format!(
            "mismatched block partitions: {} blocks vs {count}",
            m.blocks.len()
        )));
    }
    (0..count)
        .map(|j| {
            let mut finite: Option<usize> = None;
            let mut shift: Option<usize> = None;
            for m in members {
                match &m.blocks[j] {
                    StructuredBlock::Finite { payload, .. } => {
                        let d = payload.nrows();
                        if finite.is_some_and(|f| f != d) {
                            return Err(Error::Input(format!("block {j}: finite payload sizes differ")));
                        }
                        finite = Some(d);
                    }
                    StructuredBlock::Shift { multiplicity } => {
                        if shift.is_some_and(|s| s != *multiplicity) {
                            return Err(Error::Input(format!("block {j}: shift multiplicities differ")));
                        }
                        shift = Some(*multiplicity);
                    }
                }
            }
            Ok(match (shift, finite) {
                (Some(m), _) => BlockShape::Shift(m),
                (None, Some(d)) => BlockShape::Finite(d),
                (None, None) => unreachable!("at least one member"),
            })
        })
        .collect()
}

/// Blocks collected under one signature.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredLeaf {
    pub blocks: Vec<usize>,
    /// Total size of the finite blocks.
    pub finite_dim: usize,
    /// Total shift multiplicity, i.e. the wandering dimension.
    pub wandering_dim: usize,
}

impl StructuredLeaf {
    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    fn push(&mut self, index: usize, shape: BlockShape) {
        self.blocks.push(index);
        match shape {
            BlockShape::Finite(d) => self.finite_dim += d,
            BlockShape::Shift(m) => self.wandering_dim += m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredAtomTable {
    /// `Some` when the leaves range over a fixed two-letter alphabet.
    pub mode: Option<AtomMode>,
    pub leaves: BTreeMap<TypeSignature, StructuredLeaf>,
}

impl StructuredAtomTable {
    pub fn nonzero_leaves(&self) -> impl Iterator<Item = (&TypeSignature, &StructuredLeaf)> {
        self.leaves.iter().filter(|(_, l)| !l.is_zero())
    }
}

/// Groups blocks by the vector of member labels. Only signatures that
/// occur are listed.
pub fn structured_atom_decompose(members: &[StructuredOperator]) -> Result<StructuredAtomTable> {
    let shapes = block_partition(members)?;
    let mut leaves: BTreeMap<TypeSignature, StructuredLeaf> = BTreeMap::new();
    for (j, &shape) in shapes.iter().enumerate() {
        let sig = TypeSignature(members.iter().map(|m| m.blocks[j].label()).collect());
        leaves.entry(sig).or_default().push(j, shape);
    }
    Ok(StructuredAtomTable { mode: None, leaves })
}

/// Isometric / c.n.i. split of structured c.n.u. members. Finite A2
/// blocks are c.n.i. (a finite isometry would be unitary). All `2^n`
/// signatures over `{B1, B2}` are listed.
pub fn structured_cnu_atom_decompose(members: &[StructuredOperator], tol: Tolerance) -> Result<StructuredAtomTable> {
    let shapes = block_partition(members)?;
    let n = members.len();
    let mut leaves: BTreeMap<TypeSignature, StructuredLeaf> = TypeSignature::all(AtomMode::IsometryCni.alphabet(), n)
        .into_iter()
        .map(|s| (s, StructuredLeaf::default()))
        .collect();
    for (j, &shape) in shapes.iter().enumerate() {
        let mut tags = Vec::with_capacity(n);
        for (index, m) in members.iter().enumerate() {
            let tag = match &m.blocks[j] {
                StructuredBlock::Shift { .. } => AtomType::B1,
                StructuredBlock::Finite { label: AtomType::B2, .. } => AtomType::B2,
                StructuredBlock::Finite { label: AtomType::A2, payload } => {
                    if !isometric_part(payload, tol)?.is_zero() {
                        return Err(Error::NotCnu { index });
                    }
                    AtomType::B2
                }
                StructuredBlock::Finite { .. } => return Err(Error::NotCnu { index }),
            };
            tags.push(tag);
        }
        leaves.get_mut(&TypeSignature(tags)).expect("all signatures listed").push(j, shape);
    }
    Ok(StructuredAtomTable { mode: Some(AtomMode::IsometryCni), leaves })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuredWoldParts {
    pub unitary_blocks: Vec<usize>,
    pub shift_blocks: Vec<usize>,
    pub unitary_dim: usize,
    /// `dim(H ⊖ VH)`: total shift multiplicity.
    pub wandering_dim: usize,
}

/// Exact Wold split of a structured isometry (A1 and B1 blocks only).
pub fn wold_split_structured(op: &StructuredOperator, tol: Tolerance) -> Result<StructuredWoldParts> {
    let mut parts = StructuredWoldParts { unitary_blocks: vec![], shift_blocks: vec![], unitary_dim: 0, wandering_dim: 0 };
    for (j, block) in op.blocks.iter().enumerate() {
        match block {
            StructuredBlock::Shift { multiplicity } => {
                parts.shift_blocks.push(j);
                parts.wandering_dim += multiplicity;
            }
            StructuredBlock::Finite { label: AtomType::A1, payload } => {
                parts.unitary_blocks.push(j);
                parts.unitary_dim += payload.nrows();
            }
            StructuredBlock::Finite { payload, .. } => {
                let residual = isometry_residual(payload);
                return Err(Error::NotAnIsometry { residual, tol: tol.effective(payload.nrows(), 1.0) });
            }
        }
    }
    Ok(parts)
}

/// Requested label and size of one member's block in a generated
/// structured family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpec {
    pub label: AtomType,
    /// Payload dimension, or shift multiplicity for B1.
    pub size: usize,
}

/// Generates a structured tuple: `blocks[j][i]` describes member `i` on
/// block `j`. Finite payloads are diagonal (unimodular entries for A1,
/// moduli in `[0.1, 0.9]` for A2/B2), so members on a common block doubly
/// commute.
pub fn structured_family(blocks: &[Vec<BlockSpec>], seed: u64, tol: Tolerance) -> Result<Vec<StructuredOperator>> {
    let n = blocks.first().map_or(0, |b| b.len());
    if n == 0 || blocks.iter().any(|b| b.len() != n) {
        return Err(Error::Input("every block needs one spec per member".into()));
    }
    let mut rng = CounterRng::new(seed, Stream::Structured);
    let mut members: Vec<Vec<StructuredBlock>> = vec![Vec::new(); n];
    for block in blocks {
        let finite: BTreeSet<usize> = block.iter().filter(|s| s.label != AtomType::B1).map(|s| s.size).collect();
        let shifts: BTreeSet<usize> = block.iter().filter(|s| s.label == AtomType::B1).map(|s| s.size).collect();
        if finite.len() > 1 || shifts.len() > 1 {
            return Err(Error::Input("sizes within a block must agree".into()));
        }
        for (i, spec) in block.iter().enumerate() {
            if spec.size == 0 {
                return Err(Error::Input("block sizes must be at least 1".into()));
            }
            let b = match spec.label {
                AtomType::B1 => StructuredBlock::Shift { multiplicity: spec.size },
                AtomType::A1 => {
                    let phases: Vec<Complex64> = (0..spec.size).map(|_| rng.unit_phase()).collect();
                    StructuredBlock::Finite { label: AtomType::A1, payload: diag_complex(&phases) }
                }
                AtomType::A2 | AtomType::B2 => {
                    let entries: Vec<Complex64> =
                        (0..spec.size).map(|_| rng.unit_phase() * rng.uniform_in(0.1, 0.9)).collect();
                    StructuredBlock::Finite { label: spec.label, payload: diag_complex(&entries) }
                }
                AtomType::NonAtom => return Err(Error::Input("NonAtom is not a block label".into())),
            };
            members[i].push(b);
        }
    }
    members.into_iter().map(|b| StructuredOperator::new(b, tol)).collect()
}
