//! JSON instance files (`"schema": "tetradecomp/1"`).
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::decomp::{AtomMode, AtomTable, AtomType, ContractionTuple, TypeSignature};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::modelgen::{PlantedFamily, StructuredAtomTable, StructuredBlock, StructuredOperator};
use crate::subspace::{orthonormalize, Subspace};
use crate::tetrablock::ETriple;
use crate::tolerance::Tolerance;

pub const SCHEMA: &str = "tetradecomp/1";

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parses a `rows × cols` matrix; `cols` is taken from the first row
/// unless `expected_cols` is given (needed for empty-row frames).
pub fn matrix_from_json(rows: &JsonMatrix, expected_cols: Option<usize>) -> Result<ComplexMatrix> {
    let cols = expected_cols.unwrap_or_else(|| rows.first().map_or(0, |r| r.len()));
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(Error::Input(format!("row {i} has {} entries, expected {cols}", r.len())));
    }
    let m = ComplexMatrix::from_fn(rows.len(), cols, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1]));
    crate::linalg::ensure_finite(&m)?;
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InstanceMode {
    Tuple,
    Triple,
    Single,
}

/// One structured block: `{"label": "A1", "payload": [...]}` or
/// `{"label": "B1", "multiplicity": m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonBlock {
    pub label: AtomType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthLeaf {
    pub dim: usize,
    /// Orthonormal frame (`dim_ambient × dim`) for dense instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<JsonMatrix>,
    /// Block indices for structured instances.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wandering_dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthMode {
    UnitaryCnu,
    IsometryCni,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub mode: TruthMode,
    /// Keyed by the comma-joined signature, e.g. `"A1,A2"`.
    pub leaves: BTreeMap<String, TruthLeaf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorInfo {
    pub family: String,
    pub spec: String,
    pub seed: u64,
    pub scrambled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub dim: usize,
    pub mode: InstanceMode,
    #[serde(default)]
    pub operators: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Per member, the list of blocks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structured: Option<Vec<Vec<JsonBlock>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<TruthTable>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorInfo>,
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let inst: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed instance JSON: {e}")))?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Input(format!("unsupported schema {:?}, expected {SCHEMA:?}", self.schema)));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Input(format!("tol must be positive, got {t}")));
            }
        }
        for (i, op) in self.operators.iter().enumerate() {
            let m = matrix_from_json(op, None)?;
            if m.nrows() != self.dim || m.ncols() != self.dim {
                return Err(Error::Input(format!(
                    "operator {i} is {}×{}, but dim is {}",
                    m.nrows(),
                    m.ncols(),
                    self.dim
                )));
            }
        }
        match self.mode {
            InstanceMode::Triple if self.operators.len() != 3 => {
                Err(Error::Input(format!("triple mode needs 3 operators, got {}", self.operators.len())))
            }
            InstanceMode::Single if self.operators.len() != 1 => {
                Err(Error::Input(format!("single mode needs 1 operator, got {}", self.operators.len())))
            }
            _ => Ok(()),
        }
    }

    pub fn matrices(&self) -> Result<Vec<ComplexMatrix>> {
        self.operators.iter().map(|m| matrix_from_json(m, None)).collect()
    }

    pub fn tuple(&self, tol: Tolerance) -> Result<ContractionTuple> {
        ContractionTuple::new(self.dim, self.matrices()?, tol)
    }

    pub fn triple(&self, tol: Tolerance) -> Result<ETriple> {
        let mut ops = self.matrices()?;
        if ops.len() != 3 {
            return Err(Error::Input("triple instance needs operators [A, B, P]".into()));
        }
        let p = ops.pop().expect("3 ops");
        let b = ops.pop().expect("3 ops");
        let a = ops.pop().expect("3 ops");
        ETriple::new(a, b, p, tol)
    }

    pub fn structured_members(&self, tol: Tolerance) -> Result<Option<Vec<StructuredOperator>>> {
        let Some(members) = &self.structured else {
            return Ok(None);
        };
        members
            .iter()
            .map(|blocks| {
                let blocks = blocks
                    .iter()
                    .map(|b| match (b.label, &b.payload, b.multiplicity) {
                        (AtomType::B1, None, Some(m)) => Ok(StructuredBlock::Shift { multiplicity: m }),
                        (label, Some(p), None) if label != AtomType::B1 => {
                            Ok(StructuredBlock::Finite { label, payload: matrix_from_json(p, None)? })
                        }
                        (label, _, _) => Err(Error::Input(format!(
                            "block {label} needs a payload (A1/A2/B2) or a multiplicity (B1), not both"
                        ))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                StructuredOperator::new(blocks, tol)
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Dense truth table as subspaces of `C^dim`.
    pub fn truth_atoms(&self, tol: Tolerance) -> Result<Option<AtomTable>> {
        let Some(truth) = &self.truth else {
            return Ok(None);
        };
        let mode = match truth.mode {
            TruthMode::UnitaryCnu => AtomMode::UnitaryCnu,
            TruthMode::IsometryCni => AtomMode::IsometryCni,
            TruthMode::Structured => return Ok(None),
        };
        let mut leaves = BTreeMap::new();
        for (key, leaf) in &truth.leaves {
            let sig: TypeSignature = key.parse()?;
            let frame = match &leaf.frame {
                Some(f) => matrix_from_json(f, Some(leaf.dim))?,
                None if leaf.dim == 0 => ComplexMatrix::zeros(self.dim, 0),
                None => return Err(Error::Input(format!("truth leaf {key} has no frame"))),
            };
            if frame.nrows() != self.dim {
                return Err(Error::Input(format!("truth leaf {key} frame has {} rows", frame.nrows())));
            }
            let s = if leaf.dim == 0 { Subspace::zero(self.dim) } else { orthonormalize(&frame, tol)? };
            if s.dim() != leaf.dim {
                return Err(Error::Input(format!("truth leaf {key} frame has rank {} not {}", s.dim(), leaf.dim)));
            }
            leaves.insert(sig, s);
        }
        Ok(Some(AtomTable { mode, ambient_dim: self.dim, leaves }))
    }

    pub fn from_planted(family: &PlantedFamily, generator: GeneratorInfo) -> Self {
        let leaves = family
            .truth
            .leaves
            .iter()
            .map(|(sig, s)| {
                let leaf = TruthLeaf {
                    dim: s.dim(),
                    frame: (s.dim() > 0).then(|| matrix_to_json(s.frame())),
                    blocks: None,
                    wandering_dim: None,
                };
                (sig.to_string(), leaf)
            })
            .collect();
        InstanceFile {
            schema: SCHEMA.into(),
            dim: family.tuple.dim(),
            mode: InstanceMode::Tuple,
            operators: family.tuple.ops().iter().map(matrix_to_json).collect(),
            tol: None,
            structured: None,
            truth: Some(TruthTable { mode: TruthMode::UnitaryCnu, leaves }),
            generator: Some(generator),
        }
    }

    /// Structured instance; `dim` counts the finite coordinates of blocks
    /// on which no member is a shift.
    pub fn from_structured(
        members: &[StructuredOperator],
        truth: &StructuredAtomTable,
        generator: GeneratorInfo,
    ) -> Result<Self> {
        let shapes = crate::modelgen::block_partition(members)?;
        let dim = shapes
            .iter()
            .map(|s| match s {
                crate::modelgen::BlockShape::Finite(d) => *d,
                crate::modelgen::BlockShape::Shift(_) => 0,
            })
            .sum();
        let structured = members
            .iter()
            .map(|m| {
                m.blocks()
                    .iter()
                    .map(|b| match b {
                        StructuredBlock::Finite { label, payload } => {
                            JsonBlock { label: *label, payload: Some(matrix_to_json(payload)), multiplicity: None }
                        }
                        StructuredBlock::Shift { multiplicity } => {
                            JsonBlock { label: AtomType::B1, payload: None, multiplicity: Some(*multiplicity) }
                        }
                    })
                    .collect()
            })
            .collect();
        let leaves = truth
            .leaves
            .iter()
            .map(|(sig, leaf)| {
                (
                    sig.to_string(),
                    TruthLeaf {
                        dim: leaf.finite_dim,
                        frame: None,
                        blocks: Some(leaf.blocks.clone()),
                        wandering_dim: Some(leaf.wandering_dim),
                    },
                )
            })
            .collect();
        Ok(InstanceFile {
            schema: SCHEMA.into(),
            dim,
            mode: InstanceMode::Tuple,
            operators: Vec::new(),
            tol: None,
            structured: Some(structured),
            truth: Some(TruthTable { mode: TruthMode::Structured, leaves }),
            generator: Some(generator),
        })
    }
}
