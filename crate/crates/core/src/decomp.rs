//! Canonical, Levan and Wold splits of single contractions, and the
//! recursive `2^n` atom decomposition of doubly commuting tuples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator_norm, ensure_finite, ensure_square, identity, isometry_residual,
    null_space, op_norm, unitarity_residual, vstack, ComplexMatrix,
};
use crate::subspace::{compress, intersect, maximal_reducing_core, orthonormalize, reduces, Subspace};
use crate::tolerance::Tolerance;

/// Residuals at or below this multiple of `f64::EPSILON * dim` count as
/// exact for the purpose of the Wold `approximate` flag.
const MACHINE_LEVEL: f64 = 1e3;

/// Finite ordered family of contractions on a common space.
#[derive(Debug, Clone)]
pub struct ContractionTuple {
    dim: usize,
    ops: Vec<ComplexMatrix>,
    tol: Tolerance,
    commuting: bool,
    doubly_commuting: bool,
    worst_commutator: Option<PairResidual>,
    worst_double_commutator: Option<PairResidual>,
}

/// Largest pairwise residual seen while checking commutation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairResidual {
    pub i: usize,
    pub j: usize,
    pub residual: f64,
}

impl ContractionTuple {
    /// Validates shapes, finiteness and contractivity, and records the
    /// (double) commutation status.
    pub fn new(dim: usize, ops: Vec<ComplexMatrix>, tol: Tolerance) -> Result<Self> {
        for op in &ops {
            ensure_square(op, dim)?;
            ensure_finite(op)?;
        }
        let eff = tol.effective(dim, 1.0);
        for (index, op) in ops.iter().enumerate() {
            let norm = op_norm(op);
            if norm > 1.0 + eff {
                return Err(Error::NotAContraction { index, norm, tol: eff });
            }
        }
        let mut worst_commutator: Option<PairResidual> = None;
        let mut worst_double: Option<PairResidual> = None;
        for i in 0..ops.len() {
            for j in 0..ops.len() {
                if i == j {
                    continue;
                }
                if i < j {
                    let r = commutator_norm(&ops[i], &ops[j]);
                    if worst_commutator.is_none_or(|w| r > w.residual) {
                        worst_commutator = Some(PairResidual { i, j, residual: r });
                    }
                }
                let r = op_norm(&(&ops[i] * ops[j].adjoint() - ops[j].adjoint() * &ops[i]));
                if worst_double.is_none_or(|w| r > w.residual) {
                    worst_double = Some(PairResidual { i, j, residual: r });
                }
            }
        }
        let commuting = worst_commutator.is_none_or(|w| w.residual <= eff);
        let doubly_commuting = commuting && worst_double.is_none_or(|w| w.residual <= eff);
        Ok(Self {
            dim,
            ops,
            tol,
            commuting,
            doubly_commuting,
            worst_commutator,
            worst_double_commutator: worst_double,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn arity(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn tol(&self) -> Tolerance {
        self.tol
    }

    pub fn effective_tol(&self) -> f64 {
        self.tol.effective(self.dim, 1.0)
    }

    pub fn is_commuting(&self) -> bool {
        self.commuting
    }

    pub fn is_doubly_commuting(&self) -> bool {
        self.doubly_commuting
    }

    pub fn worst_commutator(&self) -> Option<PairResidual> {
        self.worst_commutator
    }

    pub fn worst_double_commutator(&self) -> Option<PairResidual> {
        self.worst_double_commutator
    }

    fn require_commuting(&self) -> Result<()> {
        match self.worst_commutator {
            Some(w) if !self.commuting => Err(Error::NotCommuting { i: w.i, j: w.j, residual: w.residual }),
            _ => Ok(()),
        }
    }

    fn require_doubly_commuting(&self) -> Result<()> {
        self.require_commuting()?;
        match self.worst_double_commutator {
            Some(w) if !self.doubly_commuting => {
                Err(Error::NotDoublyCommuting { i: w.i, j: w.j, residual: w.residual })
            }
            _ => Ok(()),
        }
    }

    /// The tuple compressed to a subspace, in that subspace's frame
    /// coordinates.
    pub fn restrict(&self, s: &Subspace) -> Result<ContractionTuple> {
        let ops = self.ops.iter().map(|t| compress(t, s)).collect::<Result<Vec<_>>>()?;
        ContractionTuple::new(s.dim(), ops, self.tol)
    }

    /// Product `T_1 T_2 ⋯ T_n` (identity for the empty tuple).
    pub fn product(&self) -> ComplexMatrix {
        self.ops.iter().fold(identity(self.dim), |acc, t| acc * t)
    }
}

/// Atom and fundamental c.n.u. labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AtomType {
    /// unitary
    A1,
    /// completely non-unitary
    A2,
    /// pure isometry
    B1,
    /// completely non-isometric
    B2,
    NonAtom,
}

impl fmt::Display for AtomType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AtomType::A1 => "A1",
            AtomType::A2 => "A2",
            AtomType::B1 => "B1",
            AtomType::B2 => "B2",
            AtomType::NonAtom => "NonAtom",
        };
        f.write_str(s)
    }
}

impl FromStr for AtomType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A1" => Ok(AtomType::A1),
            "A2" => Ok(AtomType::A2),
            "B1" => Ok(AtomType::B1),
            "B2" => Ok(AtomType::B2),
            "NonAtom" => Ok(AtomType::NonAtom),
            other => Err(Error::Input(format!("unknown atom label {other:?}"))),
        }
    }
}

/// One tag per tuple member, in member order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeSignature(pub Vec<AtomType>);

impl TypeSignature {
    /// Every signature over `alphabet` of the given length, in
    /// lexicographic order.
    pub fn all(alphabet: [AtomType; 2], len: usize) -> Vec<TypeSignature> {
        (0..1usize << len)
            .map(|bits| {
                TypeSignature(
                    (0..len).map(|i| alphabet[(bits >> (len - 1 - i)) & 1]).collect(),
                )
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|t| t.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for TypeSignature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().is_empty() {
            return Ok(TypeSignature(Vec::new()));
        }
        s.split(',').map(AtomType::from_str).collect::<Result<Vec<_>>>().map(TypeSignature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomMode {
    /// Leaves split by unitary (A1) / c.n.u. (A2) parts.
    UnitaryCnu,
    /// Leaves split by pure isometry (B1) / c.n.i. (B2) parts.
    IsometryCni,
}

impl AtomMode {
    pub fn alphabet(self) -> [AtomType; 2] {
        match self {
            AtomMode::UnitaryCnu => [AtomType::A1, AtomType::A2],
            AtomMode::IsometryCni => [AtomType::B1, AtomType::B2],
        }
    }
}

/// Result of the recursive decomposition: one joint reducing subspace per
/// type signature. Zero-dimensional leaves are kept.
#[derive(Debug, Clone)]
pub struct AtomTable {
    pub mode: AtomMode,
    pub ambient_dim: usize,
    pub leaves: BTreeMap<TypeSignature, Subspace>,
}

impl AtomTable {
    pub fn leaf(&self, sig: &TypeSignature) -> Option<&Subspace> {
        self.leaves.get(sig)
    }

    pub fn nonzero_leaves(&self) -> impl Iterator<Item = (&TypeSignature, &Subspace)> {
        self.leaves.iter().filter(|(_, s)| !s.is_zero())
    }

    /// `‖Σ P_leaf − I‖`.
    pub fn completeness_residual(&self) -> f64 {
        let mut sum = crate::linalg::zeros(self.ambient_dim, self.ambient_dim);
        for s in self.leaves.values() {
            sum += s.projection();
        }
        op_norm(&(sum - identity(self.ambient_dim)))
    }

    /// Largest `‖P_i P_j‖` over distinct leaves.
    pub fn orthogonality_residual(&self) -> f64 {
        let leaves: Vec<&Subspace> = self.leaves.values().filter(|s| !s.is_zero()).collect();
        let mut worst: f64 = 0.0;
        for i in 0..leaves.len() {
            for j in i + 1..leaves.len() {
                worst = worst.max(op_norm(&(leaves[i].frame().adjoint() * leaves[j].frame())));
            }
        }
        worst
    }

    /// Checks every leaf against every tuple member: reduction residuals
    /// and the per-member tag of each nonzero leaf.
    pub fn audit(&self, tuple: &ContractionTuple) -> Result<AtomAudit> {
        let tol = tuple.tol();
        let mut max_reducing_residual: f64 = 0.0;
        let mut mismatched = Vec::new();
        for (sig, leaf) in &self.leaves {
            for (i, t) in tuple.ops().iter().enumerate() {
                max_reducing_residual = max_reducing_residual.max(reduces(t, leaf, tol)?.max_residual());
                if leaf.is_zero() {
                    continue;
                }
                let restricted = compress(t, leaf)?;
                let tag = match self.mode {
                    AtomMode::UnitaryCnu => classify_atom(&restricted, tol)?,
                    AtomMode::IsometryCni => classify_cnu_atom(&restricted, tol)?,
                };
                if tag != sig.0[i] {
                    mismatched.push((sig.clone(), i, tag));
                }
            }
        }
        Ok(AtomAudit {
            completeness_residual: self.completeness_residual(),
            orthogonality_residual: self.orthogonality_residual(),
            max_reducing_residual,
            mismatched_tags: mismatched,
        })
    }
}

#[derive(Debug, Clone)]
pub struct AtomAudit {
    pub completeness_residual: f64,
    pub orthogonality_residual: f64,
    pub max_reducing_residual: f64,
    /// `(leaf, member, observed tag)` for every disagreement.
    pub mismatched_tags: Vec<(TypeSignature, usize, AtomType)>,
}

impl AtomAudit {
    pub fn passes(&self, tol: f64) -> bool {
        self.completeness_residual <= tol
            && self.orthogonality_residual <= tol
            && self.max_reducing_residual <= tol
            && self.mismatched_tags.is_empty()
    }
}

fn ensure_contraction(t: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    ensure_square(t, t.nrows())?;
    ensure_finite(t)?;
    let norm = op_norm(t);
    let eff = tol.effective(t.nrows(), 1.0);
    if norm > 1.0 + eff {
        return Err(Error::NotAContraction { index: 0, norm, tol: eff });
    }
    Ok(())
}

/// Maximal reducing subspace on which `T` is unitary.
pub fn unitary_part(t: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_contraction(t, tol)?;
    let d = t.nrows();
    let id = identity(d);
    let eff = tol.effective(d, 1.0);
    let stacked = vstack(&[&id - t.adjoint() * t, &id - t * t.adjoint()], d);
    let seed = Subspace::from_orthonormal(null_space(&stacked, eff), eff);
    maximal_reducing_core(&seed, std::slice::from_ref(t), tol)
}

/// Maximal reducing subspace on which `T` is isometric.
///
/// A finite-dimensional isometry is unitary, so on dense input this agrees
/// with [`unitary_part`]; the Levan split only separates anything on
/// structured operators with symbolic shift blocks.
pub fn isometric_part(t: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
    ensure_contraction(t, tol)?;
    let d = t.nrows();
    let eff = tol.effective(d, 1.0);
    let seed = Subspace::from_orthonormal(null_space(&(identity(d) - t.adjoint() * t), eff), eff);
    maximal_reducing_core(&seed, std::slice::from_ref(t), tol)
}

pub fn is_unitary(t: &ComplexMatrix, tol: Tolerance) -> bool {
    unitarity_residual(t) <= tol.effective(t.nrows(), 1.0)
}

/// A1 / A2 / NonAtom.
pub fn classify_atom(t: &ComplexMatrix, tol: Tolerance) -> Result<AtomType> {
    ensure_contraction(t, tol)?;
    if is_unitary(t, tol) {
        return Ok(AtomType::A1);
    }
    if unitary_part(t, tol)?.is_zero() {
        Ok(AtomType::A2)
    } else {
        Ok(AtomType::NonAtom)
    }
}

/// B1 / B2 / NonAtom. A dense B1 answer needs an isometry with no unitary
/// part, which only the empty matrix satisfies.
pub fn classify_cnu_atom(t: &ComplexMatrix, tol: Tolerance) -> Result<AtomType> {
    ensure_contraction(t, tol)?;
    let eff = tol.effective(t.nrows(), 1.0);
    if isometry_residual(t) <= eff && unitary_part(t, tol)?.is_zero() {
        return Ok(AtomType::B1);
    }
    if isometric_part(t, tol)?.is_zero() {
        Ok(AtomType::B2)
    } else {
        Ok(AtomType::NonAtom)
    }
}

/// Wold split of a dense isometry.
#[derive(Debug, Clone)]
pub struct WoldParts {
    pub unitary_space: Subspace,
    pub shift_space: Subspace,
    /// `H ⊖ VH`.
    pub wandering: Subspace,
    /// Set when `V` is an isometry only up to tolerance.
    pub approximate: bool,
    pub isometry_residual: f64,
}

/// Dense Wold split: `unitary_space = ∩_{n≤d} range(Vⁿ)`.
///
/// For an exact finite-dimensional isometry this is the whole space and
/// the wandering subspace is `{0}`.
pub fn wold_split(v: &ComplexMatrix, tol: Tolerance) -> Result<WoldParts> {
    ensure_square(v, v.nrows())?;
    ensure_finite(v)?;
    let d = v.nrows();
    let eff = tol.effective(d, 1.0);
    let residual = isometry_residual(v);
    if residual > eff {
        return Err(Error::NotAnIsometry { residual, tol: eff });
    }
    let mut unitary = Subspace::full(d);
    let mut power = identity(d);
    for _ in 0..d {
        power = &power * v;
        unitary = intersect(&unitary, &orthonormalize(&power, tol)?)?;
    }
    let range = orthonormalize(v, tol)?;
    Ok(WoldParts {
        shift_space: unitary.orthogonal_complement(),
        unitary_space: unitary,
        wandering: range.orthogonal_complement(),
        approximate: residual > MACHINE_LEVEL * f64::EPSILON * d.max(1) as f64,
        isometry_residual: residual,
    })
}

/// The joint unitary part of a commuting tuple and the restrictions to it
/// and to its complement.
#[derive(Debug, Clone)]
pub struct JointUnitaryPart {
    pub unitary: Subspace,
    pub cnu: Subspace,
    pub unitary_restrictions: Vec<ComplexMatrix>,
    pub cnu_restrictions: Vec<ComplexMatrix>,
    pub max_reducing_residual: f64,
    pub max_unitarity_residual: f64,
}

/// `H₁ = unitary_part(∏ T_i)`, checked to reduce every member and to carry
/// a unitary restriction of each.
pub fn joint_unitary_part(tuple: &ContractionTuple) -> Result<JointUnitaryPart> {
    tuple.require_commuting()?;
    let tol = tuple.tol();
    let unitary = unitary_part(&tuple.product(), tol)?;
    let cnu = unitary.orthogonal_complement();
    let mut max_reducing: f64 = 0.0;
    let mut max_unitarity: f64 = 0.0;
    let mut unitary_restrictions = Vec::with_capacity(tuple.arity());
    let mut cnu_restrictions = Vec::with_capacity(tuple.arity());
    for (i, t) in tuple.ops().iter().enumerate() {
        let report = reduces(t, &unitary, tol)?;
        if !report.reduces {
            return Err(Error::NotReducing {
                what: format!("joint unitary part vs operator {i}"),
                residual: report.max_residual(),
                tol: report.tol,
            });
        }
        max_reducing = max_reducing.max(report.max_residual());
        let restricted = compress(t, &unitary)?;
        let r = unitarity_residual(&restricted);
        let eff = tol.effective(unitary.dim(), 1.0);
        if r > eff {
            return Err(Error::NotReducing {
                what: format!("restriction of operator {i} to joint unitary part is not unitary"),
                residual: r,
                tol: eff,
            });
        }
        max_unitarity = max_unitarity.max(r);
        unitary_restrictions.push(restricted);
        cnu_restrictions.push(compress(t, &cnu)?);
    }
    Ok(JointUnitaryPart {
        unitary,
        cnu,
        unitary_restrictions,
        cnu_restrictions,
        max_reducing_residual: max_reducing,
        max_unitarity_residual: max_unitarity,
    })
}

/// Which canonical split a center step uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitter {
    /// unitary part / c.n.u. complement
    Unitary,
    /// isometric part / c.n.i. complement
    Isometric,
}

impl Splitter {
    fn first_part(self, t: &ComplexMatrix, tol: Tolerance) -> Result<Subspace> {
        match self {
            Splitter::Unitary => unitary_part(t, tol),
            Splitter::Isometric => isometric_part(t, tol),
        }
    }
}

/// One splitting step of the recursive decomposition.
#[derive(Debug, Clone)]
pub struct CenterSplit {
    /// Unitary (or isometric) part of the center.
    pub first: Subspace,
    /// Its orthogonal complement.
    pub second: Subspace,
    pub first_tuple: ContractionTuple,
    pub second_tuple: ContractionTuple,
    pub max_reducing_residual: f64,
}

/// Splits the space along the canonical decomposition of member `center`
/// (zero-based) and restricts the whole tuple to both halves.
pub fn split_at_center(tuple: &ContractionTuple, center: usize) -> Result<CenterSplit> {
    split_with(tuple, center, Splitter::Unitary)
}

pub fn split_with(tuple: &ContractionTuple, center: usize, splitter: Splitter) -> Result<CenterSplit> {
    tuple.require_doubly_commuting()?;
    if center >= tuple.arity() {
        return Err(Error::Input(format!("center {center} out of range for arity {}", tuple.arity())));
    }
    let tol = tuple.tol();
    let first = splitter.first_part(&tuple.ops()[center], tol)?;
    let second = first.orthogonal_complement();
    let mut max_residual: f64 = 0.0;
    for (i, t) in tuple.ops().iter().enumerate() {
        if i == center {
            continue;
        }
        for (name, part) in [("first", &first), ("second", &second)] {
            let report = reduces(t, part, tol)?;
            if !report.reduces {
                return Err(Error::NotReducing {
                    what: format!("{name} part of center {center} vs operator {i}"),
                    residual: report.max_residual(),
                    tol: report.tol,
                });
            }
            max_residual = max_residual.max(report.max_residual());
        }
    }
    Ok(CenterSplit {
        first_tuple: tuple.restrict(&first)?,
        second_tuple: tuple.restrict(&second)?,
        first,
        second,
        max_reducing_residual: max_residual,
    })
}

/// Recursive `2^n` decomposition with centers in ascending order.
pub fn atom_decompose(tuple: &ContractionTuple) -> Result<AtomTable> {
    let order: Vec<usize> = (0..tuple.arity()).collect();
    atom_decompose_with_order(tuple, &order)
}

pub fn atom_decompose_with_order(tuple: &ContractionTuple, order: &[usize]) -> Result<AtomTable> {
    decompose(tuple, order, AtomMode::UnitaryCnu)
}

/// Isometric / c.n.i. decomposition of a tuple of c.n.u. contractions.
pub fn cnu_atom_decompose(tuple: &ContractionTuple) -> Result<AtomTable> {
    for (index, t) in tuple.ops().iter().enumerate() {
        if !unitary_part(t, tuple.tol())?.is_zero() {
            return Err(Error::NotCnu { index });
        }
    }
    let order: Vec<usize> = (0..tuple.arity()).collect();
    decompose(tuple, &order, AtomMode::IsometryCni)
}

fn validate_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if order.len() != n {
        return Err(Error::Input(format!("center order has length {}, expected {n}", order.len())));
    }
    for &c in order {
        if c >= n || seen[c] {
            return Err(Error::Input(format!("center order {order:?} is not a permutation of 0..{n}")));
        }
        seen[c] = true;
    }
    Ok(())
}

struct Node {
    tags: Vec<Option<AtomType>>,
    space: Subspace,
    tuple: ContractionTuple,
}

fn decompose(tuple: &ContractionTuple, order: &[usize], mode: AtomMode) -> Result<AtomTable> {
    let n = tuple.arity();
    validate_order(order, n)?;
    tuple.require_doubly_commuting()?;
    let d = tuple.dim();
    let [first_tag, second_tag] = mode.alphabet();
    let splitter = match mode {
        AtomMode::UnitaryCnu => Splitter::Unitary,
        AtomMode::IsometryCni => Splitter::Isometric,
    };
    let mut nodes =
        vec![Node { tags: vec![None; n], space: Subspace::full(d), tuple: tuple.clone() }];
    for &center in order {
        let mut next = Vec::with_capacity(nodes.len() * 2);
        for node in nodes {
            let (first, second, first_tuple, second_tuple) = if node.space.is_zero() {
                (node.space.clone(), node.space.clone(), node.tuple.clone(), node.tuple.clone())
            } else {
                let split = split_with(&node.tuple, center, splitter)?;
                (
                    node.space.embed(&split.first)?,
                    node.space.embed(&split.second)?,
                    split.first_tuple,
                    split.second_tuple,
                )
            };
            let mut tags = node.tags.clone();
            tags[center] = Some(first_tag);
            next.push(Node { tags: tags.clone(), space: first, tuple: first_tuple });
            tags[center] = Some(second_tag);
            next.push(Node { tags, space: second, tuple: second_tuple });
        }
        nodes = next;
    }
    let leaves = nodes
        .into_iter()
        .map(|node| {
            let sig = TypeSignature(node.tags.into_iter().map(|t| t.expect("every center visited")).collect());
            (sig, node.space)
        })
        .collect();
    Ok(AtomTable { mode, ambient_dim: d, leaves })
}

/// Evidence for the "product is unitary iff every factor is" biconditional.
#[derive(Debug, Clone, Serialize)]
pub struct ProductUnitaryReport {
    pub product_unitary: bool,
    pub all_unitary: bool,
    pub product_residual: f64,
    pub member_residuals: Vec<f64>,
    pub biconditional_holds: bool,
}

pub fn check_product_unitary(tuple: &ContractionTuple) -> Result<ProductUnitaryReport> {
    tuple.require_commuting()?;
    let tol = tuple.tol();
    let product_residual = unitarity_residual(&tuple.product());
    let eff = tol.effective(tuple.dim(), 1.0);
    let member_residuals: Vec<f64> = tuple.ops().iter().map(unitarity_residual).collect();
    let product_unitary = product_residual <= eff;
    let all_unitary = member_residuals.iter().all(|&r| r <= eff);
    Ok(ProductUnitaryReport {
        product_unitary,
        all_unitary,
        product_residual,
        member_residuals,
        biconditional_holds: product_unitary == all_unitary,
    })
}
