//! Reducing-subspace decompositions for finite families of commuting
//! contractions, and operator tools for the tetrablock.
//!
//! Everything acts on dense complex matrices ([`ComplexMatrix`]) and
//! decides ranks and identities relative to a scaled [`Tolerance`].
//!
//! - [`subspace`]: orthonormal frames, intersections, maximal reducing cores.
//! - [`decomp`]: canonical / Levan / Wold splits and the recursive atom
//!   decomposition of doubly commuting tuples.
//! - [`tetrablock`]: point membership, E-triple classification,
//!   fundamental operators and the truncated E-isometric dilation.
//! - [`modelgen`]: seeded generators with planted answers, and structured
//!   operators with symbolic shift blocks.
//! - [`instance`]: the JSON instance format.

pub mod decomp;
pub mod error;
pub mod instance;
pub mod linalg;
pub mod modelgen;
pub mod subspace;
pub mod tetrablock;
pub mod tolerance;

pub use decomp::{
    atom_decompose, atom_decompose_with_order, check_product_unitary, classify_atom, classify_cnu_atom,
    cnu_atom_decompose, isometric_part, joint_unitary_part, split_at_center, unitary_part, wold_split,
    AtomMode, AtomTable, AtomType, CenterSplit, ContractionTuple, JointUnitaryPart, ProductUnitaryReport,
    TypeSignature, WoldParts,
};
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use subspace::{compress, intersect, maximal_reducing_core, orthonormalize, reduces, ReductionReport, Subspace};
pub use tolerance::Tolerance;
