//! Tetrablock geometry and operator theory on commuting triples.

pub mod dilation;
pub mod fundamental;
pub mod point;
pub mod poly;
pub mod radius;
pub mod triple;

pub use dilation::{dilation_construct, dilation_from_pair, dilation_verify, DilationModel, DilationReport, MonomialResidual};
pub use fundamental::{defect, fundamental_operators, sufficient_dilation_hypotheses, Defect, FundamentalPair, HypothesisReport};
pub use point::{tetra_membership, Membership, Region, TetraPoint};
pub use poly::{sample_sup_boundary, vn_check, BoundaryGrid, Polynomial, Term, VonNeumannReport};
pub use radius::numerical_radius;
pub use triple::{classify_e_triple, e_canonical_decomposition, ECanonical, EClassification, EEvidence, EKind, ETriple};
