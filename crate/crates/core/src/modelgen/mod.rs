//! Seeded ground-truth generators and structured operators.

pub mod generators;
pub mod rng;
pub mod structured;

pub use generators::{
    direct_sum_family, haar_unitary, random_contraction, scramble, tensor_family, truncated_shift,
    FactorSpec, PlantedFamily, DEFAULT_DIM_CAP, STRICT_NORM,
};
pub use rng::{CounterRng, Stream};
pub use structured::{
    block_partition, structured_atom_decompose, structured_cnu_atom_decompose, structured_family,
    wold_split_structured, BlockShape, BlockSpec, StructuredAtomTable, StructuredBlock, StructuredLeaf,
    StructuredOperator, StructuredWoldParts,
};
