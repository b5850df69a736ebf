//! Finite residuated posets, their decomposition into Płonka sums of
//! integrally closed components, and the reconstruction of operations and
//! order from directed systems of maps.

pub mod builders;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod format;
pub mod order_sum;
pub mod plonka;
pub mod poset;
pub mod report;
pub mod residuated;
pub mod signature;
pub mod table;

pub use error::{Error, Result};
pub use order_sum::{compose_residuated, DirectedSystemPair};
pub use plonka::{decompose, plonka_sum, IndexSemilattice, MetaSystem, PartitionSystem};
pub use poset::{order_closure, FinitePoset};
pub use report::Report;
pub use residuated::{compute_residuals, verify_residuated_poset, ResiduatedPoset};
pub use signature::{Algebra, Signature, Symbol};
