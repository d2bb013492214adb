//! Exact computation of sumsets and restricted product sets in finite
//! groups, with detectors for progression structure, classifiers for
//! critical pairs, and exhaustive verifiers for the associated lower-bound
//! and inverse theorems at desk scale.

pub mod bits;
pub mod caps;
pub mod error;
pub mod group;
pub mod modmat;
pub mod morphism;
pub mod report;
pub mod search;
pub mod structure;
pub mod subset;
pub mod sumset;

#[cfg(test)]
pub(crate) mod testutil;

pub use bits::Bits;
pub use caps::Caps;
pub use error::{Error, Result};
pub use group::{FiniteGroup, GroupSpec, NormalShape};
pub use morphism::{AutSpec, Automorphism};
pub use report::{ClassifyOutcome, CriticalPairRecord, PairFinding, VerificationReport};
pub use search::{BoundKind, Normalization, SearchMode, SearchTask};
pub use structure::{
    CriticalPairClassification, ProgressionDescriptor, ProgressionKind, Taxonomy,
};
pub use subset::Subset;
pub use sumset::OlsonCheck;
