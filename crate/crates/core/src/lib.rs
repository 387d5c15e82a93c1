//! Multimodal meaning representation toolkit.
//!
//! A [`SemRep`] is a typed semantic graph of events and participants
//! carrying category/value restrictions, linked by relations. Ambiguity is
//! kept explicit through certainty-weighted alternative groups and label
//! variables; [`underspec`] enumerates and resolves the readings they
//! induce, [`denote`] gives each reading a set-of-assertions semantics,
//! [`registry`] validates documents against a data category registry,
//! [`xml`] reads and writes the XML interchange format, and [`fusion`]
//! merges partial representations coming from different modalities.

pub mod canon;
pub mod denote;
pub mod fusion;
pub mod integrity;
pub mod model;
pub mod quantify;
pub mod registry;
pub mod underspec;
pub mod xml;

#[cfg(feature = "testkit")]
pub mod testkit;

pub use canon::{canonicalize, isomorphic, isomorphic_with_cap};
pub use denote::{denote, denote_rep, Assertion, AssertionSet};
pub use integrity::{check_integrity, Violation};
pub use model::{
    AltGroup, Alternative, ExternalLink, GroundRep, Id, LabelVariable, LinkKind, MetaBlock, ModelError, Node, NodeKind,
    Relation, Restriction, SemRep, Value,
};
pub use quantify::encode_collective_quantifier;
pub use registry::{load_registry, validate, Registry, ValidationReport};
