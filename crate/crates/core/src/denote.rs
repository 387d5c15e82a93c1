//! Formal denotation of ground representations: the set of assertions a
//! reading adds to an information state.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{GroundRep, Id, ModelError, NodeKind, SemRep, Value};

/// Category and value of the placeholder assertion emitted for a relation
/// without restrictions.
pub const UNSPECIFIED_RELATION: (&str, &str) = ("rel", "unspecified");

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Assertion {
    Kind(Id, NodeKind),
    Restr(Id, String, Value),
    Rel(Id, Id, String, Value),
    Temporal(Id, u64, u64),
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assertion::Kind(n, k) => write!(f, "kind({n}, {k})"),
            Assertion::Restr(n, c, v) => write!(f, "restr({n}, {c}, {v})"),
            Assertion::Rel(s, t, c, v) => write!(f, "rel({s}, {t}, {c}, {v})"),
            Assertion::Temporal(n, s, e) => write!(f, "temporal({n}, {s}, {e})"),
        }
    }
}

pub type AssertionSet = BTreeSet<Assertion>;

/// Denotation of a ground reading. Metadata and extension markup
/// contribute nothing.
pub fn denote(g: &GroundRep) -> AssertionSet {
    denote_rep(&g.rep).expect("GroundRep is ground by construction")
}

/// Denotation of a document that is expected to be ground.
pub fn denote_rep(doc: &SemRep) -> Result<AssertionSet, ModelError> {
    if !doc.alt_groups.is_empty() {
        return Err(ModelError::NotGround(format!("{} alternative group(s) remain", doc.alt_groups.len())));
    }
    if !doc.variables.is_empty() {
        return Err(ModelError::NotGround(format!("{} label variable(s) remain", doc.variables.len())));
    }
    let mut out = AssertionSet::new();
    for node in &doc.nodes {
        out.insert(Assertion::Kind(node.id.clone(), node.kind));
        for r in &node.restrictions {
            out.insert(Assertion::Restr(node.id.clone(), r.category.clone(), r.value.clone()));
        }
        if let Some(ext) = node.temporal_extent {
            out.insert(Assertion::Temporal(node.id.clone(), ext.start, ext.end));
        }
    }
    for rel in &doc.relations {
        if rel.restrictions.is_empty() {
            let (c, v) = UNSPECIFIED_RELATION;
            out.insert(Assertion::Rel(rel.source.clone(), rel.target.clone(), c.into(), Value::token(v)));
        }
        for r in &rel.restrictions {
            out.insert(Assertion::Rel(rel.source.clone(), rel.target.clone(), r.category.clone(), r.value.clone()));
        }
    }
    Ok(out)
}
