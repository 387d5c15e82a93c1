//! The XML instantiation of the metamodel.
//!
//! Structural elements (document, event, participant, relation, alt group,
//! alternative, link, meta, variable) are named by a [`FormatProfile`]; any
//! other element in the profile namespace inside a node or relation is a
//! restriction whose element name is the category and whose text is the
//! value. Elements from other namespaces are carried along verbatim.

mod link;
mod parse;
mod profile;
mod recover;
mod serialize;

use std::fmt;

use thiserror::Error;

pub use link::{parse_link, parse_link_kind, parse_link_with_base, LinkError};
pub use parse::{parse, parse_bytes, ParseOutcome};
pub use profile::{is_xml_name, AttributeNames, ElementNames, FormatProfile, DEFAULT_NAMESPACE};
pub use serialize::serialize;

use crate::integrity::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum XmlError {
    #[error("invalid format profile: {0}")]
    Profile(String),
    #[error("document has {} integrity violation(s)", .0.len())]
    Integrity(Vec<Violation>),
    #[error("category `{0}` collides with a structural element name")]
    ReservedCategory(String),
    #[error("namespace prefix `{0}` is bound to different URIs by two extension blocks")]
    ConflictingPrefix(String),
    #[error("{0} contains a character that XML 1.0 cannot represent")]
    UnrepresentableChar(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagnosticSeverity {
    Fatal,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: DiagnosticSeverity,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            DiagnosticSeverity::Fatal => "fatal",
            DiagnosticSeverity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub items: Vec<Diagnostic>,
}

impl ParseDiagnostics {
    pub fn has_fatal(&self) -> bool {
        self.items.iter().any(|d| d.severity == DiagnosticSeverity::Fatal)
    }

    pub fn fatal(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(|d| d.severity == DiagnosticSeverity::Fatal)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Diagnostic> {
        self.items.iter().filter(|d| d.severity == DiagnosticSeverity::Warning)
    }

    fn push(&mut self, severity: DiagnosticSeverity, (line, column): (u32, u32), message: impl Into<String>) {
        self.items.push(Diagnostic { severity, line, column, message: message.into() });
    }
}

/// The `xml:lang` attribute lands on this reserved contextual category.
pub const LANG_CATEGORY: &str = "lang";
