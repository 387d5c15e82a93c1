//! The semantic graph: events and participants carrying restrictions,
//! relations between them, certainty-weighted alternative groups and
//! restricted label variables.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::integrity::Violation;

/// Errors raised by the builder operations and by operations that require
/// an integrity-passing document.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("identifier `{0}` is already used in this document")]
    DuplicateId(String),
    #[error("identifier `{0}` does not resolve")]
    UnknownId(String),
    #[error("`{0}` is not a valid identifier")]
    InvalidId(String),
    #[error("`{0}` is not a valid category name")]
    InvalidCategory(String),
    #[error("relation `{0}` cannot use itself as an endpoint")]
    SelfReference(String),
    #[error("an alternative group needs at least one alternative")]
    EmptyAlternatives,
    #[error("certainty {0} lies outside [0, 1]")]
    CertOutOfRange(f64),
    #[error("a label variable needs a non-empty domain")]
    EmptyDomain,
    #[error("member count must be at least 1, got {0}")]
    InvalidCount(i64),
    #[error("document has {} integrity violation(s)", .0.len())]
    Integrity(Vec<Violation>),
    #[error("document is not ground: {0}")]
    NotGround(String),
    #[error("document with {nodes} nodes exceeds the cap of {cap}")]
    SizeLimit { nodes: usize, cap: usize },
}

/// A document-unique identifier: a letter followed by letters, digits or
/// underscores.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Id(String);

impl Id {
    pub fn new(s: impl Into<String>) -> Result<Self, ModelError> {
        let s = s.into();
        if is_identifier(&s) {
            Ok(Id(s))
        } else {
            Err(ModelError::InvalidId(s))
        }
    }

    /// Wraps a string without checking its syntax. Integrity checking
    /// reports malformed identifiers built this way.
    pub fn new_unchecked(s: impl Into<String>) -> Self {
        Id(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Id {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl PartialEq<str> for Id {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Id {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_owned())
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Category names share the identifier syntax so that they can serve as
/// element names in the XML instantiation.
pub fn is_category_name(s: &str) -> bool {
    is_identifier(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    Event,
    Participant,
}

impl NodeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Event => "event",
            NodeKind::Participant => "participant",
        }
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A restriction value. Numbers compare by total order so that values can
/// live in ordered sets.
#[derive(Debug, Clone)]
pub enum Value {
    Token(String),
    Text(String),
    Number(f64),
    Ref(Id),
}

impl Value {
    pub fn token(s: impl Into<String>) -> Self {
        Value::Token(s.into())
    }

    pub fn text(s: impl Into<String>) -> Self {
        Value::Text(s.into())
    }

    pub fn reference(id: impl Into<String>) -> Self {
        Value::Ref(Id::new_unchecked(id))
    }

    /// The lexical form of the value, as it appears in reports.
    pub fn lexical(&self) -> String {
        match self {
            Value::Token(s) | Value::Text(s) => s.clone(),
            Value::Number(n) => format_number(*n),
            Value::Ref(id) => id.to_string(),
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Token(_) => 0,
            Value::Text(_) => 1,
            Value::Number(_) => 2,
            Value::Ref(_) => 3,
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(n: f64) -> String {
    format!("{n}")
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Token(a), Value::Token(b)) | (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Ref(a), Value::Ref(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Token(s) | Value::Text(s) => s.hash(state),
            Value::Number(n) => n.to_bits().hash(state),
            Value::Ref(id) => id.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.lexical())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Restriction {
    pub category: String,
    pub value: Value,
}

impl Restriction {
    pub fn new(category: impl Into<String>, value: Value) -> Self {
        Restriction { category: category.into(), value }
    }

    pub fn token(category: impl Into<String>, value: impl Into<String>) -> Self {
        Restriction::new(category, Value::token(value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemporalExtent {
    pub start: u64,
    pub end: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinkKind {
    DomainModel,
    LowerLevel,
}

impl LinkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkKind::DomainModel => "domainModel",
            LinkKind::LowerLevel => "lowerLevel",
        }
    }
}

/// A pointer out of the representation: to a domain model or to a lower
/// level of analysis (signal spans, parse trees). Never dereferenced.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExternalLink {
    pub kind: LinkKind,
    pub target: String,
    pub fragment: Option<String>,
}

impl ExternalLink {
    pub fn href(&self) -> String {
        match &self.fragment {
            Some(f) => format!("{}#{}", self.target, f),
            None => self.target.clone(),
        }
    }
}

/// Markup from a foreign namespace, kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtensionBlob {
    /// Exact source text of the foreign element.
    pub raw: String,
    /// Prefix bindings the raw text relies on but does not declare itself.
    pub namespaces: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Environment {
    pub timestamp: Option<u64>,
    pub spatial: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Processing {
    pub producer: Option<String>,
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Interactional {
    pub speaker: Option<String>,
    pub addressees: Vec<String>,
}

/// Contextual data: relevant to processing, irrelevant to meaning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetaBlock {
    pub environment: Option<Environment>,
    pub processing: Option<Processing>,
    pub interactional: Option<Interactional>,
}

impl MetaBlock {
    pub fn is_empty(&self) -> bool {
        self.environment.is_none() && self.processing.is_none() && self.interactional.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: Id,
    pub kind: NodeKind,
    pub restrictions: Vec<Restriction>,
    pub temporal_extent: Option<TemporalExtent>,
    pub links: Vec<ExternalLink>,
    pub meta: MetaBlock,
    pub extensions: Vec<ExtensionBlob>,
}

impl Node {
    pub fn new(id: Id, kind: NodeKind) -> Self {
        Node {
            id,
            kind,
            restrictions: Vec::new(),
            temporal_extent: None,
            links: Vec::new(),
            meta: MetaBlock::default(),
            extensions: Vec::new(),
        }
    }

    pub fn values_of<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a Value> + 'a {
        self.restrictions.iter().filter(move |r| r.category == category).map(|r| &r.value)
    }
}

/// A directed dependency. Endpoints name either a node or a label variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: Id,
    pub source: Id,
    pub target: Id,
    pub restrictions: Vec<Restriction>,
    pub extensions: Vec<ExtensionBlob>,
}

impl Relation {
    /// Value of the first `role` restriction, if any.
    pub fn role(&self) -> Option<&Value> {
        self.restrictions.iter().find(|r| r.category == "role").map(|r| &r.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alternative {
    pub restrictions: Vec<Restriction>,
    pub cert: f64,
}

impl Alternative {
    pub fn new(restrictions: Vec<Restriction>, cert: f64) -> Self {
        Alternative { restrictions, cert }
    }

    /// The bundle as a set, for equality up to order.
    pub fn bundle_set(&self) -> BTreeSet<&Restriction> {
        self.restrictions.iter().collect()
    }
}

/// Mutually exclusive restriction bundles on one node.
#[derive(Debug, Clone, PartialEq)]
pub struct AltGroup {
    pub id: Id,
    pub owner: Id,
    pub alternatives: Vec<Alternative>,
}

impl AltGroup {
    pub fn categories(&self) -> BTreeSet<&str> {
        self.alternatives.iter().flat_map(|a| a.restrictions.iter().map(|r| r.category.as_str())).collect()
    }
}

/// A label standing for one of several nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVariable {
    pub id: Id,
    pub domain: Vec<Id>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemRep {
    pub id: Id,
    pub nodes: Vec<Node>,
    pub relations: Vec<Relation>,
    pub alt_groups: Vec<AltGroup>,
    pub variables: Vec<LabelVariable>,
    pub meta: MetaBlock,
    pub extensions: Vec<ExtensionBlob>,
}

/// What an identifier resolves to inside a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Element {
    Node(usize),
    Relation(usize),
    AltGroup(usize),
    Variable(usize),
}

impl SemRep {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        Ok(SemRep::empty(Id::new(id)?))
    }

    pub fn empty(id: Id) -> Self {
        SemRep {
            id,
            nodes: Vec::new(),
            relations: Vec::new(),
            alt_groups: Vec::new(),
            variables: Vec::new(),
            meta: MetaBlock::default(),
            extensions: Vec::new(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.alt_groups.is_empty() && self.variables.is_empty()
    }

    pub fn resolve(&self, id: &str) -> Option<Element> {
        if let Some(i) = self.nodes.iter().position(|n| n.id == id) {
            return Some(Element::Node(i));
        }
        if let Some(i) = self.relations.iter().position(|r| r.id == id) {
            return Some(Element::Relation(i));
        }
        if let Some(i) = self.alt_groups.iter().position(|g| g.id == id) {
            return Some(Element::AltGroup(i));
        }
        self.variables.iter().position(|v| v.id == id).map(Element::Variable)
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.resolve(id).is_some()
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_mut(&mut self, id: &str) -> Option<&mut Node> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    pub fn relation(&self, id: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.id == id)
    }

    pub fn alt_group(&self, id: &str) -> Option<&AltGroup> {
        self.alt_groups.iter().find(|g| g.id == id)
    }

    pub fn variable(&self, id: &str) -> Option<&LabelVariable> {
        self.variables.iter().find(|v| v.id == id)
    }

    /// Every identifier declared in the document, in declaration order.
    pub fn all_ids(&self) -> impl Iterator<Item = &Id> {
        self.nodes
            .iter()
            .map(|n| &n.id)
            .chain(self.relations.iter().map(|r| &r.id))
            .chain(self.alt_groups.iter().map(|g| &g.id))
            .chain(self.variables.iter().map(|v| &v.id))
    }

    /// First `<prefix><k>` (k = 1, 2, ...) not used in the document.
    pub fn fresh_id(&self, prefix: &str) -> Id {
        let used: BTreeSet<&str> = self.all_ids().map(Id::as_str).collect();
        (1..).map(|k| format!("{prefix}{k}")).find(|c| !used.contains(c.as_str())).map(Id).expect("unbounded search")
    }

    fn claim_id(&self, id: Option<&str>, prefix: &str) -> Result<Id, ModelError> {
        match id {
            Some(s) => {
                let id = Id::new(s)?;
                if self.contains_id(s) {
                    return Err(ModelError::DuplicateId(s.to_owned()));
                }
                Ok(id)
            }
            None => Ok(self.fresh_id(prefix)),
        }
    }

    pub fn add_node(&mut self, kind: NodeKind, id: Option<&str>) -> Result<Id, ModelError> {
        let id = self.claim_id(id, "n")?;
        self.nodes.push(Node::new(id.clone(), kind));
        Ok(id)
    }

    /// Appends a restriction to a node or relation.
    pub fn add_restriction(&mut self, owner: &str, category: &str, value: Value) -> Result<(), ModelError> {
        if !is_category_name(category) {
            return Err(ModelError::InvalidCategory(category.to_owned()));
        }
        let restriction = Restriction::new(category, value);
        match self.resolve(owner) {
            Some(Element::Node(i)) => self.nodes[i].restrictions.push(restriction),
            Some(Element::Relation(i)) => self.relations[i].restrictions.push(restriction),
            _ => return Err(ModelError::UnknownId(owner.to_owned())),
        }
        Ok(())
    }

    pub fn add_relation(
        &mut self,
        source: &str,
        target: &str,
        restrictions: Vec<Restriction>,
    ) -> Result<Id, ModelError> {
        self.add_relation_with_id(None, source, target, restrictions)
    }

    pub fn add_relation_with_id(
        &mut self,
        id: Option<&str>,
        source: &str,
        target: &str,
        restrictions: Vec<Restriction>,
    ) -> Result<Id, ModelError> {
        if let Some(own) = id {
            if own == source || own == target {
                return Err(ModelError::SelfReference(own.to_owned()));
            }
        }
        for endpoint in [source, target] {
            match self.resolve(endpoint) {
                Some(Element::Node(_)) | Some(Element::Variable(_)) => {}
                _ => return Err(ModelError::UnknownId(endpoint.to_owned())),
            }
        }
        if let Some(bad) = restrictions.iter().find(|r| !is_category_name(&r.category)) {
            return Err(ModelError::InvalidCategory(bad.category.clone()));
        }
        let id = self.claim_id(id, "r")?;
        self.relations.push(Relation {
            id: id.clone(),
            source: Id::new_unchecked(source),
            target: Id::new_unchecked(target),
            restrictions,
            extensions: Vec::new(),
        });
        Ok(id)
    }

    pub fn add_alt_group(&mut self, owner: &str, alternatives: Vec<Alternative>) -> Result<Id, ModelError> {
        self.add_alt_group_with_id(None, owner, alternatives)
    }

    pub fn add_alt_group_with_id(
        &mut self,
        id: Option<&str>,
        owner: &str,
        alternatives: Vec<Alternative>,
    ) -> Result<Id, ModelError> {
        if !matches!(self.resolve(owner), Some(Element::Node(_))) {
            return Err(ModelError::UnknownId(owner.to_owned()));
        }
        if alternatives.is_empty() {
            return Err(ModelError::EmptyAlternatives);
        }
        if let Some(a) = alternatives.iter().find(|a| !(0.0..=1.0).contains(&a.cert)) {
            return Err(ModelError::CertOutOfRange(a.cert));
        }
        let id = self.claim_id(id, "a")?;
        self.alt_groups.push(AltGroup { id: id.clone(), owner: Id::new_unchecked(owner), alternatives });
        Ok(id)
    }

    pub fn add_variable(&mut self, id: &str, domain: &[&str]) -> Result<Id, ModelError> {
        if domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        let mut seen = BTreeSet::new();
        for member in domain {
            if !matches!(self.resolve(member), Some(Element::Node(_))) {
                return Err(ModelError::UnknownId((*member).to_owned()));
            }
            if !seen.insert(*member) {
                return Err(ModelError::DuplicateId((*member).to_owned()));
            }
        }
        let id = self.claim_id(Some(id), "v")?;
        self.variables
            .push(LabelVariable { id: id.clone(), domain: domain.iter().map(|m| Id::new_unchecked(*m)).collect() });
        Ok(id)
    }

    /// Renames identifiers throughout the document: declarations, endpoints,
    /// owners, domains and reference values.
    pub fn rename_ids<F>(&mut self, mut rename: F)
    where
        F: FnMut(&Id) -> Option<Id>,
    {
        let mut apply = |id: &mut Id| {
            if let Some(new) = rename(id) {
                *id = new;
            }
        };
        for node in &mut self.nodes {
            apply(&mut node.id);
            for r in &mut node.restrictions {
                if let Value::Ref(target) = &mut r.value {
                    apply(target);
                }
            }
        }
        for rel in &mut self.relations {
            apply(&mut rel.id);
            apply(&mut rel.source);
            apply(&mut rel.target);
            for r in &mut rel.restrictions {
                if let Value::Ref(target) = &mut r.value {
                    apply(target);
                }
            }
        }
        for group in &mut self.alt_groups {
            apply(&mut group.id);
            apply(&mut group.owner);
            for alt in &mut group.alternatives {
                for r in &mut alt.restrictions {
                    if let Value::Ref(target) = &mut r.value {
                        apply(target);
                    }
                }
            }
        }
        for var in &mut self.variables {
            apply(&mut var.id);
            for member in &mut var.domain {
                apply(member);
            }
        }
    }

    /// Clears every MetaBlock in the document.
    pub fn strip_meta(&mut self) {
        self.meta = MetaBlock::default();
        for node in &mut self.nodes {
            node.meta = MetaBlock::default();
        }
    }
}

/// A fully resolved reading: no alternative groups, no variables.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundRep {
    pub rep: SemRep,
    pub score: f64,
}

impl GroundRep {
    pub fn new(rep: SemRep, score: f64) -> Result<Self, ModelError> {
        if !rep.alt_groups.is_empty() {
            return Err(ModelError::NotGround(format!("{} alternative group(s) remain", rep.alt_groups.len())));
        }
        if !rep.variables.is_empty() {
            return Err(ModelError::NotGround(format!("{} label variable(s) remain", rep.variables.len())));
        }
        Ok(GroundRep { rep, score })
    }
}
