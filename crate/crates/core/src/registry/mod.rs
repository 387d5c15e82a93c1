//! Data category registry: the application-chosen vocabulary of
//! restriction categories, with applicability, arity and value space.

mod diff;
mod mapping;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use diff::{registry_diff, ChangedCategory, RegistryDiff};
pub use mapping::{map_categories, CategoryMapping, MappingError, MappingPair};
pub use validate::{validate, Finding, Level, Severity, ValidateOptions, ValidationReport};

use crate::denote::{Assertion, AssertionSet};
use crate::model::{is_category_name, NodeKind};

pub const DEFAULT_REGISTRY: &str = include_str!("../../registries/default.reg");
pub const QUANT_REGISTRY: &str = include_str!("../../registries/quant.reg");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegistryError {
    #[error("{line}:{column}: {message}")]
    Parse { line: u32, column: u32, message: String },
    #[error("category `{0}` is defined more than once")]
    DuplicateCategory(String),
    #[error("category `{name}`: {message}")]
    InvalidSpec { name: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Applicability {
    Event,
    Participant,
    Relation,
    Alternative,
}

impl Applicability {
    pub fn as_str(self) -> &'static str {
        match self {
            Applicability::Event => "event",
            Applicability::Participant => "participant",
            Applicability::Relation => "relation",
            Applicability::Alternative => "alternative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "event" => Applicability::Event,
            "participant" => Applicability::Participant,
            "relation" => Applicability::Relation,
            "alternative" => Applicability::Alternative,
            _ => return None,
        })
    }
}

impl From<NodeKind> for Applicability {
    fn from(kind: NodeKind) -> Self {
        match kind {
            NodeKind::Event => Applicability::Event,
            NodeKind::Participant => Applicability::Participant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arity {
    Single,
    Multiple,
}

impl Arity {
    pub fn as_str(self) -> &'static str {
        match self {
            Arity::Single => "single",
            Arity::Multiple => "multiple",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ValueSpace {
    Closed(Vec<String>),
    OpenText,
    Number,
    Reference,
}

impl ValueSpace {
    pub fn type_name(&self) -> &'static str {
        match self {
            ValueSpace::Closed(_) => "closed",
            ValueSpace::OpenText => "text",
            ValueSpace::Number => "number",
            ValueSpace::Reference => "reference",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CategorySpec {
    pub name: String,
    pub definition: String,
    pub applies_to: BTreeSet<Applicability>,
    pub arity: Arity,
    pub value_space: ValueSpace,
    /// Metadata-like category, excluded from meaning.
    pub contextual: bool,
}

impl CategorySpec {
    pub fn new(
        name: impl Into<String>,
        applies_to: impl IntoIterator<Item = Applicability>,
        arity: Arity,
        value_space: ValueSpace,
    ) -> Self {
        CategorySpec {
            name: name.into(),
            definition: String::new(),
            applies_to: applies_to.into_iter().collect(),
            arity,
            value_space,
            contextual: false,
        }
    }

    fn check(&self) -> Result<(), RegistryError> {
        let invalid = |message: &str| RegistryError::InvalidSpec { name: self.name.clone(), message: message.into() };
        if !is_category_name(&self.name) {
            return Err(invalid("name is not a valid category name"));
        }
        if let ValueSpace::Closed(values) = &self.value_space {
            if values.is_empty() {
                return Err(invalid("closed value space is empty"));
            }
            let distinct: BTreeSet<&String> = values.iter().collect();
            if distinct.len() != values.len() {
                return Err(invalid("closed value space lists a value twice"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Registry {
    pub id: String,
    categories: Vec<CategorySpec>,
    index: BTreeMap<String, usize>,
}

impl Registry {
    pub fn new(id: impl Into<String>, categories: Vec<CategorySpec>) -> Result<Self, RegistryError> {
        let mut index = BTreeMap::new();
        for (i, spec) in categories.iter().enumerate() {
            spec.check()?;
            if index.insert(spec.name.clone(), i).is_some() {
                return Err(RegistryError::DuplicateCategory(spec.name.clone()));
            }
        }
        Ok(Registry { id: id.into(), categories, index })
    }

    pub fn empty(id: impl Into<String>) -> Self {
        Registry { id: id.into(), categories: Vec::new(), index: BTreeMap::new() }
    }

    /// The bundled registry covering the reference dialogue example.
    pub fn default_registry() -> Self {
        load_registry(DEFAULT_REGISTRY).expect("bundled registry is valid")
    }

    /// The bundled registry for collective quantification categories.
    pub fn quantification_registry() -> Self {
        load_registry(QUANT_REGISTRY).expect("bundled registry is valid")
    }

    pub fn categories(&self) -> &[CategorySpec] {
        &self.categories
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&CategorySpec> {
        self.index.get(name).map(|&i| &self.categories[i])
    }

    pub fn is_single_valued(&self, name: &str) -> bool {
        self.get(name).is_some_and(|s| s.arity == Arity::Single)
    }

    /// Adds categories, failing on a name clash.
    pub fn extended(&self, extra: impl IntoIterator<Item = CategorySpec>) -> Result<Self, RegistryError> {
        let mut all = self.categories.clone();
        all.extend(extra);
        Registry::new(self.id.clone(), all)
    }

    /// Drops assertions built from contextual categories.
    pub fn strip_contextual(&self, set: &AssertionSet) -> AssertionSet {
        set.iter()
            .filter(|a| match a {
                Assertion::Restr(_, c, _) | Assertion::Rel(_, _, c, _) => !self.get(c).is_some_and(|s| s.contextual),
                _ => true,
            })
            .cloned()
            .collect()
    }
}

impl fmt::Display for CategorySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let applies: Vec<&str> = self.applies_to.iter().map(|a| a.as_str()).collect();
        write!(f, "{} [{}] {} {}", self.name, applies.join(","), self.arity.as_str(), self.value_space.type_name())
    }
}

/// Parses the registry file format. Blank input yields an empty registry.
pub fn load_registry(text: &str) -> Result<Registry, RegistryError> {
    if text.trim().is_empty() {
        return Ok(Registry::empty("empty"));
    }
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let pos = e.pos();
        RegistryError::Parse { line: pos.row, column: pos.col, message: e.to_string() }
    })?;
    let at = |node: roxmltree::Node, message: String| {
        let pos = doc.text_pos_at(node.range().start);
        RegistryError::Parse { line: pos.row, column: pos.col, message }
    };

    let root = doc.root_element();
    if root.tag_name().name() != "registry" {
        return Err(at(root, format!("expected root element `registry`, found `{}`", root.tag_name().name())));
    }
    let id = root.attribute("id").ok_or_else(|| at(root, "registry lacks an `id` attribute".into()))?;

    let mut categories = Vec::new();
    for el in root.children().filter(|n| n.is_element()) {
        if el.tag_name().name() != "category" {
            return Err(at(el, format!("unexpected element `{}`", el.tag_name().name())));
        }
        let attr = |name: &str| el.attribute(name).ok_or_else(|| at(el, format!("category lacks `{name}`")));
        let name = attr("name")?;
        let applies_to = attr("appliesTo")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Applicability::parse(s).ok_or_else(|| at(el, format!("unknown applicability `{s}`"))))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let arity = match attr("arity")? {
            "single" => Arity::Single,
            "multiple" => Arity::Multiple,
            other => return Err(at(el, format!("unknown arity `{other}`"))),
        };
        let contextual = match el.attribute("contextual").unwrap_or("false") {
            "true" => true,
            "false" => false,
            other => return Err(at(el, format!("contextual must be true or false, found `{other}`"))),
        };
        let mut definition = String::new();
        let mut values = Vec::new();
        for child in el.children().filter(|n| n.is_element()) {
            match child.tag_name().name() {
                "definition" => definition = child.text().unwrap_or("").trim().to_owned(),
                "value" => values.push(child.text().unwrap_or("").trim().to_owned()),
                other => return Err(at(child, format!("unexpected element `{other}`"))),
            }
        }
        let value_space = match attr("type")? {
            "closed" => ValueSpace::Closed(values),
            t @ ("text" | "number" | "reference") => {
                if !values.is_empty() {
                    return Err(at(el, format!("`{t}` categories take no value list")));
                }
                match t {
                    "text" => ValueSpace::OpenText,
                    "number" => ValueSpace::Number,
                    _ => ValueSpace::Reference,
                }
            }
            other => return Err(at(el, format!("unknown type `{other}`"))),
        };
        categories.push(CategorySpec { name: name.to_owned(), definition, applies_to, arity, value_space, contextual });
    }
    Registry::new(id, categories)
}
