//! Renaming categories (and optionally values) between application
//! vocabularies.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::integrity::{check_integrity, Violation};
use crate::model::{is_category_name, Restriction, SemRep, Value};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("category `{0}` is mapped more than once")]
    AmbiguousMapping(String),
    #[error("`{0}` is not a valid category name")]
    InvalidCategory(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("document has {} integrity violation(s)", .0.len())]
    Integrity(Vec<Violation>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingPair {
    pub from_name: String,
    pub to_name: String,
    pub value_map: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryMapping {
    pub pairs: Vec<MappingPair>,
}

impl CategoryMapping {
    pub fn rename(mut self, from: &str, to: &str) -> Self {
        self.pairs.push(MappingPair { from_name: from.into(), to_name: to.into(), value_map: Vec::new() });
        self
    }

    pub fn rename_with_values(mut self, from: &str, to: &str, values: &[(&str, &str)]) -> Self {
        self.pairs.push(MappingPair {
            from_name: from.into(),
            to_name: to.into(),
            value_map: values.iter().map(|(a, b)| ((*a).into(), (*b).into())).collect(),
        });
        self
    }

    /// One pair per line: `from to [value=newValue ...]`. `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self, MappingError> {
        let mut mapping = CategoryMapping::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(from), Some(to)) = (fields.next(), fields.next()) else {
                return Err(MappingError::Parse { line: i + 1, message: "expected `from to`".into() });
            };
            let mut value_map = Vec::new();
            for entry in fields {
                let Some((a, b)) = entry.split_once('=') else {
                    return Err(MappingError::Parse {
                        line: i + 1,
                        message: format!("`{entry}` is not `value=newValue`"),
                    });
                };
                value_map.push((a.to_owned(), b.to_owned()));
            }
            mapping.pairs.push(MappingPair { from_name: from.into(), to_name: to.into(), value_map });
        }
        Ok(mapping)
    }

    fn table(&self) -> Result<BTreeMap<&str, &MappingPair>, MappingError> {
        let mut table = BTreeMap::new();
        for pair in &self.pairs {
            for name in [&pair.from_name, &pair.to_name] {
                if !is_category_name(name) {
                    return Err(MappingError::InvalidCategory(name.clone()));
                }
            }
            if table.insert(pair.from_name.as_str(), pair).is_some() {
                return Err(MappingError::AmbiguousMapping(pair.from_name.clone()));
            }
        }
        Ok(table)
    }
}

/// Applies `m` to every restriction in the document: ground restrictions,
/// relation restrictions and alternative bundles. Structure is untouched.
pub fn map_categories(doc: &SemRep, m: &CategoryMapping) -> Result<SemRep, MappingError> {
    let table = m.table()?;
    let violations = check_integrity(doc);
    if !violations.is_empty() {
        return Err(MappingError::Integrity(violations));
    }
    let apply = |r: &mut Restriction| {
        let Some(pair) = table.get(r.category.as_str()) else {
            return;
        };
        r.category = pair.to_name.clone();
        let new_value = match &r.value {
            Value::Token(s) | Value::Text(s) => pair.value_map.iter().find(|(from, _)| from == s).map(|(_, to)| to),
            _ => None,
        };
        if let Some(to) = new_value {
            r.value = match r.value {
                Value::Text(_) => Value::Text(to.clone()),
                _ => Value::Token(to.clone()),
            };
        }
    };
    let mut out = doc.clone();
    out.nodes.iter_mut().flat_map(|n| n.restrictions.iter_mut()).for_each(apply);
    out.relations.iter_mut().flat_map(|r| r.restrictions.iter_mut()).for_each(apply);
    out.alt_groups
        .iter_mut()
        .flat_map(|g| g.alternatives.iter_mut())
        .flat_map(|a| a.restrictions.iter_mut())
        .for_each(apply);
    Ok(out)
}
