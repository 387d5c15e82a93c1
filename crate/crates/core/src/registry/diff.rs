use std::fmt;

use super::Registry;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChangedCategory {
    pub name: String,
    pub fields: Vec<&'static str>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegistryDiff {
    pub only_in_a: Vec<String>,
    pub only_in_b: Vec<String>,
    pub changed: Vec<ChangedCategory>,
}

impl RegistryDiff {
    pub fn is_empty(&self) -> bool {
        self.only_in_a.is_empty() && self.only_in_b.is_empty() && self.changed.is_empty()
    }
}

/// One line per difference: `- name`, `+ name`, `~ name: field, field`.
impl fmt::Display for RegistryDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for name in &self.only_in_a {
            writeln!(f, "- {name}")?;
        }
        for name in &self.only_in_b {
            writeln!(f, "+ {name}")?;
        }
        for c in &self.changed {
            writeln!(f, "~ {}: {}", c.name, c.fields.join(", "))?;
        }
        Ok(())
    }
}

pub fn registry_diff(a: &Registry, b: &Registry) -> RegistryDiff {
    let mut diff = RegistryDiff::default();
    for spec in a.categories() {
        match b.get(&spec.name) {
            None => diff.only_in_a.push(spec.name.clone()),
            Some(other) => {
                let mut fields = Vec::new();
                if spec.definition != other.definition {
                    fields.push("definition");
                }
                if spec.applies_to != other.applies_to {
                    fields.push("applies_to");
                }
                if spec.arity != other.arity {
                    fields.push("arity");
                }
                if spec.value_space != other.value_space {
                    fields.push("value_space");
                }
                if spec.contextual != other.contextual {
                    fields.push("contextual");
                }
                if !fields.is_empty() {
                    diff.changed.push(ChangedCategory { name: spec.name.clone(), fields });
                }
            }
        }
    }
    diff.only_in_b = b.categories().iter().filter(|s| a.get(&s.name).is_none()).map(|s| s.name.clone()).collect();
    diff.only_in_a.sort();
    diff.only_in_b.sort();
    diff.changed.sort_by(|x, y| x.name.cmp(&y.name));
    diff
}
