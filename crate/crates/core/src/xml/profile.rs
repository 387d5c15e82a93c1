use std::collections::BTreeMap;

use serde::Deserialize;

use super::XmlError;

pub const DEFAULT_NAMESPACE: &str = "urn:semrep:1";

/// Element names for the structural roles of the metamodel.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, rename_all = "snake_case", deny_unknown_fields)]
pub struct ElementNames {
    pub document: String,
    pub event: String,
    pub participant: String,
    pub relation: String,
    pub alt_group: String,
    pub alternative: String,
    pub link: String,
    pub meta: String,
    pub variable: String,
}

impl Default for ElementNames {
    fn default() -> Self {
        ElementNames {
            document: "semRep".into(),
            event: "event".into(),
            participant: "participant".into(),
            relation: "relation".into(),
            alt_group: "alt".into(),
            alternative: "choice".into(),
            link: "link".into(),
            meta: "meta".into(),
            variable: "var".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, rename_all = "snake_case", deny_unknown_fields)]
pub struct AttributeNames {
    pub id: String,
    pub source: String,
    pub target: String,
    pub cert: String,
    pub kind: String,
    pub href: String,
    pub start: String,
    pub end: String,
    pub domain: String,
    pub value_type: String,
}

impl Default for AttributeNames {
    fn default() -> Self {
        AttributeNames {
            id: "id".into(),
            source: "source".into(),
            target: "target".into(),
            cert: "cert".into(),
            kind: "kind".into(),
            href: "href".into(),
            start: "start".into(),
            end: "end".into(),
            domain: "domain".into(),
            value_type: "type".into(),
        }
    }
}

/// Binds the abstract metamodel to concrete markup names. Only the names
/// change between profiles; the structure does not.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FormatProfile {
    pub namespace_uri: String,
    pub elements: ElementNames,
    pub attributes: AttributeNames,
}

impl Default for FormatProfile {
    fn default() -> Self {
        FormatProfile {
            namespace_uri: DEFAULT_NAMESPACE.into(),
            elements: ElementNames::default(),
            attributes: AttributeNames::default(),
        }
    }
}

impl FormatProfile {
    /// Reads a profile from TOML; omitted names keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self, XmlError> {
        let profile: FormatProfile = toml::from_str(text).map_err(|e| XmlError::Profile(e.to_string()))?;
        profile.check()?;
        Ok(profile)
    }

    pub fn check(&self) -> Result<(), XmlError> {
        let mut seen = BTreeMap::new();
        for (role, name) in self.element_roles() {
            if !is_xml_name(name) {
                return Err(XmlError::Profile(format!("element name `{name}` for {role} is not an XML name")));
            }
            if let Some(other) = seen.insert(name, role) {
                return Err(XmlError::Profile(format!("{other} and {role} share the element name `{name}`")));
            }
        }
        let mut seen = BTreeMap::new();
        for (role, name) in self.attribute_roles() {
            if !is_xml_name(name) {
                return Err(XmlError::Profile(format!("attribute name `{name}` for {role} is not an XML name")));
            }
            if let Some(other) = seen.insert(name, role) {
                return Err(XmlError::Profile(format!("{other} and {role} share the attribute name `{name}`")));
            }
        }
        if !self.namespace_uri.is_empty() && !crate::integrity::has_uri_scheme(&self.namespace_uri) {
            return Err(XmlError::Profile(format!("namespace `{}` is not a URI", self.namespace_uri)));
        }
        Ok(())
    }

    fn element_roles(&self) -> [(&'static str, &str); 9] {
        let e = &self.elements;
        [
            ("document", &e.document),
            ("event", &e.event),
            ("participant", &e.participant),
            ("relation", &e.relation),
            ("alt_group", &e.alt_group),
            ("alternative", &e.alternative),
            ("link", &e.link),
            ("meta", &e.meta),
            ("variable", &e.variable),
        ]
    }

    fn attribute_roles(&self) -> [(&'static str, &str); 10] {
        let a = &self.attributes;
        [
            ("id", &a.id),
            ("source", &a.source),
            ("target", &a.target),
            ("cert", &a.cert),
            ("kind", &a.kind),
            ("href", &a.href),
            ("start", &a.start),
            ("end", &a.end),
            ("domain", &a.domain),
            ("value_type", &a.value_type),
        ]
    }

    /// True if `name` is taken by a structural element and therefore cannot
    /// be used as a restriction category.
    pub fn is_structural(&self, name: &str) -> bool {
        self.element_roles().iter().any(|(_, n)| *n == name)
    }
}

/// XML `Name` without colons (NCName), restricted to the common ASCII and
/// alphabetic subset.
pub fn is_xml_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_consistent() {
        FormatProfile::default().check().unwrap();
    }

    #[test]
    fn toml_overrides_some_names() {
        let p =
            FormatProfile::from_toml("namespace_uri = \"urn:other\"\n[elements]\nalt_group = \"ambiguity\"\n").unwrap();
        assert_eq!(p.elements.alt_group, "ambiguity");
        assert_eq!(p.elements.event, "event");
        assert_eq!(p.namespace_uri, "urn:other");
    }

    #[test]
    fn rejects_shared_names() {
        let err = FormatProfile::from_toml("[elements]\nalternative = \"event\"\n").unwrap_err();
        assert!(matches!(err, XmlError::Profile(m) if m.contains("share")));
        assert!(FormatProfile::from_toml("[elements]\nlink = \"1link\"\n").is_err());
        assert!(FormatProfile::from_toml("[elements]\nbogus = \"x\"\n").is_err());
    }
}
