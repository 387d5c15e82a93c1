//! Structural integrity of a [`SemRep`]: identifier uniqueness,
//! referential integrity and the per-type invariants.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::model::{is_category_name, is_identifier, Element, Restriction, SemRep, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    InvalidIdentifier,
    DuplicateId,
    DanglingEndpoint,
    SelfReference,
    DanglingOwner,
    DanglingDomain,
    EmptyDomain,
    DuplicateDomainMember,
    ExtentOrder,
    ExtentOnParticipant,
    EmptyAlternatives,
    CertOutOfRange,
    InvalidCategory,
    InvalidToken,
    NonFiniteNumber,
    InvalidLinkTarget,
    ConfidenceOutOfRange,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::InvalidIdentifier => "invalid-identifier",
            Rule::DuplicateId => "duplicate-id",
            Rule::DanglingEndpoint => "dangling-endpoint",
            Rule::SelfReference => "self-reference",
            Rule::DanglingOwner => "dangling-owner",
            Rule::DanglingDomain => "dangling-domain",
            Rule::EmptyDomain => "empty-domain",
            Rule::DuplicateDomainMember => "duplicate-domain-member",
            Rule::ExtentOrder => "extent-order",
            Rule::ExtentOnParticipant => "extent-on-participant",
            Rule::EmptyAlternatives => "empty-alternatives",
            Rule::CertOutOfRange => "cert-out-of-range",
            Rule::InvalidCategory => "invalid-category",
            Rule::InvalidToken => "invalid-token",
            Rule::NonFiniteNumber => "non-finite-number",
            Rule::InvalidLinkTarget => "invalid-link-target",
            Rule::ConfidenceOutOfRange => "confidence-out-of-range",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub id: String,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.id, self.rule.as_str(), self.message)
    }
}

/// Returns every violated invariant; an empty list means the document is
/// structurally sound.
pub fn check_integrity(doc: &SemRep) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |id: &str, rule: Rule, message: String| out.push(Violation { id: id.to_owned(), rule, message });

    if !is_identifier(doc.id.as_str()) {
        push(doc.id.as_str(), Rule::InvalidIdentifier, "document identifier is malformed".into());
    }

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for id in doc.all_ids() {
        *counts.entry(id.as_str()).or_default() += 1;
        if !is_identifier(id.as_str()) {
            push(id.as_str(), Rule::InvalidIdentifier, "identifier is malformed".into());
        }
    }
    let mut dups: Vec<_> = counts.into_iter().filter(|(_, n)| *n > 1).collect();
    dups.sort();
    for (id, n) in dups {
        push(id, Rule::DuplicateId, format!("declared {n} times"));
    }

    for node in &doc.nodes {
        if let Some(ext) = node.temporal_extent {
            if ext.start > ext.end {
                push(
                    node.id.as_str(),
                    Rule::ExtentOrder,
                    format!("temporal extent starts at {} after it ends at {}", ext.start, ext.end),
                );
            }
            if node.kind != crate::model::NodeKind::Event {
                push(node.id.as_str(), Rule::ExtentOnParticipant, "only events have a temporal extent".into());
            }
        }
        check_restrictions(node.id.as_str(), &node.restrictions, &mut push);
        for link in &node.links {
            if !has_uri_scheme(&link.target) {
                push(node.id.as_str(), Rule::InvalidLinkTarget, format!("link target `{}` has no scheme", link.target));
            }
        }
        check_meta(node.id.as_str(), &node.meta, &mut push);
    }
    check_meta(doc.id.as_str(), &doc.meta, &mut push);

    for rel in &doc.relations {
        for endpoint in [&rel.source, &rel.target] {
            if endpoint == &rel.id {
                push(rel.id.as_str(), Rule::SelfReference, "relation uses itself as an endpoint".into());
                continue;
            }
            match doc.resolve(endpoint.as_str()) {
                Some(Element::Node(_)) | Some(Element::Variable(_)) => {}
                _ => push(
                    rel.id.as_str(),
                    Rule::DanglingEndpoint,
                    format!("endpoint `{endpoint}` is neither a node nor a label variable"),
                ),
            }
        }
        check_restrictions(rel.id.as_str(), &rel.restrictions, &mut push);
    }

    for group in &doc.alt_groups {
        if !matches!(doc.resolve(group.owner.as_str()), Some(Element::Node(_))) {
            push(group.id.as_str(), Rule::DanglingOwner, format!("owner `{}` is not a node", group.owner));
        }
        if group.alternatives.is_empty() {
            push(group.id.as_str(), Rule::EmptyAlternatives, "group has no alternatives".into());
        }
        for alt in &group.alternatives {
            if !(0.0..=1.0).contains(&alt.cert) {
                push(group.id.as_str(), Rule::CertOutOfRange, format!("certainty {} outside [0, 1]", alt.cert));
            }
            check_restrictions(group.id.as_str(), &alt.restrictions, &mut push);
        }
    }

    for var in &doc.variables {
        if var.domain.is_empty() {
            push(var.id.as_str(), Rule::EmptyDomain, "domain is empty".into());
        }
        let mut seen = BTreeSet::new();
        for member in &var.domain {
            if !seen.insert(member) {
                push(var.id.as_str(), Rule::DuplicateDomainMember, format!("`{member}` listed twice"));
            }
            if !matches!(doc.resolve(member.as_str()), Some(Element::Node(_))) {
                push(var.id.as_str(), Rule::DanglingDomain, format!("domain member `{member}` is not a node"));
            }
        }
    }

    out
}

fn check_restrictions(owner: &str, restrictions: &[Restriction], push: &mut impl FnMut(&str, Rule, String)) {
    for r in restrictions {
        if !is_category_name(&r.category) {
            push(owner, Rule::InvalidCategory, format!("category `{}` is malformed", r.category));
        }
        match &r.value {
            Value::Token(t) if t.is_empty() || t.chars().any(char::is_whitespace) => push(
                owner,
                Rule::InvalidToken,
                format!("token value `{t}` of `{}` is empty or has whitespace", r.category),
            ),
            Value::Number(n) if !n.is_finite() => {
                push(owner, Rule::NonFiniteNumber, format!("value of `{}` is not finite", r.category))
            }
            _ => {}
        }
    }
}

fn check_meta(owner: &str, meta: &crate::model::MetaBlock, push: &mut impl FnMut(&str, Rule, String)) {
    if let Some(c) = meta.processing.as_ref().and_then(|p| p.confidence) {
        if !(0.0..=1.0).contains(&c) {
            push(owner, Rule::ConfidenceOutOfRange, format!("confidence {c} outside [0, 1]"));
        }
    }
}

/// `scheme ":" ...` with scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ).
pub fn has_uri_scheme(s: &str) -> bool {
    let Some((scheme, _)) = s.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{NodeKind, TemporalExtent};

    #[test]
    fn empty_document_is_sound() {
        assert!(check_integrity(&SemRep::new("d").unwrap()).is_empty());
    }

    #[test]
    fn dangling_relation_target() {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Event, Some("e1")).unwrap();
        doc.add_node(NodeKind::Participant, Some("x")).unwrap();
        doc.add_relation("x", "e1", vec![]).unwrap();
        doc.nodes.retain(|n| n.id != "e1");
        let v = check_integrity(&doc);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::DanglingEndpoint);
        assert_eq!(v[0].id, "r1");
    }

    #[test]
    fn extent_order() {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Event, Some("e1")).unwrap();
        doc.nodes[0].temporal_extent = Some(TemporalExtent { start: 5, end: 2 });
        let v = check_integrity(&doc);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::ExtentOrder);
    }

    #[test]
    fn extent_on_participant() {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Participant, Some("p")).unwrap();
        doc.nodes[0].temporal_extent = Some(TemporalExtent { start: 1, end: 2 });
        let v = check_integrity(&doc);
        assert_eq!(v.iter().map(|v| v.rule).collect::<Vec<_>>(), vec![Rule::ExtentOnParticipant]);
    }

    #[test]
    fn duplicate_ids_across_kinds() {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Event, Some("e1")).unwrap();
        doc.add_node(NodeKind::Participant, Some("x")).unwrap();
        doc.add_node(NodeKind::Participant, Some("p")).unwrap();
        doc.add_relation_with_id(Some("r1"), "x", "e1", vec![]).unwrap();
        doc.relations[0].id = "p".into();
        let v = check_integrity(&doc);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::DuplicateId);
    }

    #[test]
    fn variable_domain_problems() {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Participant, Some("y")).unwrap();
        doc.add_variable("v1", &["y"]).unwrap();
        doc.variables[0].domain.push("y".into());
        doc.variables[0].domain.push("q".into());
        let rules: Vec<_> = check_integrity(&doc).into_iter().map(|v| v.rule).collect();
        assert_eq!(rules, vec![Rule::DuplicateDomainMember, Rule::DanglingDomain]);
    }

    #[test]
    fn uri_scheme() {
        assert!(has_uri_scheme("http://example.org/onto"));
        assert!(has_uri_scheme("urn:x"));
        assert!(!has_uri_scheme("no-scheme-here"));
        assert!(!has_uri_scheme("speech.wav"));
        assert!(!has_uri_scheme("1abc:x"));
    }
}
