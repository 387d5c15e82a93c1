//! Two-tier validation: structural integrity first, then conformance of
//! every restriction to the registry.

use std::collections::BTreeMap;
use std::fmt;

use super::{Applicability, Registry, ValueSpace};
use crate::integrity::check_integrity;
use crate::model::{Element, Restriction, SemRep, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    WellFormedOnly,
    Valid,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub location: String,
    pub rule: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} [{}]: {}", self.severity.as_str(), self.location, self.rule, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub level: Level,
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn errors(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Error).count()
    }

    pub fn warnings(&self) -> usize {
        self.findings.iter().filter(|f| f.severity == Severity::Warning).count()
    }

    pub fn is_valid(&self) -> bool {
        self.level == Level::Valid
    }

    /// `valid: 0 errors, 0 warnings` or `invalid: ...`.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} errors, {} warnings",
            if self.is_valid() { "valid" } else { "invalid" },
            self.errors(),
            self.warnings()
        )
    }

    fn from_findings(findings: Vec<Finding>) -> Self {
        let level =
            if findings.iter().any(|f| f.severity == Severity::Error) { Level::WellFormedOnly } else { Level::Valid };
        ValidationReport { level, findings }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidateOptions {
    /// Unknown categories are errors instead of warnings.
    pub strict: bool,
}

pub fn validate(doc: &SemRep, reg: &Registry, options: ValidateOptions) -> ValidationReport {
    let violations = check_integrity(doc);
    if !violations.is_empty() {
        let findings = violations
            .into_iter()
            .map(|v| Finding {
                severity: Severity::Error,
                location: v.id,
                rule: v.rule.as_str().to_owned(),
                message: v.message,
            })
            .collect();
        return ValidationReport::from_findings(findings);
    }

    let mut checker = Checker { doc, reg, options, findings: Vec::new() };
    for node in &doc.nodes {
        let kind = Applicability::from(node.kind);
        checker.check_owner(node.id.as_str(), &node.restrictions, &[kind]);
        for group in doc.alt_groups.iter().filter(|g| g.owner == node.id) {
            for (i, alt) in group.alternatives.iter().enumerate() {
                let location = format!("{}[{i}]", group.id);
                checker.check_bundle(&location, &node.restrictions, &alt.restrictions, kind);
            }
        }
    }
    for rel in &doc.relations {
        checker.check_owner(rel.id.as_str(), &rel.restrictions, &[Applicability::Relation]);
    }
    ValidationReport::from_findings(checker.findings)
}

struct Checker<'a> {
    doc: &'a SemRep,
    reg: &'a Registry,
    options: ValidateOptions,
    findings: Vec<Finding>,
}

impl Checker<'_> {
    fn push(&mut self, severity: Severity, location: &str, rule: &str, message: String) {
        self.findings.push(Finding { severity, location: location.to_owned(), rule: rule.to_owned(), message });
    }

    fn check_owner(&mut self, location: &str, restrictions: &[Restriction], needs: &[Applicability]) {
        for r in restrictions {
            self.check_restriction(location, r, needs);
        }
        let counts = category_counts(restrictions.iter());
        for (category, n) in counts {
            if n > 1 && self.reg.is_single_valued(category) {
                self.push(
                    Severity::Error,
                    location,
                    "arity",
                    format!("single-valued category `{category}` occurs {n} times"),
                );
            }
        }
    }

    /// An alternative bundle is checked together with the owner's ground
    /// restrictions, but never against sibling alternatives.
    fn check_bundle(&mut self, location: &str, ground: &[Restriction], bundle: &[Restriction], kind: Applicability) {
        for r in bundle {
            self.check_restriction(location, r, &[kind, Applicability::Alternative]);
        }
        let bundle_counts = category_counts(bundle.iter());
        let ground_counts = category_counts(ground.iter());
        for (category, n) in bundle_counts {
            let total = n + ground_counts.get(category).copied().unwrap_or(0);
            if total > 1 && self.reg.is_single_valued(category) {
                self.push(
                    Severity::Error,
                    location,
                    "arity",
                    format!("single-valued category `{category}` occurs {total} times in this alternative"),
                );
            }
        }
    }

    fn check_restriction(&mut self, location: &str, r: &Restriction, needs: &[Applicability]) {
        let Some(spec) = self.reg.get(&r.category) else {
            let severity = if self.options.strict { Severity::Error } else { Severity::Warning };
            self.push(
                severity,
                location,
                "unknown-category",
                format!("category `{}` is not in registry `{}`", r.category, self.reg.id),
            );
            return;
        };
        for need in needs {
            if !spec.applies_to.contains(need) {
                self.push(
                    Severity::Error,
                    location,
                    "not-applicable",
                    format!("category `{}` does not apply to {}", r.category, need.as_str()),
                );
            }
        }
        match &spec.value_space {
            ValueSpace::OpenText => {}
            ValueSpace::Closed(values) => {
                let lexical = r.value.lexical();
                if matches!(r.value, Value::Ref(_)) || !values.contains(&lexical) {
                    self.push(
                        Severity::Error,
                        location,
                        "value-outside-space",
                        format!("`{lexical}` is not a value of `{}`", r.category),
                    );
                }
            }
            ValueSpace::Number => {
                if !matches!(r.value, Value::Number(_)) {
                    self.push(
                        Severity::Error,
                        location,
                        "not-a-number",
                        format!("`{}` requires a number, found `{}`", r.category, r.value),
                    );
                }
            }
            ValueSpace::Reference => {
                let name = match &r.value {
                    Value::Ref(id) => Some(id.as_str()),
                    Value::Token(t) => Some(t.as_str()),
                    _ => None,
                };
                let resolves =
                    name.is_some_and(|n| matches!(self.doc.resolve(n), Some(Element::Node(_) | Element::Variable(_))));
                if !resolves {
                    self.push(
                        Severity::Error,
                        location,
                        "unresolved-reference",
                        format!("`{}` of `{}` does not name a node of this document", r.value, r.category),
                    );
                }
            }
        }
    }
}

fn category_counts<'a>(restrictions: impl Iterator<Item = &'a Restriction>) -> BTreeMap<&'a str, usize> {
    let mut counts = BTreeMap::new();
    for r in restrictions {
        *counts.entry(r.category.as_str()).or_default() += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, NodeKind};
    use crate::registry::{Arity, CategorySpec, Registry};

    fn reg() -> Registry {
        Registry::default_registry()
    }

    fn event_doc() -> SemRep {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Event, Some("e0")).unwrap();
        doc.add_node(NodeKind::Participant, Some("x")).unwrap();
        doc
    }

    #[test]
    fn closed_space_violation() {
        let mut doc = event_doc();
        doc.add_restriction("e0", "dialAct", Value::token("Greet")).unwrap();
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.errors(), 1);
        assert_eq!(report.findings[0].rule, "value-outside-space");
        assert_eq!(report.level, Level::WellFormedOnly);
    }

    #[test]
    fn applicability_violation() {
        let mut doc = event_doc();
        doc.add_restriction("x", "tense", Value::token("present")).unwrap();
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.errors(), 1);
        assert_eq!(report.findings[0].rule, "not-applicable");
    }

    #[test]
    fn unknown_category_policy() {
        let mut doc = event_doc();
        doc.add_restriction("e0", "mood", Value::token("irritated")).unwrap();
        let lenient = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!((lenient.errors(), lenient.warnings()), (0, 1));
        assert!(lenient.is_valid());
        let strict = validate(&doc, &reg(), ValidateOptions { strict: true });
        assert_eq!((strict.errors(), strict.warnings()), (1, 0));
        assert!(!strict.is_valid());
    }

    #[test]
    fn arity_on_ground_restrictions() {
        let mut doc = event_doc();
        doc.add_restriction("e0", "tense", Value::token("present")).unwrap();
        doc.add_restriction("e0", "tense", Value::token("past")).unwrap();
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.errors(), 1);
        assert_eq!(report.findings[0].rule, "arity");
    }

    #[test]
    fn alternatives_do_not_conflict_with_each_other() {
        let mut doc = event_doc();
        doc.add_alt_group(
            "e0",
            vec![
                Alternative::new(vec![Restriction::token("dialAct", "Order")], 0.8),
                Alternative::new(vec![Restriction::token("dialAct", "Inform")], 0.3),
            ],
        )
        .unwrap();
        assert!(validate(&doc, &reg(), ValidateOptions::default()).findings.is_empty());

        // ...but an alternative does conflict with a ground value.
        doc.add_restriction("e0", "dialAct", Value::token("Question")).unwrap();
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.errors(), 2);
        assert!(report.findings.iter().all(|f| f.rule == "arity"));
    }

    #[test]
    fn alternatives_need_alternative_applicability() {
        let mut doc = event_doc();
        doc.add_alt_group("e0", vec![Alternative::new(vec![Restriction::token("tense", "past")], 1.0)]).unwrap();
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.errors(), 1);
        assert_eq!(report.findings[0].rule, "not-applicable");
    }

    #[test]
    fn number_and_reference_spaces() {
        let extra = vec![
            CategorySpec::new("count", [Applicability::Participant], Arity::Single, ValueSpace::Number),
            CategorySpec::new("coref", [Applicability::Participant], Arity::Multiple, ValueSpace::Reference),
        ];
        let reg = reg().extended(extra).unwrap();
        let mut doc = event_doc();
        doc.add_restriction("x", "count", Value::Number(3.0)).unwrap();
        doc.add_restriction("x", "coref", Value::reference("e0")).unwrap();
        assert!(validate(&doc, &reg, ValidateOptions::default()).findings.is_empty());
        doc.add_restriction("x", "coref", Value::reference("ghost")).unwrap();
        doc.nodes[1].restrictions[0].value = Value::token("three");
        let rules: Vec<_> =
            validate(&doc, &reg, ValidateOptions::default()).findings.into_iter().map(|f| f.rule).collect();
        assert_eq!(rules, vec!["not-a-number", "unresolved-reference"]);
    }

    #[test]
    fn integrity_violations_are_echoed() {
        let mut doc = event_doc();
        doc.add_relation("x", "e0", vec![]).unwrap();
        doc.nodes.remove(0);
        let report = validate(&doc, &reg(), ValidateOptions::default());
        assert_eq!(report.level, Level::WellFormedOnly);
        assert_eq!(report.findings[0].rule, "dangling-endpoint");
    }
}
