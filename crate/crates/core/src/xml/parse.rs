use std::collections::{BTreeMap, BTreeSet, HashMap};

use roxmltree::{Document, Node as XNode, ParsingOptions};
use url::Url;

use super::link::parse_link_with_base;
use super::recover::scan_malformed;
use super::{DiagnosticSeverity as Sev, FormatProfile, ParseDiagnostics, LANG_CATEGORY};
use crate::integrity::check_integrity;
use crate::model::{
    AltGroup, Alternative, Environment, ExtensionBlob, Id, Interactional, LabelVariable, MetaBlock, Node, NodeKind,
    Processing, Relation, Restriction, SemRep, TemporalExtent, Value,
};

const XML_NS: &str = "http://www.w3.org/XML/1998/namespace";

/// Result of parsing: a document unless a fatal diagnostic was raised.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub doc: Option<SemRep>,
    pub diagnostics: ParseDiagnostics,
}

impl ParseOutcome {
    fn fatal(diagnostics: ParseDiagnostics) -> Self {
        ParseOutcome { doc: None, diagnostics }
    }
}

/// Decodes `bytes` according to their BOM or XML declaration, then parses.
pub fn parse_bytes(bytes: &[u8], profile: &FormatProfile) -> ParseOutcome {
    let encoding = match encoding_rs::Encoding::for_bom(bytes) {
        Some((enc, _)) => enc,
        None => match declared_encoding(bytes) {
            Some(label) => match encoding_rs::Encoding::for_label(label.as_bytes()) {
                Some(enc) => enc,
                None => {
                    let mut diagnostics = ParseDiagnostics::default();
                    diagnostics.push(Sev::Fatal, (1, 1), format!("unsupported encoding `{label}`"));
                    return ParseOutcome::fatal(diagnostics);
                }
            },
            None => encoding_rs::UTF_8,
        },
    };
    let (text, _, had_errors) = encoding.decode(bytes);
    if had_errors {
        let mut diagnostics = ParseDiagnostics::default();
        diagnostics.push(Sev::Fatal, (1, 1), format!("input is not valid {}", encoding.name()));
        return ParseOutcome::fatal(diagnostics);
    }
    parse(&text, profile)
}

fn declared_encoding(bytes: &[u8]) -> Option<String> {
    let head = &bytes[..bytes.len().min(200)];
    let head = std::str::from_utf8(head).ok().or_else(|| {
        let end = head.iter().position(|&b| b == b'>')?;
        std::str::from_utf8(&head[..=end]).ok()
    })?;
    let decl = head.strip_prefix("<?xml")?;
    let decl = &decl[..decl.find("?>")?];
    let rest = &decl[decl.find("encoding")? + "encoding".len()..];
    let rest = rest.trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next().filter(|c| *c == '"' || *c == '\'')?;
    let value = &rest[1..];
    Some(value[..value.find(quote)?].to_owned())
}

pub fn parse(text: &str, profile: &FormatProfile) -> ParseOutcome {
    let mut diagnostics = ParseDiagnostics::default();
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let options = ParsingOptions { allow_dtd: true, ..ParsingOptions::default() };
    let xml = match Document::parse_with_options(text, options) {
        Ok(doc) => doc,
        Err(e) => {
            let pos = e.pos();
            let found = scan_malformed(text);
            // The scan's wording is more specific; keep the parser's own
            // message only for lines the scan says nothing about.
            if !found.iter().any(|(line, _, _)| *line == pos.row) {
                diagnostics.push(Sev::Fatal, (pos.row, pos.col), format!("malformed markup: {e}"));
            }
            for (line, column, message) in found {
                diagnostics.push(Sev::Fatal, (line, column), message);
            }
            diagnostics.items.sort_by_key(|d| (d.line, d.column));
            return ParseOutcome::fatal(diagnostics);
        }
    };
    let root = xml.root_element();
    if text[..root.range().start].contains("<!DOCTYPE") {
        diagnostics.push(Sev::Warning, (1, 1), "document type declaration ignored");
    }

    let mut builder = Builder {
        xml: &xml,
        profile,
        diagnostics,
        explicit_ids: BTreeSet::new(),
        generated: BTreeSet::new(),
        positions: HashMap::new(),
        base: None,
    };
    builder.collect_explicit_ids(root);
    let doc = builder.document(root);
    let mut diagnostics = builder.diagnostics;
    let Some(doc) = doc else {
        return ParseOutcome::fatal(diagnostics);
    };
    if diagnostics.has_fatal() {
        return ParseOutcome::fatal(diagnostics);
    }
    for v in check_integrity(&doc) {
        let pos = builder.positions.get(&v.id).copied().unwrap_or((1, 1));
        diagnostics.push(Sev::Fatal, pos, v.to_string());
    }
    if diagnostics.has_fatal() {
        return ParseOutcome::fatal(diagnostics);
    }
    ParseOutcome { doc: Some(doc), diagnostics }
}

struct Builder<'x, 'input> {
    xml: &'x Document<'input>,
    profile: &'x FormatProfile,
    diagnostics: ParseDiagnostics,
    explicit_ids: BTreeSet<String>,
    generated: BTreeSet<String>,
    positions: HashMap<String, (u32, u32)>,
    base: Option<Url>,
}

/// Where a parsed element belongs in the document.
enum Role {
    Document,
    Event,
    Participant,
    Relation,
    AltGroup,
    Alternative,
    Link,
    Meta,
    Variable,
    /// A restriction element in the profile namespace.
    Category,
    /// An element from some other namespace.
    Foreign,
}

impl<'input> Builder<'_, 'input> {
    fn pos(&self, node: XNode<'_, 'input>) -> (u32, u32) {
        let p = self.xml.text_pos_at(node.range().start);
        (p.row, p.col)
    }

    fn fatal(&mut self, node: XNode<'_, 'input>, message: impl Into<String>) {
        let pos = self.pos(node);
        self.diagnostics.push(Sev::Fatal, pos, message);
    }

    fn warn(&mut self, node: XNode<'_, 'input>, message: impl Into<String>) {
        let pos = self.pos(node);
        self.diagnostics.push(Sev::Warning, pos, message);
    }

    fn is_ours(&self, node: XNode<'_, 'input>) -> bool {
        match node.tag_name().namespace() {
            None => true,
            Some(ns) => ns == self.profile.namespace_uri,
        }
    }

    fn role(&self, node: XNode<'_, 'input>) -> Role {
        if !self.is_ours(node) {
            return Role::Foreign;
        }
        let e = &self.profile.elements;
        let name = node.tag_name().name();
        if name == e.document {
            Role::Document
        } else if name == e.event {
            Role::Event
        } else if name == e.participant {
            Role::Participant
        } else if name == e.relation {
            Role::Relation
        } else if name == e.alt_group {
            Role::AltGroup
        } else if name == e.alternative {
            Role::Alternative
        } else if name == e.link {
            Role::Link
        } else if name == e.meta {
            Role::Meta
        } else if name == e.variable {
            Role::Variable
        } else {
            Role::Category
        }
    }

    fn collect_explicit_ids(&mut self, root: XNode<'_, 'input>) {
        let ids: Vec<String> = root
            .descendants()
            .filter(|n| n.is_element() && self.is_ours(*n))
            .filter_map(|n| n.attribute(self.profile.attributes.id.as_str()).map(str::to_owned))
            .collect();
        self.explicit_ids.extend(ids);
    }

    /// First `<prefix><k>` used neither explicitly nor by an earlier
    /// generated id.
    fn fresh(&mut self, prefix: &str) -> Id {
        let id = (1..)
            .map(|k| format!("{prefix}{k}"))
            .find(|c| !self.explicit_ids.contains(c) && !self.generated.contains(c))
            .expect("unbounded search");
        self.generated.insert(id.clone());
        Id::new_unchecked(id)
    }

    fn id_of(&mut self, node: XNode<'_, 'input>, prefix: &str) -> Id {
        let id = match node.attribute(self.profile.attributes.id.as_str()) {
            Some(id) => Id::new_unchecked(id),
            None => self.fresh(prefix),
        };
        let pos = self.pos(node);
        self.positions.entry(id.to_string()).or_insert(pos);
        id
    }

    /// Warns about attributes outside `allowed`; `xml:lang` and `xml:base`
    /// are handled by callers.
    fn check_attributes(&mut self, node: XNode<'_, 'input>, allowed: &[&str]) {
        for attr in node.attributes() {
            if attr.namespace() == Some(XML_NS) && matches!(attr.name(), "lang" | "base") {
                continue;
            }
            if attr.namespace().is_none() && allowed.contains(&attr.name()) {
                continue;
            }
            let name = attr.name().to_owned();
            self.warn(node, format!("unknown attribute `{name}` on `{}` ignored", node.tag_name().name()));
        }
    }

    fn reject_text(&mut self, node: XNode<'_, 'input>) {
        for child in node.children() {
            if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
                let snippet: String = child.text().unwrap_or("").trim().chars().take(20).collect();
                self.fatal(child, format!("unexpected text `{snippet}` inside `{}`", node.tag_name().name()));
            }
        }
    }

    fn document(&mut self, root: XNode<'_, 'input>) -> Option<SemRep> {
        if !matches!(self.role(root), Role::Document) {
            self.fatal(
                root,
                format!(
                    "root element must be `{}`, found `{}`",
                    self.profile.elements.document,
                    root.tag_name().name()
                ),
            );
            return None;
        }
        let a = &self.profile.attributes;
        self.check_attributes(root, &[a.id.as_str()]);
        let Some(id) = root.attribute(a.id.as_str()) else {
            self.fatal(root, "document element lacks an identifier");
            return None;
        };
        if let Some(base) = root.attribute((XML_NS, "base")) {
            match Url::parse(base) {
                Ok(url) => self.base = Some(url),
                Err(e) => self.fatal(root, format!("xml:base `{base}` is not an absolute URI: {e}")),
            }
        }
        if root.attribute((XML_NS, "lang")).is_some() {
            self.warn(root, "xml:lang on the document element is ignored");
        }
        self.reject_text(root);

        let mut doc = SemRep::empty(Id::new_unchecked(id));
        let mut seen_meta = false;
        for child in root.children().filter(|n| n.is_element()) {
            match self.role(child) {
                Role::Event => self.node(child, NodeKind::Event, &mut doc),
                Role::Participant => self.node(child, NodeKind::Participant, &mut doc),
                Role::Relation => self.relation(child, &mut doc),
                Role::Variable => self.variable(child, &mut doc),
                Role::Meta => {
                    if seen_meta {
                        self.fatal(child, "document has more than one meta block");
                    }
                    seen_meta = true;
                    doc.meta = self.meta(child);
                }
                Role::Foreign => doc.extensions.push(self.blob(child)),
                _ => self.fatal(child, format!("unexpected element `{}` in the document", child.tag_name().name())),
            }
        }
        Some(doc)
    }

    fn node(&mut self, el: XNode<'_, 'input>, kind: NodeKind, doc: &mut SemRep) {
        let a = &self.profile.attributes;
        self.check_attributes(el, &[a.id.as_str(), a.start.as_str(), a.end.as_str()]);
        self.reject_text(el);
        let id = self.id_of(el, "n");
        let mut node = Node::new(id.clone(), kind);

        let start = el.attribute(a.start.as_str());
        let end = el.attribute(a.end.as_str());
        match (start, end) {
            (None, None) => {}
            (Some(s), Some(e)) => match (s.parse::<u64>(), e.parse::<u64>()) {
                (Ok(start), Ok(end)) => node.temporal_extent = Some(TemporalExtent { start, end }),
                _ => self.fatal(el, format!("temporal extent `{s}`..`{e}` is not a pair of millisecond counts")),
            },
            _ => self.fatal(el, "a temporal extent needs both a start and an end"),
        }
        if let Some(lang) = el.attribute((XML_NS, "lang")) {
            node.restrictions.push(Restriction::new(LANG_CATEGORY, infer_value(lang)));
        }

        let mut seen_meta = false;
        for child in el.children().filter(|n| n.is_element()) {
            match self.role(child) {
                Role::Category => {
                    if let Some(r) = self.restriction(child) {
                        node.restrictions.push(r);
                    }
                }
                Role::AltGroup => {
                    if let Some(group) = self.alt_group(child, &id, &mut node) {
                        doc.alt_groups.push(group);
                    }
                }
                Role::Link => {
                    let link = self.link(child);
                    node.links.extend(link);
                }
                Role::Meta => {
                    if seen_meta {
                        self.fatal(child, format!("node `{id}` has more than one meta block"));
                    }
                    seen_meta = true;
                    node.meta = self.meta(child);
                }
                Role::Foreign => node.extensions.push(self.blob(child)),
                _ => self.fatal(child, format!("`{}` cannot appear inside a node", child.tag_name().name())),
            }
        }
        doc.nodes.push(node);
    }

    fn relation(&mut self, el: XNode<'_, 'input>, doc: &mut SemRep) {
        let a = &self.profile.attributes;
        self.check_attributes(el, &[a.id.as_str(), a.source.as_str(), a.target.as_str()]);
        self.reject_text(el);
        let id = self.id_of(el, "r");
        let source = el.attribute(a.source.as_str());
        let target = el.attribute(a.target.as_str());
        let (Some(source), Some(target)) = (source, target) else {
            self.fatal(el, format!("relation `{id}` needs both a source and a target"));
            return;
        };
        let mut rel = Relation {
            id,
            source: Id::new_unchecked(source),
            target: Id::new_unchecked(target),
            restrictions: Vec::new(),
            extensions: Vec::new(),
        };
        if let Some(lang) = el.attribute((XML_NS, "lang")) {
            rel.restrictions.push(Restriction::new(LANG_CATEGORY, infer_value(lang)));
        }
        for child in el.children().filter(|n| n.is_element()) {
            match self.role(child) {
                Role::Category => {
                    if let Some(r) = self.restriction(child) {
                        rel.restrictions.push(r);
                    }
                }
                Role::Foreign => rel.extensions.push(self.blob(child)),
                _ => self.fatal(child, format!("`{}` cannot appear inside a relation", child.tag_name().name())),
            }
        }
        doc.relations.push(rel);
    }

    fn variable(&mut self, el: XNode<'_, 'input>, doc: &mut SemRep) {
        let a = &self.profile.attributes;
        self.check_attributes(el, &[a.id.as_str(), a.domain.as_str()]);
        self.reject_text(el);
        if el.children().any(|c| c.is_element()) {
            self.fatal(el, "a label variable has no child elements");
        }
        if el.attribute(a.id.as_str()).is_none() {
            self.fatal(el, "a label variable needs an identifier");
            return;
        }
        let id = self.id_of(el, "v");
        let domain = el.attribute(a.domain.as_str()).unwrap_or("").split_whitespace().map(Id::new_unchecked).collect();
        doc.variables.push(LabelVariable { id, domain });
    }

    fn alt_group(&mut self, el: XNode<'_, 'input>, owner: &Id, node: &mut Node) -> Option<AltGroup> {
        let a = &self.profile.attributes;
        self.check_attributes(el, &[a.id.as_str()]);
        self.reject_text(el);
        let id = self.id_of(el, "a");
        let mut alternatives = Vec::new();
        for child in el.children().filter(|n| n.is_element()) {
            match self.role(child) {
                Role::Alternative => {
                    let cert_name = self.profile.attributes.cert.clone();
                    self.check_attributes(child, &[cert_name.as_str()]);
                    self.reject_text(child);
                    let cert = self.cert(child)?;
                    let mut bundle = Vec::new();
                    for item in child.children().filter(|n| n.is_element()) {
                        match self.role(item) {
                            Role::Category => bundle.extend(self.restriction(item)),
                            Role::Foreign => node.extensions.push(self.blob(item)),
                            _ => self.fatal(
                                item,
                                format!("`{}` cannot appear inside an alternative", item.tag_name().name()),
                            ),
                        }
                    }
                    alternatives.push(Alternative::new(bundle, cert));
                }
                // Shorthand: a bare restriction carrying its own certainty.
                Role::Category => {
                    let cert = self.cert(child)?;
                    if let Some(r) = self.restriction(child) {
                        alternatives.push(Alternative::new(vec![r], cert));
                    }
                }
                Role::Foreign => node.extensions.push(self.blob(child)),
                _ => self
                    .fatal(child, format!("`{}` cannot appear inside an alternative group", child.tag_name().name())),
            }
        }
        if alternatives.is_empty() {
            self.fatal(el, format!("alternative group `{id}` has no alternatives"));
        }
        Some(AltGroup { id, owner: owner.clone(), alternatives })
    }

    fn cert(&mut self, el: XNode<'_, 'input>) -> Option<f64> {
        let name = self.profile.attributes.cert.as_str();
        match el.attribute(name) {
            None => {
                self.fatal(el, format!("alternative lacks a `{name}` attribute"));
                None
            }
            Some(raw) => match raw.trim().parse::<f64>() {
                Ok(c) if (0.0..=1.0).contains(&c) => Some(c),
                Ok(c) => {
                    self.fatal(el, format!("certainty {c} lies outside [0, 1]"));
                    None
                }
                Err(_) => {
                    self.fatal(el, format!("certainty `{raw}` is not a number"));
                    None
                }
            },
        }
    }

    fn restriction(&mut self, el: XNode<'_, 'input>) -> Option<Restriction> {
        let category = el.tag_name().name().to_owned();
        let a = &self.profile.attributes;
        let (target_attr, type_attr, cert_attr) = (a.target.clone(), a.value_type.clone(), a.cert.clone());
        let in_shorthand = el.parent_element().is_some_and(|p| matches!(self.role(p), Role::AltGroup));
        let mut allowed = vec![target_attr.as_str(), type_attr.as_str()];
        if in_shorthand {
            allowed.push(cert_attr.as_str());
        }
        self.check_attributes(el, &allowed);
        if el.attribute((XML_NS, "lang")).is_some() {
            self.warn(el, "xml:lang on a restriction is ignored");
        }
        if let Some(child) = el.children().find(|c| c.is_element()) {
            self.fatal(child, format!("restriction `{category}` must hold text only"));
            return None;
        }
        let text: String = el.children().filter(|c| c.is_text()).filter_map(|c| c.text()).collect();

        if let Some(target) = el.attribute(target_attr.as_str()) {
            if !text.trim().is_empty() {
                self.fatal(el, format!("restriction `{category}` has both a reference and text"));
                return None;
            }
            return Some(Restriction::new(category, Value::reference(target)));
        }
        let value = match el.attribute(type_attr.as_str()) {
            None => infer_value(&text),
            Some("token") => Value::Token(text),
            Some("text") => Value::Text(text),
            Some("number") => match parse_number(&text) {
                Some(n) => Value::Number(n),
                None => {
                    self.fatal(el, format!("`{text}` is not a number"));
                    return None;
                }
            },
            Some(other) => {
                self.fatal(el, format!("unknown value type `{other}`"));
                return None;
            }
        };
        Some(Restriction::new(category, value))
    }

    fn link(&mut self, el: XNode<'_, 'input>) -> Option<crate::model::ExternalLink> {
        let a = &self.profile.attributes;
        let (kind_attr, href_attr) = (a.kind.clone(), a.href.clone());
        self.check_attributes(el, &[kind_attr.as_str(), href_attr.as_str()]);
        self.reject_text(el);
        let (Some(kind), Some(href)) = (el.attribute(kind_attr.as_str()), el.attribute(href_attr.as_str())) else {
            self.fatal(el, format!("a link needs `{kind_attr}` and `{href_attr}`"));
            return None;
        };
        let base = match el.attribute((XML_NS, "base")) {
            Some(b) => match Url::parse(b) {
                Ok(url) => Some(url),
                Err(e) => {
                    self.fatal(el, format!("xml:base `{b}` is not an absolute URI: {e}"));
                    return None;
                }
            },
            None => self.base.clone(),
        };
        match parse_link_with_base(href, kind, base.as_ref()) {
            Ok(link) => Some(link),
            Err(e) => {
                self.fatal(el, e.to_string());
                None
            }
        }
    }

    fn meta(&mut self, el: XNode<'_, 'input>) -> MetaBlock {
        self.check_attributes(el, &[]);
        self.reject_text(el);
        let mut meta = MetaBlock::default();
        for child in el.children().filter(|n| n.is_element()) {
            if !self.is_ours(child) {
                self.warn(child, format!("foreign element `{}` inside meta ignored", child.tag_name().name()));
                continue;
            }
            let name = child.tag_name().name();
            let duplicate = match name {
                "environment" => meta.environment.is_some(),
                "processing" => meta.processing.is_some(),
                "interactional" => meta.interactional.is_some(),
                _ => false,
            };
            if duplicate {
                self.fatal(child, format!("`{name}` appears twice in one meta block"));
                continue;
            }
            match name {
                "environment" => {
                    self.check_attributes(child, &["timestamp"]);
                    self.reject_text(child);
                    let mut env = Environment::default();
                    if let Some(ts) = child.attribute("timestamp") {
                        match ts.parse::<u64>() {
                            Ok(v) => env.timestamp = Some(v),
                            Err(_) => self.fatal(child, format!("timestamp `{ts}` is not a millisecond count")),
                        }
                    }
                    for item in child.children().filter(|n| n.is_element()) {
                        if item.tag_name().name() == "spatial" && self.is_ours(item) && env.spatial.is_none() {
                            env.spatial = Some(item.text().unwrap_or("").to_owned());
                        } else {
                            self.fatal(item, format!("unexpected `{}` in environment", item.tag_name().name()));
                        }
                    }
                    meta.environment = Some(env);
                }
                "processing" => {
                    self.check_attributes(child, &["producer", "confidence"]);
                    self.reject_text(child);
                    let mut p =
                        Processing { producer: child.attribute("producer").map(str::to_owned), confidence: None };
                    if let Some(c) = child.attribute("confidence") {
                        match c.parse::<f64>() {
                            Ok(v) if (0.0..=1.0).contains(&v) => p.confidence = Some(v),
                            _ => self.fatal(child, format!("confidence `{c}` is not a number in [0, 1]")),
                        }
                    }
                    meta.processing = Some(p);
                }
                "interactional" => {
                    self.check_attributes(child, &["speaker"]);
                    self.reject_text(child);
                    let mut i = Interactional {
                        speaker: child.attribute("speaker").map(str::to_owned),
                        addressees: Vec::new(),
                    };
                    for item in child.children().filter(|n| n.is_element()) {
                        if item.tag_name().name() == "addressee" && self.is_ours(item) {
                            i.addressees.push(item.text().unwrap_or("").to_owned());
                        } else {
                            self.fatal(item, format!("unexpected `{}` in interactional", item.tag_name().name()));
                        }
                    }
                    meta.interactional = Some(i);
                }
                other => self.fatal(child, format!("unexpected `{other}` in meta")),
            }
        }
        meta
    }

    /// Captures a foreign element verbatim, together with the prefix
    /// bindings it inherits from its ancestors.
    fn blob(&mut self, el: XNode<'_, 'input>) -> ExtensionBlob {
        let text = self.xml.input_text();
        let raw = text[el.range()].to_owned();
        let parent = el.parent_element();
        let mut needed: BTreeMap<String, String> = BTreeMap::new();
        for node in el.descendants().filter(|n| n.is_element()) {
            let mut prefixes = Vec::new();
            if let Some(p) = qname_prefix(&text[node.range().start + 1..]) {
                prefixes.push(p);
            }
            for attr in node.attributes() {
                if let Some((p, _)) = text[attr.range_qname()].split_once(':') {
                    prefixes.push(p);
                }
            }
            for p in prefixes {
                if p == "xml" || p == "xmlns" {
                    continue;
                }
                let here = node.lookup_namespace_uri(Some(p));
                let inherited = parent.and_then(|par| par.lookup_namespace_uri(Some(p)));
                if let (Some(h), Some(i)) = (here, inherited) {
                    if h == i {
                        needed.insert(p.to_owned(), h.to_owned());
                    }
                }
            }
        }
        ExtensionBlob { raw, namespaces: needed.into_iter().collect() }
    }
}

fn qname_prefix(tag: &str) -> Option<&str> {
    let end = tag.find(|c: char| c.is_whitespace() || c == '/' || c == '>').unwrap_or(tag.len());
    tag[..end].split_once(':').map(|(p, _)| p)
}

/// `-?digits(.digits)?([eE][+-]?digits)?`, finite.
pub(crate) fn parse_number(s: &str) -> Option<f64> {
    let bytes = s.as_bytes();
    let mut i = 0;
    if bytes.first() == Some(&b'-') {
        i += 1;
    }
    let digits = |i: &mut usize| {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        *i > start
    };
    if !digits(&mut i) {
        return None;
    }
    if bytes.get(i) == Some(&b'.') {
        i += 1;
        if !digits(&mut i) {
            return None;
        }
    }
    if matches!(bytes.get(i), Some(b'e' | b'E')) {
        i += 1;
        if matches!(bytes.get(i), Some(b'+' | b'-')) {
            i += 1;
        }
        if !digits(&mut i) {
            return None;
        }
    }
    if i != bytes.len() {
        return None;
    }
    s.parse::<f64>().ok().filter(|n| n.is_finite())
}

/// Untyped text: numbers, then whitespace-free tokens, then free text.
pub(crate) fn infer_value(text: &str) -> Value {
    if let Some(n) = parse_number(text) {
        Value::Number(n)
    } else if !text.is_empty() && !text.chars().any(char::is_whitespace) {
        Value::Token(text.to_owned())
    } else {
        Value::Text(text.to_owned())
    }
}
