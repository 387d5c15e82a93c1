use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::parse::infer_value;
use super::{FormatProfile, XmlError};
use crate::canon::canonicalize;
use crate::model::{format_number, ExtensionBlob, MetaBlock, Node, NodeKind, Restriction, SemRep, Value};

/// Canonical XML for `doc`: UTF-8, two-space indentation, profile
/// namespace on the root. Equal canonical documents give equal bytes.
pub fn serialize(doc: &SemRep, profile: &FormatProfile) -> Result<String, XmlError> {
    profile.check()?;
    let doc = canonicalize(doc).map_err(|e| match e {
        crate::model::ModelError::Integrity(v) => XmlError::Integrity(v),
        other => unreachable!("canonicalize only fails on integrity: {other}"),
    })?;
    let mut w = Writer { profile, out: String::new() };
    w.document(&doc)?;
    Ok(w.out)
}

struct Writer<'p> {
    profile: &'p FormatProfile,
    out: String,
}

impl Writer<'_> {
    fn document(&mut self, doc: &SemRep) -> Result<(), XmlError> {
        let e = &self.profile.elements;
        let a = &self.profile.attributes;
        self.out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = write!(self.out, "<{}", e.document);
        if !self.profile.namespace_uri.is_empty() {
            let _ = write!(self.out, " xmlns=\"{}\"", escape_attr(&self.profile.namespace_uri));
        }
        for (prefix, uri) in blob_namespaces(doc)? {
            let _ = write!(self.out, " xmlns:{prefix}=\"{}\"", escape_attr(&uri));
        }
        let _ = write!(self.out, " {}=\"{}\"", a.id, escape_attr(doc.id.as_str()));

        let empty = doc.nodes.is_empty()
            && doc.variables.is_empty()
            && doc.relations.is_empty()
            && doc.meta.is_empty()
            && doc.extensions.is_empty();
        if empty {
            self.out.push_str("/>\n");
            return Ok(());
        }
        self.out.push_str(">\n");
        for node in &doc.nodes {
            self.node(doc, node)?;
        }
        for var in &doc.variables {
            let domain: Vec<&str> = var.domain.iter().map(|d| d.as_str()).collect();
            let _ = writeln!(
                self.out,
                "  <{} {}=\"{}\" {}=\"{}\"/>",
                e.variable,
                a.id,
                escape_attr(var.id.as_str()),
                a.domain,
                escape_attr(&domain.join(" "))
            );
        }
        for rel in &doc.relations {
            let _ = write!(
                self.out,
                "  <{} {}=\"{}\" {}=\"{}\" {}=\"{}\"",
                e.relation,
                a.id,
                escape_attr(rel.id.as_str()),
                a.source,
                escape_attr(rel.source.as_str()),
                a.target,
                escape_attr(rel.target.as_str())
            );
            if rel.restrictions.is_empty() && rel.extensions.is_empty() {
                self.out.push_str("/>\n");
                continue;
            }
            self.out.push_str(">\n");
            for r in &rel.restrictions {
                self.restriction(r, 2)?;
            }
            self.blobs(&rel.extensions, 2);
            let _ = writeln!(self.out, "  </{}>", e.relation);
        }
        self.meta(&doc.meta, 1)?;
        self.blobs(&doc.extensions, 1);
        let _ = writeln!(self.out, "</{}>", e.document);
        Ok(())
    }

    fn node(&mut self, doc: &SemRep, node: &Node) -> Result<(), XmlError> {
        let e = &self.profile.elements;
        let a = &self.profile.attributes;
        let name = match node.kind {
            NodeKind::Event => &e.event,
            NodeKind::Participant => &e.participant,
        };
        let _ = write!(self.out, "  <{name} {}=\"{}\"", a.id, escape_attr(node.id.as_str()));
        if let Some(ext) = node.temporal_extent {
            let _ = write!(self.out, " {}=\"{}\" {}=\"{}\"", a.start, ext.start, a.end, ext.end);
        }
        let groups: Vec<_> = doc.alt_groups.iter().filter(|g| g.owner == node.id).collect();
        if node.restrictions.is_empty()
            && groups.is_empty()
            && node.links.is_empty()
            && node.meta.is_empty()
            && node.extensions.is_empty()
        {
            self.out.push_str("/>\n");
            return Ok(());
        }
        self.out.push_str(">\n");
        for r in &node.restrictions {
            self.restriction(r, 2)?;
        }
        for g in groups {
            let _ = writeln!(self.out, "    <{} {}=\"{}\">", e.alt_group, a.id, escape_attr(g.id.as_str()));
            for alt in &g.alternatives {
                let _ = write!(self.out, "      <{} {}=\"{}\"", e.alternative, a.cert, format_number(alt.cert));
                if alt.restrictions.is_empty() {
                    self.out.push_str("/>\n");
                    continue;
                }
                self.out.push_str(">\n");
                for r in &alt.restrictions {
                    self.restriction(r, 4)?;
                }
                let _ = writeln!(self.out, "      </{}>", e.alternative);
            }
            let _ = writeln!(self.out, "    </{}>", e.alt_group);
        }
        for link in &node.links {
            let _ = writeln!(
                self.out,
                "    <{} {}=\"{}\" {}=\"{}\"/>",
                e.link,
                a.kind,
                link.kind.as_str(),
                a.href,
                escape_attr(&link.href())
            );
        }
        self.meta(&node.meta, 2)?;
        self.blobs(&node.extensions, 2);
        let _ = writeln!(self.out, "  </{name}>");
        Ok(())
    }

    fn restriction(&mut self, r: &Restriction, depth: usize) -> Result<(), XmlError> {
        if self.profile.is_structural(&r.category) {
            return Err(XmlError::ReservedCategory(r.category.clone()));
        }
        let a = &self.profile.attributes;
        let pad = "  ".repeat(depth);
        let cat = &r.category;
        let (type_hint, text) = match &r.value {
            Value::Ref(id) => {
                let _ = writeln!(self.out, "{pad}<{cat} {}=\"{}\"/>", a.target, escape_attr(id.as_str()));
                return Ok(());
            }
            Value::Number(n) => (None, format_number(*n)),
            Value::Token(t) => {
                (if infer_value(t) == Value::Token(t.clone()) { None } else { Some("token") }, t.clone())
            }
            Value::Text(t) => (if infer_value(t) == Value::Text(t.clone()) { None } else { Some("text") }, t.clone()),
        };
        check_chars(&text, cat)?;
        let _ = write!(self.out, "{pad}<{cat}");
        if let Some(hint) = type_hint {
            let _ = write!(self.out, " {}=\"{hint}\"", a.value_type);
        }
        if text.is_empty() {
            self.out.push_str("/>\n");
        } else {
            let _ = writeln!(self.out, ">{}</{cat}>", escape_text(&text));
        }
        Ok(())
    }

    fn meta(&mut self, meta: &MetaBlock, depth: usize) -> Result<(), XmlError> {
        if meta.is_empty() {
            return Ok(());
        }
        let pad = "  ".repeat(depth);
        let _ = writeln!(self.out, "{pad}<{}>", self.profile.elements.meta);
        if let Some(env) = &meta.environment {
            let _ = write!(self.out, "{pad}  <environment");
            if let Some(ts) = env.timestamp {
                let _ = write!(self.out, " timestamp=\"{ts}\"");
            }
            match &env.spatial {
                Some(s) => {
                    check_chars(s, "spatial")?;
                    let _ = writeln!(self.out, "><spatial>{}</spatial></environment>", escape_text(s));
                }
                None => self.out.push_str("/>\n"),
            }
        }
        if let Some(p) = &meta.processing {
            let _ = write!(self.out, "{pad}  <processing");
            if let Some(producer) = &p.producer {
                check_chars(producer, "producer")?;
                let _ = write!(self.out, " producer=\"{}\"", escape_attr(producer));
            }
            if let Some(c) = p.confidence {
                let _ = write!(self.out, " confidence=\"{}\"", format_number(c));
            }
            self.out.push_str("/>\n");
        }
        if let Some(i) = &meta.interactional {
            let _ = write!(self.out, "{pad}  <interactional");
            if let Some(s) = &i.speaker {
                check_chars(s, "speaker")?;
                let _ = write!(self.out, " speaker=\"{}\"", escape_attr(s));
            }
            if i.addressees.is_empty() {
                self.out.push_str("/>\n");
            } else {
                self.out.push('>');
                for addressee in &i.addressees {
                    check_chars(addressee, "addressee")?;
                    let _ = write!(self.out, "<addressee>{}</addressee>", escape_text(addressee));
                }
                self.out.push_str("</interactional>\n");
            }
        }
        let _ = writeln!(self.out, "{pad}</{}>", self.profile.elements.meta);
        Ok(())
    }

    fn blobs(&mut self, blobs: &[ExtensionBlob], depth: usize) {
        let pad = "  ".repeat(depth);
        for blob in blobs {
            let _ = writeln!(self.out, "{pad}{}", blob.raw);
        }
    }
}

/// Prefix bindings needed by extension blobs, declared once on the root.
fn blob_namespaces(doc: &SemRep) -> Result<BTreeMap<String, String>, XmlError> {
    let mut all: BTreeMap<String, String> = BTreeMap::new();
    let blobs = doc
        .extensions
        .iter()
        .chain(doc.nodes.iter().flat_map(|n| n.extensions.iter()))
        .chain(doc.relations.iter().flat_map(|r| r.extensions.iter()));
    for blob in blobs {
        for (prefix, uri) in &blob.namespaces {
            match all.get(prefix) {
                Some(existing) if existing != uri => return Err(XmlError::ConflictingPrefix(prefix.clone())),
                _ => {
                    all.insert(prefix.clone(), uri.clone());
                }
            }
        }
    }
    Ok(all)
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\u{9}' | '\u{A}' | '\u{D}' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

fn check_chars(s: &str, what: &str) -> Result<(), XmlError> {
    if s.chars().all(is_xml_char) {
        Ok(())
    } else {
        Err(XmlError::UnrepresentableChar(format!("value of `{what}`")))
    }
}

fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}

fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#9;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            c => out.push(c),
        }
    }
    out
}
