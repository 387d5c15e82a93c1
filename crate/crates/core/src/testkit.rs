//! Seeded generators for property tests. Every document produced here
//! passes `check_integrity`.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
pub use rand_chacha::ChaCha8Rng;

use crate::fusion::Correspondence;
use crate::model::{
    AltGroup, Alternative, Environment, ExtensionBlob, ExternalLink, Id, Interactional, LabelVariable, LinkKind,
    MetaBlock, Node, NodeKind, Processing, Relation, Restriction, SemRep, TemporalExtent, Value,
};
use crate::registry::{Applicability, Arity, CategorySpec, Registry, ValueSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_nodes: usize,
    pub max_groups: usize,
    pub max_variables: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_nodes: 12, max_groups: 3, max_variables: 2 }
    }
}

const CATEGORIES: &[&str] = &["evtCat", "dialAct", "tense", "lex", "num", "pers", "topic", "c_x", "note", "lang"];
const TOKENS: &[&str] =
    &["present", "past", "Order", "Inform", "agent", "a_b", "x-y", "\u{fc}n\u{ef}", "42", "1e5", "-"];
const TEXTS: &[&str] = &[
    "hello world",
    "",
    " lead",
    "trail ",
    "a < b & c > d",
    "multi\nline",
    "tab\there",
    "quote \" and '",
    "cr\r\nlf",
    "7",
    "]]>",
];
const LINK_TARGETS: &[&str] =
    &["http://example.org/onto", "file:///corpus/a.wav", "urn:x:y", "https://h.example/p?q=1&r=2"];
const FRAGMENTS: &[&str] = &["t=1.2,1.9", "Person", "", "a#b"];
const BLOBS: &[(&str, &[(&str, &str)])] = &[
    ("<x:note xmlns:x=\"urn:ext:a\" k=\"v\">free <x:b>text</x:b></x:note>", &[]),
    ("<g:trace/>", &[("g", "urn:ext:gesture")]),
    ("<mark xmlns=\"urn:ext:plain\">  spaced  </mark>", &[]),
];

fn number(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..6) {
        0 => rng.gen_range(-5..100) as f64,
        1 => rng.gen_range(0..64) as f64 / 8.0,
        2 => rng.gen_range(-1.0e6..1.0e6),
        3 => 1.0e-9,
        4 => 1.0e21,
        _ => -0.5,
    }
}

fn cert(rng: &mut impl Rng) -> f64 {
    match rng.gen_range(0..5) {
        0 => 0.0,
        1 => 1.0,
        2 => rng.gen_range(0..=10) as f64 / 10.0,
        _ => rng.gen_range(0.0..=1.0),
    }
}

fn pick<'a>(rng: &mut impl Rng, pool: &[&'a str]) -> &'a str {
    pool.choose(rng).copied().expect("non-empty pool")
}

fn value(rng: &mut impl Rng, node_ids: &[Id]) -> Value {
    match rng.gen_range(0..10) {
        0..=3 => Value::token(pick(rng, TOKENS)),
        4..=5 => Value::text(pick(rng, TEXTS)),
        6..=7 => Value::Number(number(rng)),
        _ => match node_ids.choose(rng) {
            Some(id) => Value::Ref(id.clone()),
            None => Value::token(pick(rng, TOKENS)),
        },
    }
}

fn restrictions(rng: &mut impl Rng, node_ids: &[Id], max: usize) -> Vec<Restriction> {
    (0..rng.gen_range(0..=max)).map(|_| Restriction::new(pick(rng, CATEGORIES), value(rng, node_ids))).collect()
}

fn meta(rng: &mut impl Rng) -> MetaBlock {
    let mut m = MetaBlock::default();
    if rng.gen_bool(0.5) {
        m.environment = Some(Environment {
            timestamp: rng.gen_bool(0.7).then(|| rng.gen_range(0..10_000_000)),
            spatial: rng.gen_bool(0.5).then(|| pick(rng, TEXTS).to_owned()),
        });
    }
    if rng.gen_bool(0.5) {
        m.processing = Some(Processing {
            producer: rng.gen_bool(0.7).then(|| pick(rng, &["asr", "gesture", "parser_2"]).to_owned()),
            confidence: rng.gen_bool(0.5).then(|| cert(rng)),
        });
    }
    if rng.gen_bool(0.5) {
        let n = rng.gen_range(0..3);
        m.interactional = Some(Interactional {
            speaker: rng.gen_bool(0.7).then(|| "Peter".to_owned()),
            addressees: (0..n).map(|i| format!("A{i}")).collect(),
        });
    }
    m
}

fn blobs(rng: &mut impl Rng, p: f64) -> Vec<ExtensionBlob> {
    if !rng.gen_bool(p) {
        return Vec::new();
    }
    let (raw, ns) = BLOBS.choose(rng).copied().expect("non-empty");
    vec![ExtensionBlob {
        raw: raw.to_owned(),
        namespaces: ns.iter().map(|(p, u)| ((*p).to_owned(), (*u).to_owned())).collect(),
    }]
}

fn distinct_alternatives(rng: &mut impl Rng, node_ids: &[Id]) -> Vec<Alternative> {
    let mut out: Vec<Alternative> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let mut bundle = restrictions(rng, node_ids, 2);
        if bundle.is_empty() {
            bundle.push(Restriction::new(pick(rng, CATEGORIES), value(rng, node_ids)));
        }
        let alt = Alternative::new(bundle, cert(rng));
        if !out.iter().any(|a| a.bundle_set() == alt.bundle_set()) {
            out.push(alt);
        }
    }
    out
}

/// A random integrity-passing document within `limits`.
pub fn random_doc(rng: &mut impl Rng, limits: Limits) -> SemRep {
    let mut doc = SemRep::empty(Id::new_unchecked(format!("doc{}", rng.gen_range(0..1000))));
    let n = rng.gen_range(0..=limits.max_nodes);
    let ids: Vec<Id> =
        (0..n).map(|i| Id::new_unchecked(if rng.gen_bool(0.5) { format!("e{i}") } else { format!("p{i}") })).collect();
    for id in &ids {
        let kind = if id.as_str().starts_with('e') { NodeKind::Event } else { NodeKind::Participant };
        let mut node = Node::new(id.clone(), kind);
        node.restrictions = restrictions(rng, &ids, 4);
        if kind == NodeKind::Event && rng.gen_bool(0.3) {
            let start = rng.gen_range(0..5000);
            node.temporal_extent = Some(TemporalExtent { start, end: start + rng.gen_range(0..3000) });
        }
        if rng.gen_bool(0.2) {
            let fragment = pick(rng, FRAGMENTS);
            node.links.push(ExternalLink {
                kind: if rng.gen_bool(0.5) { LinkKind::DomainModel } else { LinkKind::LowerLevel },
                target: pick(rng, LINK_TARGETS).to_owned(),
                fragment: (!fragment.is_empty()).then(|| fragment.to_owned()),
            });
        }
        if rng.gen_bool(0.25) {
            node.meta = meta(rng);
        }
        node.extensions = blobs(rng, 0.1);
        doc.nodes.push(node);
    }
    if n == 0 {
        doc.meta = if rng.gen_bool(0.3) { meta(rng) } else { MetaBlock::default() };
        return doc;
    }
    for i in 0..rng.gen_range(0..=limits.max_variables) {
        let k = rng.gen_range(1..=n.min(3));
        let domain: Vec<Id> = ids.choose_multiple(rng, k).cloned().collect();
        doc.variables.push(LabelVariable { id: Id::new_unchecked(format!("v{i}")), domain });
    }
    let endpoints: Vec<Id> = ids.iter().chain(doc.variables.iter().map(|v| &v.id)).cloned().collect();
    for i in 0..rng.gen_range(0..=n.min(10)) {
        let mut rs = restrictions(rng, &ids, 1);
        if rng.gen_bool(0.7) {
            rs.push(Restriction::token("role", pick(rng, &["agent", "theme", "goal"])));
        }
        doc.relations.push(Relation {
            id: Id::new_unchecked(format!("r{i}")),
            source: endpoints.choose(rng).cloned().expect("non-empty"),
            target: endpoints.choose(rng).cloned().expect("non-empty"),
            restrictions: rs,
            extensions: blobs(rng, 0.05),
        });
    }
    for i in 0..rng.gen_range(0..=limits.max_groups) {
        doc.alt_groups.push(AltGroup {
            id: Id::new_unchecked(format!("a{i}")),
            owner: ids.choose(rng).cloned().expect("non-empty"),
            alternatives: distinct_alternatives(rng, &ids),
        });
    }
    if rng.gen_bool(0.3) {
        doc.meta = meta(rng);
    }
    doc.extensions = blobs(rng, 0.1);
    doc
}

/// A registry under which `doc` validates without errors or warnings.
pub fn registry_for(doc: &SemRep) -> Registry {
    #[derive(Default)]
    struct Seen {
        applies: BTreeSet<Applicability>,
        values: Vec<Value>,
        multi: bool,
    }
    let mut seen: BTreeMap<String, Seen> = BTreeMap::new();
    let mut note = |rs: &[Restriction], applies: &[Applicability], base: &[Restriction]| {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for r in base.iter().chain(rs) {
            *counts.entry(r.category.as_str()).or_default() += 1;
        }
        for r in rs {
            let s = seen.entry(r.category.clone()).or_default();
            s.applies.extend(applies.iter().copied());
            s.values.push(r.value.clone());
            s.multi |= counts[r.category.as_str()] > 1;
        }
    };
    for node in &doc.nodes {
        let kind = Applicability::from(node.kind);
        note(&node.restrictions, &[kind], &[]);
        for g in doc.alt_groups.iter().filter(|g| g.owner == node.id) {
            for alt in &g.alternatives {
                note(&alt.restrictions, &[kind, Applicability::Alternative], &node.restrictions);
            }
        }
    }
    for rel in &doc.relations {
        note(&rel.restrictions, &[Applicability::Relation], &[]);
    }
    let categories = seen
        .into_iter()
        .map(|(name, s)| {
            let space = if s.values.iter().all(|v| matches!(v, Value::Number(_))) {
                ValueSpace::Number
            } else if s.values.iter().all(|v| matches!(v, Value::Ref(_))) {
                ValueSpace::Reference
            } else if s.values.iter().all(|v| matches!(v, Value::Token(_))) {
                let closed: BTreeSet<String> = s.values.iter().map(Value::lexical).collect();
                ValueSpace::Closed(closed.into_iter().collect())
            } else {
                ValueSpace::OpenText
            };
            let arity = if s.multi { Arity::Multiple } else { Arity::Single };
            CategorySpec::new(name, s.applies, arity, space)
        })
        .collect();
    Registry::new("generated", categories).expect("generated names are valid")
}

/// Category specs whose names are not used by `reg`.
pub fn fresh_categories(rng: &mut impl Rng, reg: &Registry, count: usize) -> Vec<CategorySpec> {
    let all = [Applicability::Event, Applicability::Participant, Applicability::Relation, Applicability::Alternative];
    let mut out = Vec::new();
    let mut k = 0;
    while out.len() < count {
        let name = format!("fresh{k}");
        k += 1;
        if reg.get(&name).is_some() {
            continue;
        }
        let applies: Vec<Applicability> = all.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        let space = match rng.gen_range(0..4) {
            0 => ValueSpace::Closed(vec!["p".into(), "q".into()]),
            1 => ValueSpace::OpenText,
            2 => ValueSpace::Number,
            _ => ValueSpace::Reference,
        };
        let arity = if rng.gen_bool(0.5) { Arity::Single } else { Arity::Multiple };
        out.push(CategorySpec::new(name, applies, arity, space));
    }
    out
}

/// Inputs for one merge.
#[derive(Debug, Clone)]
pub struct FusionCase {
    pub a: SemRep,
    pub b: SemRep,
    pub corr: Correspondence,
}

/// Single-valued categories (per the default registry) used by fusion docs.
pub const FUSION_SINGLE: &[(&str, &[&str])] = &[("tense", &["present", "past"]), ("num", &["sing", "plur"])];
/// Categories the default registry does not know, hence multi-valued.
pub const FUSION_MULTI: &[(&str, &[&str])] = &[("topic", &["a", "b", "c"])];
const FUSION_GROUP: &[(&str, &[&str])] = &[("dialAct", &["Order", "Inform", "Question"]), ("topic", &["a", "b", "c"])];

/// `harmonious` documents agree on every single-valued category, share one
/// temporal extent, and include the first value of each group category, so
/// any correspondence between them is conflict-free.
pub fn fusion_doc(rng: &mut impl Rng, id: &str, max_nodes: usize, harmonious: bool) -> SemRep {
    let mut doc = SemRep::empty(Id::new_unchecked(id));
    let n = rng.gen_range(0..=max_nodes);
    for i in 0..n {
        let kind = if rng.gen_bool(0.5) { NodeKind::Event } else { NodeKind::Participant };
        let prefix = if kind == NodeKind::Event { "e" } else { "x" };
        let mut node = Node::new(Id::new_unchecked(format!("{prefix}{i}")), kind);
        for (cat, values) in FUSION_SINGLE {
            if rng.gen_bool(0.4) {
                let v = if harmonious { values[0] } else { pick(rng, values) };
                node.restrictions.push(Restriction::token(*cat, v));
            }
        }
        for (cat, values) in FUSION_MULTI {
            for v in values.iter() {
                if rng.gen_bool(0.25) {
                    node.restrictions.push(Restriction::token(*cat, *v));
                }
            }
        }
        if kind == NodeKind::Event && rng.gen_bool(0.3) {
            node.temporal_extent = Some(if harmonious {
                TemporalExtent { start: 0, end: 500 }
            } else {
                *[TemporalExtent { start: 0, end: 500 }, TemporalExtent { start: 100, end: 900 }].choose(rng).unwrap()
            });
        }
        if rng.gen_bool(0.2) {
            node.links.push(ExternalLink {
                kind: LinkKind::LowerLevel,
                target: format!("file:///corpus/{id}.dat"),
                fragment: Some(format!("n={i}")),
            });
        }
        if rng.gen_bool(0.2) {
            node.meta = meta(rng);
        }
        doc.nodes.push(node);
    }
    if n == 0 {
        return doc;
    }
    let ids: Vec<Id> = doc.nodes.iter().map(|n| n.id.clone()).collect();
    for i in 0..rng.gen_range(0..=n.min(8)) {
        let s = ids.choose(rng).cloned().unwrap();
        let t = ids.choose(rng).cloned().unwrap();
        doc.relations.push(Relation {
            id: Id::new_unchecked(format!("r{i}")),
            source: s,
            target: t,
            restrictions: vec![Restriction::token("role", pick(rng, &["agent", "theme", "goal"]))],
            extensions: Vec::new(),
        });
    }
    if rng.gen_bool(0.3) {
        let k = rng.gen_range(1..=n.min(3));
        let domain: Vec<Id> = ids.choose_multiple(rng, k).cloned().collect();
        doc.variables.push(LabelVariable { id: Id::new_unchecked("v0"), domain: domain.clone() });
        if let Some(t) = ids.choose(rng) {
            doc.relations.push(Relation {
                id: Id::new_unchecked("rv"),
                source: Id::new_unchecked("v0"),
                target: t.clone(),
                restrictions: vec![Restriction::token("role", "goal")],
                extensions: Vec::new(),
            });
        }
    }
    // At most one group per node.
    let k = rng.gen_range(0..=n.min(2));
    let owners: Vec<Id> = ids.choose_multiple(rng, k).cloned().collect();
    for (i, owner) in owners.into_iter().enumerate() {
        let (cat, values) = *FUSION_GROUP.choose(rng).unwrap();
        let mut chosen: Vec<&str> = values.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if harmonious && !chosen.contains(&values[0]) {
            chosen.insert(0, values[0]);
        }
        if chosen.is_empty() {
            chosen.push(pick(rng, values));
        }
        chosen.shuffle(rng);
        doc.alt_groups.push(AltGroup {
            id: Id::new_unchecked(format!("a{i}")),
            owner,
            alternatives: chosen
                .iter()
                .map(|v| Alternative::new(vec![Restriction::token(cat, *v)], cert(rng)))
                .collect(),
        });
    }
    if rng.gen_bool(0.3) {
        doc.meta = meta(rng);
    }
    doc
}

/// A random injective, kind-preserving correspondence from `a` to `b`.
pub fn random_correspondence(rng: &mut impl Rng, a: &SemRep, b: &SemRep) -> Correspondence {
    let mut right: Vec<&Node> = b.nodes.iter().collect();
    right.shuffle(rng);
    let mut pairs = Vec::new();
    for l in &a.nodes {
        if !rng.gen_bool(0.6) {
            continue;
        }
        if let Some(pos) = right.iter().position(|r| r.kind == l.kind) {
            let r = right.remove(pos);
            pairs.push((l.id.clone(), r.id.clone()));
        }
    }
    Correspondence::new(pairs).expect("injective by construction")
}

pub fn fusion_case(rng: &mut impl Rng, max_nodes: usize, harmonious: bool) -> FusionCase {
    let a = fusion_doc(rng, "left", max_nodes, harmonious);
    let b = fusion_doc(rng, "right", max_nodes, harmonious);
    let corr = random_correspondence(rng, &a, &b);
    FusionCase { a, b, corr }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrity::check_integrity;
    use crate::registry::{validate, ValidateOptions};

    #[test]
    fn generated_docs_pass_integrity() {
        let mut r = rng(7);
        for _ in 0..300 {
            let d = random_doc(&mut r, Limits::default());
            assert!(check_integrity(&d).is_empty(), "{:?}", check_integrity(&d));
            let reg = registry_for(&d);
            let report = validate(&d, &reg, ValidateOptions { strict: true });
            assert!(report.findings.is_empty(), "{:?}", report.findings);
            let h = r.gen_bool(0.5);
            let f = fusion_doc(&mut r, "f", 8, h);
            assert!(check_integrity(&f).is_empty());
        }
    }
}
