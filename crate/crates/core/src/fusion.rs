//! Merging partial representations: node unification, alternative
//! reconciliation, and incremental sessions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::integrity::{check_integrity, Violation};
use crate::model::{AltGroup, Element, Environment, Id, Interactional, MetaBlock, NodeKind, Processing, SemRep, Value};
use crate::registry::Registry;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("identifier `{0}` does not resolve to a node")]
    UnknownId(String),
    #[error("cannot unify {a_kind} `{a}` with {b_kind} `{b}`")]
    KindMismatch { a: String, a_kind: NodeKind, b: String, b_kind: NodeKind },
    #[error("cannot unify `{0}` with itself")]
    SameNode(String),
    #[error("`{0}` appears twice on one side of the correspondence")]
    NotInjective(String),
    #[error("correspondence line {line}: {message}")]
    CorrespondenceSyntax { line: usize, message: String },
    #[error("document `{doc}` has {} integrity violation(s)", violations.len())]
    Integrity { doc: String, violations: Vec<Violation> },
}

/// Cross-document co-reference: (left node, right node) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Correspondence {
    pairs: Vec<(Id, Id)>,
}

impl Correspondence {
    pub fn new(pairs: Vec<(Id, Id)>) -> Result<Self, FusionError> {
        let mut left = HashSet::new();
        let mut right = HashSet::new();
        for (l, r) in &pairs {
            if !left.insert(l.clone()) {
                return Err(FusionError::NotInjective(l.to_string()));
            }
            if !right.insert(r.clone()) {
                return Err(FusionError::NotInjective(r.to_string()));
            }
        }
        Ok(Correspondence { pairs })
    }

    pub fn empty() -> Self {
        Correspondence::default()
    }

    /// One pair per line, whitespace separated. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, FusionError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(FusionError::CorrespondenceSyntax {
                    line: i + 1,
                    message: format!("expected two identifiers, found {}", parts.len()),
                });
            }
            pairs.push((Id::new_unchecked(parts[0]), Id::new_unchecked(parts[1])));
        }
        Correspondence::new(pairs)
    }

    pub fn pairs(&self) -> &[(Id, Id)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Correspondence { pairs: self.pairs.iter().map(|(l, r)| (r.clone(), l.clone())).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConflictRule {
    SingleValued,
    TemporalExtent,
    EmptyIntersection,
}

impl ConflictRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ConflictRule::SingleValued => "single-valued",
            ConflictRule::TemporalExtent => "temporal-extent",
            ConflictRule::EmptyIntersection => "empty-intersection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conflict {
    pub owner: Id,
    pub category: String,
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub rule: ConflictRule,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "conflict on {} {}: [{}] vs [{}] ({})",
            self.owner,
            self.category,
            self.left.join(", "),
            self.right.join(", "),
            self.rule.as_str()
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConflictReport {
    pub entries: Vec<Conflict>,
}

impl ConflictReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|c| c.category.as_str())
    }
}

impl fmt::Display for ConflictReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.entries {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Result type for operations that may end in a conflict rather than an error.
pub type Fused<T> = Result<Result<T, ConflictReport>, FusionError>;

fn require_integrity(doc: &SemRep) -> Result<(), FusionError> {
    let violations = check_integrity(doc);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(FusionError::Integrity { doc: doc.id.to_string(), violations })
    }
}

fn node_index(doc: &SemRep, id: &str) -> Result<usize, FusionError> {
    match doc.resolve(id) {
        Some(Element::Node(i)) => Ok(i),
        _ => Err(FusionError::UnknownId(id.to_owned())),
    }
}

/// Conflicts that would arise from collapsing node `b` into node `a`.
fn unify_conflicts(doc: &SemRep, a: usize, b: usize, reg: &Registry, out: &mut Vec<Conflict>) {
    let (na, nb) = (&doc.nodes[a], &doc.nodes[b]);
    let categories: BTreeSet<&str> = na.restrictions.iter().map(|r| r.category.as_str()).collect();
    for cat in categories {
        if !reg.is_single_valued(cat) {
            continue;
        }
        let left: BTreeSet<&Value> = na.values_of(cat).collect();
        let right: BTreeSet<&Value> = nb.values_of(cat).collect();
        if right.is_empty() || left.union(&right).count() < 2 {
            continue;
        }
        out.push(Conflict {
            owner: na.id.clone(),
            category: cat.to_owned(),
            left: left.iter().map(|v| v.lexical()).collect(),
            right: right.iter().map(|v| v.lexical()).collect(),
            rule: ConflictRule::SingleValued,
        });
    }
    if let (Some(x), Some(y)) = (na.temporal_extent, nb.temporal_extent) {
        if x != y {
            out.push(Conflict {
                owner: na.id.clone(),
                category: "temporal_extent".into(),
                left: vec![format!("{}-{}", x.start, x.end)],
                right: vec![format!("{}-{}", y.start, y.end)],
                rule: ConflictRule::TemporalExtent,
            });
        }
    }
}

fn merge_meta(left: &mut MetaBlock, right: &MetaBlock, owner: &str, warnings: &mut Vec<String>) {
    fn field<T: Clone + PartialEq + fmt::Debug>(
        l: &mut Option<T>,
        r: &Option<T>,
        name: &str,
        owner: &str,
        warnings: &mut Vec<String>,
    ) {
        match (l.as_ref(), r) {
            (None, Some(v)) => *l = Some(v.clone()),
            (Some(a), Some(b)) if a != b => {
                warnings.push(format!("{owner}: meta {name} differs ({a:?} kept, {b:?} dropped)"))
            }
            _ => {}
        }
    }
    if let Some(re) = &right.environment {
        let le = left.environment.get_or_insert_with(Environment::default);
        field(&mut le.timestamp, &re.timestamp, "timestamp", owner, warnings);
        field(&mut le.spatial, &re.spatial, "spatial", owner, warnings);
    }
    if let Some(rp) = &right.processing {
        let lp = left.processing.get_or_insert_with(Processing::default);
        field(&mut lp.producer, &rp.producer, "producer", owner, warnings);
        field(&mut lp.confidence, &rp.confidence, "confidence", owner, warnings);
    }
    if let Some(ri) = &right.interactional {
        let li = left.interactional.get_or_insert_with(Interactional::default);
        field(&mut li.speaker, &ri.speaker, "speaker", owner, warnings);
        if li.addressees.is_empty() {
            li.addressees = ri.addressees.clone();
        } else if !ri.addressees.is_empty() && li.addressees != ri.addressees {
            warnings.push(format!(
                "{owner}: meta addressees differ ({:?} kept, {:?} dropped)",
                li.addressees, ri.addressees
            ));
        }
    }
}

fn extend_unique<T: PartialEq + Clone>(into: &mut Vec<T>, from: &[T]) {
    for x in from {
        if !into.contains(x) {
            into.push(x.clone());
        }
    }
}

/// Collapses `b` into `a` without checking for conflicts.
fn collapse(doc: &mut SemRep, a: usize, b: usize, warnings: &mut Vec<String>) {
    let nb = doc.nodes[b].clone();
    let a_id = doc.nodes[a].id.clone();
    {
        let na = &mut doc.nodes[a];
        extend_unique(&mut na.restrictions, &nb.restrictions);
        if na.temporal_extent.is_none() {
            na.temporal_extent = nb.temporal_extent;
        }
        extend_unique(&mut na.links, &nb.links);
        extend_unique(&mut na.extensions, &nb.extensions);
        let owner = na.id.to_string();
        merge_meta(&mut na.meta, &nb.meta, &owner, warnings);
    }
    doc.nodes.remove(b);
    doc.rename_ids(|id| (*id == nb.id).then(|| a_id.clone()));
    for node in &mut doc.nodes {
        dedup_in_place(&mut node.restrictions);
    }
    for var in &mut doc.variables {
        dedup_in_place(&mut var.domain);
    }
}

fn dedup_in_place<T: PartialEq>(v: &mut Vec<T>) {
    let mut i = 0;
    while i < v.len() {
        if v[..i].contains(&v[i]) {
            v.remove(i);
        } else {
            i += 1;
        }
    }
}

/// Collapses node `b` into node `a`: restrictions are unioned, every
/// reference to `b` now names `a`, and `b`'s groups move to `a`.
pub fn unify_nodes(doc: &SemRep, a: &str, b: &str, reg: &Registry) -> Fused<SemRep> {
    let ia = node_index(doc, a)?;
    let ib = node_index(doc, b)?;
    if ia == ib {
        return Err(FusionError::SameNode(a.to_owned()));
    }
    let (ka, kb) = (doc.nodes[ia].kind, doc.nodes[ib].kind);
    if ka != kb {
        return Err(FusionError::KindMismatch { a: a.to_owned(), a_kind: ka, b: b.to_owned(), b_kind: kb });
    }
    let mut conflicts = Vec::new();
    unify_conflicts(doc, ia, ib, reg, &mut conflicts);
    if !conflicts.is_empty() {
        return Ok(Err(ConflictReport { entries: conflicts }));
    }
    let mut out = doc.clone();
    collapse(&mut out, ia, ib, &mut Vec::new());
    Ok(Ok(out))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Merged {
    pub doc: SemRep,
    /// Final identifier of every right-hand element whose id changed.
    pub renamed: BTreeMap<Id, Id>,
    pub warnings: Vec<String>,
}

impl Merged {
    /// Where a right-hand identifier ended up in the merged document.
    pub fn right_id(&self, id: &str) -> Id {
        self.renamed.get(id).cloned().unwrap_or_else(|| Id::new_unchecked(id))
    }
}

pub fn merge(a: &SemRep, b: &SemRep, c: &Correspondence, reg: &Registry) -> Fused<Merged> {
    merge_with_step(a, b, c, reg, 1)
}

/// Like [`merge`], with `step` used in the `_m<step>` renaming suffix.
pub fn merge_with_step(a: &SemRep, b: &SemRep, c: &Correspondence, reg: &Registry, step: u64) -> Fused<Merged> {
    require_integrity(a)?;
    require_integrity(b)?;
    for (l, r) in c.pairs() {
        let il = node_index(a, l.as_str())?;
        let ir = node_index(b, r.as_str())?;
        let (kl, kr) = (a.nodes[il].kind, b.nodes[ir].kind);
        if kl != kr {
            return Err(FusionError::KindMismatch { a: l.to_string(), a_kind: kl, b: r.to_string(), b_kind: kr });
        }
    }

    // Rename right-hand ids that collide with the left document.
    let taken: HashSet<Id> = a.all_ids().chain(b.all_ids()).cloned().collect();
    let mut used = taken.clone();
    let left_ids: HashSet<&Id> = a.all_ids().collect();
    let mut renamed = BTreeMap::new();
    for id in b.all_ids() {
        if !left_ids.contains(id) {
            continue;
        }
        let base = format!("{id}_m{step}");
        let mut fresh = Id::new_unchecked(base.clone());
        let mut k = 2;
        while used.contains(&fresh) {
            fresh = Id::new_unchecked(format!("{base}_{k}"));
            k += 1;
        }
        used.insert(fresh.clone());
        renamed.insert(id.clone(), fresh);
    }
    let mut right = b.clone();
    right.rename_ids(|id| renamed.get(id).cloned());

    let mut warnings = Vec::new();
    let mut doc = a.clone();
    merge_meta(&mut doc.meta, &right.meta, "document", &mut warnings);
    extend_unique(&mut doc.extensions, &right.extensions);
    let left_groups: HashSet<Id> = doc.alt_groups.iter().map(|g| g.id.clone()).collect();
    doc.nodes.extend(right.nodes);
    doc.relations.extend(right.relations);
    doc.alt_groups.extend(right.alt_groups);
    doc.variables.extend(right.variables);

    let pairs: Vec<(Id, Id)> =
        c.pairs().iter().map(|(l, r)| (l.clone(), renamed.get(r).cloned().unwrap_or_else(|| r.clone()))).collect();

    let mut conflicts = Vec::new();
    for (l, r) in &pairs {
        let il = node_index(&doc, l.as_str())?;
        let ir = node_index(&doc, r.as_str())?;
        unify_conflicts(&doc, il, ir, reg, &mut conflicts);
    }
    // Groups are reconciled per pair before collapsing, while ownership
    // still tells the two sides apart.
    let mut drop = HashSet::new();
    for (l, r) in &pairs {
        reconcile(&mut doc, l, r, &left_groups, &mut drop, &mut conflicts);
    }
    if !conflicts.is_empty() {
        return Ok(Err(ConflictReport { entries: conflicts }));
    }
    doc.alt_groups.retain(|g| !drop.contains(&g.id));
    for (l, r) in &pairs {
        let il = node_index(&doc, l.as_str())?;
        let ir = node_index(&doc, r.as_str())?;
        collapse(&mut doc, il, ir, &mut warnings);
    }
    debug_assert!(check_integrity(&doc).is_empty(), "{:?}", check_integrity(&doc));

    for (l, r) in c.pairs() {
        renamed.insert(r.clone(), l.clone());
    }
    Ok(Ok(Merged { doc, renamed, warnings }))
}

/// Intersects the left groups owned by `l` with right groups owned by `r`
/// over the same category set. Matched right groups are marked for removal.
fn reconcile(
    doc: &mut SemRep,
    l: &Id,
    r: &Id,
    left_groups: &HashSet<Id>,
    drop: &mut HashSet<Id>,
    conflicts: &mut Vec<Conflict>,
) {
    let owned = |g: &AltGroup, owner: &Id, left: bool| &g.owner == owner && left_groups.contains(&g.id) == left;
    let lefts: Vec<usize> = (0..doc.alt_groups.len()).filter(|&i| owned(&doc.alt_groups[i], l, true)).collect();
    let mut rights: Vec<usize> = (0..doc.alt_groups.len()).filter(|&i| owned(&doc.alt_groups[i], r, false)).collect();
    for li in lefts {
        let cats = doc.alt_groups[li].categories();
        let Some(pos) = rights.iter().position(|&ri| doc.alt_groups[ri].categories() == cats) else {
            continue;
        };
        let ri = rights.remove(pos);
        let gr = doc.alt_groups[ri].clone();
        let gl = &doc.alt_groups[li];
        let kept: Vec<_> = gl
            .alternatives
            .iter()
            .filter_map(|x| {
                let set = x.bundle_set();
                gr.alternatives.iter().find(|y| y.bundle_set() == set).map(|y| {
                    let mut keep = x.clone();
                    keep.cert = x.cert * y.cert;
                    keep
                })
            })
            .collect();
        if kept.is_empty() {
            let show = |g: &AltGroup| {
                g.alternatives
                    .iter()
                    .map(|x| {
                        let mut vals: Vec<String> =
                            x.restrictions.iter().map(|r| format!("{}={}", r.category, r.value.lexical())).collect();
                        vals.sort();
                        vals.join("+")
                    })
                    .collect()
            };
            conflicts.push(Conflict {
                owner: l.clone(),
                category: cats.into_iter().collect::<Vec<_>>().join("+"),
                left: show(gl),
                right: show(&gr),
                rule: ConflictRule::EmptyIntersection,
            });
            continue;
        }
        doc.alt_groups[li].alternatives = kept;
        drop.insert(gr.id);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryEntry {
    pub doc_id: Id,
    pub timestamp: u64,
}

/// Incremental fusion state owned by a single writer.
#[derive(Debug, Clone, PartialEq)]
pub struct FusionSession {
    pub current: SemRep,
    pub history: Vec<HistoryEntry>,
    pub step: u64,
}

impl FusionSession {
    pub fn new(id: Id) -> Self {
        FusionSession { current: SemRep::empty(id), history: Vec::new(), step: 0 }
    }

    pub fn resume(current: SemRep, history: Vec<HistoryEntry>) -> Result<Self, FusionError> {
        require_integrity(&current)?;
        let step = history.len() as u64;
        Ok(FusionSession { current, history, step })
    }

    /// Merges `d` into the session. On conflict the session is untouched.
    /// `now` is recorded when `d` carries no environment timestamp.
    pub fn assimilate(&mut self, d: &SemRep, c: &Correspondence, reg: &Registry, now: u64) -> Fused<Vec<String>> {
        let merged = match merge_with_step(&self.current, d, c, reg, self.step + 1)? {
            Ok(m) => m,
            Err(report) => return Ok(Err(report)),
        };
        let timestamp = d.meta.environment.as_ref().and_then(|e| e.timestamp).unwrap_or(now);
        self.current = merged.doc;
        self.history.push(HistoryEntry { doc_id: d.id.clone(), timestamp });
        self.step += 1;
        Ok(Ok(merged.warnings))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, Restriction, TemporalExtent};

    fn reg() -> Registry {
        Registry::default_registry()
    }

    fn doc_with_groups(id: &str, alts: &[(&str, f64)]) -> SemRep {
        let mut d = SemRep::new(id).unwrap();
        d.add_node(NodeKind::Event, Some("e0")).unwrap();
        let alts = alts.iter().map(|(v, c)| Alternative::new(vec![Restriction::token("dialAct", *v)], *c)).collect();
        d.add_alt_group("e0", alts).unwrap();
        d
    }

    #[test]
    fn unify_rewrites_references() {
        let mut d = SemRep::new("d").unwrap();
        d.add_node(NodeKind::Participant, Some("x")).unwrap();
        d.add_node(NodeKind::Participant, Some("y")).unwrap();
        d.add_node(NodeKind::Event, Some("e")).unwrap();
        d.add_relation("y", "e", vec![Restriction::token("role", "agent")]).unwrap();
        d.add_variable("v", &["x", "y"]).unwrap();
        let out = unify_nodes(&d, "x", "y", &reg()).unwrap().unwrap();
        assert_eq!(out.nodes.len(), 2);
        assert_eq!(out.relations[0].source, "x");
        assert_eq!(out.variables[0].domain, vec![Id::from("x")]);
        assert!(check_integrity(&out).is_empty());
    }

    #[test]
    fn unify_single_valued_clash() {
        let mut d = SemRep::new("d").unwrap();
        d.add_node(NodeKind::Event, Some("a")).unwrap();
        d.add_node(NodeKind::Event, Some("b")).unwrap();
        d.add_restriction("a", "tense", Value::token("present")).unwrap();
        d.add_restriction("b", "tense", Value::token("past")).unwrap();
        let report = unify_nodes(&d, "a", "b", &reg()).unwrap().unwrap_err();
        assert_eq!(report.categories().collect::<Vec<_>>(), vec!["tense"]);
    }

    #[test]
    fn unify_errors() {
        let mut d = SemRep::new("d").unwrap();
        d.add_node(NodeKind::Event, Some("a")).unwrap();
        d.add_node(NodeKind::Participant, Some("b")).unwrap();
        assert!(matches!(unify_nodes(&d, "a", "b", &reg()), Err(FusionError::KindMismatch { .. })));
        assert_eq!(unify_nodes(&d, "a", "q", &reg()), Err(FusionError::UnknownId("q".into())));
        assert_eq!(unify_nodes(&d, "a", "a", &reg()), Err(FusionError::SameNode("a".into())));
    }

    #[test]
    fn temporal_clash() {
        let mut d = SemRep::new("d").unwrap();
        d.add_node(NodeKind::Event, Some("a")).unwrap();
        d.add_node(NodeKind::Event, Some("b")).unwrap();
        d.nodes[0].temporal_extent = Some(TemporalExtent { start: 0, end: 5 });
        d.nodes[1].temporal_extent = Some(TemporalExtent { start: 0, end: 6 });
        let report = unify_nodes(&d, "a", "b", &reg()).unwrap().unwrap_err();
        assert_eq!(report.entries[0].rule, ConflictRule::TemporalExtent);
    }

    #[test]
    fn reconcile_intersection_with_product() {
        let speech = doc_with_groups("s", &[("Order", 0.8), ("Inform", 0.3)]);
        let prosody = doc_with_groups("p", &[("Order", 0.5), ("Question", 0.5)]);
        let c = Correspondence::new(vec![("e0".into(), "e0".into())]).unwrap();
        let m = merge(&speech, &prosody, &c, &reg()).unwrap().unwrap();
        assert_eq!(m.doc.nodes.len(), 1);
        assert_eq!(m.doc.alt_groups.len(), 1);
        let g = &m.doc.alt_groups[0];
        assert_eq!(g.alternatives.len(), 1);
        assert_eq!(g.alternatives[0].cert, 0.8 * 0.5);
        assert_eq!(m.right_id("e0"), "e0");

        let contra = doc_with_groups("q", &[("Question", 1.0)]);
        let report = merge(&speech, &contra, &c, &reg()).unwrap().unwrap_err();
        assert_eq!(report.entries[0].rule, ConflictRule::EmptyIntersection);
    }

    #[test]
    fn collisions_get_step_suffix() {
        let a = doc_with_groups("a", &[("Order", 1.0)]);
        let b = doc_with_groups("b", &[("Inform", 1.0)]);
        let m = merge_with_step(&a, &b, &Correspondence::empty(), &reg(), 3).unwrap().unwrap();
        assert_eq!(m.doc.nodes[1].id, "e0_m3");
        assert_eq!(m.doc.alt_groups[1].id, "a1_m3");
        assert_eq!(m.doc.alt_groups[1].owner, "e0_m3");
        assert!(check_integrity(&m.doc).is_empty());
    }

    #[test]
    fn correspondence_checks() {
        assert!(Correspondence::new(vec![("a".into(), "b".into()), ("a".into(), "c".into())]).is_err());
        let c = Correspondence::parse("# pairs\na b\n\nc d # trailing\n").unwrap();
        assert_eq!(c.pairs().len(), 2);
        assert_eq!(c.inverse().pairs()[0], (Id::from("b"), Id::from("a")));
        assert!(Correspondence::parse("a b c").is_err());
    }

    #[test]
    fn meta_left_wins_with_warning() {
        let mut a = SemRep::new("a").unwrap();
        let mut b = SemRep::new("b").unwrap();
        a.meta.processing = Some(Processing { producer: Some("asr".into()), confidence: None });
        b.meta.processing = Some(Processing { producer: Some("gesture".into()), confidence: Some(0.5) });
        let m = merge(&a, &b, &Correspondence::empty(), &reg()).unwrap().unwrap();
        let p = m.doc.meta.processing.unwrap();
        assert_eq!(p.producer.as_deref(), Some("asr"));
        assert_eq!(p.confidence, Some(0.5));
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn session_is_atomic() {
        let mut s = FusionSession::new("s".into());
        let speech = doc_with_groups("speech", &[("Order", 0.8), ("Inform", 0.3)]);
        s.assimilate(&speech, &Correspondence::empty(), &reg(), 42).unwrap().unwrap();
        assert_eq!(s.history, vec![HistoryEntry { doc_id: "speech".into(), timestamp: 42 }]);
        let before = s.clone();
        let contra = doc_with_groups("contra", &[("Question", 1.0)]);
        let c = Correspondence::new(vec![("e0".into(), "e0".into())]).unwrap();
        assert!(s.assimilate(&contra, &c, &reg(), 43).unwrap().is_err());
        assert_eq!(s, before);
    }
}
