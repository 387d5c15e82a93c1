//! Canonical form and isomorphism (identity up to identifier renaming).

use std::collections::{BTreeMap, HashMap};

use crate::integrity::check_integrity;
use crate::model::{Element, Id, ModelError, Restriction, SemRep, Value};

pub const DEFAULT_NODE_CAP: usize = 50;

/// Deterministic interchange form. Restrictions (also inside alternative
/// bundles) and links are sorted; relations are sorted by source, target
/// and first role; alternative groups follow their owner's position. Nodes,
/// variables and the alternatives inside a group keep document order.
pub fn canonicalize(doc: &SemRep) -> Result<SemRep, ModelError> {
    let violations = check_integrity(doc);
    if !violations.is_empty() {
        return Err(ModelError::Integrity(violations));
    }
    let mut out = doc.clone();
    for node in &mut out.nodes {
        node.restrictions.sort();
        node.links.sort();
    }
    for rel in &mut out.relations {
        rel.restrictions.sort();
    }
    out.relations.sort_by(|x, y| {
        (&x.source, &x.target, x.role(), &x.restrictions, &x.id).cmp(&(
            &y.source,
            &y.target,
            y.role(),
            &y.restrictions,
            &y.id,
        ))
    });
    for group in &mut out.alt_groups {
        for alt in &mut group.alternatives {
            alt.restrictions.sort();
        }
    }
    let position: HashMap<&str, usize> = doc.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    out.alt_groups.sort_by_key(|g| position.get(g.owner.as_str()).copied().unwrap_or(usize::MAX));
    Ok(out)
}

pub fn isomorphic(a: &SemRep, b: &SemRep) -> Result<bool, ModelError> {
    isomorphic_with_cap(a, b, DEFAULT_NODE_CAP)
}

/// True iff some bijection between the node and variable identifiers of
/// `a` and `b` makes the documents equal, ignoring the document id, the
/// order of nodes, relations, groups and variables, and the names of
/// relations and groups. Alternatives inside a group must match in order.
/// Reference values that name a relation or a group compare literally.
pub fn isomorphic_with_cap(a: &SemRep, b: &SemRep, cap: usize) -> Result<bool, ModelError> {
    for doc in [a, b] {
        if doc.nodes.len() > cap {
            return Err(ModelError::SizeLimit { nodes: doc.nodes.len(), cap });
        }
    }
    let a = canonicalize(a)?;
    let b = canonicalize(b)?;
    if a.nodes.len() != b.nodes.len()
        || a.relations.len() != b.relations.len()
        || a.alt_groups.len() != b.alt_groups.len()
        || a.variables.len() != b.variables.len()
        || a.meta != b.meta
        || a.extensions != b.extensions
    {
        return Ok(false);
    }

    let va = Vertices::new(&a);
    let vb = Vertices::new(&b);
    let mut sig_a = va.signatures.clone();
    let mut sig_b = vb.signatures.clone();
    sig_a.sort();
    sig_b.sort();
    if sig_a != sig_b {
        return Ok(false);
    }

    let target = normal_form(&b);
    let mut search = Search {
        va: &va,
        vb: &vb,
        a: &a,
        target: &target,
        mapping: vec![None; va.ids.len()],
        used: vec![false; vb.ids.len()],
    };
    Ok(search.run(0))
}

/// Nodes followed by variables, with renaming-invariant signatures.
struct Vertices {
    ids: Vec<Id>,
    index: HashMap<Id, usize>,
    signatures: Vec<String>,
    /// Abstracted relation labels between ordered vertex pairs.
    edges: BTreeMap<(usize, usize), Vec<String>>,
}

impl Vertices {
    fn new(doc: &SemRep) -> Self {
        let ids: Vec<Id> =
            doc.nodes.iter().map(|n| n.id.clone()).chain(doc.variables.iter().map(|v| v.id.clone())).collect();
        let index: HashMap<Id, usize> = ids.iter().cloned().enumerate().map(|(i, id)| (id, i)).collect();

        let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
        let mut out_labels: Vec<Vec<String>> = vec![Vec::new(); ids.len()];
        let mut in_labels: Vec<Vec<String>> = vec![Vec::new(); ids.len()];
        for rel in &doc.relations {
            let label = format!("{:?}|{:?}", abstract_restrictions(doc, &rel.restrictions), rel.extensions);
            let s = index[&rel.source];
            let t = index[&rel.target];
            edges.entry((s, t)).or_default().push(label.clone());
            out_labels[s].push(label.clone());
            in_labels[t].push(format!("{}{}", if s == t { "loop:" } else { "" }, label));
        }
        for labels in edges.values_mut() {
            labels.sort();
        }

        let mut groups: Vec<Vec<String>> = vec![Vec::new(); ids.len()];
        for g in &doc.alt_groups {
            let alts: Vec<String> = g
                .alternatives
                .iter()
                .map(|alt| format!("{:?}@{}", abstract_restrictions(doc, &alt.restrictions), alt.cert.to_bits()))
                .collect();
            groups[index[&g.owner]].push(alts.join(";"));
        }

        let mut signatures = Vec::with_capacity(ids.len());
        for (i, node) in doc.nodes.iter().enumerate() {
            let mut outs = out_labels[i].clone();
            let mut ins = in_labels[i].clone();
            let mut gs = groups[i].clone();
            outs.sort();
            ins.sort();
            gs.sort();
            signatures.push(format!(
                "node|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}",
                node.kind,
                abstract_restrictions(doc, &node.restrictions),
                node.temporal_extent,
                node.links,
                node.meta,
                node.extensions,
                gs,
                outs,
                ins
            ));
        }
        for (j, var) in doc.variables.iter().enumerate() {
            let i = doc.nodes.len() + j;
            let mut outs = out_labels[i].clone();
            let mut ins = in_labels[i].clone();
            outs.sort();
            ins.sort();
            signatures.push(format!("var|{}|{:?}|{:?}", var.domain.len(), outs, ins));
        }
        Vertices { ids, index, signatures, edges }
    }

    fn edge(&self, s: usize, t: usize) -> &[String] {
        self.edges.get(&(s, t)).map(Vec::as_slice).unwrap_or(&[])
    }
}

fn abstract_restrictions(doc: &SemRep, restrictions: &[Restriction]) -> Vec<Restriction> {
    let mut out: Vec<Restriction> = restrictions
        .iter()
        .map(|r| match &r.value {
            Value::Ref(id) if matches!(doc.resolve(id.as_str()), Some(Element::Node(_) | Element::Variable(_))) => {
                Restriction::new(r.category.clone(), Value::reference("_"))
            }
            _ => r.clone(),
        })
        .collect();
    out.sort();
    out
}

/// Renaming-invariant rendering, after node and variable ids have been
/// mapped onto the other document's ids.
fn normal_form(doc: &SemRep) -> String {
    let mut nodes: Vec<String> = doc
        .nodes
        .iter()
        .map(|n| {
            let mut rs = n.restrictions.clone();
            rs.sort();
            format!(
                "{}|{:?}|{:?}|{:?}|{:?}|{:?}|{:?}",
                n.id, n.kind, rs, n.temporal_extent, n.links, n.meta, n.extensions
            )
        })
        .collect();
    nodes.sort();
    let mut relations: Vec<String> = doc
        .relations
        .iter()
        .map(|r| {
            let mut rs = r.restrictions.clone();
            rs.sort();
            format!("{}>{}|{:?}|{:?}", r.source, r.target, rs, r.extensions)
        })
        .collect();
    relations.sort();
    let mut groups: Vec<String> = doc
        .alt_groups
        .iter()
        .map(|g| {
            let alts: Vec<String> = g
                .alternatives
                .iter()
                .map(|a| {
                    let mut rs = a.restrictions.clone();
                    rs.sort();
                    format!("{:?}@{}", rs, a.cert.to_bits())
                })
                .collect();
            format!("{}|{}", g.owner, alts.join(";"))
        })
        .collect();
    groups.sort();
    let mut variables: Vec<String> = doc
        .variables
        .iter()
        .map(|v| {
            let mut dom: Vec<&Id> = v.domain.iter().collect();
            dom.sort();
            format!("{}|{:?}", v.id, dom)
        })
        .collect();
    variables.sort();
    format!("{nodes:?}\n{relations:?}\n{groups:?}\n{variables:?}")
}

struct Search<'s> {
    va: &'s Vertices,
    vb: &'s Vertices,
    a: &'s SemRep,
    target: &'s str,
    mapping: Vec<Option<usize>>,
    used: Vec<bool>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.va.ids.len() {
            return self.verify();
        }
        for cand in 0..self.vb.ids.len() {
            if self.used[cand] || self.va.signatures[depth] != self.vb.signatures[cand] {
                continue;
            }
            if !self.consistent(depth, cand) {
                continue;
            }
            self.mapping[depth] = Some(cand);
            self.used[cand] = true;
            if self.run(depth + 1) {
                return true;
            }
            self.mapping[depth] = None;
            self.used[cand] = false;
        }
        false
    }

    fn consistent(&self, v: usize, cand: usize) -> bool {
        if self.va.edge(v, v) != self.vb.edge(cand, cand) {
            return false;
        }
        (0..v).all(|u| {
            let fu = self.mapping[u].expect("mapped prefix");
            self.va.edge(u, v) == self.vb.edge(fu, cand) && self.va.edge(v, u) == self.vb.edge(cand, fu)
        })
    }

    fn verify(&self) -> bool {
        let renames: HashMap<&Id, Id> = self
            .va
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id, self.vb.ids[self.mapping[i].expect("complete mapping")].clone()))
            .collect();
        let mut renamed = self.a.clone();
        renamed.rename_ids(|id| if self.va.index.contains_key(id) { renames.get(id).cloned() } else { None });
        normal_form(&renamed) == self.target
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Alternative, NodeKind};

    fn sample() -> SemRep {
        let mut doc = SemRep::new("d").unwrap();
        doc.add_node(NodeKind::Event, Some("e1")).unwrap();
        doc.add_node(NodeKind::Participant, Some("x")).unwrap();
        doc.add_restriction("e1", "tense", Value::token("present")).unwrap();
        doc.add_restriction("e1", "evtCat", Value::token("utterance")).unwrap();
        doc.add_relation("x", "e1", vec![Restriction::token("role", "agent")]).unwrap();
        doc
    }

    #[test]
    fn restrictions_sorted_lexicographically() {
        let canon = canonicalize(&sample()).unwrap();
        let cats: Vec<_> = canon.nodes[0].restrictions.iter().map(|r| r.category.as_str()).collect();
        assert_eq!(cats, vec!["evtCat", "tense"]);
    }

    #[test]
    fn idempotent() {
        let once = canonicalize(&sample()).unwrap();
        assert_eq!(canonicalize(&once).unwrap(), once);
    }

    #[test]
    fn refuses_broken_documents() {
        let mut doc = sample();
        doc.nodes.remove(0);
        assert!(matches!(canonicalize(&doc), Err(ModelError::Integrity(v)) if v.len() == 1));
    }

    #[test]
    fn groups_follow_owner_order() {
        let mut doc = sample();
        doc.add_alt_group("x", vec![Alternative::new(vec![], 1.0)]).unwrap();
        doc.add_alt_group("e1", vec![Alternative::new(vec![], 1.0)]).unwrap();
        let canon = canonicalize(&doc).unwrap();
        assert_eq!(canon.alt_groups[0].owner, "e1");
        assert_eq!(canon.alt_groups[1].owner, "x");
    }

    #[test]
    fn renamed_copy_is_isomorphic() {
        let a = sample();
        let mut b = a.clone();
        b.rename_ids(|id| Some(Id::new_unchecked(format!("{id}_2"))));
        assert!(isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn missing_relation_breaks_isomorphism() {
        let a = sample();
        let mut b = a.clone();
        b.relations.clear();
        assert!(!isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn relation_direction_matters() {
        let a = sample();
        let mut b = a.clone();
        let r = &mut b.relations[0];
        std::mem::swap(&mut r.source, &mut r.target);
        assert!(!isomorphic(&a, &b).unwrap());
    }

    #[test]
    fn node_cap() {
        let mut doc = SemRep::new("d").unwrap();
        for _ in 0..3 {
            doc.add_node(NodeKind::Event, None).unwrap();
        }
        assert_eq!(isomorphic_with_cap(&doc, &doc, 2), Err(ModelError::SizeLimit { nodes: 3, cap: 2 }));
        assert!(isomorphic_with_cap(&doc, &doc, 3).unwrap());
    }

    #[test]
    fn symmetric_structure_needs_backtracking() {
        // Two indistinguishable participants pointing at two events that
        // differ only through a third node.
        let build = |order: [&str; 4]| {
            let mut doc = SemRep::new("d").unwrap();
            for id in order {
                let kind = if id.starts_with('e') { NodeKind::Event } else { NodeKind::Participant };
                doc.add_node(kind, Some(id)).unwrap();
            }
            doc.add_relation("p", "e", vec![]).unwrap();
            doc.add_relation("q", "f", vec![]).unwrap();
            doc.add_restriction("f", "tense", Value::token("past")).unwrap();
            doc
        };
        let a = build(["p", "q", "e", "f"]);
        let b = build(["q", "p", "f", "e"]);
        assert!(isomorphic(&a, &b).unwrap());
        let mut c = build(["p", "q", "e", "f"]);
        c.relations[1].source = "p".into();
        assert!(!isomorphic(&a, &c).unwrap());
    }
}
