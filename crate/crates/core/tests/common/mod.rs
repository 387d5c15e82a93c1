#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use semrep::denote::Assertion;
use semrep::fusion::{Correspondence, Merged};
use semrep::model::{NodeKind, SemRep, Value};
use semrep::underspec::enumerate_readings;
use semrep::xml::{parse, FormatProfile};
use semrep::{denote, AssertionSet, Id, Registry};

/// Fixtures live in the core crate; other crates reach them as a sibling.
pub fn fixture_path(name: &str) -> String {
    let here = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = if here.join("fixtures").is_dir() { here.join("fixtures") } else { here.join("../core/fixtures") };
    format!("{}/{name}", dir.display())
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn load(name: &str) -> SemRep {
    let out = parse(&fixture(name), &FormatProfile::default());
    assert!(!out.diagnostics.has_fatal(), "{name}: {:?}", out.diagnostics);
    out.doc.unwrap()
}

/// Every (score, denotation) reading of `doc`, computed straight from the
/// document: a recursive walk over groups, then variables, in order.
pub fn oracle_readings(doc: &SemRep) -> Vec<(f64, AssertionSet)> {
    let mut out = Vec::new();
    let mut choice = Vec::new();
    walk_groups(doc, 0, 1.0, &mut choice, &mut out);
    out
}

fn walk_groups(doc: &SemRep, g: usize, score: f64, choice: &mut Vec<usize>, out: &mut Vec<(f64, AssertionSet)>) {
    if g == doc.alt_groups.len() {
        let mut binding = Vec::new();
        walk_vars(doc, 0, score, choice, &mut binding, out);
        return;
    }
    for (i, alt) in doc.alt_groups[g].alternatives.iter().enumerate() {
        choice.push(i);
        walk_groups(doc, g + 1, score * alt.cert, choice, out);
        choice.pop();
    }
}

fn walk_vars(
    doc: &SemRep,
    v: usize,
    score: f64,
    choice: &[usize],
    binding: &mut Vec<Id>,
    out: &mut Vec<(f64, AssertionSet)>,
) {
    if v == doc.variables.len() {
        let bind: BTreeMap<&Id, &Id> = doc.variables.iter().map(|x| &x.id).zip(binding.iter()).collect();
        let resolve = |id: &Id| -> Id { bind.get(id).map(|n| (*n).clone()).unwrap_or_else(|| id.clone()) };
        // A binding is admissible when every endpoint names a node.
        let nodes: BTreeSet<&Id> = doc.nodes.iter().map(|n| &n.id).collect();
        if doc.relations.iter().any(|r| !nodes.contains(&resolve(&r.source)) || !nodes.contains(&resolve(&r.target))) {
            return;
        }
        out.push((score, denotation_of(doc, choice, &resolve)));
        return;
    }
    for member in &doc.variables[v].domain {
        binding.push(member.clone());
        walk_vars(doc, v + 1, score, choice, binding, out);
        binding.pop();
    }
}

fn denotation_of(doc: &SemRep, choice: &[usize], resolve: &dyn Fn(&Id) -> Id) -> AssertionSet {
    let value = |v: &Value| match v {
        Value::Ref(id) => Value::Ref(resolve(id)),
        other => other.clone(),
    };
    let mut set = AssertionSet::new();
    for node in &doc.nodes {
        set.insert(Assertion::Kind(node.id.clone(), node.kind));
        for r in &node.restrictions {
            set.insert(Assertion::Restr(node.id.clone(), r.category.clone(), value(&r.value)));
        }
        if let Some(t) = node.temporal_extent {
            set.insert(Assertion::Temporal(node.id.clone(), t.start, t.end));
        }
    }
    for (g, &i) in doc.alt_groups.iter().zip(choice) {
        for r in &g.alternatives[i].restrictions {
            set.insert(Assertion::Restr(g.owner.clone(), r.category.clone(), value(&r.value)));
        }
    }
    for rel in &doc.relations {
        let (s, t) = (resolve(&rel.source), resolve(&rel.target));
        if rel.restrictions.is_empty() {
            set.insert(Assertion::Rel(s.clone(), t.clone(), "rel".into(), Value::token("unspecified")));
        }
        for r in &rel.restrictions {
            set.insert(Assertion::Rel(s.clone(), t.clone(), r.category.clone(), value(&r.value)));
        }
    }
    set
}

/// Applies a node renaming to an assertion set.
pub fn rename_assertions(set: &AssertionSet, map: &BTreeMap<Id, Id>) -> AssertionSet {
    let m = |id: &Id| map.get(id).cloned().unwrap_or_else(|| id.clone());
    let v = |x: &Value| match x {
        Value::Ref(id) => Value::Ref(m(id)),
        o => o.clone(),
    };
    set.iter()
        .map(|a| match a {
            Assertion::Kind(n, k) => Assertion::Kind(m(n), *k),
            Assertion::Restr(n, c, x) => Assertion::Restr(m(n), c.clone(), v(x)),
            Assertion::Rel(s, t, c, x) => Assertion::Rel(m(s), m(t), c.clone(), v(x)),
            Assertion::Temporal(n, s, e) => Assertion::Temporal(m(n), *s, *e),
        })
        .collect()
}

/// Node ids mentioned by an assertion set, with their kinds.
fn nodes_of(set: &AssertionSet) -> Vec<(Id, NodeKind)> {
    set.iter()
        .filter_map(|a| match a {
            Assertion::Kind(n, k) => Some((n.clone(), *k)),
            _ => None,
        })
        .collect()
}

/// True when some kind-preserving bijection between the node ids maps `a`
/// onto `b`. Exhaustive over all permutations; meant for small sets.
pub fn equal_up_to_renaming(a: &AssertionSet, b: &AssertionSet) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let na = nodes_of(a);
    let nb = nodes_of(b);
    if na.len() != nb.len() {
        return false;
    }
    let mut used = vec![false; nb.len()];
    let mut map = BTreeMap::new();
    search(&na, &nb, 0, &mut used, &mut map, a, b)
}

fn search(
    na: &[(Id, NodeKind)],
    nb: &[(Id, NodeKind)],
    i: usize,
    used: &mut [bool],
    map: &mut BTreeMap<Id, Id>,
    a: &AssertionSet,
    b: &AssertionSet,
) -> bool {
    if i == na.len() {
        return rename_assertions(a, map) == *b;
    }
    for j in 0..nb.len() {
        if used[j] || nb[j].1 != na[i].1 {
            continue;
        }
        used[j] = true;
        map.insert(na[i].0.clone(), nb[j].0.clone());
        if search(na, nb, i + 1, used, map, a, b) {
            return true;
        }
        used[j] = false;
    }
    map.remove(&na[i].0);
    false
}

/// Reading sets compared as multisets of (score, denotation up to renaming).
pub fn same_reading_sets(x: &[(f64, AssertionSet)], y: &[(f64, AssertionSet)], tol: f64) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut used = vec![false; y.len()];
    'outer: for (sx, dx) in x {
        for (j, (sy, dy)) in y.iter().enumerate() {
            if !used[j] && (sx - sy).abs() <= tol && equal_up_to_renaming(dx, dy) {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Brute-force conflict finder for merging `b` into `a` under the given
/// pairs: single-valued clashes, temporal clashes, and empty intersections
/// of same-category-set groups. Returns (left node, rule) entries.
pub fn brute_conflicts(a: &SemRep, b: &SemRep, pairs: &[(Id, Id)], reg: &Registry) -> Vec<(Id, &'static str)> {
    let mut out = Vec::new();
    for (l, r) in pairs {
        let nl = a.node(l.as_str()).unwrap();
        let nr = b.node(r.as_str()).unwrap();
        let cats: BTreeSet<&str> = nl.restrictions.iter().map(|x| x.category.as_str()).collect();
        for cat in cats {
            if !reg.is_single_valued(cat) {
                continue;
            }
            let clash = nl
                .restrictions
                .iter()
                .filter(|x| x.category == cat)
                .any(|x| nr.restrictions.iter().filter(|y| y.category == cat).any(|y| y.value != x.value));
            if clash {
                out.push((l.clone(), "single-valued"));
            }
        }
        if let (Some(x), Some(y)) = (nl.temporal_extent, nr.temporal_extent) {
            if x != y {
                out.push((l.clone(), "temporal-extent"));
            }
        }
        let cat_set = |g: &semrep::AltGroup| -> BTreeSet<String> {
            g.alternatives.iter().flat_map(|a| a.restrictions.iter().map(|r| r.category.clone())).collect()
        };
        let mut rights: Vec<&semrep::AltGroup> = b.alt_groups.iter().filter(|g| g.owner == *r).collect();
        for gl in a.alt_groups.iter().filter(|g| g.owner == *l) {
            let Some(pos) = rights.iter().position(|gr| cat_set(gr) == cat_set(gl)) else { continue };
            let gr = rights.remove(pos);
            let sorted = |a: &semrep::Alternative| {
                let mut v = a.restrictions.clone();
                v.sort();
                v.dedup();
                v
            };
            let common = gl.alternatives.iter().any(|x| gr.alternatives.iter().any(|y| sorted(x) == sorted(y)));
            if !common {
                out.push((l.clone(), "empty-intersection"));
            }
        }
    }
    out.sort();
    out
}

/// Readings as denotation -> sorted scores.
pub fn reading_map(doc: &SemRep) -> BTreeMap<AssertionSet, Vec<f64>> {
    let set = enumerate_readings(doc, 1_000_000).unwrap();
    assert!(set.exhaustive);
    let mut out: BTreeMap<AssertionSet, Vec<f64>> = BTreeMap::new();
    for r in set.readings {
        out.entry(denote(&r.ground)).or_default().push(r.score());
    }
    for v in out.values_mut() {
        v.sort_by(f64::total_cmp);
    }
    out
}

pub fn same_maps(x: &BTreeMap<AssertionSet, Vec<f64>>, y: &BTreeMap<AssertionSet, Vec<f64>>) -> bool {
    x.len() == y.len()
        && x.iter().all(|(d, s)| {
            y.get(d).is_some_and(|t| s.len() == t.len() && s.iter().zip(t).all(|(a, b)| (a - b).abs() <= 1e-12))
        })
}

/// Certainties rounded so that products taken in different orders compare
/// equal.
pub fn rounded(doc: &SemRep) -> SemRep {
    let mut d = doc.clone();
    for g in &mut d.alt_groups {
        for a in &mut g.alternatives {
            a.cert = (a.cert * 1e9).round() / 1e9;
        }
    }
    d
}

/// Maps ids of merge(a, b, c) onto ids of merge(b, a, c^-1).
pub fn commuted_ids(a: &SemRep, b: &SemRep, c: &Correspondence, ab: &Merged, ba: &Merged) -> BTreeMap<Id, Id> {
    let mut map = BTreeMap::new();
    for id in a.all_ids() {
        let target = match c.pairs().iter().find(|(l, _)| l == id) {
            Some((_, q)) => q.clone(),
            None => ba.right_id(id.as_str()),
        };
        map.insert(id.clone(), target);
    }
    for id in b.all_ids() {
        if !c.pairs().iter().any(|(_, q)| q == id) {
            map.insert(ab.right_id(id.as_str()), id.clone());
        }
    }
    map
}
