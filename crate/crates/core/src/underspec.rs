//! Readings of an underspecified document.
//!
//! A reading picks one alternative from every group (in document order)
//! and one domain member for every label variable. Its score is the product
//! of the chosen certainties. Readings are ordered lexicographically by
//! those choices, earlier groups before later ones, groups before variables.

use thiserror::Error;

use crate::integrity::{check_integrity, Violation};
use crate::model::{Element, GroundRep, Id, SemRep, Value};

pub const DEFAULT_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnderspecError {
    #[error("document has {} integrity violation(s)", .0.len())]
    Integrity(Vec<Violation>),
    #[error("{count} readings exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },
    #[error("reading cap must be at least 1")]
    InvalidCap,
    #[error("reading count overflows")]
    Overflow,
    #[error("identifier `{0}` does not resolve")]
    UnknownId(String),
    #[error("group `{group}` has {len} alternative(s); index {index} is out of range")]
    IndexOutOfRange { group: String, index: usize, len: usize },
    #[error("`{node}` is not in the domain of `{variable}`")]
    OutsideDomain { variable: String, node: String },
}

/// Which alternative each group takes and which node each variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub alternatives: Vec<(Id, usize)>,
    pub bindings: Vec<(Id, Id)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reading {
    pub ground: GroundRep,
    pub selection: Selection,
}

impl Reading {
    pub fn score(&self) -> f64 {
        self.ground.score
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReadingSet {
    pub source: Id,
    pub readings: Vec<Reading>,
    /// False when the cap cut the enumeration short.
    pub exhaustive: bool,
}

fn ensure_integrity(doc: &SemRep) -> Result<(), UnderspecError> {
    let v = check_integrity(doc);
    if v.is_empty() {
        Ok(())
    } else {
        Err(UnderspecError::Integrity(v))
    }
}

fn radices(doc: &SemRep) -> Vec<usize> {
    doc.alt_groups.iter().map(|g| g.alternatives.len()).chain(doc.variables.iter().map(|v| v.domain.len())).collect()
}

fn count_of(radices: &[usize]) -> Result<u128, UnderspecError> {
    radices.iter().try_fold(1u128, |acc, &r| acc.checked_mul(r as u128)).ok_or(UnderspecError::Overflow)
}

/// Number of readings, without materializing any.
pub fn reading_count(doc: &SemRep) -> Result<u128, UnderspecError> {
    ensure_integrity(doc)?;
    count_of(&radices(doc))
}

/// Mixed-radix counter over choice tuples, most significant digit first.
struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
    done: bool,
}

impl Odometer {
    fn new(radices: Vec<usize>) -> Self {
        let done = radices.contains(&0);
        let digits = vec![0; radices.len()];
        Odometer { radices, digits, done }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.digits.clone();
        let mut i = self.radices.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

fn score_of(doc: &SemRep, digits: &[usize]) -> f64 {
    doc.alt_groups.iter().zip(digits).fold(1.0, |acc, (g, &i)| acc * g.alternatives[i].cert)
}

/// Builds the ground reading for one choice tuple.
fn materialize(doc: &SemRep, digits: &[usize]) -> Reading {
    let groups = doc.alt_groups.len();
    let mut rep = doc.clone();
    rep.alt_groups.clear();
    rep.variables.clear();

    let mut alternatives = Vec::with_capacity(groups);
    for (g, &i) in doc.alt_groups.iter().zip(digits) {
        let owner = rep.node_mut(g.owner.as_str()).expect("integrity: owner resolves");
        owner.restrictions.extend(g.alternatives[i].restrictions.iter().cloned());
        alternatives.push((g.id.clone(), i));
    }
    let bindings: Vec<(Id, Id)> =
        doc.variables.iter().zip(&digits[groups..]).map(|(v, &i)| (v.id.clone(), v.domain[i].clone())).collect();
    substitute(&mut rep, &bindings);

    Reading { ground: GroundRep { rep, score: score_of(doc, digits) }, selection: Selection { alternatives, bindings } }
}

/// Replaces variable endpoints and reference values by the bound nodes.
fn substitute(rep: &mut SemRep, bindings: &[(Id, Id)]) {
    let lookup = |id: &Id| bindings.iter().find(|(v, _)| v == id).map(|(_, n)| n.clone());
    for rel in &mut rep.relations {
        if let Some(n) = lookup(&rel.source) {
            rel.source = n;
        }
        if let Some(n) = lookup(&rel.target) {
            rel.target = n;
        }
    }
    let restrictions = rep
        .nodes
        .iter_mut()
        .flat_map(|n| n.restrictions.iter_mut())
        .chain(rep.relations.iter_mut().flat_map(|r| r.restrictions.iter_mut()))
        .chain(
            rep.alt_groups.iter_mut().flat_map(|g| g.alternatives.iter_mut()).flat_map(|a| a.restrictions.iter_mut()),
        );
    for r in restrictions {
        if let Value::Ref(id) = &r.value {
            if let Some(n) = lookup(id) {
                r.value = Value::Ref(n);
            }
        }
    }
}

pub fn enumerate_readings(doc: &SemRep, cap: usize) -> Result<ReadingSet, UnderspecError> {
    if cap == 0 {
        return Err(UnderspecError::InvalidCap);
    }
    ensure_integrity(doc)?;
    let radices = radices(doc);
    let exhaustive = count_of(&radices).is_ok_and(|n| n <= cap as u128);
    let readings = Odometer::new(radices).take(cap).map(|digits| materialize(doc, &digits)).collect();
    Ok(ReadingSet { source: doc.id.clone(), readings, exhaustive })
}

/// Highest-scoring reading; ties go to the earliest in enumeration order.
pub fn best_reading(doc: &SemRep, cap: usize) -> Result<Reading, UnderspecError> {
    if cap == 0 {
        return Err(UnderspecError::InvalidCap);
    }
    ensure_integrity(doc)?;
    let radices = radices(doc);
    let count = count_of(&radices)?;
    if count > cap as u128 {
        return Err(UnderspecError::CapExceeded { count, cap });
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    for digits in Odometer::new(radices) {
        let score = score_of(doc, &digits);
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, digits));
        }
    }
    let (_, digits) = best.expect("every integrity-passing document has a reading");
    Ok(materialize(doc, &digits))
}

/// Reduces a group to the kept alternative. The group stays in place.
pub fn prune(doc: &SemRep, group: &str, keep: usize) -> Result<SemRep, UnderspecError> {
    ensure_integrity(doc)?;
    let Some(Element::AltGroup(gi)) = doc.resolve(group) else {
        return Err(UnderspecError::UnknownId(group.to_owned()));
    };
    let len = doc.alt_groups[gi].alternatives.len();
    if keep >= len {
        return Err(UnderspecError::IndexOutOfRange { group: group.to_owned(), index: keep, len });
    }
    let mut out = doc.clone();
    let kept = out.alt_groups[gi].alternatives.swap_remove(keep);
    out.alt_groups[gi].alternatives = vec![kept];
    Ok(out)
}

/// Fixes a label variable to one node of its domain and drops it.
pub fn bind(doc: &SemRep, variable: &str, node: &str) -> Result<SemRep, UnderspecError> {
    ensure_integrity(doc)?;
    let Some(Element::Variable(vi)) = doc.resolve(variable) else {
        return Err(UnderspecError::UnknownId(variable.to_owned()));
    };
    if !matches!(doc.resolve(node), Some(Element::Node(_))) {
        return Err(UnderspecError::UnknownId(node.to_owned()));
    }
    if !doc.variables[vi].domain.iter().any(|d| d == node) {
        return Err(UnderspecError::OutsideDomain { variable: variable.to_owned(), node: node.to_owned() });
    }
    let mut out = doc.clone();
    let var = out.variables.remove(vi);
    substitute(&mut out, &[(var.id, Id::new_unchecked(node))]);
    Ok(out)
}
