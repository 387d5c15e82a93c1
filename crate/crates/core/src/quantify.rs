//! Quantification expressed with the basic components only: a collective
//! group participant whose size and collectivity are restrictions.

use crate::model::{Element, Id, ModelError, NodeKind, Restriction, SemRep, Value};

pub const CARDINALITY: &str = "cardinality";
pub const COLLECTIVITY: &str = "collectivity";
pub const MEMBER_TYPE: &str = "memberType";
pub const COLLECTIVE: &str = "collective";

/// Adds a group participant of `members_count` members of type
/// `member_category` acting collectively as the agent of `event`.
pub fn encode_collective_quantifier(
    doc: &mut SemRep,
    event: &str,
    members_count: i64,
    member_category: &str,
) -> Result<Id, ModelError> {
    match doc.resolve(event) {
        Some(Element::Node(i)) if doc.nodes[i].kind == NodeKind::Event => {}
        _ => return Err(ModelError::UnknownId(event.to_owned())),
    }
    if members_count < 1 {
        return Err(ModelError::InvalidCount(members_count));
    }
    if member_category.is_empty() || member_category.chars().any(char::is_whitespace) {
        return Err(ModelError::InvalidCategory(member_category.to_owned()));
    }
    let group = doc.add_node(NodeKind::Participant, None)?;
    doc.add_restriction(group.as_str(), CARDINALITY, Value::Number(members_count as f64))?;
    doc.add_restriction(group.as_str(), COLLECTIVITY, Value::token(COLLECTIVE))?;
    doc.add_restriction(group.as_str(), MEMBER_TYPE, Value::token(member_category))?;
    doc.add_relation(group.as_str(), event, vec![Restriction::token("role", "agent")])?;
    Ok(group)
}
