use thiserror::Error;
use url::Url;

use crate::integrity::has_uri_scheme;
use crate::model::{ExternalLink, LinkKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("`{0}` is not a URI (no scheme) and there is no base to resolve it against")]
    InvalidUri(String),
    #[error("unknown link kind `{0}` (expected domainModel or lowerLevel)")]
    UnknownLinkKind(String),
}

pub fn parse_link_kind(kind: &str) -> Result<LinkKind, LinkError> {
    match kind {
        "domainModel" => Ok(LinkKind::DomainModel),
        "lowerLevel" => Ok(LinkKind::LowerLevel),
        other => Err(LinkError::UnknownLinkKind(other.to_owned())),
    }
}

/// Splits `href` at the first `#` into target and opaque fragment.
pub fn parse_link(href: &str, kind: &str) -> Result<ExternalLink, LinkError> {
    parse_link_with_base(href, kind, None)
}

/// Like [`parse_link`], resolving a relative target against `base`
/// (an `xml:base` value). Absolute targets are kept verbatim.
pub fn parse_link_with_base(href: &str, kind: &str, base: Option<&Url>) -> Result<ExternalLink, LinkError> {
    let kind = parse_link_kind(kind)?;
    let (target, fragment) = match href.split_once('#') {
        Some((t, f)) => (t, Some(f.to_owned())),
        None => (href, None),
    };
    let target = if has_uri_scheme(target) {
        target.to_owned()
    } else {
        match base {
            Some(base) if !target.is_empty() => {
                let mut joined = base.join(target).map_err(|_| LinkError::InvalidUri(href.to_owned()))?;
                joined.set_fragment(None);
                joined.to_string()
            }
            _ => return Err(LinkError::InvalidUri(href.to_owned())),
        }
    };
    Ok(ExternalLink { kind, target, fragment })
}
