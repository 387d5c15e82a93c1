//! Error recovery for malformed input. The strict parser stops at the first
//! error; this scan keeps going so that every mismatched tag is reported.

/// Returns `(line, column, message)` for each mismatched or unclosed tag
/// and for each stray `>` directly after a tag.
pub(crate) fn scan_malformed(text: &str) -> Vec<(u32, u32, String)> {
    let mut out = Vec::new();
    let mut stack: Vec<(&str, usize)> = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while let Some(off) = text[i..].find('<') {
        let start = i + off;
        let rest = &text[start..];
        let skip_to = |pat: &str| rest.find(pat).map(|e| start + e + pat.len());
        let end = if rest.starts_with("<!--") {
            skip_to("-->")
        } else if rest.starts_with("<![CDATA[") {
            skip_to("]]>")
        } else if rest.starts_with("<?") {
            skip_to("?>")
        } else if rest.starts_with("<!") {
            skip_to(">")
        } else {
            let Some(close) = tag_end(rest) else {
                out.push(at(text, start, "tag is never closed".into()));
                break;
            };
            let tag = &rest[..close + 1];
            if let Some(name) = tag.strip_prefix("</") {
                let name = name.trim_end_matches('>').trim();
                match stack.iter().rposition(|(open, _)| *open == name) {
                    Some(pos) if pos == stack.len() - 1 => {
                        stack.pop();
                    }
                    Some(pos) => {
                        for (open, at_byte) in stack.drain(pos + 1..).rev() {
                            out.push(at(text, at_byte, format!("element `{open}` is never closed")));
                        }
                        stack.pop();
                    }
                    None => match stack.pop() {
                        Some((open, _)) => out.push(at(
                            text,
                            start,
                            format!("closing tag `</{name}>` does not match open element `{open}`"),
                        )),
                        None => out.push(at(text, start, format!("closing tag `</{name}>` has no open element"))),
                    },
                }
            } else if !tag.ends_with("/>") {
                let name_end =
                    tag[1..].find(|c: char| c.is_whitespace() || c == '>' || c == '/').map_or(tag.len(), |e| e + 1);
                stack.push((&tag[1..name_end], start));
            }
            Some(start + close + 1)
        };
        let Some(end) = end else {
            out.push(at(text, start, "markup is never terminated".into()));
            break;
        };
        if bytes.get(end) == Some(&b'>') {
            out.push(at(text, end, "stray `>` after a tag".into()));
        }
        i = end;
    }
    for (open, at_byte) in stack {
        out.push(at(text, at_byte, format!("element `{open}` is never closed")));
    }
    out
}

/// Index of the `>` closing the tag that starts `rest`, skipping quoted
/// attribute values.
fn tag_end(rest: &str) -> Option<usize> {
    let mut quote = None;
    for (i, c) in rest.char_indices().skip(1) {
        match (quote, c) {
            (None, '"' | '\'') => quote = Some(c),
            (Some(q), c) if c == q => quote = None,
            (None, '>') => return Some(i),
            (None, '<') => return None,
            _ => {}
        }
    }
    None
}

fn at(text: &str, byte: usize, message: String) -> (u32, u32, String) {
    let before = &text[..byte];
    let line = before.matches('\n').count() as u32 + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32 + 1;
    (line, column, message)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_close_tags() {
        let text = "<a>\n  <pers>first</num>\n  <b/>>\n</a>";
        let found = scan_malformed(text);
        assert_eq!(found.len(), 2, "{found:?}");
        assert_eq!((found[0].0, found[0].1), (2, 14));
        assert!(found[0].2.contains("</num>"));
        assert_eq!((found[1].0, found[1].1), (3, 7));
        assert!(found[1].2.contains("stray"));
    }

    #[test]
    fn well_formed_is_clean() {
        assert!(scan_malformed("<a x='>'><!-- <b> --><b/><c>t</c></a>").is_empty());
    }

    #[test]
    fn unclosed_element() {
        let found = scan_malformed("<a><b></a>");
        assert_eq!(found.len(), 1);
        assert!(found[0].2.contains("`b` is never closed"));
    }
}
