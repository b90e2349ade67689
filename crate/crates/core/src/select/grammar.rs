//! The `Parts = [...]` and `Labels = [...]` reply formats.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrammarError {
    #[error("no `{0} =` line found")]
    MissingHeader(&'static str),
    #[error("the `{0} =` list is empty")]
    EmptyList(&'static str),
    #[error("`{0}` is not an integer label")]
    InvalidToken(String),
    #[error("label {0} is not positive")]
    NonPositive(i64),
    #[error("part name {0:?} contains a reserved character")]
    InvalidPartName(String),
}

/// Non-empty ordered list of distinct lowercase part names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct PartList(Vec<String>);

impl PartList {
    /// Trims and lowercases names, dropping duplicates after the first.
    pub fn new<I, S>(names: I) -> Result<Self, GrammarError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut out: Vec<String> = Vec::new();
        for n in names {
            let name = n.as_ref().trim().to_lowercase();
            if name.is_empty() {
                continue;
            }
            if name.contains([',', '[', ']', '\n', '\r']) {
                return Err(GrammarError::InvalidPartName(name));
            }
            if !out.contains(&name) {
                out.push(name);
            }
        }
        if out.is_empty() {
            return Err(GrammarError::EmptyList("Parts"));
        }
        Ok(Self(out))
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    /// Names joined with `", "`, as substituted into prompts.
    pub fn joined(&self) -> String {
        self.0.join(", ")
    }
}

impl TryFrom<Vec<String>> for PartList {
    type Error = GrammarError;
    fn try_from(v: Vec<String>) -> Result<Self, Self::Error> {
        PartList::new(v)
    }
}

impl From<PartList> for Vec<String> {
    fn from(p: PartList) -> Self {
        p.0
    }
}

impl fmt::Display for PartList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Parts = [{}]", self.joined())
    }
}

/// Returns the text after `<header> =` on the first line that has it.
fn list_after_header<'a>(text: &'a str, header: &'static str) -> Option<&'a str> {
    let needle = header.to_ascii_lowercase();
    for line in text.lines() {
        let lower = line.to_ascii_lowercase();
        let mut from = 0;
        while let Some(pos) = lower[from..].find(&needle) {
            let after = from + pos + needle.len();
            let rest = line[after..].trim_start_matches([' ', '\t', '*', ':']);
            if let Some(list) = rest.strip_prefix('=') {
                return Some(list);
            }
            from = after;
        }
    }
    None
}

fn list_tokens(list: &str) -> impl Iterator<Item = &str> {
    let list = list.trim().trim_end_matches('.').trim();
    list.split(',').map(|t| {
        t.trim()
            .trim_matches(|c: char| matches!(c, '[' | ']' | '"' | '\'' | '`' | '*'))
            .trim()
    })
}

/// Parses `Parts = a, b` or `Parts = [a, b]`. Prose on other lines, or before
/// the header on the same line, is ignored.
pub fn parse_parts(text: &str) -> Result<PartList, GrammarError> {
    let list = list_after_header(text, "Parts").ok_or(GrammarError::MissingHeader("Parts"))?;
    PartList::new(list_tokens(list).filter(|t| !t.is_empty()))
}

/// Parses `Labels = 4, 6` or `Labels = [4, 6]` into a set of positive labels.
pub fn parse_labels(text: &str) -> Result<BTreeSet<u32>, GrammarError> {
    let list = list_after_header(text, "Labels").ok_or(GrammarError::MissingHeader("Labels"))?;
    let mut out = BTreeSet::new();
    for tok in list_tokens(list).flat_map(|t| t.split_whitespace()) {
        let v: i64 = tok.parse().map_err(|_| GrammarError::InvalidToken(tok.to_string()))?;
        if v <= 0 {
            return Err(GrammarError::NonPositive(v));
        }
        let v = u32::try_from(v).map_err(|_| GrammarError::InvalidToken(tok.to_string()))?;
        out.insert(v);
    }
    if out.is_empty() {
        return Err(GrammarError::EmptyList("Labels"));
    }
    Ok(out)
}

pub fn format_labels(labels: &BTreeSet<u32>) -> String {
    let parts: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
    alloc::format!("Labels = [{}]", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parts_plain() {
        assert_eq!(parse_parts("Parts = seat, backrest").unwrap().names(), ["seat", "backrest"]);
    }

    #[test]
    fn parts_bracketed_singleton() {
        assert_eq!(parse_parts("Parts = [seat]").unwrap().names(), ["seat"]);
    }

    #[test]
    fn parts_normalized() {
        let p = parse_parts("I think… Parts = Seat, seat, LEGS").unwrap();
        assert_eq!(p.names(), ["seat", "legs"]);
    }

    #[test]
    fn parts_with_surrounding_lines() {
        let p = parse_parts("Looking at the image.\nParts = [lampshade]\nDone.").unwrap();
        assert_eq!(p.names(), ["lampshade"]);
    }

    #[test]
    fn parts_missing_or_empty() {
        assert_eq!(parse_parts("no parts needed"), Err(GrammarError::MissingHeader("Parts")));
        assert_eq!(parse_parts("Parts = []"), Err(GrammarError::EmptyList("Parts")));
    }

    #[test]
    fn labels_plain_and_bracketed() {
        assert_eq!(parse_labels("Labels = 4, 6").unwrap(), BTreeSet::from([4, 6]));
        assert_eq!(parse_labels("Labels = [10, 2, 2]").unwrap(), BTreeSet::from([2, 10]));
    }

    #[test]
    fn labels_errors() {
        assert_eq!(parse_labels("Labels = []"), Err(GrammarError::EmptyList("Labels")));
        assert_eq!(parse_labels("Labels = 0"), Err(GrammarError::NonPositive(0)));
        assert_eq!(parse_labels("Labels = -3"), Err(GrammarError::NonPositive(-3)));
        assert_eq!(
            parse_labels("Labels = 4, six"),
            Err(GrammarError::InvalidToken("six".into()))
        );
        assert_eq!(parse_labels("4, 6"), Err(GrammarError::MissingHeader("Labels")));
    }

    #[test]
    fn display_forms() {
        let p = PartList::new(["seat", "backrest"]).unwrap();
        assert_eq!(p.to_string(), "Parts = [seat, backrest]");
        assert_eq!(format_labels(&BTreeSet::from([6, 4])), "Labels = [4, 6]");
    }
}
