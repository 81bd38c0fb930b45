//! The versioned JSON system document.
//!
//! ```json
//! {
//!   "version": 1,
//!   "contents": [{"id": "1", "support": ["+1", "-1"], "embedding": ["1", "-1"]}],
//!   "contexts": [
//!     {"id": "1", "contents": ["1", "2"],
//!      "distribution": [{"values": ["+1", "-1"], "p": "1/2"}, ...]}
//!   ]
//! }
//! ```
//!
//! Probabilities and embeddings are strings holding `a/b` fractions or
//! terminating decimals, read exactly. Tuples not listed have probability 0.

use crate::model::{validate_system, ContextBlock, Support, System, Violation};
use crate::rational::{format_rational, parse_rational, Rational};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub version: u32,
    pub contents: Vec<ContentEntry>,
    pub contexts: Vec<ContextEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContentEntry {
    pub id: String,
    pub support: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextEntry {
    pub id: String,
    pub contents: Vec<String>,
    pub distribution: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cell {
    pub values: Vec<String>,
    pub p: String,
}

/// A problem located at a field path such as `contexts[2].distribution[0].p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error("{}", join(.0))]
    Fields(Vec<FieldError>),
    #[error("{}", join(.0))]
    Invalid(Vec<FieldError>),
}

fn join(errors: &[FieldError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

pub fn parse_document(text: &str) -> Result<SystemDocument, DocumentError> {
    serde_json::from_str(text).map_err(|e| DocumentError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parses and validates a document into a [`System`].
pub fn parse_system(text: &str) -> Result<System, DocumentError> {
    let doc = parse_document(text)?;
    let sys = doc.to_system()?;
    let violations = validate_system(&sys);
    if violations.is_empty() {
        Ok(sys)
    } else {
        Err(DocumentError::Invalid(doc.locate(&violations)))
    }
}

impl SystemDocument {
    /// Structural conversion; does not check the system invariants.
    pub fn to_system(&self) -> Result<System, DocumentError> {
        if self.version != FORMAT_VERSION {
            return Err(DocumentError::Version(self.version));
        }
        let mut errors = Vec::new();
        let mut err = |field: String, message: String| errors.push(FieldError { field, message });
        let mut supports: BTreeMap<String, Support> = BTreeMap::new();
        for (i, c) in self.contents.iter().enumerate() {
            let mut support = Support::new(c.support.iter().cloned());
            if let Some(emb) = &c.embedding {
                let mut values = Vec::with_capacity(emb.len());
                for (k, lit) in emb.iter().enumerate() {
                    match parse_rational(lit) {
                        Ok(v) => values.push(v),
                        Err(e) => err(format!("contents[{i}].embedding[{k}]"), e.to_string()),
                    }
                }
                support = support.with_embedding(values);
            }
            if supports.insert(c.id.clone(), support).is_some() {
                err(format!("contents[{i}].id"), format!("content `{}` declared twice", c.id));
            }
        }
        let mut blocks = Vec::with_capacity(self.contexts.len());
        let mut seen_contexts = BTreeMap::new();
        for (i, ctx) in self.contexts.iter().enumerate() {
            if seen_contexts.insert(ctx.id.clone(), i).is_some() {
                err(format!("contexts[{i}].id"), format!("context `{}` declared twice", ctx.id));
                continue;
            }
            let mut columns = Vec::with_capacity(ctx.contents.len());
            for (k, q) in ctx.contents.iter().enumerate() {
                match supports.get(q) {
                    Some(s) => columns.push((q.clone(), s.clone())),
                    None => err(format!("contexts[{i}].contents[{k}]"), format!("unknown content `{q}`")),
                }
            }
            if columns.len() != ctx.contents.len() {
                continue;
            }
            let mut table: BTreeMap<Vec<usize>, Rational> = BTreeMap::new();
            for (k, cell) in ctx.distribution.iter().enumerate() {
                let at = format!("contexts[{i}].distribution[{k}]");
                if cell.values.len() != columns.len() {
                    err(
                        format!("{at}.values"),
                        format!("expected {} values, found {}", columns.len(), cell.values.len()),
                    );
                    continue;
                }
                let mut key = Vec::with_capacity(columns.len());
                for (m, (label, (q, s))) in cell.values.iter().zip(&columns).enumerate() {
                    match s.index_of(label) {
                        Some(v) => key.push(v),
                        None => err(format!("{at}.values[{m}]"), format!("`{label}` is not a value of content `{q}`")),
                    }
                }
                let p = match parse_rational(&cell.p) {
                    Ok(p) => p,
                    Err(e) => {
                        err(format!("{at}.p"), e.to_string());
                        continue;
                    }
                };
                if key.len() != columns.len() {
                    continue;
                }
                if table.insert(key, p).is_some() {
                    err(format!("{at}.values"), "tuple listed twice".into());
                }
            }
            blocks.push(ContextBlock::new(ctx.id.clone(), columns, table));
        }
        if !errors.is_empty() {
            return Err(DocumentError::Fields(errors));
        }
        System::new(supports, blocks).map_err(|e| {
            DocumentError::Fields(vec![FieldError {
                field: "contexts".into(),
                message: e.to_string(),
            }])
        })
    }

    /// Attaches a field path to each violation.
    pub fn locate(&self, violations: &[Violation]) -> Vec<FieldError> {
        violations
            .iter()
            .map(|v| {
                let ctx = v
                    .context
                    .as_ref()
                    .and_then(|c| self.contexts.iter().position(|x| &x.id == c));
                let field = match (ctx, &v.content) {
                    (Some(i), Some(q)) => match self.contexts[i].contents.iter().rposition(|x| x == q) {
                        Some(k) => format!("contexts[{i}].contents[{k}]"),
                        None => format!("contexts[{i}]"),
                    },
                    (Some(i), None) => match &v.kind {
                        crate::model::ViolationKind::MassNotOne(_) => format!("contexts[{i}].distribution"),
                        _ => format!("contexts[{i}]"),
                    },
                    (None, Some(q)) => match self.contents.iter().position(|x| &x.id == q) {
                        Some(j) => format!("contents[{j}]"),
                        None => "contents".into(),
                    },
                    (None, None) => "document".into(),
                };
                FieldError {
                    field,
                    message: v.to_string(),
                }
            })
            .collect()
    }

    /// Canonical document: sorted identifiers, nonzero cells in tuple order.
    pub fn from_system(sys: &System) -> Self {
        let contents = sys
            .supports()
            .iter()
            .map(|(id, s)| ContentEntry {
                id: id.clone(),
                support: s.labels().to_vec(),
                embedding: s.embedding().map(|e| e.iter().map(format_rational).collect()),
            })
            .collect();
        let contexts = sys
            .blocks()
            .map(|b| ContextEntry {
                id: b.context.clone(),
                contents: b.contents.clone(),
                distribution: b
                    .table
                    .iter()
                    .map(|(k, p)| Cell {
                        values: k
                            .iter()
                            .zip(&b.supports)
                            .map(|(&v, s)| s.label(v).to_string())
                            .collect(),
                        p: format_rational(p),
                    })
                    .collect(),
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            contents,
            contexts,
        }
    }

    /// Pretty JSON with keys in sorted order.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("document serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }
}

pub fn serialize_system(sys: &System) -> String {
    SystemDocument::from_system(sys).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::magic_box;

    const MAGIC: &str = include_str!("../fixtures/magic_box.json");

    #[test]
    fn fixture_matches_library_system() {
        assert_eq!(parse_system(MAGIC).unwrap(), magic_box());
        assert_eq!(serialize_system(&magic_box()), MAGIC);
    }

    #[test]
    fn decimal_and_fraction_literals_agree() {
        let decimal = MAGIC.replace("\"1/2\"", "\"0.5\"");
        assert_ne!(decimal, MAGIC);
        assert_eq!(parse_system(&decimal).unwrap(), parse_system(MAGIC).unwrap());
    }

    #[test]
    fn short_mass_is_located() {
        let doc = MAGIC.replacen("\"1/2\"", "\"49/100\"", 1);
        match parse_system(&doc) {
            Err(DocumentError::Invalid(errs)) => {
                assert_eq!(errs.len(), 1);
                assert_eq!(errs[0].field, "contexts[0].distribution");
                assert!(errs[0].message.contains("mass ≠ 1"), "{}", errs[0].message);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inexact_literal_is_rejected() {
        let doc = MAGIC.replacen("\"1/2\"", "\"0.333...\"", 1);
        match parse_system(&doc) {
            Err(DocumentError::Fields(errs)) => assert_eq!(errs[0].field, "contexts[0].distribution[0].p"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_content_and_label() {
        let doc = MAGIC.replacen("\"contents\": [\n        \"1\",", "\"contents\": [\n        \"9\",", 1);
        assert_ne!(doc, MAGIC);
        let Err(DocumentError::Fields(errs)) = parse_system(&doc) else { panic!("expected field error") };
        assert!(errs[0].message.contains("unknown content `9`"));

        let doc = MAGIC.replacen("\"-1\"\n          ]", "\"0\"\n          ]", 1);
        let Err(DocumentError::Fields(errs)) = parse_system(&doc) else { panic!("expected field error") };
        assert!(errs[0].message.contains("is not a value"), "{errs:?}");
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_system("{\n  \"version\": 1,\n  oops\n}") {
            Err(DocumentError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(
            parse_system(&MAGIC.replace("\"version\": 1", "\"version\": 7")),
            Err(DocumentError::Version(7))
        );
    }
}
