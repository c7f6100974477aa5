//! The `.tm` modeling language.
//!
//! Source files are line oriented: statements end at a newline or `;`,
//! blocks use braces and `#` starts a comment. The grammar is listed in
//! `docs/grammar.md`.

mod lexer;
mod parser;
mod serialize;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::behavior::BehaviorSpec;
use crate::event::EventDecl;
use crate::model::Model;

pub use serialize::serialize;

/// A parsed `.tm` file: the static model plus its optional event catalog and
/// behavior section.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Document {
    pub model: Model,
    pub events: Vec<EventDecl>,
    pub behavior: Option<BehaviorSpec>,
}

impl Document {
    /// Structural equality up to id renaming.
    pub fn structurally_eq(&self, other: &Document) -> bool {
        let events = |d: &Document| {
            d.events
                .iter()
                .map(|e| {
                    let mut names: Vec<String> =
                        e.elements.iter().map(|r| d.ref_name(*r)).collect();
                    names.sort();
                    (e.id.clone(), e.description.clone(), e.data_emitting, names)
                })
                .collect::<Vec<_>>()
        };
        self.model.structurally_eq(&other.model)
            && events(self) == events(other)
            && self.behavior == other.behavior
    }

    fn ref_name(&self, r: crate::model::ElementRef) -> String {
        match r {
            crate::model::ElementRef::Thimac(t) => self
                .model
                .thimac(t)
                .map_or_else(|| t.to_string(), |t| t.name.clone()),
            crate::model::ElementRef::Element(e) => self.model.element_name(e),
        }
    }
}

/// Where a `.tm` text came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    pub text: String,
    /// File path, or `<inline>`.
    pub origin: String,
}

impl SourceText {
    pub fn inline(text: impl Into<String>) -> Self {
        SourceText {
            text: text.into(),
            origin: "<inline>".into(),
        }
    }

    pub fn from_path(path: &std::path::Path) -> std::io::Result<Self> {
        Ok(SourceText {
            text: std::fs::read_to_string(path)?,
            origin: path.display().to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A positioned parser message. Messages start with one of the prefixes
/// `syntax error`, `unknown stage kind`, `duplicate id` or
/// `dangling reference`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl Diagnostic {
    pub(crate) fn error(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            line: pos.line,
            column: pos.column,
            message: message.into(),
        }
    }

    pub(crate) fn warning(pos: Pos, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(pos, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Parses a `.tm` document. Every reference must resolve.
pub fn parse(src: &SourceText) -> Result<Document, Vec<Diagnostic>> {
    parser::parse(&src.text, false).map(|(doc, _)| doc)
}

/// Like [`parse`], but flow and trigger endpoints and thimac parents that do
/// not resolve are kept as dangling ids (reported as warnings) so that
/// [`crate::validate_static`] can describe them.
pub fn parse_lenient(src: &SourceText) -> Result<(Document, Vec<Diagnostic>), Vec<Diagnostic>> {
    parser::parse(&src.text, true)
}

/// Shorthand for parsing inline text.
pub fn parse_str(text: &str) -> Result<Document, Vec<Diagnostic>> {
    parse(&SourceText::inline(text))
}
