//! Textual syntax for TM models.
//!
//! ```text
//! model     := decl*
//! decl      := thimac | flow | trigger | event | behavior
//! thimac    := "thimac" NAME "{" (stage | thimac)* "}"
//! stage     := KIND ("(" NAME ")")? ";"
//! flow      := "flow" stageRef "->" stageRef ";"
//! trigger   := "trigger" stageRef "~>" stageRef ";"
//! event     := "event" NAME STRING? "{" (stageRef ";")+ "}"
//! behavior  := "behavior" "{" (NAME "->" NAME "repeat"? ";")* "}"
//! stageRef  := NAME ("." NAME)* "." KIND ("(" NAME ")")?
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

mod ast;
mod format;
mod lexer;
mod lower;
mod parser;

pub use ast::*;
pub use format::format;
pub use lower::{lower, Lowered};
pub use parser::{parse, ParseError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> Self {
        SourceFile {
            path: path.into(),
            text: text.into(),
        }
    }

    pub fn read(path: impl AsRef<std::path::Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        Ok(SourceFile {
            path: path.display().to_string(),
            text: std::fs::read_to_string(path)?,
        })
    }
}

/// Words that cannot be used as names.
pub const KEYWORDS: [&str; 13] = [
    "thimac", "flow", "trigger", "event", "behavior", "repeat", "create", "process", "release",
    "transfer", "receive", "arrive", "accept",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// True if `s` can be written as a NAME token.
pub fn is_valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(s)
}
