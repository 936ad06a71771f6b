//! Text form of coarse-graining directories.
//!
//! ```text
//! directory S scale Hybrid
//! members A1 A2 A3 A4
//! b1 | A1 -> A5 : +b1 | {b1}
//! ```
//!
//! Entries are written in sorted order and blocks are separated by one blank
//! line, so the same directories always produce the same bytes.

use std::fmt::Write as _;

use semspace_core::scaling::{DirEntry, Directory};
use semspace_core::AgentId;

use crate::syntax::{parse_promise, Cursor, SyntaxError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodecError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for CodecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for CodecError {}

pub fn encode_directories(dirs: &[Directory]) -> String {
    let mut sorted: Vec<&Directory> = dirs.iter().collect();
    sorted.sort_by(|a, b| a.owner.cmp(&b.owner));
    let mut out = String::new();
    for (i, d) in sorted.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "directory {} scale {}", d.owner, d.scale);
        let members: Vec<&str> = d.members.iter().map(AgentId::as_str).collect();
        let _ = writeln!(out, "members {}", members.join(" "));
        let mut entries: Vec<&DirEntry> = d.entries.iter().collect();
        entries.sort();
        for e in entries {
            let lang: Vec<&str> = e.language.iter().map(String::as_str).collect();
            let _ = writeln!(out, "{} | {} | {{{}}}", e.type_tag, e.fine, lang.join(" "));
        }
    }
    out
}

pub fn decode_directories(text: &str) -> Result<Vec<Directory>, CodecError> {
    let mut out: Vec<Directory> = Vec::new();
    let mut current: Option<Directory> = None;
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let at = |e: SyntaxError| CodecError {
            line: n,
            column: e.column,
            message: e.message,
        };
        if line.trim().is_empty() {
            out.extend(current.take());
            continue;
        }
        let mut c = Cursor::new(line);
        if c.eat_keyword("directory") {
            out.extend(current.take());
            let owner = c.word("owner").map_err(at)?.text;
            c.expect("scale").map_err(at)?;
            let scale = c.word("scale").map_err(at)?.text;
            c.finish().map_err(at)?;
            current = Some(Directory::new(owner.into(), &scale, Default::default()));
            continue;
        }
        let Some(dir) = current.as_mut() else {
            return Err(CodecError {
                line: n,
                column: 1,
                message: "expected `directory <owner> scale <name>`".into(),
            });
        };
        if c.eat_keyword("members") {
            while !c.at_end() {
                dir.members.insert(c.word("member").map_err(at)?.text.into());
            }
            continue;
        }
        dir.entries.push(entry(line).map_err(at)?);
    }
    out.extend(current);
    Ok(out)
}

/// `τ | promise | {lang}`; the promise text may itself contain ` | `.
fn entry(line: &str) -> Result<DirEntry, SyntaxError> {
    let err = |column: usize, message: &str| SyntaxError {
        column,
        message: message.into(),
    };
    let (first, last) = match (line.find(" | "), line.rfind(" | ")) {
        (Some(f), Some(l)) if f < l => (f, l),
        _ => return Err(err(1, "expected `type | promise | {language}`")),
    };
    let col = |byte: usize| line[..byte].chars().count() + 1;
    let mut c = Cursor::new(&line[..first]);
    let type_tag = c.type_tag()?;
    c.finish()?;
    let fine = parse_promise(&line[first + 3..last]).map_err(|e| err(e.column + col(first + 3) - 1, &e.message))?;
    let mut c = Cursor::new(&line[last + 3..]);
    let language = c
        .braced_words("symbol")
        .map_err(|e| err(e.column + col(last + 3) - 1, &e.message))?
        .into_iter()
        .map(|t| t.text)
        .collect();
    c.finish().map_err(|e| err(e.column + col(last + 3) - 1, &e.message))?;
    Ok(DirEntry {
        type_tag,
        fine,
        language,
    })
}
