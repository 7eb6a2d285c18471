//! Line-oriented key/value documents shared by instance files and reports.
//!
//! ```text
//! # comment
//! key value
//! [section]
//! datum
//! ```
//!
//! Scalars come before the first section header. Inside a section every
//! non-blank line is one datum.

use std::fmt;

use thiserror::Error;

use crate::numeric::{self, Ext, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based line, `None` for problems with the document as a whole.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl ParseError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError { line: Some(line), message: message.into() }
    }

    pub fn whole(message: impl Into<String>) -> Self {
        ParseError { line: None, message: message.into() }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub line: usize,
    pub text: String,
}

#[derive(Debug, Clone)]
struct Section {
    line: usize,
    name: String,
    data: Vec<Entry>,
    taken: bool,
}

#[derive(Debug, Clone)]
struct Scalar {
    line: usize,
    key: String,
    value: String,
    taken: bool,
}

/// Parsed document. Getters mark entries as consumed so [`Document::finish`]
/// can reject anything left over.
#[derive(Debug, Clone, Default)]
pub struct Document {
    scalars: Vec<Scalar>,
    sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut doc = Document::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ParseError::at(line, format!("unterminated section header `{content}`")))?
                    .trim();
                if name.is_empty() {
                    return Err(ParseError::at(line, "empty section name"));
                }
                if let Some(prev) = doc.sections.iter().find(|s| s.name == name) {
                    return Err(ParseError::at(line, format!("section [{name}] already opened on line {}", prev.line)));
                }
                doc.sections.push(Section { line, name: name.to_string(), data: Vec::new(), taken: false });
            } else if let Some(section) = doc.sections.last_mut() {
                section.data.push(Entry { line, text: content.to_string() });
            } else {
                let (key, value) = content
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| ParseError::at(line, format!("expected `key value`, found `{content}`")))?;
                if let Some(prev) = doc.scalars.iter().find(|s| s.key == key) {
                    return Err(ParseError::at(line, format!("`{key}` already set on line {}", prev.line)));
                }
                doc.scalars.push(Scalar { line, key: key.to_string(), value: value.trim().to_string(), taken: false });
            }
        }
        Ok(doc)
    }

    /// Raw scalar value with its line.
    pub fn scalar(&mut self, key: &str) -> Option<(usize, String)> {
        let s = self.scalars.iter_mut().find(|s| s.key == key)?;
        s.taken = true;
        Some((s.line, s.value.clone()))
    }

    pub fn required(&mut self, key: &str) -> Result<(usize, String), ParseError> {
        self.scalar(key).ok_or_else(|| ParseError::whole(format!("missing `{key}` line")))
    }

    pub fn rational(&mut self, key: &str) -> Result<Option<Rational>, ParseError> {
        self.scalar(key).map(|(line, v)| parse_rational(line, &v)).transpose()
    }

    pub fn required_rational(&mut self, key: &str) -> Result<Rational, ParseError> {
        let (line, v) = self.required(key)?;
        parse_rational(line, &v)
    }

    pub fn required_ext(&mut self, key: &str) -> Result<Ext, ParseError> {
        let (line, v) = self.required(key)?;
        Ext::parse(&v).map_err(|e| ParseError::at(line, format!("{key}: {e}")))
    }

    pub fn index(&mut self, key: &str) -> Result<Option<usize>, ParseError> {
        self.scalar(key).map(|(line, v)| parse_index(line, &v)).transpose()
    }

    pub fn section(&mut self, name: &str) -> Option<Vec<Entry>> {
        let s = self.sections.iter_mut().find(|s| s.name == name)?;
        s.taken = true;
        Some(s.data.clone())
    }

    pub fn required_section(&mut self, name: &str) -> Result<Vec<Entry>, ParseError> {
        self.section(name).ok_or_else(|| ParseError::whole(format!("missing [{name}] section")))
    }

    pub fn rationals(&mut self, name: &str) -> Result<Vec<Rational>, ParseError> {
        self.required_section(name)?.iter().map(|e| parse_rational(e.line, &e.text)).collect()
    }

    /// Rejects keys and sections nobody asked for.
    pub fn finish(self) -> Result<(), ParseError> {
        if let Some(s) = self.scalars.iter().find(|s| !s.taken) {
            return Err(ParseError::at(s.line, format!("unknown key `{}`", s.key)));
        }
        if let Some(s) = self.sections.iter().find(|s| !s.taken) {
            return Err(ParseError::at(s.line, format!("unknown section [{}]", s.name)));
        }
        Ok(())
    }
}

pub fn parse_rational(line: usize, text: &str) -> Result<Rational, ParseError> {
    numeric::parse(text).map_err(|e| ParseError::at(line, e.to_string()))
}

pub fn parse_index(line: usize, text: &str) -> Result<usize, ParseError> {
    text.trim().parse().map_err(|_| ParseError::at(line, format!("expected a non-negative integer, found `{text}`")))
}

/// Writer for the canonical layout: scalars, then sections separated by
/// blank lines.
#[derive(Debug, Default)]
pub struct Writer {
    out: String,
    in_section: bool,
}

impl Writer {
    pub fn scalar(&mut self, key: &str, value: impl fmt::Display) {
        debug_assert!(!self.in_section, "scalars go before sections");
        self.out.push_str(&format!("{key} {value}\n"));
    }

    pub fn section<T: fmt::Display>(&mut self, name: &str, data: impl IntoIterator<Item = T>) {
        self.in_section = true;
        self.out.push_str(&format!("\n[{name}]\n"));
        for d in data {
            self.out.push_str(&format!("{d}\n"));
        }
    }

    pub fn finish(self) -> String {
        self.out
    }
}
