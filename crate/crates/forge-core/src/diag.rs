//! Source positions and diagnostics shared by every text format in the
//! toolchain.

use serde::{Deserialize, Serialize};
use std::fmt;

/// A half-open byte range in a source text, with the 1-based line/column of
/// its start.
///
/// Spans compare equal to each other unconditionally so that AST equality is
/// structural: `parse(print(ast)) == ast` holds even though the positions
/// moved.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
    pub line: u32,
    pub col: u32,
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl Span {
    pub fn new(offset: usize, len: usize, line: u32, col: u32) -> Self {
        Span { offset, len, line, col }
    }

    /// Span covering both operands.
    pub fn to(self, other: Span) -> Span {
        let end = (other.offset + other.len).max(self.offset + self.len);
        Span { offset: self.offset, len: end - self.offset, line: self.line, col: self.col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// One reported problem. `file` is whatever name the caller handed to the
/// parser or validator; `line`/`col` are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(file: &str, span: Span, code: &str, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            file: file.to_string(),
            line: span.line,
            col: span.col,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(file: &str, span: Span, code: &str, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Self::error(file, span, code, message) }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}:{}: {} [{}]: {}", self.file, self.line, self.col, sev, self.code, self.message)
    }
}

/// Sort diagnostics by (file, line, col, code) so the verdict of a validation
/// run is independent of rule evaluation order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (&a.file, a.line, a.col, &a.code, &a.message).cmp(&(&b.file, b.line, b.col, &b.code, &b.message))
    });
}

/// `true` when no diagnostic is an error (warnings are acceptable).
pub fn is_clean(diags: &[Diagnostic]) -> bool {
    diags.iter().all(|d| d.severity != Severity::Error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_are_ignored_by_equality() {
        let a = Span::new(0, 3, 1, 1);
        let b = Span::new(17, 4, 9, 2);
        assert_eq!(a, b);
    }

    #[test]
    fn diagnostics_serialize_with_flat_fields() {
        let d = Diagnostic::error("m.machine", Span::new(5, 2, 2, 3), "E001", "boom");
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["severity"], "error");
        assert_eq!(v["file"], "m.machine");
        assert_eq!(v["line"], 2);
        assert_eq!(v["col"], 3);
        assert_eq!(v["code"], "E001");
        assert_eq!(v["message"], "boom");
    }

    #[test]
    fn sorting_is_by_location() {
        let mut ds = vec![
            Diagnostic::error("a", Span::new(0, 1, 4, 1), "E2", "later"),
            Diagnostic::error("a", Span::new(0, 1, 2, 5), "E1", "earlier"),
        ];
        sort_diagnostics(&mut ds);
        assert_eq!(ds[0].message, "earlier");
    }
}
