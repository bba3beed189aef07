//! Source spans and located diagnostics shared by the parser, checker,
//! grader and service.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A byte range in some source text plus the 1-based line and column
/// (in characters) of its start. Synthetic spans use line 0.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn is_synthetic(&self) -> bool {
        self.line == 0
    }
}

/// Maps byte offsets of a text to line/column positions.
#[derive(Clone, Debug)]
pub struct LineIndex<'a> {
    text: &'a str,
    line_starts: Vec<usize>,
}

impl<'a> LineIndex<'a> {
    pub fn new(text: &'a str) -> Self {
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        LineIndex { text, line_starts }
    }

    pub fn span(&self, start: usize, end: usize) -> Span {
        let start = start.min(self.text.len());
        let end = end.clamp(start, self.text.len());
        let line = self.line_starts.partition_point(|&s| s <= start);
        let line_start = self.line_starts[line - 1];
        let col = self.text[line_start..start].chars().count() + 1;
        Span { start, end, line, col }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Machine-readable diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    // checker
    NotApplicable,
    ResultMismatch,
    MatchInconsistent,
    CapturedTerm,
    FreshnessViolation,
    ExtNotSubset,
    BasicNoMatch,
    ArityMismatch,
    WrongBranchCount,
    NoOpenGoal,
    // parser
    SyntaxError,
    UnknownRule,
    Layout,
    Indentation,
    MissingGoal,
    // service
    BodyTooLarge,
    BadRequest,
    // grader
    ManifestMismatch,
    Missing,
    DuplicateSection,
    UnknownSection,
    Unreadable,
    Review,
    StyleDeduction,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::NotApplicable => "NOT_APPLICABLE",
            Code::ResultMismatch => "RESULT_MISMATCH",
            Code::MatchInconsistent => "MATCH_INCONSISTENT",
            Code::CapturedTerm => "CAPTURED_TERM",
            Code::FreshnessViolation => "FRESHNESS_VIOLATION",
            Code::ExtNotSubset => "EXT_NOT_SUBSET",
            Code::BasicNoMatch => "BASIC_NO_MATCH",
            Code::ArityMismatch => "ARITY_MISMATCH",
            Code::WrongBranchCount => "WRONG_BRANCH_COUNT",
            Code::NoOpenGoal => "NO_OPEN_GOAL",
            Code::SyntaxError => "SYNTAX_ERROR",
            Code::UnknownRule => "UNKNOWN_RULE",
            Code::Layout => "LAYOUT",
            Code::Indentation => "INDENTATION",
            Code::MissingGoal => "MISSING_GOAL",
            Code::BodyTooLarge => "BODY_TOO_LARGE",
            Code::BadRequest => "BAD_REQUEST",
            Code::ManifestMismatch => "MANIFEST_MISMATCH",
            Code::Missing => "MISSING",
            Code::DuplicateSection => "DUPLICATE_SECTION",
            Code::UnknownSection => "UNKNOWN_SECTION",
            Code::Unreadable => "UNREADABLE",
            Code::Review => "REVIEW",
            Code::StyleDeduction => "STYLE_DEDUCTION",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    /// Printed sequent(s) the checker computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
    /// Printed sequent(s) the user claimed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub got: Option<String>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: Severity::Error,
            message: message.into(),
            span,
            expected: None,
            got: None,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Self::error(code, span, message) }
    }

    pub fn with_diff(mut self, expected: impl Into<String>, got: impl Into<String>) -> Self {
        self.expected = Some(expected.into());
        self.got = Some(got.into());
        self
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
        if self.span.is_synthetic() {
            write!(f, "{sev}[{}]: {}", self.code, self.message)?;
        } else {
            write!(f, "{}:{}: {sev}[{}]: {}", self.span.line, self.span.col, self.code, self.message)?;
        }
        if let Some(expected) = &self.expected {
            write!(f, "\n  expected: {expected}")?;
        }
        if let Some(got) = &self.got {
            write!(f, "\n       got: {got}")?;
        }
        Ok(())
    }
}
