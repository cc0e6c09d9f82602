//! Diagnostics shared by every pipeline stage.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// One-based line and column in the input text. `0:0` means "no location".
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    pub const NONE: Location = Location { line: 0, column: 0 };

    pub fn new(line: usize, column: usize) -> Self {
        Location { line, column }
    }

    /// Computes the location of a byte offset in `text`.
    pub fn from_offset(text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let before = &text.as_bytes()[..offset];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = before
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&before[line_start..])
            .chars()
            .count()
            + 1;
        Location { line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Stable machine-readable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    MalformedXml,
    UnexpectedRoot,
    UnsupportedConstruct,
    MissingIdentifier,
    DuplicateClass,
    DanglingReference,
    MultipleUnion,
    UnionTooSmall,
    DuplicateIndividual,
    SelfUnion,
    IdentifierCollision,
    CycleInSubsumption,
    RedundantEquivSubclass,
    UnionTargetWithInstances,
    UndeclaredIdentifier,
    DuplicateLabel,
    BadLabel,
    SetConstantClash,
    DuplicateDeclaration,
    NaryUnionSplit,
    UnboundIdentifier,
    IllTyped,
    DomainTooLarge,
    Io,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::MalformedXml => "MALFORMED_XML",
            Code::UnexpectedRoot => "UNEXPECTED_ROOT",
            Code::UnsupportedConstruct => "UNSUPPORTED_CONSTRUCT",
            Code::MissingIdentifier => "MISSING_IDENTIFIER",
            Code::DuplicateClass => "DUPLICATE_CLASS",
            Code::DanglingReference => "DANGLING_REFERENCE",
            Code::MultipleUnion => "MULTIPLE_UNION",
            Code::UnionTooSmall => "UNION_TOO_SMALL",
            Code::DuplicateIndividual => "DUPLICATE_INDIVIDUAL",
            Code::SelfUnion => "SELF_UNION",
            Code::IdentifierCollision => "IDENTIFIER_COLLISION",
            Code::CycleInSubsumption => "CYCLE_IN_SUBSUMPTION",
            Code::RedundantEquivSubclass => "REDUNDANT_EQUIV_SUBCLASS",
            Code::UnionTargetWithInstances => "UNION_TARGET_WITH_INSTANCES",
            Code::UndeclaredIdentifier => "UNDECLARED_IDENTIFIER",
            Code::DuplicateLabel => "DUPLICATE_LABEL",
            Code::BadLabel => "BAD_LABEL",
            Code::SetConstantClash => "SET_CONSTANT_CLASH",
            Code::DuplicateDeclaration => "DUPLICATE_DECLARATION",
            Code::NaryUnionSplit => "NARY_UNION_SPLIT",
            Code::UnboundIdentifier => "UNBOUND_IDENTIFIER",
            Code::IllTyped => "ILL_TYPED",
            Code::DomainTooLarge => "DOMAIN_TOO_LARGE",
            Code::Io => "IO_ERROR",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: Location,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            location,
            code,
            message: message.into(),
        }
    }

    pub fn warning(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            location,
            code,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Renders as `file:line:column: severity[CODE]: message`.
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        if self.location == Location::NONE {
            format!("{file}: {sev}[{}]: {}", self.code, self.message)
        } else {
            format!(
                "{file}:{}: {sev}[{}]: {}",
                self.location, self.code, self.message
            )
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("<input>"))
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}
