use std::fmt;

use serde::{Deserialize, Serialize};

/// Closed catalog of diagnostic codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Code {
    RefUnresolved,
    NestCycle,
    DupName,
    FlowIllegal,
    TriggerIllegal,
    StageOrphan,
    SinkRelease,
    TransferUnpaired,
    RegionEmpty,
    RegionDisconnected,
    BehaviorInconsistent,
}

impl Code {
    pub const ALL: [Code; 11] = [
        Code::RefUnresolved,
        Code::NestCycle,
        Code::DupName,
        Code::FlowIllegal,
        Code::TriggerIllegal,
        Code::StageOrphan,
        Code::SinkRelease,
        Code::TransferUnpaired,
        Code::RegionEmpty,
        Code::RegionDisconnected,
        Code::BehaviorInconsistent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::RefUnresolved => "REF_UNRESOLVED",
            Code::NestCycle => "NEST_CYCLE",
            Code::DupName => "DUP_NAME",
            Code::FlowIllegal => "FLOW_ILLEGAL",
            Code::TriggerIllegal => "TRIGGER_ILLEGAL",
            Code::StageOrphan => "STAGE_ORPHAN",
            Code::SinkRelease => "SINK_RELEASE",
            Code::TransferUnpaired => "TRANSFER_UNPAIRED",
            Code::RegionEmpty => "REGION_EMPTY",
            Code::RegionDisconnected => "REGION_DISCONNECTED",
            Code::BehaviorInconsistent => "BEHAVIOR_INCONSISTENT",
        }
    }

    /// Connectivity findings are warnings; everything else is an error.
    pub fn default_severity(self) -> Severity {
        match self {
            Code::StageOrphan
            | Code::SinkRelease
            | Code::TransferUnpaired
            | Code::RegionDisconnected => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Source location. `line` and `column` are 1-based, offsets are byte offsets
/// into the source text (`end` exclusive).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub element: String,
    pub span: Option<Span>,
}

impl Diagnostic {
    pub fn new(code: Code, element: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.default_severity(),
            message: message.into(),
            element: element.into(),
            span: None,
        }
    }

    pub fn with_span(mut self, span: Option<Span>) -> Self {
        self.span = span;
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
        match self.span {
            Some(span) => write!(
                f,
                "{}:{}: {sev}[{}] {}: {}",
                span.line, span.column, self.code, self.element, self.message
            ),
            None => write!(f, "{sev}[{}] {}: {}", self.code, self.element, self.message),
        }
    }
}

/// Ordered list of diagnostics; `ok` is false as soon as one error is present.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn new(diagnostics: Vec<Diagnostic>) -> Self {
        let ok = !diagnostics.iter().any(Diagnostic::is_error);
        ValidationReport { ok, diagnostics }
    }

    pub fn extend(&mut self, more: impl IntoIterator<Item = Diagnostic>) {
        self.diagnostics.extend(more);
        self.ok = !self.diagnostics.iter().any(Diagnostic::is_error);
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.is_error())
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }
}
