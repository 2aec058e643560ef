//! Diagnostics, document paths and validation reports.
//!
//! Every finding carries a stable code from [`codes`] so callers and tests
//! can match on codes instead of message text.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// Stable diagnostic codes.
///
/// Error codes start with `E-`, warning codes with `W-`.
pub mod codes {
    // parsing and loading
    pub const PARSE: &str = "E-PARSE";
    pub const DUP_KEY: &str = "E-DUP-KEY";
    pub const IO: &str = "E-IO";
    pub const NO_DATASET_DOC: &str = "E-NO-DATASET-DOC";
    pub const MULTIPLE_DATASET_DOCS: &str = "E-MULTIPLE-DATASET-DOCS";
    pub const BUILDING_INDEX_DUP: &str = "E-BUILDING-INDEX-DUP";
    pub const BUILDING_INDEX_MISMATCH: &str = "E-BUILDING-INDEX-MISMATCH";
    pub const IGNORED_FILE: &str = "W-IGNORED-FILE";

    // binding
    pub const TYPE_MISMATCH: &str = "E-TYPE-MISMATCH";
    pub const MISSING_REQUIRED: &str = "E-MISSING-REQUIRED";
    pub const BAD_ENUM: &str = "E-BAD-ENUM";
    pub const BAD_DATE: &str = "E-BAD-DATE";
    pub const UNKNOWN_FIELD: &str = "W-UNKNOWN-FIELD";
    pub const BUILDING_METER_DEVICES: &str = "E-BUILDING-METER-DEVICES";
    pub const DEVICE_MODEL_MISMATCH: &str = "E-DEVICE-MODEL-MISMATCH";
    pub const PRIOR_DISTANCE_AUTHORED: &str = "W-PRIOR-DISTANCE-AUTHORED";

    // local invariants
    pub const DATASET_NAME_EMPTY: &str = "E-DATASET-NAME-EMPTY";
    pub const DEVICE_KEY_EMPTY: &str = "E-DEVICE-KEY-EMPTY";
    pub const DEVICE_DUP: &str = "E-DEVICE-DUP";
    pub const BUILDING_DUP_INSTANCE: &str = "E-BUILDING-DUP-INSTANCE";
    pub const DATE_RANGE_ORDER: &str = "E-DATE-RANGE-ORDER";
    pub const GEO_BOUNDS: &str = "E-GEO-BOUNDS";
    pub const DEVICE_SAMPLE_PERIOD: &str = "E-DEVICE-SAMPLE-PERIOD";
    pub const DEVICE_NO_MEASUREMENTS: &str = "E-DEVICE-NO-MEASUREMENTS";
    pub const DEVICE_DUP_MEASUREMENT: &str = "E-DEVICE-DUP-MEASUREMENT";
    pub const MEASUREMENT_AC_TYPE: &str = "E-MEASUREMENT-AC-TYPE";
    pub const MEASUREMENT_LIMITS: &str = "E-MEASUREMENT-LIMITS";
    pub const INSTANCE_NOT_POSITIVE: &str = "E-INSTANCE-NOT-POSITIVE";
    pub const METER_DUP_INSTANCE: &str = "E-METER-DUP-INSTANCE";
    pub const ROOM_DUP: &str = "E-ROOM-DUP";
    pub const METER_ROOT_AND_SUB: &str = "E-METER-ROOT-AND-SUB";
    pub const METER_SENSOR_COUNT: &str = "E-METER-SENSOR-COUNT";
    pub const METER_UPSTREAM_WITHOUT_SUB: &str = "E-METER-UPSTREAM-WITHOUT-SUB";
    pub const METER_BAD_DOMINANT: &str = "E-METER-BAD-DOMINANT";
    pub const SENSOR_NO_LOCATION: &str = "E-SENSOR-NO-LOCATION";
    pub const PREPROCESSING_NO_FILTER: &str = "E-PREPROCESSING-NO-FILTER";
    pub const COUNT_AND_MULTIPLE: &str = "E-COUNT-AND-MULTIPLE";
    pub const COUNT_NOT_POSITIVE: &str = "E-COUNT-NOT-POSITIVE";
    pub const NEGATIVE_THRESHOLD: &str = "E-NEGATIVE-THRESHOLD";
    pub const APPLIANCE_DUP: &str = "E-APPLIANCE-DUP";
    pub const SUBTYPE_DUP: &str = "E-SUBTYPE-DUP";
    pub const CATEGORY_DUP: &str = "E-CATEGORY-DUP";
    pub const PRIOR_EMPTY: &str = "E-PRIOR-EMPTY";
    pub const PRIOR_NOT_NORMALIZED: &str = "E-PRIOR-NOT-NORMALIZED";
    pub const PRIOR_NEGATIVE: &str = "E-PRIOR-NEGATIVE";
    pub const PRIOR_BIN_EDGES: &str = "E-PRIOR-BIN-EDGES";
    pub const PRIOR_SHAPE: &str = "E-PRIOR-SHAPE";
    pub const MODELSPEC_NO_NAME: &str = "E-MODELSPEC-NO-NAME";
    pub const BAD_DISTRIBUTION_NAME: &str = "E-BAD-DISTRIBUTION-NAME";

    // type library
    pub const TYPE_UNKNOWN_PARENT: &str = "E-TYPE-UNKNOWN-PARENT";
    pub const TYPE_CYCLE: &str = "E-TYPE-CYCLE";
    pub const TYPE_UNKNOWN_COMPONENT: &str = "E-TYPE-UNKNOWN-COMPONENT";
    pub const TYPE_NOT_FOUND: &str = "E-TYPE-NOT-FOUND";
    pub const VOCAB_DUP: &str = "E-VOCAB-DUP";
    pub const BAD_CATEGORY: &str = "E-BAD-CATEGORY";
    pub const MERGE_KIND_CONFLICT: &str = "E-MERGE-KIND-CONFLICT";

    // appliance resolution
    pub const UNKNOWN_APPLIANCE_TYPE: &str = "E-UNKNOWN-APPLIANCE-TYPE";
    pub const BAD_SUBTYPE: &str = "E-BAD-SUBTYPE";

    // wiring
    pub const WIRING_DANGLING: &str = "E-WIRING-DANGLING";
    pub const WIRING_CYCLE: &str = "E-WIRING-CYCLE";
    pub const WIRING_NO_PARENT_OR_ROOT: &str = "E-WIRING-NO-PARENT-OR-ROOT";
    pub const WIRING_BAD_BUILDING: &str = "E-WIRING-BAD-BUILDING";
    pub const REF_NOT_FOUND: &str = "E-REF-NOT-FOUND";
    pub const NO_SITE_METER: &str = "W-NO-SITE-METER";
    pub const DEEP_TREE: &str = "W-DEEP-TREE";
    pub const SHARED_APPLIANCE: &str = "W-SHARED-APPLIANCE";

    // document validation
    pub const UNKNOWN_DEVICE: &str = "E-UNKNOWN-DEVICE";
    pub const UNKNOWN_ROOM: &str = "E-UNKNOWN-ROOM";
    pub const ROOM_VOCAB: &str = "E-ROOM-VOCAB";
    pub const UNKNOWN_APPLIANCE_FIELD: &str = "E-UNKNOWN-APPLIANCE-FIELD";
    pub const SCHEMA_REQUIRED: &str = "E-SCHEMA-REQUIRED";
    pub const SCHEMA_KIND: &str = "E-SCHEMA-KIND";
    pub const SCHEMA_ENUM: &str = "E-SCHEMA-ENUM";
    pub const SCHEMA_BOUNDS: &str = "E-SCHEMA-BOUNDS";
    pub const SCHEMA_PATTERN: &str = "E-SCHEMA-PATTERN";
    pub const SCHEMA_BAD_FRAGMENT: &str = "E-SCHEMA-BAD-FRAGMENT";
    pub const BAD_MODEL_TYPE: &str = "E-BAD-MODEL-TYPE";
    pub const MODEL_NO_PARAMETERS: &str = "E-MODEL-NO-PARAMETERS";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        })
    }
}

/// Source position of a node: file name (when known) and 1-based line/column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Span {
    pub file: Option<Arc<str>>,
    pub line: usize,
    pub col: usize,
}

impl Span {
    pub fn new(file: Option<Arc<str>>, line: usize, col: usize) -> Self {
        Self { file, line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(file) => write!(f, "{}:{}:{}", file, self.line, self.col),
            None => write!(f, "<input>:{}:{}", self.line, self.col),
        }
    }
}

/// Slash-separated field trail into a document, e.g.
/// `buildings/1/elec_meters/2/device_model`.
///
/// Buildings and meters are addressed by their `instance` number, every
/// other sequence by zero-based position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct DocPath(String);

impl DocPath {
    pub fn root() -> Self {
        Self(String::new())
    }

    pub fn join(&self, segment: impl fmt::Display) -> Self {
        if self.0.is_empty() {
            Self(segment.to_string())
        } else {
            Self(format!("{}/{}", self.0, segment))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for DocPath {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl fmt::Display for DocPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str("/")
        } else {
            f.write_str(&self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub path: DocPath,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none", serialize_with = "ser_span")]
    pub span: Option<Span>,
}

fn ser_span<S: serde::Serializer>(span: &Option<Span>, s: S) -> Result<S::Ok, S::Error> {
    match span {
        Some(span) => s.serialize_str(&span.to_string()),
        None => s.serialize_none(),
    }
}

impl Diagnostic {
    pub fn error(code: &'static str, path: DocPath, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            code,
            path,
            message: message.into(),
            span: None,
        }
    }

    pub fn warning(code: &'static str, path: DocPath, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            path,
            message: message.into(),
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
        write!(
            f,
            "{} {} {} \u{2014} {}",
            self.severity, self.code, self.path, self.message
        )?;
        if let Some(span) = &self.span {
            write!(f, " ({span})")?;
        }
        Ok(())
    }
}

/// Ordered outcome of validating one dataset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub errors: usize,
    pub warnings: usize,
}

impl ValidationReport {
    pub fn new(diagnostics: Vec<Diagnostic>) -> Self {
        let errors = diagnostics.iter().filter(|d| d.is_error()).count();
        let warnings = diagnostics.len() - errors;
        Self {
            diagnostics,
            errors,
            warnings,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.errors == 0
    }

    /// Promotes every warning to an error (`--strict`).
    pub fn strict(self) -> Self {
        let diagnostics = self
            .diagnostics
            .into_iter()
            .map(|mut d| {
                d.severity = Severity::Error;
                d
            })
            .collect();
        Self::new(diagnostics)
    }

    pub fn has_code(&self, code: &str) -> bool {
        self.diagnostics.iter().any(|d| d.code == code)
    }

    /// One diagnostic per line followed by a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for d in &self.diagnostics {
            out.push_str(&d.to_string());
            out.push('\n');
        }
        out.push_str(&format!(
            "{} error{}, {} warning{}\n",
            self.errors,
            if self.errors == 1 { "" } else { "s" },
            self.warnings,
            if self.warnings == 1 { "" } else { "s" },
        ));
        out
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::json!({
            "valid": self.is_valid(),
            "errors": self.errors,
            "warnings": self.warnings,
            "diagnostics": self.diagnostics,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Drops repeated `(severity, code, path)` findings, keeping the first.
pub(crate) fn dedup(diags: Vec<Diagnostic>) -> Vec<Diagnostic> {
    let mut seen = std::collections::HashSet::new();
    diags
        .into_iter()
        .filter(|d| seen.insert((d.severity, d.code, d.path.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_join() {
        let p = DocPath::root()
            .join("buildings")
            .join(1)
            .join("elec_meters");
        assert_eq!(p.as_str(), "buildings/1/elec_meters");
        assert_eq!(DocPath::root().to_string(), "/");
    }

    #[test]
    fn report_counts_and_strict() {
        let r = ValidationReport::new(vec![
            Diagnostic::warning(codes::NO_SITE_METER, "buildings/1".into(), "x"),
            Diagnostic::error(codes::UNKNOWN_DEVICE, "a".into(), "y"),
        ]);
        assert_eq!((r.errors, r.warnings), (1, 1));
        assert!(!r.is_valid());
        let s = r.strict();
        assert_eq!((s.errors, s.warnings), (2, 0));
        assert!(ValidationReport::default()
            .to_text()
            .starts_with("0 errors"));
    }

    #[test]
    fn text_line_shape() {
        let d = Diagnostic::error(
            codes::WIRING_CYCLE,
            "buildings/1/elec_meters/2".into(),
            "cycle",
        )
        .with_span(Some(Span::new(Some("building1.yaml".into()), 4, 3)));
        assert_eq!(
            d.to_string(),
            "ERROR E-WIRING-CYCLE buildings/1/elec_meters/2 \u{2014} cycle (building1.yaml:4:3)"
        );
    }
}
