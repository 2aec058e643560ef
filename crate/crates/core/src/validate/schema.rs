//! A small property-schema language: kind, enum, numeric bounds, pattern,
//! required flag, sequence items and nested properties.
//!
//! Fragments are written as a mapping from property name to rule, e.g.
//!
//! ```yaml
//! screen_size: {type: number, minimum: 0}
//! resolution: {type: string, enum: [SD, HD, UHD]}
//! ```

use std::fmt;

use indexmap::IndexMap;
use regex::Regex;
use serde::{Serialize, Serializer};

use crate::diag::{codes, Diagnostic, DocPath};
use crate::loader::{Node, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    String,
    Integer,
    Number,
    Boolean,
    Sequence,
    Mapping,
}

impl SchemaKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "string" => SchemaKind::String,
            "integer" => SchemaKind::Integer,
            "number" => SchemaKind::Number,
            "boolean" => SchemaKind::Boolean,
            "sequence" | "array" => SchemaKind::Sequence,
            "mapping" | "object" => SchemaKind::Mapping,
            _ => return None,
        })
    }

    fn as_str(&self) -> &'static str {
        match self {
            SchemaKind::String => "string",
            SchemaKind::Integer => "integer",
            SchemaKind::Number => "number",
            SchemaKind::Boolean => "boolean",
            SchemaKind::Sequence => "sequence",
            SchemaKind::Mapping => "mapping",
        }
    }

    fn accepts(&self, node: &Node) -> bool {
        matches!(
            (self, &node.value),
            (SchemaKind::String, Value::Str(_))
                | (SchemaKind::Integer, Value::Int(_))
                | (SchemaKind::Number, Value::Int(_) | Value::Float(_))
                | (SchemaKind::Boolean, Value::Bool(_))
                | (SchemaKind::Sequence, Value::Seq(_))
                | (SchemaKind::Mapping, Value::Map(_))
        )
    }
}

impl fmt::Display for SchemaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for SchemaKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Compiled regular expression that compares and serializes by source text.
#[derive(Debug, Clone)]
pub struct Pattern(Regex);

impl PartialEq for Pattern {
    fn eq(&self, other: &Self) -> bool {
        self.0.as_str() == other.0.as_str()
    }
}

impl Serialize for Pattern {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct PropertyRule {
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub kind: Option<SchemaKind>,
    #[serde(rename = "enum", skip_serializing_if = "Option::is_none")]
    pub enum_values: Option<Vec<Node>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maximum: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<Pattern>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub required: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub items: Option<Box<PropertyRule>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub properties: Option<SchemaFragment>,
}

impl PropertyRule {
    pub fn of_kind(kind: SchemaKind) -> Self {
        Self {
            kind: Some(kind),
            ..Default::default()
        }
    }

    pub fn bounded(mut self, minimum: Option<f64>, maximum: Option<f64>) -> Self {
        self.minimum = minimum;
        self.maximum = maximum;
        self
    }

    pub fn required(mut self) -> Self {
        self.required = true;
        self
    }
}

/// Property name to rule, in declaration order.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
#[serde(transparent)]
pub struct SchemaFragment {
    pub properties: IndexMap<String, PropertyRule>,
}

impl SchemaFragment {
    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&PropertyRule> {
        self.properties.get(name)
    }

    pub fn with(mut self, name: impl Into<String>, rule: PropertyRule) -> Self {
        self.properties.insert(name.into(), rule);
        self
    }

    /// Parses a fragment document, reporting malformed rules.
    pub fn from_node(node: &Node, path: &DocPath) -> (SchemaFragment, Vec<Diagnostic>) {
        let mut diags = Vec::new();
        let fragment = parse_fragment(node, path, &mut diags);
        (fragment, diags)
    }

    /// Checks `minimum <= maximum` on every rule, recursively.
    pub fn check_local_invariants(&self, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (name, rule) in &self.properties {
            check_rule(rule, &path.join(name), &mut out);
        }
        out
    }
}

fn check_rule(rule: &PropertyRule, path: &DocPath, out: &mut Vec<Diagnostic>) {
    if let (Some(lo), Some(hi)) = (rule.minimum, rule.maximum) {
        if lo > hi {
            out.push(Diagnostic::error(
                codes::SCHEMA_BAD_FRAGMENT,
                path.clone(),
                format!("minimum {lo} exceeds maximum {hi}"),
            ));
        }
    }
    if let Some(items) = &rule.items {
        check_rule(items, &path.join("items"), out);
    }
    if let Some(props) = &rule.properties {
        out.extend(props.check_local_invariants(&path.join("properties")));
    }
}

fn bad_fragment(diags: &mut Vec<Diagnostic>, node: &Node, path: DocPath, msg: String) {
    diags.push(
        Diagnostic::error(codes::SCHEMA_BAD_FRAGMENT, path, msg).with_span(Some(node.span.clone())),
    );
}

fn parse_fragment(node: &Node, path: &DocPath, diags: &mut Vec<Diagnostic>) -> SchemaFragment {
    let mut fragment = SchemaFragment::default();
    if node.is_null() {
        return fragment;
    }
    let Some(map) = node.as_map() else {
        bad_fragment(
            diags,
            node,
            path.clone(),
            format!(
                "expected a mapping of property rules, found {}",
                node.type_name()
            ),
        );
        return fragment;
    };
    for (name, rule_node) in map {
        let rule = parse_rule(rule_node, &path.join(name), diags);
        fragment.properties.insert(name.clone(), rule);
    }
    fragment
}

fn parse_rule(node: &Node, path: &DocPath, diags: &mut Vec<Diagnostic>) -> PropertyRule {
    let mut rule = PropertyRule::default();
    let Some(map) = node.as_map() else {
        bad_fragment(
            diags,
            node,
            path.clone(),
            format!("expected a rule mapping, found {}", node.type_name()),
        );
        return rule;
    };
    for (key, value) in map {
        let kp = path.join(key);
        match key.as_str() {
            "type" => match value.as_str().and_then(SchemaKind::parse) {
                Some(k) => rule.kind = Some(k),
                None => bad_fragment(diags, value, kp, "unsupported `type`".into()),
            },
            "enum" => match value.as_seq() {
                Some(items) => rule.enum_values = Some(items.to_vec()),
                None => bad_fragment(diags, value, kp, "`enum` must be a sequence".into()),
            },
            "minimum" => match value.as_f64() {
                Some(v) => rule.minimum = Some(v),
                None => bad_fragment(diags, value, kp, "`minimum` must be a number".into()),
            },
            "maximum" => match value.as_f64() {
                Some(v) => rule.maximum = Some(v),
                None => bad_fragment(diags, value, kp, "`maximum` must be a number".into()),
            },
            "pattern" => match value.as_str().map(Regex::new) {
                Some(Ok(re)) => rule.pattern = Some(Pattern(re)),
                Some(Err(e)) => bad_fragment(diags, value, kp, format!("invalid pattern: {e}")),
                None => bad_fragment(diags, value, kp, "`pattern` must be a string".into()),
            },
            "required" => match value.as_bool() {
                Some(b) => rule.required = b,
                None => bad_fragment(diags, value, kp, "`required` must be a boolean".into()),
            },
            "items" => rule.items = Some(Box::new(parse_rule(value, &kp, diags))),
            "properties" => rule.properties = Some(parse_fragment(value, &kp, diags)),
            "description" | "title" => {}
            other => diags.push(
                Diagnostic::warning(
                    codes::UNKNOWN_FIELD,
                    kp,
                    format!("unsupported schema keyword `{other}` ignored"),
                )
                .with_span(Some(value.span.clone())),
            ),
        }
    }
    rule
}

/// Checks the properties of a mapping node against `fragment`.
///
/// Properties the fragment does not mention are not reported here.
pub fn validate_against_fragment(
    node: &Node,
    fragment: &SchemaFragment,
    path: &DocPath,
) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let Some(map) = node.as_map() else {
        out.push(
            Diagnostic::error(
                codes::SCHEMA_KIND,
                path.clone(),
                format!("expected mapping, found {}", node.type_name()),
            )
            .with_span(Some(node.span.clone())),
        );
        return out;
    };
    for (name, rule) in &fragment.properties {
        let p = path.join(name);
        match map.get(name) {
            Some(v) => validate_value(v, rule, &p, &mut out),
            None if rule.required => out.push(
                Diagnostic::error(
                    codes::SCHEMA_REQUIRED,
                    p,
                    format!("required property `{name}` is missing"),
                )
                .with_span(Some(node.span.clone())),
            ),
            None => {}
        }
    }
    out
}

/// Checks one value against one rule.
pub fn validate_value(node: &Node, rule: &PropertyRule, path: &DocPath, out: &mut Vec<Diagnostic>) {
    let span = Some(node.span.clone());
    if let Some(kind) = rule.kind {
        if !kind.accepts(node) {
            out.push(
                Diagnostic::error(
                    codes::SCHEMA_KIND,
                    path.clone(),
                    format!("expected {kind}, found {}", node.type_name()),
                )
                .with_span(span),
            );
            return;
        }
    }
    if let Some(allowed) = &rule.enum_values {
        if !allowed.contains(node) {
            out.push(
                Diagnostic::error(
                    codes::SCHEMA_ENUM,
                    path.clone(),
                    format!("value {} is not one of the allowed values", node.to_json()),
                )
                .with_span(span.clone()),
            );
        }
    }
    if let Some(v) = node.as_f64() {
        let below = rule.minimum.is_some_and(|lo| v < lo);
        let above = rule.maximum.is_some_and(|hi| v > hi);
        if below || above {
            out.push(
                Diagnostic::error(
                    codes::SCHEMA_BOUNDS,
                    path.clone(),
                    format!(
                        "value {v} outside [{}, {}]",
                        rule.minimum.map_or("-inf".to_string(), |x| x.to_string()),
                        rule.maximum.map_or("inf".to_string(), |x| x.to_string())
                    ),
                )
                .with_span(span.clone()),
            );
        }
    }
    if let (Some(pattern), Some(s)) = (&rule.pattern, node.as_str()) {
        if !pattern.0.is_match(s) {
            out.push(
                Diagnostic::error(
                    codes::SCHEMA_PATTERN,
                    path.clone(),
                    format!("`{s}` does not match /{}/", pattern.0.as_str()),
                )
                .with_span(span.clone()),
            );
        }
    }
    if let (Some(items), Some(seq)) = (&rule.items, node.as_seq()) {
        for (i, item) in seq.iter().enumerate() {
            validate_value(item, items, &path.join(i), out);
        }
    }
    if let Some(props) = &rule.properties {
        if node.as_map().is_some() {
            out.extend(validate_against_fragment(node, props, path));
        }
    }
}
