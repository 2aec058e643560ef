use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;
use yaml_rust2::parser::{Event, MarkedEventReceiver, Parser, Tag};
use yaml_rust2::scanner::{Marker, TScalarStyle};
use yaml_rust2::Yaml;

use super::node::{Mapping, Node, Value};
use crate::diag::{codes, Diagnostic, DocPath, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Yaml,
    Json,
}

impl Format {
    /// Format implied by a file extension (`yaml`, `yml` or `json`).
    pub fn from_extension(ext: &str) -> Option<Self> {
        match ext {
            "yaml" | "yml" => Some(Format::Yaml),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParseError {
    #[error("{span}: malformed document: {message}")]
    Syntax { span: Span, message: String },
    #[error("{span}: duplicate mapping key `{key}`")]
    DuplicateKey { span: Span, key: String },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => codes::PARSE,
            ParseError::DuplicateKey { .. } => codes::DUP_KEY,
        }
    }

    pub fn span(&self) -> &Span {
        match self {
            ParseError::Syntax { span, .. } | ParseError::DuplicateKey { span, .. } => span,
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let message = match self {
            ParseError::Syntax { message, .. } => message.clone(),
            ParseError::DuplicateKey { key, .. } => format!("duplicate mapping key `{key}`"),
        };
        Diagnostic::error(self.code(), DocPath::root(), message)
            .with_span(Some(self.span().clone()))
    }
}

/// Parses one YAML or JSON document into a [`Node`] tree.
///
/// An empty document yields an empty mapping.
pub fn parse_document(bytes: &[u8], format: Format) -> Result<Node, ParseError> {
    parse_document_named(bytes, format, None)
}

/// Like [`parse_document`], recording `file` in every span.
pub fn parse_document_named(
    bytes: &[u8],
    format: Format,
    file: Option<&str>,
) -> Result<Node, ParseError> {
    let file: Option<Arc<str>> = file.map(Arc::from);
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|b| **b == b'\n')
            .count()
            + 1;
        ParseError::Syntax {
            span: Span::new(file.clone(), line, 1),
            message: "document is not valid UTF-8".into(),
        }
    })?;

    if format == Format::Json && !text.trim().is_empty() {
        // The YAML parser accepts a superset of JSON, so strict syntax is
        // checked first.
        if let Err(e) = serde_json::from_str::<serde::de::IgnoredAny>(text) {
            return Err(ParseError::Syntax {
                span: Span::new(file.clone(), e.line(), e.column()),
                message: e.to_string(),
            });
        }
    }

    let mut builder = Builder {
        file: file.clone(),
        format,
        stack: Vec::new(),
        anchors: HashMap::new(),
        root: None,
        error: None,
    };
    let mut parser = Parser::new_from_str(text);
    parser
        .load(&mut builder, false)
        .map_err(|e| ParseError::Syntax {
            span: Span::new(file.clone(), e.marker().line(), e.marker().col() + 1),
            message: e.info().to_string(),
        })?;
    if let Some(err) = builder.error {
        return Err(err);
    }
    Ok(builder.root.unwrap_or_else(|| Node {
        value: Value::Map(Mapping::new()),
        span: Span::new(file, 1, 1),
    }))
}

enum Frame {
    Seq {
        items: Vec<Node>,
        span: Span,
        anchor: usize,
    },
    Map {
        entries: Mapping,
        span: Span,
        anchor: usize,
        key: Option<String>,
    },
}

struct Builder {
    file: Option<Arc<str>>,
    format: Format,
    stack: Vec<Frame>,
    anchors: HashMap<usize, Node>,
    root: Option<Node>,
    error: Option<ParseError>,
}

impl Builder {
    fn span(&self, mark: Marker) -> Span {
        Span::new(self.file.clone(), mark.line(), mark.col() + 1)
    }

    fn complete(&mut self, node: Node, anchor: usize) {
        if anchor > 0 {
            self.anchors.insert(anchor, node.clone());
        }
        match self.stack.last_mut() {
            None => {
                if self.root.is_none() {
                    self.root = Some(node);
                }
            }
            Some(Frame::Seq { items, .. }) => items.push(node),
            Some(Frame::Map { entries, key, .. }) => match key.take() {
                None => {
                    let k = match &node.value {
                        Value::Str(s) => s.clone(),
                        Value::Int(i) => i.to_string(),
                        Value::Float(f) => f.to_string(),
                        Value::Bool(b) => b.to_string(),
                        Value::Null => "null".to_string(),
                        Value::Seq(_) | Value::Map(_) => {
                            self.error = Some(ParseError::Syntax {
                                span: node.span,
                                message: "mapping keys must be scalars".into(),
                            });
                            return;
                        }
                    };
                    if entries.contains_key(&k) {
                        self.error = Some(ParseError::DuplicateKey {
                            span: node.span,
                            key: k,
                        });
                        return;
                    }
                    *key = Some(k);
                }
                Some(k) => {
                    entries.insert(k, node);
                }
            },
        }
    }

    fn scalar(&self, text: String, style: TScalarStyle, tag: Option<&Tag>) -> Value {
        if style != TScalarStyle::Plain {
            return Value::Str(text);
        }
        if let Some(tag) = tag {
            if tag.suffix == "str" {
                return Value::Str(text);
            }
        }
        match self.format {
            Format::Json => resolve_json_scalar(text),
            Format::Yaml => match Yaml::from_str(&text) {
                Yaml::Null => Value::Null,
                Yaml::Boolean(b) => Value::Bool(b),
                Yaml::Integer(i) => Value::Int(i),
                real @ Yaml::Real(_) => Value::Float(real.as_f64().unwrap_or(f64::NAN)),
                _ => Value::Str(text),
            },
        }
    }
}

fn resolve_json_scalar(text: String) -> Value {
    match text.as_str() {
        "null" => Value::Null,
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        t => {
            let integral = !t.contains(['.', 'e', 'E']);
            match (integral, t.parse::<i64>(), t.parse::<f64>()) {
                (true, Ok(i), _) => Value::Int(i),
                (_, _, Ok(f)) => Value::Float(f),
                _ => Value::Str(text),
            }
        }
    }
}

impl MarkedEventReceiver for Builder {
    fn on_event(&mut self, ev: Event, mark: Marker) {
        if self.error.is_some() {
            return;
        }
        match ev {
            Event::Scalar(text, style, anchor, tag) => {
                let value = self.scalar(text, style, tag.as_ref());
                let node = Node::new(value, self.span(mark));
                self.complete(node, anchor);
            }
            Event::SequenceStart(anchor, _) => self.stack.push(Frame::Seq {
                items: Vec::new(),
                span: self.span(mark),
                anchor,
            }),
            Event::MappingStart(anchor, _) => self.stack.push(Frame::Map {
                entries: Mapping::new(),
                span: self.span(mark),
                anchor,
                key: None,
            }),
            Event::SequenceEnd | Event::MappingEnd => match self.stack.pop() {
                Some(Frame::Seq {
                    items,
                    span,
                    anchor,
                }) => self.complete(Node::new(Value::Seq(items), span), anchor),
                Some(Frame::Map {
                    entries,
                    span,
                    anchor,
                    ..
                }) => self.complete(Node::new(Value::Map(entries), span), anchor),
                None => {}
            },
            Event::Alias(id) => match self.anchors.get(&id) {
                Some(node) => {
                    let mut node = node.clone();
                    node.span = self.span(mark);
                    self.complete(node, 0);
                }
                None => {
                    self.error = Some(ParseError::Syntax {
                        span: self.span(mark),
                        message: format!("unknown alias {id}"),
                    })
                }
            },
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn yaml(s: &str) -> Result<Node, ParseError> {
        parse_document(s.as_bytes(), Format::Yaml)
    }

    #[test]
    fn integer_scalar() {
        let n = yaml("instance: 1").unwrap();
        assert_eq!(n, Node::map([("instance", Node::from(1))]));
        assert_eq!(n.get("instance").unwrap().span.line, 1);
    }

    #[test]
    fn empty_is_empty_mapping() {
        assert_eq!(yaml("").unwrap(), Node::empty_map());
        assert_eq!(yaml("# just a comment\n").unwrap(), Node::empty_map());
        assert_eq!(
            parse_document(b"  ", Format::Json).unwrap(),
            Node::empty_map()
        );
    }

    #[test]
    fn duplicate_key() {
        let err = yaml("{a: 1, a: 2}").unwrap_err();
        assert_eq!(err.code(), codes::DUP_KEY);
        let err = parse_document(br#"{"a": 1, "a": 2}"#, Format::Json).unwrap_err();
        assert_eq!(err.code(), codes::DUP_KEY);
    }

    #[test]
    fn malformed_reports_position() {
        let err = yaml("a: [1,\n").unwrap_err();
        assert_eq!(err.code(), codes::PARSE);
        assert_eq!(err.span().line, 2);
        let err = parse_document(b"{\"a\": 1,\n}", Format::Json).unwrap_err();
        assert_eq!(err.code(), codes::PARSE);
        assert_eq!(err.span().line, 2);
    }

    #[test]
    fn lexical_kinds_survive() {
        let n = yaml("a: '1'\nb: 1\nc: 1.5\nd: true\ne: ~\nf: 2012-01-01\ng: !!str 7\n").unwrap();
        assert_eq!(n.get("a").unwrap().as_str(), Some("1"));
        assert_eq!(n.get("b").unwrap().as_i64(), Some(1));
        assert_eq!(n.get("c").unwrap().as_f64(), Some(1.5));
        assert_eq!(n.get("d").unwrap().as_bool(), Some(true));
        assert!(n.get("e").unwrap().is_null());
        assert_eq!(n.get("f").unwrap().as_str(), Some("2012-01-01"));
        assert_eq!(n.get("g").unwrap().as_str(), Some("7"));
    }

    #[test]
    fn json_numbers() {
        let n = parse_document(
            b"{\n\t\"a\": [1, 1.0, 2.5e-7, -3],\n\t\"b\": \"x\"\n}",
            Format::Json,
        )
        .unwrap();
        let a = n.get("a").unwrap().as_seq().unwrap();
        assert_eq!(a[0], Node::from(1));
        assert_eq!(a[1], Node::from(1.0));
        assert_eq!(a[2], Node::from(2.5e-7));
        assert_eq!(a[3], Node::from(-3));
        assert_eq!(n.get("b").unwrap().span.line, 3);
    }

    #[test]
    fn anchors_and_aliases() {
        let n = yaml("a: &x {k: 1}\nb: *x\n").unwrap();
        assert_eq!(n.get("a"), n.get("b"));
    }

    #[test]
    fn file_name_in_span() {
        let n = parse_document_named(b"a:\n  b: 2\n", Format::Yaml, Some("dataset.yaml")).unwrap();
        let b = n.get("a").unwrap().get("b").unwrap();
        assert_eq!(b.span.file.as_deref(), Some("dataset.yaml"));
        assert_eq!(b.span.line, 2);
    }
}
