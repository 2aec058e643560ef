//! Typed field extraction from mapping nodes, accumulating diagnostics.

use std::collections::HashSet;

use indexmap::IndexMap;

use super::node::{Mapping, Node, Value};
use crate::diag::{codes, Diagnostic, DocPath};
use crate::model::DateValue;

/// Diagnostic sink shared by one binding pass.
#[derive(Debug, Default)]
pub(crate) struct Sink {
    pub diags: Vec<Diagnostic>,
}

impl Sink {
    pub fn error(
        &mut self,
        code: &'static str,
        path: DocPath,
        node: &Node,
        msg: impl Into<String>,
    ) {
        self.diags
            .push(Diagnostic::error(code, path, msg).with_span(Some(node.span.clone())));
    }

    pub fn warning(
        &mut self,
        code: &'static str,
        path: DocPath,
        node: &Node,
        msg: impl Into<String>,
    ) {
        self.diags
            .push(Diagnostic::warning(code, path, msg).with_span(Some(node.span.clone())));
    }

    pub fn mismatch(&mut self, path: &DocPath, node: &Node, expected: &str) {
        self.error(
            codes::TYPE_MISMATCH,
            path.clone(),
            node,
            format!("expected {expected}, found {}", node.type_name()),
        );
    }
}

/// Converts one node; `None` after reporting a mismatch.
pub(crate) type Conv<T> = fn(&mut Sink, &Node, &DocPath) -> Option<T>;

pub(crate) fn string(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<String> {
    match &n.value {
        Value::Str(s) => Some(s.clone()),
        _ => {
            sink.mismatch(p, n, "string");
            None
        }
    }
}

pub(crate) fn uint(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<u32> {
    match n.value {
        Value::Int(i) if i >= 0 && i <= u32::MAX as i64 => Some(i as u32),
        _ => {
            sink.mismatch(p, n, "non-negative integer");
            None
        }
    }
}

pub(crate) fn int(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<i32> {
    match n.value {
        Value::Int(i) if i32::try_from(i).is_ok() => Some(i as i32),
        _ => {
            sink.mismatch(p, n, "integer");
            None
        }
    }
}

pub(crate) fn real(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<f64> {
    n.as_f64().or_else(|| {
        sink.mismatch(p, n, "number");
        None
    })
}

pub(crate) fn boolean(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<bool> {
    n.as_bool().or_else(|| {
        sink.mismatch(p, n, "boolean");
        None
    })
}

pub(crate) fn date(sink: &mut Sink, n: &Node, p: &DocPath) -> Option<DateValue> {
    match &n.value {
        Value::Int(y) => match i32::try_from(*y) {
            Ok(y) if (0..=9999).contains(&y) => Some(DateValue::Year(y)),
            _ => {
                sink.error(
                    codes::BAD_DATE,
                    p.clone(),
                    n,
                    format!("year {y} out of range"),
                );
                None
            }
        },
        Value::Str(s) => match s.parse() {
            Ok(d) => Some(d),
            Err(_) => {
                sink.error(
                    codes::BAD_DATE,
                    p.clone(),
                    n,
                    format!("`{s}` is not a year or YYYY-MM-DD date"),
                );
                None
            }
        },
        _ => {
            sink.mismatch(p, n, "year or date");
            None
        }
    }
}

pub(crate) fn parsed<T: std::str::FromStr>(
    sink: &mut Sink,
    n: &Node,
    p: &DocPath,
    what: &str,
) -> Option<T> {
    let s = string(sink, n, p)?;
    match s.parse() {
        Ok(v) => Some(v),
        Err(_) => {
            sink.error(
                codes::BAD_ENUM,
                p.clone(),
                n,
                format!("`{s}` is not a valid {what}"),
            );
            None
        }
    }
}

/// Converts each element of a sequence, skipping failures.
pub(crate) fn seq_of<T>(
    sink: &mut Sink,
    n: &Node,
    p: &DocPath,
    mut conv: impl FnMut(&mut Sink, &Node, &DocPath) -> Option<T>,
) -> Vec<T> {
    match n.as_seq() {
        Some(items) => items
            .iter()
            .enumerate()
            .filter_map(|(i, item)| conv(sink, item, &p.join(i)))
            .collect(),
        None => {
            sink.mismatch(p, n, "sequence");
            Vec::new()
        }
    }
}

/// A mapping node being bound field by field; tracks which keys were read.
pub(crate) struct Fields<'a> {
    pub node: &'a Node,
    map: &'a Mapping,
    pub path: DocPath,
    used: HashSet<&'a str>,
}

impl<'a> Fields<'a> {
    pub fn new(sink: &mut Sink, node: &'a Node, path: DocPath) -> Option<Self> {
        match node.as_map() {
            Some(map) => Some(Self {
                node,
                map,
                path,
                used: HashSet::new(),
            }),
            None => {
                sink.mismatch(&path, node, "mapping");
                None
            }
        }
    }

    /// The raw node under `key`; explicit nulls read as absent.
    pub fn raw(&mut self, key: &str) -> Option<&'a Node> {
        let (k, v) = self.map.get_key_value(key)?;
        self.used.insert(k.as_str());
        (!v.is_null()).then_some(v)
    }

    pub fn opt<T>(&mut self, sink: &mut Sink, key: &str, conv: Conv<T>) -> Option<T> {
        let n = self.raw(key)?;
        conv(sink, n, &self.path.join(key))
    }

    pub fn req<T>(&mut self, sink: &mut Sink, key: &str, conv: Conv<T>) -> Option<T> {
        match self.raw(key) {
            Some(n) => conv(sink, n, &self.path.join(key)),
            None => {
                self.missing(sink, key);
                None
            }
        }
    }

    pub fn missing(&self, sink: &mut Sink, key: &str) {
        sink.error(
            codes::MISSING_REQUIRED,
            self.path.join(key),
            self.node,
            format!("required field `{key}` is missing"),
        );
    }

    pub fn list<T>(
        &mut self,
        sink: &mut Sink,
        key: &str,
        conv: impl FnMut(&mut Sink, &Node, &DocPath) -> Option<T>,
    ) -> Vec<T> {
        match self.raw(key) {
            Some(n) => seq_of(sink, n, &self.path.join(key), conv),
            None => Vec::new(),
        }
    }

    pub fn strings(&mut self, sink: &mut Sink, key: &str) -> Vec<String> {
        self.list(sink, key, string)
    }

    /// Remaining unread entries, in document order.
    pub fn rest(self) -> IndexMap<String, Node> {
        self.map
            .iter()
            .filter(|(k, _)| !self.used.contains(k.as_str()))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect()
    }

    /// Warns about every unread field.
    pub fn finish(self, sink: &mut Sink) {
        let path = self.path.clone();
        for (k, v) in self.rest() {
            sink.warning(
                codes::UNKNOWN_FIELD,
                path.join(&k),
                &v,
                format!("unknown field `{k}` ignored"),
            );
        }
    }
}
