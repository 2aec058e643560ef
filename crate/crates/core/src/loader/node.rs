use std::fmt;

use indexmap::IndexMap;
use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};

use crate::diag::Span;

pub type Mapping = IndexMap<String, Node>;

/// A parsed document node with its source position.
///
/// Equality is structural: spans are ignored, and mappings compare
/// independent of key order.
#[derive(Debug, Clone)]
pub struct Node {
    pub value: Value,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Seq(Vec<Node>),
    Map(Mapping),
}

/// Coarse node kind used by the inheritance merge rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Scalar,
    Sequence,
    Mapping,
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NodeKind::Scalar => "scalar",
            NodeKind::Sequence => "sequence",
            NodeKind::Mapping => "mapping",
        })
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Node {
    pub fn new(value: Value, span: Span) -> Self {
        Self { value, span }
    }

    pub fn null() -> Self {
        Value::Null.into()
    }

    pub fn empty_map() -> Self {
        Value::Map(Mapping::new()).into()
    }

    pub fn map<K: Into<String>>(entries: impl IntoIterator<Item = (K, Node)>) -> Self {
        Value::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect()).into()
    }

    pub fn seq(items: impl IntoIterator<Item = Node>) -> Self {
        Value::Seq(items.into_iter().collect()).into()
    }

    pub fn kind(&self) -> NodeKind {
        match self.value {
            Value::Seq(_) => NodeKind::Sequence,
            Value::Map(_) => NodeKind::Mapping,
            _ => NodeKind::Scalar,
        }
    }

    /// Human name of the lexical kind, for mismatch messages.
    pub fn type_name(&self) -> &'static str {
        match self.value {
            Value::Null => "null",
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Float(_) => "number",
            Value::Str(_) => "string",
            Value::Seq(_) => "sequence",
            Value::Map(_) => "mapping",
        }
    }

    pub fn as_map(&self) -> Option<&Mapping> {
        match &self.value {
            Value::Map(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Node]> {
        match &self.value {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match &self.value {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self.value {
            Value::Int(i) => Some(i),
            _ => None,
        }
    }

    /// Integers widen to reals; strings never coerce.
    pub fn as_f64(&self) -> Option<f64> {
        match self.value {
            Value::Int(i) => Some(i as f64),
            Value::Float(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.value {
            Value::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self.value, Value::Null)
    }

    pub fn get(&self, key: &str) -> Option<&Node> {
        self.as_map().and_then(|m| m.get(key))
    }

    /// Converts to a `serde_json::Value` (key order follows the mapping).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("node serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Self {
        use serde_json::Value as J;
        let v = match value {
            J::Null => Value::Null,
            J::Bool(b) => Value::Bool(*b),
            J::Number(n) => match n.as_i64() {
                Some(i) => Value::Int(i),
                None => Value::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            J::String(s) => Value::Str(s.clone()),
            J::Array(a) => Value::Seq(a.iter().map(Node::from_json).collect()),
            J::Object(o) => Value::Map(
                o.iter()
                    .map(|(k, v)| (k.clone(), Node::from_json(v)))
                    .collect(),
            ),
        };
        v.into()
    }
}

impl From<Value> for Node {
    fn from(value: Value) -> Self {
        Node {
            value,
            span: Span::default(),
        }
    }
}

impl From<&str> for Node {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned()).into()
    }
}

impl From<String> for Node {
    fn from(s: String) -> Self {
        Value::Str(s).into()
    }
}

impl From<i64> for Node {
    fn from(i: i64) -> Self {
        Value::Int(i).into()
    }
}

impl From<f64> for Node {
    fn from(f: f64) -> Self {
        Value::Float(f).into()
    }
}

impl From<bool> for Node {
    fn from(b: bool) -> Self {
        Value::Bool(b).into()
    }
}

impl Serialize for Node {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.value {
            Value::Null => s.serialize_unit(),
            Value::Bool(b) => s.serialize_bool(*b),
            Value::Int(i) => s.serialize_i64(*i),
            Value::Float(f) => s.serialize_f64(*f),
            Value::Str(v) => s.serialize_str(v),
            Value::Seq(items) => {
                let mut seq = s.serialize_seq(Some(items.len()))?;
                for item in items {
                    seq.serialize_element(item)?;
                }
                seq.end()
            }
            Value::Map(m) => {
                let mut map = s.serialize_map(Some(m.len()))?;
                for (k, v) in m {
                    map.serialize_entry(k, v)?;
                }
                map.end()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equality_ignores_span_and_order() {
        let a = Node::map([("x", Node::from(1)), ("y", Node::from("s"))]);
        let mut b = Node::map([("y", Node::from("s")), ("x", Node::from(1))]);
        b.span = Span::new(None, 9, 9);
        assert_eq!(a, b);
        assert_ne!(Node::from(1), Node::from(1.0));
    }

    #[test]
    fn json_conversion() {
        let j = serde_json::json!({"a": [1, 2.5, null, true], "b": {"c": "d"}});
        let n = Node::from_json(&j);
        assert_eq!(n.to_json(), j);
        assert_eq!(n.get("a").unwrap().kind(), NodeKind::Sequence);
    }
}
