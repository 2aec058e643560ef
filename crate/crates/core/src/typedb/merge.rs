//! Prototype-inheritance merge of two mapping nodes.
//!
//! Keys only in the parent are copied unless listed in `do_not_inherit`.
//! Keys in both combine by kind:
//!
//! * sequences become the union of parent and child (parent elements
//!   first, deep-equal duplicates collapsed),
//! * scalars in the child shadow the parent,
//! * mappings merge recursively by the same rules.
//!
//! `do_not_inherit` applies to top-level keys only: a listed key keeps
//! the child's value verbatim, or disappears when the child lacks it.

use thiserror::Error;

use crate::diag::DocPath;
use crate::loader::{Mapping, Node, NodeKind, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot merge {parent} with {child} at `{path}`")]
pub struct MergeError {
    pub path: DocPath,
    pub parent: NodeKind,
    pub child: NodeKind,
}

/// Merges `child` over `parent`. Neither input is modified.
pub fn merge_node(
    parent: &Node,
    child: &Node,
    do_not_inherit: &[String],
) -> Result<Node, MergeError> {
    match (&parent.value, &child.value) {
        (Value::Map(p), Value::Map(c)) => {
            let merged = merge_maps(p, c, do_not_inherit, &DocPath::root())?;
            Ok(Node::new(Value::Map(merged), child.span.clone()))
        }
        _ => Err(MergeError {
            path: DocPath::root(),
            parent: parent.kind(),
            child: child.kind(),
        }),
    }
}

fn merge_maps(
    parent: &Mapping,
    child: &Mapping,
    skip: &[String],
    path: &DocPath,
) -> Result<Mapping, MergeError> {
    let mut out = Mapping::with_capacity(parent.len() + child.len());
    for (key, pv) in parent {
        let skipped = skip.iter().any(|s| s == key);
        match child.get(key) {
            Some(cv) if skipped => {
                out.insert(key.clone(), cv.clone());
            }
            Some(cv) => {
                out.insert(key.clone(), combine(pv, cv, &path.join(key))?);
            }
            None if skipped => {}
            None => {
                out.insert(key.clone(), pv.clone());
            }
        }
    }
    for (key, cv) in child {
        if !parent.contains_key(key) {
            out.insert(key.clone(), cv.clone());
        }
    }
    Ok(out)
}

fn combine(parent: &Node, child: &Node, path: &DocPath) -> Result<Node, MergeError> {
    let value = match (&parent.value, &child.value) {
        (Value::Seq(p), Value::Seq(c)) => Value::Seq(union(p, c)),
        (Value::Map(p), Value::Map(c)) => Value::Map(merge_maps(p, c, &[], path)?),
        _ if parent.kind() == NodeKind::Scalar && child.kind() == NodeKind::Scalar => {
            return Ok(child.clone())
        }
        _ => {
            return Err(MergeError {
                path: path.clone(),
                parent: parent.kind(),
                child: child.kind(),
            })
        }
    };
    Ok(Node::new(value, child.span.clone()))
}

fn union(parent: &[Node], child: &[Node]) -> Vec<Node> {
    let mut out: Vec<Node> = Vec::with_capacity(parent.len() + child.len());
    for item in parent.iter().chain(child) {
        if !out.contains(item) {
            out.push(item.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::loader::{parse_document, Format};

    fn y(s: &str) -> Node {
        parse_document(s.as_bytes(), Format::Yaml).unwrap()
    }

    fn dni(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn disjoint_keys_copy() {
        assert_eq!(
            merge_node(&y("a: 1"), &y("b: 2"), &[]).unwrap(),
            y("{a: 1, b: 2}")
        );
    }

    #[test]
    fn lists_union() {
        assert_eq!(
            merge_node(&y("tags: [x]"), &y("tags: [y]"), &[]).unwrap(),
            y("tags: [x, y]")
        );
        assert_eq!(
            merge_node(&y("tags: [x, y]"), &y("tags: [y, z]"), &[]).unwrap(),
            y("tags: [x, y, z]")
        );
    }

    #[test]
    fn do_not_inherit_drops_parent_key() {
        assert_eq!(
            merge_node(&y("{a: 1, secret: 9}"), &y("a: 2"), &dni(&["secret"])).unwrap(),
            y("a: 2")
        );
        // a listed key the child redefines is taken verbatim, not unioned
        assert_eq!(
            merge_node(&y("xs: [1]"), &y("xs: [2]"), &dni(&["xs"])).unwrap(),
            y("xs: [2]")
        );
    }

    #[test]
    fn nested_mappings_recurse() {
        let p = y("categories: {traditional: cold, electrical: [motor]}");
        let c = y("categories: {size: small, electrical: [compressor]}");
        assert_eq!(
            merge_node(&p, &c, &[]).unwrap(),
            y("categories: {traditional: cold, size: small, electrical: [motor, compressor]}")
        );
    }

    #[test]
    fn do_not_inherit_is_top_level_only() {
        let p = y("outer: {secret: 1, keep: 2}");
        let c = y("outer: {}");
        assert_eq!(merge_node(&p, &c, &dni(&["secret"])).unwrap(), p);
    }

    #[test]
    fn kind_conflict() {
        let err = merge_node(&y("a: {b: 1}"), &y("a: 3"), &[]).unwrap_err();
        assert_eq!(err.path.as_str(), "a");
        assert_eq!(
            (err.parent, err.child),
            (NodeKind::Mapping, NodeKind::Scalar)
        );
        let err = merge_node(&y("a: {b: [1]}"), &y("a: {b: {c: 1}}"), &[]).unwrap_err();
        assert_eq!(err.path.as_str(), "a/b");
        assert!(merge_node(&y("a: 1"), &Node::from(1), &[]).is_err());
    }

    #[test]
    fn scalar_kinds_shadow_each_other() {
        assert_eq!(merge_node(&y("a: 1"), &y("a: x"), &[]).unwrap(), y("a: x"));
        assert_eq!(
            merge_node(&y("a: true"), &y("a: ~"), &[]).unwrap(),
            y("a: ~")
        );
    }

    #[test]
    fn inputs_untouched() {
        let p = y("{a: [1], b: {c: 1}}");
        let c = y("{a: [2], b: {d: 2}}");
        let (p0, c0) = (p.clone(), c.clone());
        let _ = merge_node(&p, &c, &dni(&["b"])).unwrap();
        assert_eq!((p, c), (p0, c0));
    }

    fn leaf() -> impl Strategy<Value = Node> {
        prop_oneof![
            Just(Node::null()),
            any::<bool>().prop_map(Node::from),
            (-3i64..3).prop_map(Node::from),
            "[a-c]".prop_map(Node::from),
        ]
    }

    fn tree() -> impl Strategy<Value = Node> {
        leaf().prop_recursive(3, 24, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 0..4).prop_map(Node::seq),
                prop::collection::vec(("[k-n]", inner), 0..4).prop_map(Node::map),
            ]
        })
    }

    fn mapping() -> impl Strategy<Value = Node> {
        prop::collection::vec(("[k-p]", tree()), 0..5).prop_map(Node::map)
    }

    fn keys(n: &Node) -> BTreeSet<String> {
        n.as_map().unwrap().keys().cloned().collect()
    }

    proptest! {
        #[test]
        fn key_set_law(p in mapping(), c in mapping(), skip in prop::collection::vec("[k-p]", 0..3)) {
            if let Ok(m) = merge_node(&p, &c, &skip) {
                let mut expected: BTreeSet<String> =
                    keys(&p).into_iter().filter(|k| !skip.contains(k)).collect();
                expected.extend(keys(&c));
                prop_assert_eq!(keys(&m), expected);
            }
        }

        #[test]
        fn collisions_follow_kind_rules(p in mapping(), c in mapping()) {
            if let Ok(m) = merge_node(&p, &c, &[]) {
                for (k, cv) in c.as_map().unwrap() {
                    let mv = m.get(k).unwrap();
                    match (p.get(k), cv.kind()) {
                        (Some(pv), NodeKind::Scalar) => { let _ = pv; prop_assert_eq!(mv, cv) }
                        (Some(pv), NodeKind::Sequence) => {
                            let got = mv.as_seq().unwrap();
                            for item in pv.as_seq().unwrap().iter().chain(cv.as_seq().unwrap()) {
                                prop_assert!(got.contains(item));
                            }
                            for item in got {
                                prop_assert!(pv.as_seq().unwrap().contains(item) || cv.as_seq().unwrap().contains(item));
                            }
                        }
                        _ => {}
                    }
                }
            }
        }

        #[test]
        fn identities(p in mapping(), skip in prop::collection::vec("[k-p]", 0..3)) {
            let empty = Node::empty_map();
            prop_assert_eq!(merge_node(&empty, &p, &[]).unwrap(), p.clone());
            let mut stripped = p.as_map().unwrap().clone();
            stripped.retain(|k, _| !skip.contains(k));
            prop_assert_eq!(merge_node(&p, &empty, &skip).unwrap(), Node::from(Value::Map(stripped)));
        }
    }
}
