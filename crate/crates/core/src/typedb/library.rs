use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::Serialize;
use thiserror::Error;

use super::resolve::ResolvedApplianceType;
use super::seed;
use crate::diag::{codes, Diagnostic, DocPath};
use crate::loader::fields::Sink;
use crate::loader::{
    bind_appliance_type, load_document, parse_document_named, Format, LoadError, Node, Value,
};
use crate::model::{appliance_type_tree, Appliance, ApplianceType};

/// Term sets for the set-valued category taxonomies.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Taxonomies {
    pub electrical: BTreeSet<String>,
    pub google_shopping: BTreeSet<String>,
}

/// Unbound common-metadata documents.
#[derive(Debug, Clone, Default)]
pub struct LibraryDocs {
    pub types: Vec<Node>,
    pub rooms: Option<Node>,
    pub taxonomies: Option<Node>,
}

impl LibraryDocs {
    /// The documents compiled into this crate.
    pub fn seed() -> Self {
        let parse = |(name, text): &(&str, &str)| {
            parse_document_named(text.as_bytes(), Format::Yaml, Some(name))
                .expect("seed document parses")
        };
        LibraryDocs {
            types: seed::TYPES.iter().map(parse).collect(),
            rooms: Some(parse(&seed::ROOMS)),
            taxonomies: Some(parse(&seed::TAXONOMIES)),
        }
    }

    /// Reads `central_metadata/appliance_types/*` plus `vocab/rooms.*` and
    /// `vocab/taxonomies.*` under `root`. Missing parts are left empty.
    pub fn read_folder(root: &Path) -> Result<Self, LoadError> {
        if !root.is_dir() {
            return Err(LoadError::Io {
                path: root.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            });
        }
        let mut docs = LibraryDocs::default();
        let types_dir = root.join("central_metadata").join("appliance_types");
        if types_dir.is_dir() {
            for file in document_files(&types_dir)? {
                docs.types.push(load_document(&file)?);
            }
        }
        let vocab = root.join("vocab");
        docs.rooms = find_document(&vocab, "rooms")
            .map(|p| load_document(&p))
            .transpose()?;
        docs.taxonomies = find_document(&vocab, "taxonomies")
            .map(|p| load_document(&p))
            .transpose()?;
        Ok(docs)
    }

    /// Lays `other` over `self`: types with the same name are replaced
    /// wholesale, new types appended, vocabulary terms added.
    pub fn overlay(mut self, other: LibraryDocs) -> Self {
        for t in other.types {
            let name = t.get("name").and_then(Node::as_str).map(str::to_owned);
            let slot = name.as_deref().and_then(|n| {
                self.types
                    .iter()
                    .position(|s| s.get("name").and_then(Node::as_str) == Some(n))
            });
            match slot {
                Some(i) => self.types[i] = t,
                None => self.types.push(t),
            }
        }
        self.rooms = union_terms(self.rooms, other.rooms);
        self.taxonomies = match (self.taxonomies, other.taxonomies) {
            (
                Some(Node {
                    value: Value::Map(mut base),
                    span,
                }),
                Some(Node {
                    value: Value::Map(top),
                    ..
                }),
            ) => {
                for (k, v) in top {
                    let merged = union_terms(base.shift_remove(&k), Some(v));
                    base.insert(k, merged.unwrap_or_else(Node::null));
                }
                Some(Node::new(Value::Map(base), span))
            }
            (base, top) => top.or(base),
        };
        self
    }
}

fn union_terms(base: Option<Node>, top: Option<Node>) -> Option<Node> {
    match (base, top) {
        (
            Some(Node {
                value: Value::Seq(mut items),
                span,
            }),
            Some(Node {
                value: Value::Seq(more),
                ..
            }),
        ) => {
            for item in more {
                if !items.contains(&item) {
                    items.push(item);
                }
            }
            Some(Node::new(Value::Seq(items), span))
        }
        (base, top) => top.or(base),
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> LoadError + '_ {
    move |source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn document_files(dir: &Path) -> Result<Vec<PathBuf>, LoadError> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io(dir))? {
        let path = entry.map_err(io(dir))?.path();
        let known = path
            .extension()
            .and_then(|e| e.to_str())
            .and_then(Format::from_extension)
            .is_some();
        if known && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn find_document(dir: &Path, stem: &str) -> Option<PathBuf> {
    ["yaml", "yml", "json"]
        .iter()
        .map(|ext| dir.join(format!("{stem}.{ext}")))
        .find(|p| p.is_file())
}

/// Where to load the type library from.
#[derive(Debug, Clone)]
pub enum LibrarySource {
    Seed,
    Folder(PathBuf),
    /// The seed with a folder's types laid over it.
    SeedWithOverlay(PathBuf),
}

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("type library is invalid: {}", summary(.0))]
    Invalid(Vec<Diagnostic>),
}

fn summary(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl LibraryError {
    pub fn code(&self) -> &'static str {
        match self {
            LibraryError::Load(e) => e.code(),
            LibraryError::Invalid(d) => d.first().map_or(codes::TYPE_NOT_FOUND, |d| d.code),
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            LibraryError::Load(_) => Vec::new(),
            LibraryError::Invalid(d) => d.clone(),
        }
    }
}

pub fn load_type_library(source: &LibrarySource) -> Result<TypeLibrary, LibraryError> {
    match source {
        LibrarySource::Seed => Ok(TypeLibrary::seed()),
        LibrarySource::Folder(p) => TypeLibrary::from_docs(LibraryDocs::read_folder(p)?),
        LibrarySource::SeedWithOverlay(p) => {
            TypeLibrary::from_docs(LibraryDocs::seed().overlay(LibraryDocs::read_folder(p)?))
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct TypeEntry {
    pub raw: Node,
    pub def: ApplianceType,
}

/// The appliance type library with its vocabularies. Immutable after
/// construction; resolution results are memoized behind a lock.
#[derive(Debug)]
pub struct TypeLibrary {
    pub(crate) entries: BTreeMap<String, TypeEntry>,
    rooms: BTreeSet<String>,
    taxonomies: Taxonomies,
    children: BTreeMap<String, Vec<String>>,
    content: BTreeMap<String, Vec<Diagnostic>>,
    pub(crate) cache: RwLock<HashMap<String, Arc<ResolvedApplianceType>>>,
}

pub fn type_path(name: &str) -> DocPath {
    DocPath::root().join("library").join(name)
}

impl TypeLibrary {
    pub fn seed() -> Self {
        Self::from_docs(LibraryDocs::seed()).expect("built-in library is consistent")
    }

    /// Binds and cross-checks a set of documents. Structural problems
    /// (malformed documents, dangling or cyclic references, duplicate
    /// vocabulary) fail the load; content problems such as unnormalized
    /// priors are kept per type, see [`TypeLibrary::content_diagnostics`].
    pub fn from_docs(docs: LibraryDocs) -> Result<Self, LibraryError> {
        let mut fatal = Vec::new();
        let mut content: BTreeMap<String, Vec<Diagnostic>> = BTreeMap::new();
        let mut entries = BTreeMap::new();

        for (i, raw) in docs.types.into_iter().enumerate() {
            let path = match raw.get("name").and_then(Node::as_str) {
                Some(n) => type_path(n),
                None => DocPath::root().join("library").join(i),
            };
            let mut sink = Sink::default();
            let def = bind_appliance_type(&mut sink, &raw, &path);
            let (errors, warnings): (Vec<_>, Vec<_>) =
                sink.diags.into_iter().partition(Diagnostic::is_error);
            fatal.extend(errors);
            let Some(def) = def else { continue };
            content
                .entry(def.name.clone())
                .or_default()
                .extend(warnings);
            if entries.contains_key(&def.name) {
                fatal.push(
                    Diagnostic::error(
                        codes::VOCAB_DUP,
                        path,
                        format!("type `{}` is defined twice", def.name),
                    )
                    .with_span(Some(raw.span.clone())),
                );
                continue;
            }
            entries.insert(def.name.clone(), TypeEntry { raw, def });
        }

        let rooms = terms(
            docs.rooms.as_ref(),
            &DocPath::root().join("vocab").join("rooms"),
            &mut fatal,
        );
        let taxonomies = taxonomies(docs.taxonomies.as_ref(), &mut fatal, &mut content);

        for (name, entry) in &entries {
            if let Some(parent) = &entry.def.parent {
                if !entries.contains_key(parent) {
                    fatal.push(
                        Diagnostic::error(
                            codes::TYPE_UNKNOWN_PARENT,
                            type_path(name).join("parent"),
                            format!("parent `{parent}` is not a known type"),
                        )
                        .with_span(entry.raw.get("parent").map(|n| n.span.clone())),
                    );
                }
            }
        }
        fatal.extend(parent_cycles(&entries));
        if !fatal.is_empty() {
            return Err(LibraryError::Invalid(fatal));
        }

        let mut children: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (name, entry) in &entries {
            if let Some(parent) = &entry.def.parent {
                children
                    .entry(parent.clone())
                    .or_default()
                    .push(name.clone());
            }
        }

        let mut lib = TypeLibrary {
            entries,
            rooms,
            taxonomies,
            children,
            content: BTreeMap::new(),
            cache: RwLock::new(HashMap::new()),
        };
        fatal.extend(lib.component_references());
        fatal.extend(lib.component_cycles());
        if !fatal.is_empty() {
            return Err(LibraryError::Invalid(fatal));
        }
        for (name, entry) in &lib.entries {
            let path = type_path(name);
            let found = content.entry(name.clone()).or_default();
            found.extend(appliance_type_tree(&entry.def, &path));
            found.extend(
                entry
                    .def
                    .additional_properties
                    .check_local_invariants(&path.join("additional_properties")),
            );
            found.extend(lib.category_terms(&entry.def, &path));
            if let Err(e) = lib.resolve_type(name) {
                found.push(e.to_diagnostic(&path));
            }
        }
        content.retain(|_, d| !d.is_empty());
        lib.content = content;
        Ok(lib)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    /// The type as declared, before inheritance.
    pub fn get(&self, name: &str) -> Option<&ApplianceType> {
        self.entries.get(name).map(|e| &e.def)
    }

    /// The declaring document of a type.
    pub fn raw(&self, name: &str) -> Option<&Node> {
        self.entries.get(name).map(|e| &e.raw)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rooms(&self) -> &BTreeSet<String> {
        &self.rooms
    }

    pub fn taxonomies(&self) -> &Taxonomies {
        &self.taxonomies
    }

    /// Direct children, in name order.
    pub fn children(&self, name: &str) -> &[String] {
        self.children.get(name).map_or(&[], Vec::as_slice)
    }

    /// All transitive children, breadth first.
    pub fn descendants(&self, name: &str) -> Vec<String> {
        let mut out: Vec<String> = self.children(name).to_vec();
        let mut i = 0;
        while i < out.len() {
            let next = self.children(&out[i]).to_vec();
            out.extend(next);
            i += 1;
        }
        out
    }

    /// Whether `name` is `ancestor` or inherits from it.
    pub fn is_a(&self, name: &str, ancestor: &str) -> bool {
        let mut cur = Some(name);
        while let Some(n) = cur {
            if n == ancestor {
                return true;
            }
            cur = self.get(n).and_then(|t| t.parent.as_deref());
        }
        false
    }

    /// Content diagnostics for one type's own declaration.
    pub fn content_diagnostics(&self, name: &str) -> &[Diagnostic] {
        self.content.get(name).map_or(&[], Vec::as_slice)
    }

    /// Content diagnostics for every type, in name order.
    pub fn all_content_diagnostics(&self) -> impl Iterator<Item = &Diagnostic> {
        self.content.values().flatten()
    }

    /// Types a container may hold: the declared `allowed_components` and
    /// the default components' types, each with all its descendants.
    pub fn allowed_components(&self, name: &str) -> Result<BTreeSet<String>, super::TypeDbError> {
        let resolved = self.resolve_type(name)?;
        let mut roots: Vec<String> = resolved
            .properties
            .get("allowed_components")
            .and_then(Node::as_seq)
            .unwrap_or(&[])
            .iter()
            .filter_map(|n| n.as_str().map(str::to_owned))
            .collect();
        roots.extend(
            resolved
                .definition
                .components
                .iter()
                .map(|c| c.type_name.clone()),
        );
        let mut out = BTreeSet::new();
        for r in roots {
            if self.contains(&r) {
                out.extend(self.descendants(&r));
                out.insert(r);
            }
        }
        Ok(out)
    }

    fn component_references(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        for (name, entry) in &self.entries {
            let base = type_path(name).join("components");
            for (i, c) in entry.def.components.iter().enumerate() {
                self.check_component(c, &base.join(i), &mut out);
            }
        }
        out
    }

    fn check_component(&self, c: &Appliance, path: &DocPath, out: &mut Vec<Diagnostic>) {
        if !self.contains(&c.type_name) {
            out.push(Diagnostic::error(
                codes::TYPE_UNKNOWN_COMPONENT,
                path.join("type"),
                format!("component type `{}` is not a known type", c.type_name),
            ));
            return;
        }
        if let Some(st) = &c.subtype {
            if let Ok(t) = self.resolve_type(&c.type_name) {
                if !t.definition.subtypes.contains(st) {
                    out.push(Diagnostic::error(
                        codes::BAD_SUBTYPE,
                        path.join("subtype"),
                        format!("`{st}` is not a subtype of `{}`", c.type_name),
                    ));
                }
            }
        }
        for (i, inner) in c.components.iter().enumerate() {
            self.check_component(inner, &path.join("components").join(i), out);
        }
    }

    /// Rejects types that contain themselves through default components.
    fn component_cycles(&self) -> Vec<Diagnostic> {
        fn collect(a: &Appliance, out: &mut BTreeSet<String>) {
            out.insert(a.type_name.clone());
            for c in &a.components {
                collect(c, out);
            }
        }
        let mut edges: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
        for name in self.entries.keys() {
            let mut targets = BTreeSet::new();
            if let Ok(t) = self.resolve_type(name) {
                for c in &t.definition.components {
                    collect(c, &mut targets);
                }
            }
            edges.insert(name, targets);
        }
        let mut out = Vec::new();
        for start in self.entries.keys() {
            let mut seen = BTreeSet::new();
            let mut stack: Vec<&str> = edges[start.as_str()].iter().map(String::as_str).collect();
            while let Some(n) = stack.pop() {
                if n == start {
                    out.push(Diagnostic::error(
                        codes::TYPE_CYCLE,
                        type_path(start).join("components"),
                        format!("`{start}` contains itself through its components"),
                    ));
                    break;
                }
                if seen.insert(n) {
                    if let Some(next) = edges.get(n) {
                        stack.extend(next.iter().map(String::as_str));
                    }
                }
            }
        }
        out
    }

    fn category_terms(&self, t: &ApplianceType, path: &DocPath) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let sets = [
            (
                "electrical",
                &t.categories.electrical,
                &self.taxonomies.electrical,
            ),
            (
                "google_shopping",
                &t.categories.google_shopping,
                &self.taxonomies.google_shopping,
            ),
        ];
        for (taxonomy, used, known) in sets {
            for (i, term) in used.iter().enumerate() {
                if !known.contains(term) {
                    out.push(Diagnostic::error(
                        codes::BAD_CATEGORY,
                        path.join("categories").join(taxonomy).join(i),
                        format!("`{term}` is not in the {taxonomy} taxonomy"),
                    ));
                }
            }
        }
        out
    }
}

fn terms(node: Option<&Node>, path: &DocPath, fatal: &mut Vec<Diagnostic>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let Some(node) = node.filter(|n| !n.is_null()) else {
        return out;
    };
    let Some(items) = node.as_seq() else {
        fatal.push(
            Diagnostic::error(
                codes::TYPE_MISMATCH,
                path.clone(),
                "expected a sequence of terms",
            )
            .with_span(Some(node.span.clone())),
        );
        return out;
    };
    for (i, item) in items.iter().enumerate() {
        match item.as_str() {
            Some(term) if !out.insert(term.to_owned()) => fatal.push(
                Diagnostic::error(
                    codes::VOCAB_DUP,
                    path.join(i),
                    format!("term `{term}` is listed twice"),
                )
                .with_span(Some(item.span.clone())),
            ),
            Some(_) => {}
            None => fatal.push(
                Diagnostic::error(codes::TYPE_MISMATCH, path.join(i), "expected a string term")
                    .with_span(Some(item.span.clone())),
            ),
        }
    }
    out
}

fn taxonomies(
    node: Option<&Node>,
    fatal: &mut Vec<Diagnostic>,
    content: &mut BTreeMap<String, Vec<Diagnostic>>,
) -> Taxonomies {
    let path = DocPath::root().join("vocab").join("taxonomies");
    let mut out = Taxonomies::default();
    let Some(node) = node.filter(|n| !n.is_null()) else {
        return out;
    };
    let Some(map) = node.as_map() else {
        fatal.push(
            Diagnostic::error(
                codes::TYPE_MISMATCH,
                path,
                "expected a mapping of taxonomies",
            )
            .with_span(Some(node.span.clone())),
        );
        return out;
    };
    for (key, terms_node) in map {
        match key.as_str() {
            "electrical" => out.electrical = terms(Some(terms_node), &path.join(key), fatal),
            "google_shopping" => {
                out.google_shopping = terms(Some(terms_node), &path.join(key), fatal)
            }
            _ => content.entry(String::new()).or_default().push(
                Diagnostic::warning(
                    codes::UNKNOWN_FIELD,
                    path.join(key),
                    format!("unknown taxonomy `{key}` ignored"),
                )
                .with_span(Some(terms_node.span.clone())),
            ),
        }
    }
    out
}

/// One diagnostic per parent cycle, reported on its alphabetically first
/// member.
fn parent_cycles(entries: &BTreeMap<String, TypeEntry>) -> Vec<Diagnostic> {
    let mut reported: BTreeSet<&str> = BTreeSet::new();
    let mut out = Vec::new();
    for start in entries.keys() {
        let mut trail: Vec<&str> = Vec::new();
        let mut cur = Some(start.as_str());
        while let Some(n) = cur {
            if let Some(pos) = trail.iter().position(|t| *t == n) {
                let cycle = &trail[pos..];
                let first = *cycle.iter().min().expect("cycle is non-empty");
                if reported.insert(first) {
                    let mut members: Vec<&str> = cycle.to_vec();
                    members.sort_unstable();
                    out.push(
                        Diagnostic::error(
                            codes::TYPE_CYCLE,
                            type_path(first).join("parent"),
                            format!("parent chain is cyclic through {}", members.join(", ")),
                        )
                        .with_span(entries[first].raw.get("parent").map(|n| n.span.clone())),
                    );
                }
                break;
            }
            trail.push(n);
            cur = entries.get(n).and_then(|e| e.def.parent.as_deref());
        }
    }
    out
}
