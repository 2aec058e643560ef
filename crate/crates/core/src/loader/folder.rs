use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::node::Node;
use super::parse::{parse_document_named, Format, ParseError};
use crate::diag::{codes, Diagnostic, DocPath};

/// One metadata folder: the dataset document plus building documents keyed
/// by the index in their file name.
#[derive(Debug, Clone)]
pub struct RawDatasetFolder {
    pub dataset_doc: Node,
    pub building_docs: BTreeMap<u32, Node>,
    /// Warnings raised while scanning the folder.
    pub diagnostics: Vec<Diagnostic>,
}

impl RawDatasetFolder {
    /// A single self-contained document (buildings inline).
    pub fn single(dataset_doc: Node) -> Self {
        Self {
            dataset_doc,
            building_docs: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("no dataset.yaml, dataset.yml or dataset.json in {}", .0.display())]
    NoDatasetDoc(PathBuf),
    #[error("more than one dataset document in {}", .0.display())]
    MultipleDatasetDocs(PathBuf),
    #[error("building index {index} is given by more than one file in {}", dir.display())]
    DuplicateBuildingIndex { dir: PathBuf, index: u32 },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Io { .. } => codes::IO,
            LoadError::NoDatasetDoc(_) => codes::NO_DATASET_DOC,
            LoadError::MultipleDatasetDocs(_) => codes::MULTIPLE_DATASET_DOCS,
            LoadError::DuplicateBuildingIndex { .. } => codes::BUILDING_INDEX_DUP,
            LoadError::Parse(e) => e.code(),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, LoadError> {
    fs::read(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a single document file, format chosen by extension.
pub fn load_document(path: &Path) -> Result<Node, LoadError> {
    let format = path
        .extension()
        .and_then(|e| e.to_str())
        .and_then(Format::from_extension)
        .unwrap_or(Format::Yaml);
    let bytes = read(path)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    Ok(parse_document_named(&bytes, format, name.as_deref())?)
}

/// `building<I>` with `I` a positive decimal integer.
fn building_index(stem: &str) -> Option<u32> {
    let digits = stem.strip_prefix("building")?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok().filter(|i| *i >= 1)
}

/// Loads a metadata folder: exactly one `dataset.{yaml,yml,json}` and any
/// number of `building<I>.{yaml,yml,json}`. Other files are skipped with a
/// warning.
///
/// A folder without a dataset document but with a `metadata/` subfolder
/// is read from that subfolder.
pub fn load_dataset_dir(path: &Path) -> Result<RawDatasetFolder, LoadError> {
    let entries = fs::read_dir(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        files.push(entry.path());
    }
    files.sort();

    let mut dataset: Option<PathBuf> = None;
    let mut buildings: BTreeMap<u32, PathBuf> = BTreeMap::new();
    let mut ignored = Vec::new();
    for file in files {
        let name = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let stem = match name.rsplit_once('.') {
            Some((s, e)) if file.is_file() && Format::from_extension(e).is_some() => s.to_string(),
            _ => {
                ignored.push(name);
                continue;
            }
        };
        if stem == "dataset" {
            if dataset.replace(file).is_some() {
                return Err(LoadError::MultipleDatasetDocs(path.to_path_buf()));
            }
        } else if let Some(index) = building_index(&stem) {
            if buildings.insert(index, file).is_some() {
                return Err(LoadError::DuplicateBuildingIndex {
                    dir: path.to_path_buf(),
                    index,
                });
            }
        } else {
            ignored.push(name);
        }
    }

    let Some(dataset) = dataset else {
        let nested = path.join("metadata");
        if nested.is_dir() && buildings.is_empty() {
            return load_dataset_dir(&nested);
        }
        return Err(LoadError::NoDatasetDoc(path.to_path_buf()));
    };

    let diagnostics = ignored
        .into_iter()
        .filter(|n| n != "metadata" && !n.starts_with('.'))
        .map(|n| {
            Diagnostic::warning(
                codes::IGNORED_FILE,
                DocPath::root(),
                format!("ignoring `{n}`"),
            )
        })
        .collect();
    let dataset_doc = load_document(&dataset)?;
    let building_docs = buildings
        .into_iter()
        .map(|(i, p)| load_document(&p).map(|n| (i, n)))
        .collect::<Result<_, _>>()?;
    Ok(RawDatasetFolder {
        dataset_doc,
        building_docs,
        diagnostics,
    })
}

/// Loads either a metadata folder or a single self-contained document
/// (such as a canonical export).
pub fn load_dataset_path(path: &Path) -> Result<RawDatasetFolder, LoadError> {
    if path.is_file() {
        Ok(RawDatasetFolder::single(load_document(path)?))
    } else {
        load_dataset_dir(path)
    }
}
