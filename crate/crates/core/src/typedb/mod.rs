//! The appliance type library and the inheritance engine.

mod library;
mod merge;
mod resolve;
mod seed;

use thiserror::Error;

use crate::diag::{codes, Diagnostic, DocPath};

pub use library::{
    load_type_library, type_path, LibraryDocs, LibraryError, LibrarySource, Taxonomies, TypeLibrary,
};
pub use merge::{merge_node, MergeError};
pub use resolve::{ComponentOrigin, ResolvedAppliance, ResolvedApplianceType};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TypeDbError {
    #[error("unknown appliance type `{0}`")]
    NotFound(String),
    #[error("`{0}` is not a distribution name")]
    BadDistributionName(String),
    #[error("resolving `{type_name}`: {source}")]
    Merge {
        type_name: String,
        #[source]
        source: MergeError,
    },
}

impl TypeDbError {
    pub fn code(&self) -> &'static str {
        match self {
            TypeDbError::NotFound(_) => codes::TYPE_NOT_FOUND,
            TypeDbError::BadDistributionName(_) => codes::BAD_DISTRIBUTION_NAME,
            TypeDbError::Merge { .. } => codes::MERGE_KIND_CONFLICT,
        }
    }

    /// Merge conflicts are reported inside the library entry that caused
    /// them; other errors at `path`.
    pub fn to_diagnostic(&self, path: &DocPath) -> Diagnostic {
        let at = match self {
            TypeDbError::Merge { type_name, source } => match source.path.as_str() {
                "" => type_path(type_name),
                key => type_path(type_name).join(key),
            },
            _ => path.clone(),
        };
        Diagnostic::error(self.code(), at, self.to_string())
    }
}
