//! Loading, validating and exporting NILM dataset metadata.
//!
//! A dataset is described by a `dataset.yaml` document and one
//! `building<I>.yaml` per building. [`loader`] parses and binds them into
//! the [`model`] types; [`validate`] checks the bound dataset against an
//! appliance type library from [`typedb`]; [`wiring`] builds the meter
//! tree; [`export`] writes the canonical JSON form.
//!
//! ```
//! use nilm_meta::{loader, typedb::TypeLibrary, validate};
//!
//! let doc = loader::parse_document(b"name: tiny\n", loader::Format::Yaml).unwrap();
//! let (dataset, bind_diags) = loader::bind(&loader::RawDatasetFolder::single(doc));
//! assert!(bind_diags.is_empty());
//! let report = validate::validate_dataset(&dataset, &TypeLibrary::seed());
//! assert!(report.is_valid());
//! ```

pub mod diag;
pub mod export;
pub mod loader;
pub mod model;
mod par;
pub mod typedb;
pub mod validate;
pub mod wiring;

pub use diag::{codes, Diagnostic, DocPath, Severity, Span, ValidationReport};
pub use par::Execution;
