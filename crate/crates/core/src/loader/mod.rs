//! Reading metadata documents: parsing with source spans, folder layout,
//! and binding to the domain model.

mod bind;
pub(crate) mod fields;
mod folder;
mod node;
mod parse;

pub(crate) use bind::{appliance as bind_appliance_node, appliance_type as bind_appliance_type};
pub use bind::{bind, bind_learnt_model};
pub use folder::{load_dataset_dir, load_dataset_path, load_document, LoadError, RawDatasetFolder};
pub use node::{Mapping, Node, NodeKind, Value};
pub use parse::{parse_document, parse_document_named, Format, ParseError};
