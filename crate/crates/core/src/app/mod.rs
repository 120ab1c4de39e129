//! Application interfaces: the descriptor of callable names, the class
//! guard, the connector through which the interpreter reaches a running
//! application, and an explicit-state model used as reference semantics.

mod connector;
mod interface;
mod model;
mod model_format;

pub use connector::{AppError, Connector, Outcome};
pub use interface::{
    format_classes, format_signature, guard_check, Class, InterfaceDescriptor, NameKind, ObjectRef,
    Signature, Violation,
};
pub use model::{ModelApplication, ModelConnector, ModelViolation, StateId};
pub use model_format::{model_to_text, parse_model, ModelFormatError};
