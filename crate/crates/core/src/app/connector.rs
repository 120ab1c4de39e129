use std::collections::BTreeSet;

use thiserror::Error;

use super::{Class, InterfaceDescriptor, ObjectRef};

/// Result of a guarded interface call: either a value, or the exception
/// raised when the arguments do not fit the class signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<T> {
    Value(T),
    Exception,
}

impl<T> Outcome<T> {
    pub fn is_exception(&self) -> bool {
        matches!(self, Outcome::Exception)
    }

    pub fn value(self) -> Option<T> {
        match self {
            Outcome::Value(v) => Some(v),
            Outcome::Exception => None,
        }
    }
}

/// Failures of the application itself, as opposed to the exception value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AppError {
    #[error("`{0}` is not registered with the application")]
    UnknownName(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("`{name}` expects {expected} argument(s), given {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("`{name}({})` is undefined in state `{state}`", args.join(", "))]
    Undefined { state: String, name: String, args: Vec<String> },
    #[error("application failure: {0}")]
    Failed(String),
}

/// The procedures a live application exposes to the interpreter.
///
/// Implementations are stateful; callers issue one call at a time.
/// `query_predicate` must not change observable state.
pub trait Connector {
    fn descriptor(&self) -> &InterfaceDescriptor;

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError>;

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError>;

    /// Performs an action. Success carries no data.
    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError>;

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError>;
}

impl<C: Connector + ?Sized> Connector for &mut C {
    fn descriptor(&self) -> &InterfaceDescriptor {
        (**self).descriptor()
    }

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError> {
        (**self).resolve_constant(name)
    }

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError> {
        (**self).query_predicate(name, args)
    }

    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError> {
        (**self).perform_action(name, args)
    }

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        (**self).classes_of(obj)
    }
}

impl<C: Connector + ?Sized> Connector for Box<C> {
    fn descriptor(&self) -> &InterfaceDescriptor {
        (**self).descriptor()
    }

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError> {
        (**self).resolve_constant(name)
    }

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError> {
        (**self).query_predicate(name, args)
    }

    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError> {
        (**self).perform_action(name, args)
    }

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        (**self).classes_of(obj)
    }
}
