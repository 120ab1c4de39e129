//! Natural-language command interfaces for action-based applications.
//!
//! Sentences are parsed with a categorial grammar into terms of a typed
//! action calculus, which are then evaluated by calling into the
//! application through a [`Connector`].

pub mod app;
pub mod calculus;
pub mod grammar;
pub mod interp;
pub mod pipeline;
pub mod random;
pub mod toyblocks;

pub use app::{Connector, InterfaceDescriptor, ModelApplication, ModelConnector, ObjectRef, Outcome};
pub use calculus::{parse_expr, parse_type, type_of, Expr, Type, TypeEnv};
pub use grammar::{parse, parse_category, parse_lexicon, tokenize, Category, Lexicon, ParseError};
pub use interp::{evaluate, step, EvalError, Rule, StepTrace, DEFAULT_FUEL};
pub use pipeline::{CommandKind, CommandOutcome, CommandResult, Fact, Session};
