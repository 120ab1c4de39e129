//! The typed action calculus: types, terms, the purity and well-formedness
//! judgments, and the typechecker.

mod expr;
mod syntax;
mod types;
mod typing;

pub use expr::{fresh_name, Expr};
pub use syntax::{parse_expr, parse_type, SyntaxError};
pub use types::Type;
pub use typing::{has_runtime_type, type_of, TypeEnv, TypeError};
