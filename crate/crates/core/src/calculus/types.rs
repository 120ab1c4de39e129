use std::fmt;

/// A type of the action calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Obj,
    Bool,
    Act,
    Fun(Box<Type>, Box<Type>),
}

impl Type {
    pub fn fun(domain: Type, codomain: Type) -> Type {
        Type::Fun(Box::new(domain), Box::new(codomain))
    }

    /// Pure types evaluate without touching application state: objects,
    /// booleans and every function type. `Act` is the only impure type.
    pub fn is_pure(&self) -> bool {
        !matches!(self, Type::Act)
    }

    /// The `ok` judgment. Only function types are constrained: either both
    /// sides are pure, or the codomain is `Act`.
    pub fn is_wellformed(&self) -> bool {
        match self {
            Type::Fun(domain, codomain) => {
                (domain.is_pure() && codomain.is_pure()) || **codomain == Type::Act
            }
            _ => true,
        }
    }

    /// True when this type and every function type nested inside it is
    /// well-formed.
    pub fn is_wellformed_deep(&self) -> bool {
        match self {
            Type::Fun(domain, codomain) => {
                self.is_wellformed() && domain.is_wellformed_deep() && codomain.is_wellformed_deep()
            }
            _ => true,
        }
    }

    /// Number of arrows along the codomain spine.
    pub fn spine(&self) -> usize {
        match self {
            Type::Fun(_, codomain) => 1 + codomain.spine(),
            _ => 0,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Obj => f.write_str("Obj"),
            Type::Bool => f.write_str("Bool"),
            Type::Act => f.write_str("Act"),
            Type::Fun(domain, codomain) => {
                if matches!(**domain, Type::Fun(..)) {
                    write!(f, "({domain}) -> {codomain}")
                } else {
                    write!(f, "{domain} -> {codomain}")
                }
            }
        }
    }
}
