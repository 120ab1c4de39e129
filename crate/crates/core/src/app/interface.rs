use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

/// Name of an object class, such as `block` or `position`.
pub type Class = String;

/// A set of class tuples, one tuple per accepted argument combination.
pub type Signature = BTreeSet<Vec<Class>>;

/// An object handed out by an application.
///
/// Identity is the `id` alone; `display` is only used when talking to the
/// user.
#[derive(Clone, Debug)]
pub struct ObjectRef {
    id: Arc<str>,
    display: Arc<str>,
}

impl ObjectRef {
    pub fn new(id: impl Into<Arc<str>>, display: impl Into<Arc<str>>) -> Self {
        ObjectRef { id: id.into(), display: display.into() }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn display_name(&self) -> &str {
        &self.display
    }
}

impl PartialEq for ObjectRef {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for ObjectRef {}

impl Hash for ObjectRef {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state);
    }
}

impl PartialOrd for ObjectRef {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ObjectRef {
    fn cmp(&self, other: &Self) -> Ordering {
        self.id.cmp(&other.id)
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display)
    }
}

/// What an interface name denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NameKind {
    Constant,
    Predicate(usize),
    Action(usize),
}

/// The names an application exposes, their arities and class signatures.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InterfaceDescriptor {
    pub constants: BTreeSet<String>,
    pub predicates: BTreeMap<String, usize>,
    pub actions: BTreeMap<String, usize>,
    pub classes: BTreeSet<Class>,
    pub sigma_const: BTreeMap<String, BTreeSet<Class>>,
    pub sigma_pred: BTreeMap<String, Signature>,
    pub sigma_act: BTreeMap<String, Signature>,
}

/// One failed well-formedness condition of a descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingSignature { name: String },
    UnknownClass { name: String, class: Class },
    ArityMismatch { name: String, arity: usize, tuple_len: usize },
    EmptyConstantClasses { name: String },
    NullaryPredicate { name: String },
    SignatureWithoutName { name: String },
    NameClash { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingSignature { name } => write!(f, "`{name}` has no class signature"),
            Violation::UnknownClass { name, class } => {
                write!(f, "signature of `{name}` mentions undeclared class `{class}`")
            }
            Violation::ArityMismatch { name, arity, tuple_len } => write!(
                f,
                "signature of `{name}` has a {tuple_len}-tuple but its arity is {arity}"
            ),
            Violation::EmptyConstantClasses { name } => {
                write!(f, "constant `{name}` belongs to no class")
            }
            Violation::NullaryPredicate { name } => write!(f, "predicate `{name}` has arity 0"),
            Violation::SignatureWithoutName { name } => {
                write!(f, "signature given for undeclared name `{name}`")
            }
            Violation::NameClash { name } => {
                write!(f, "`{name}` is declared as more than one kind of name")
            }
        }
    }
}

impl InterfaceDescriptor {
    pub fn kind_of(&self, name: &str) -> Option<NameKind> {
        if self.constants.contains(name) {
            Some(NameKind::Constant)
        } else if let Some(&n) = self.predicates.get(name) {
            Some(NameKind::Predicate(n))
        } else {
            self.actions.get(name).map(|&n| NameKind::Action(n))
        }
    }

    /// Checks every structural invariant; an empty result means the
    /// descriptor is well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        for name in &self.constants {
            if self.predicates.contains_key(name) || self.actions.contains_key(name) {
                out.push(Violation::NameClash { name: name.clone() });
            }
            match self.sigma_const.get(name) {
                None => out.push(Violation::MissingSignature { name: name.clone() }),
                Some(classes) if classes.is_empty() => {
                    out.push(Violation::EmptyConstantClasses { name: name.clone() })
                }
                Some(classes) => {
                    for class in classes {
                        if !self.classes.contains(class) {
                            out.push(Violation::UnknownClass {
                                name: name.clone(),
                                class: class.clone(),
                            });
                        }
                    }
                }
            }
        }
        for name in self.predicates.keys() {
            if self.actions.contains_key(name) {
                out.push(Violation::NameClash { name: name.clone() });
            }
        }
        for (name, &arity) in &self.predicates {
            if arity == 0 {
                out.push(Violation::NullaryPredicate { name: name.clone() });
            }
            self.check_signature(name, arity, self.sigma_pred.get(name), &mut out);
        }
        for (name, &arity) in &self.actions {
            self.check_signature(name, arity, self.sigma_act.get(name), &mut out);
        }

        let orphans = self
            .sigma_const
            .keys()
            .filter(|n| !self.constants.contains(*n))
            .chain(self.sigma_pred.keys().filter(|n| !self.predicates.contains_key(*n)))
            .chain(self.sigma_act.keys().filter(|n| !self.actions.contains_key(*n)));
        for name in orphans {
            out.push(Violation::SignatureWithoutName { name: name.clone() });
        }
        out
    }

    fn check_signature(
        &self,
        name: &str,
        arity: usize,
        signature: Option<&Signature>,
        out: &mut Vec<Violation>,
    ) {
        let Some(signature) = signature else {
            out.push(Violation::MissingSignature { name: name.to_owned() });
            return;
        };
        for tuple in signature {
            if tuple.len() != arity {
                out.push(Violation::ArityMismatch {
                    name: name.to_owned(),
                    arity,
                    tuple_len: tuple.len(),
                });
            }
            for class in tuple {
                if !self.classes.contains(class) {
                    out.push(Violation::UnknownClass { name: name.to_owned(), class: class.clone() });
                }
            }
        }
    }
}

/// The class guard for interface calls: some tuple of the signature must
/// pick, position by position, a class the argument belongs to.
///
/// With no arguments the product of argument classes is the single empty
/// tuple and the guard passes.
pub fn guard_check(signature: &Signature, args: &[BTreeSet<Class>]) -> bool {
    if args.is_empty() {
        return true;
    }
    signature.iter().any(|tuple| {
        tuple.len() == args.len() && tuple.iter().zip(args).all(|(class, have)| have.contains(class))
    })
}

/// Renders a signature as `(block, position) | (...)`.
pub fn format_signature(signature: &Signature) -> String {
    if signature.is_empty() {
        return "(none)".to_owned();
    }
    signature
        .iter()
        .map(|tuple| format!("({})", tuple.join(", ")))
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Renders a class set as `{block, position}`.
pub fn format_classes(classes: &BTreeSet<Class>) -> String {
    let inner: Vec<&str> = classes.iter().map(String::as_str).collect();
    format!("{{{}}}", inner.join(", "))
}
