use thiserror::Error;

use super::{Expr, Type};
use crate::app::{InterfaceDescriptor, NameKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("{context}: expected {expected}, found {found}")]
    Mismatch { context: &'static str, expected: Type, found: Type },
    #[error("cannot apply a term of type {0}")]
    NotAFunction(Type),
    #[error("function type {0} is not well-formed")]
    IllFormedFunction(Type),
    #[error("`{0}` is not a {1} of the interface")]
    UnknownName(String, &'static str),
    #[error("`{name}` takes {expected} argument(s), given {found}")]
    Arity { name: String, expected: usize, found: usize },
    #[error("the exception value cannot appear in a source term")]
    ExceptionInSource,
}

/// Typing environment. Binding a name that is already present replaces it,
/// so the environment never holds duplicates.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeEnv {
    bindings: Vec<(String, Type)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn extend(&self, name: &str, ty: Type) -> TypeEnv {
        let mut bindings: Vec<_> =
            self.bindings.iter().filter(|(n, _)| n != name).cloned().collect();
        bindings.push((name.to_owned(), ty));
        TypeEnv { bindings }
    }

    pub fn lookup(&self, name: &str) -> Option<&Type> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Type)> {
        self.bindings.iter().map(|(n, t)| (n.as_str(), t))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }
}

impl FromIterator<(String, Type)> for TypeEnv {
    fn from_iter<I: IntoIterator<Item = (String, Type)>>(iter: I) -> Self {
        iter.into_iter().fold(TypeEnv::new(), |env, (n, t)| env.extend(&n, t))
    }
}

/// Infers the unique type of `e`. Source terms only: the exception value is
/// rejected.
pub fn type_of(env: &TypeEnv, e: &Expr, iface: &InterfaceDescriptor) -> Result<Type, TypeError> {
    let inferred = Checker { iface, allow_exception: false }.infer(env, e)?;
    Ok(inferred.into_type().expect("no wildcard without the exception value"))
}

/// Checks a closed run-time term against `expected`, letting the exception
/// value stand for any type.
pub fn has_runtime_type(e: &Expr, expected: &Type, iface: &InterfaceDescriptor) -> bool {
    Checker { iface, allow_exception: true }
        .infer(&TypeEnv::new(), e)
        .is_ok_and(|t| t.admits(expected))
}

/// A type that may contain holes left by the exception value.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Partial {
    Any,
    Obj,
    Bool,
    Act,
    Fun(Box<Partial>, Box<Partial>),
}

impl Partial {
    fn from_type(t: &Type) -> Partial {
        match t {
            Type::Obj => Partial::Obj,
            Type::Bool => Partial::Bool,
            Type::Act => Partial::Act,
            Type::Fun(a, b) => {
                Partial::Fun(Box::new(Partial::from_type(a)), Box::new(Partial::from_type(b)))
            }
        }
    }

    fn into_type(self) -> Option<Type> {
        Some(match self {
            Partial::Any => return None,
            Partial::Obj => Type::Obj,
            Partial::Bool => Type::Bool,
            Partial::Act => Type::Act,
            Partial::Fun(a, b) => Type::fun(a.into_type()?, b.into_type()?),
        })
    }

    /// Most specific common refinement, if the two are compatible.
    fn meet(&self, other: &Partial) -> Option<Partial> {
        match (self, other) {
            (Partial::Any, t) | (t, Partial::Any) => Some(t.clone()),
            (Partial::Fun(a1, b1), Partial::Fun(a2, b2)) => {
                Some(Partial::Fun(Box::new(a1.meet(a2)?), Box::new(b1.meet(b2)?)))
            }
            (a, b) if a == b => Some(a.clone()),
            _ => None,
        }
    }

    fn admits(&self, t: &Type) -> bool {
        self.meet(&Partial::from_type(t)).is_some()
    }

    /// Display form with `?` for holes, for error messages only.
    fn approx(&self) -> Type {
        match self {
            Partial::Any | Partial::Obj => Type::Obj,
            Partial::Bool => Type::Bool,
            Partial::Act => Type::Act,
            Partial::Fun(a, b) => Type::fun(a.approx(), b.approx()),
        }
    }

    fn could_be_pure(&self) -> bool {
        !matches!(self, Partial::Act)
    }
}

struct Checker<'a> {
    iface: &'a InterfaceDescriptor,
    allow_exception: bool,
}

impl Checker<'_> {
    fn infer(&self, env: &TypeEnv, e: &Expr) -> Result<Partial, TypeError> {
        match e {
            Expr::Var(x) => env
                .lookup(x)
                .map(Partial::from_type)
                .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
            Expr::Bool(_) => Ok(Partial::Bool),
            Expr::Obj(_) => Ok(Partial::Obj),
            Expr::Skip => Ok(Partial::Act),
            Expr::Exception => {
                if self.allow_exception {
                    Ok(Partial::Any)
                } else {
                    Err(TypeError::ExceptionInSource)
                }
            }
            Expr::Lambda { param, ty, body } => {
                let body_ty = self.infer(&env.extend(param, ty.clone()), body)?;
                // A hole in the codomain can always be filled with Act, which
                // makes any function type well-formed.
                let wellformed = match body_ty.meet(&Partial::Act) {
                    Some(_) => true,
                    None => ty.is_pure() && body_ty.could_be_pure(),
                };
                if !wellformed {
                    return Err(TypeError::IllFormedFunction(Type::fun(
                        ty.clone(),
                        body_ty.approx(),
                    )));
                }
                Ok(Partial::Fun(Box::new(Partial::from_type(ty)), Box::new(body_ty)))
            }
            Expr::Const(name) => match self.iface.kind_of(name) {
                Some(NameKind::Constant) => Ok(Partial::Obj),
                _ => Err(TypeError::UnknownName(name.clone(), "constant")),
            },
            Expr::Pred(name, args) => match self.iface.kind_of(name) {
                Some(NameKind::Predicate(arity)) => {
                    self.check_args(env, name, arity, args)?;
                    Ok(Partial::Bool)
                }
                _ => Err(TypeError::UnknownName(name.clone(), "predicate")),
            },
            Expr::Act(name, args) => match self.iface.kind_of(name) {
                Some(NameKind::Action(arity)) => {
                    self.check_args(env, name, arity, args)?;
                    Ok(Partial::Act)
                }
                _ => Err(TypeError::UnknownName(name.clone(), "action")),
            },
            Expr::App(fun, arg) => {
                let fun_ty = self.infer(env, fun)?;
                let arg_ty = self.infer(env, arg)?;
                match fun_ty {
                    Partial::Any => Ok(Partial::Any),
                    Partial::Fun(domain, codomain) => {
                        if domain.meet(&arg_ty).is_none() {
                            return Err(TypeError::Mismatch {
                                context: "function argument",
                                expected: domain.approx(),
                                found: arg_ty.approx(),
                            });
                        }
                        Ok(*codomain)
                    }
                    other => Err(TypeError::NotAFunction(other.approx())),
                }
            }
            Expr::Cond(test, then, otherwise) => {
                self.expect(env, test, &Partial::Bool, "conditional test")?;
                let a = self.infer(env, then)?;
                let b = self.infer(env, otherwise)?;
                a.meet(&b).ok_or(TypeError::Mismatch {
                    context: "conditional branches",
                    expected: a.approx(),
                    found: b.approx(),
                })
            }
            Expr::Seq(first, second) => {
                self.expect(env, first, &Partial::Act, "sequenced action")?;
                self.expect(env, second, &Partial::Act, "sequenced action")?;
                Ok(Partial::Act)
            }
        }
    }

    fn expect(
        &self,
        env: &TypeEnv,
        e: &Expr,
        want: &Partial,
        context: &'static str,
    ) -> Result<(), TypeError> {
        let got = self.infer(env, e)?;
        match got.meet(want) {
            Some(_) => Ok(()),
            None => Err(TypeError::Mismatch { context, expected: want.approx(), found: got.approx() }),
        }
    }

    fn check_args(
        &self,
        env: &TypeEnv,
        name: &str,
        arity: usize,
        args: &[Expr],
    ) -> Result<(), TypeError> {
        if args.len() != arity {
            return Err(TypeError::Arity { name: name.to_owned(), expected: arity, found: args.len() });
        }
        for arg in args {
            self.expect(env, arg, &Partial::Obj, "call argument")?;
        }
        Ok(())
    }
}
