use std::collections::BTreeSet;

use super::Type;
use crate::app::ObjectRef;

/// An expression of the action calculus.
///
/// `Obj` and `Exception` only arise while evaluating; terms read from text or
/// built by the grammar never contain them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Bool(bool),
    Lambda { param: String, ty: Type, body: Box<Expr> },
    Skip,
    Obj(ObjectRef),
    Exception,
    /// `name()`, resolved against the current application state.
    Const(String),
    Pred(String, Vec<Expr>),
    Act(String, Vec<Expr>),
    App(Box<Expr>, Box<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Seq(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn lambda(param: impl Into<String>, ty: Type, body: Expr) -> Expr {
        Expr::Lambda { param: param.into(), ty, body: Box::new(body) }
    }

    pub fn constant(name: impl Into<String>) -> Expr {
        Expr::Const(name.into())
    }

    pub fn pred(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Pred(name.into(), args)
    }

    pub fn act(name: impl Into<String>, args: Vec<Expr>) -> Expr {
        Expr::Act(name.into(), args)
    }

    pub fn app(fun: Expr, arg: Expr) -> Expr {
        Expr::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application `fun a1 a2 ...`.
    pub fn apply(fun: Expr, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(fun, Expr::app)
    }

    pub fn cond(test: Expr, then: Expr, otherwise: Expr) -> Expr {
        Expr::Cond(Box::new(test), Box::new(then), Box::new(otherwise))
    }

    pub fn seq(first: Expr, second: Expr) -> Expr {
        Expr::Seq(Box::new(first), Box::new(second))
    }

    pub fn is_value(&self) -> bool {
        matches!(
            self,
            Expr::Bool(_) | Expr::Lambda { .. } | Expr::Skip | Expr::Obj(_) | Expr::Exception
        )
    }

    /// True when the term contains no run-time-only forms.
    pub fn is_surface(&self) -> bool {
        let mut surface = true;
        self.walk(&mut |e| {
            if matches!(e, Expr::Obj(_) | Expr::Exception) {
                surface = false;
            }
        });
        surface
    }

    pub fn contains_exception(&self) -> bool {
        let mut found = false;
        self.walk(&mut |e| found |= matches!(e, Expr::Exception));
        found
    }

    /// Pre-order traversal of every subterm.
    pub fn walk(&self, visit: &mut impl FnMut(&Expr)) {
        visit(self);
        match self {
            Expr::Lambda { body, .. } => body.walk(visit),
            Expr::Pred(_, args) | Expr::Act(_, args) => args.iter().for_each(|a| a.walk(visit)),
            Expr::App(f, a) | Expr::Seq(f, a) => {
                f.walk(visit);
                a.walk(visit);
            }
            Expr::Cond(t, x, y) => {
                t.walk(visit);
                x.walk(visit);
                y.walk(visit);
            }
            _ => {}
        }
    }

    /// Height of the syntax tree; leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Lambda { body, .. } => 1 + body.depth(),
            Expr::Pred(_, args) | Expr::Act(_, args) => {
                1 + args.iter().map(Expr::depth).max().unwrap_or(0)
            }
            Expr::App(f, a) | Expr::Seq(f, a) => 1 + f.depth().max(a.depth()),
            Expr::Cond(t, x, y) => 1 + t.depth().max(x.depth()).max(y.depth()),
            _ => 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Expr::Lambda { param, body, .. } => {
                bound.push(param);
                body.collect_free(bound, out);
                bound.pop();
            }
            Expr::Pred(_, args) | Expr::Act(_, args) => {
                for a in args {
                    a.collect_free(bound, out);
                }
            }
            Expr::App(f, a) | Expr::Seq(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
            Expr::Cond(t, x, y) => {
                t.collect_free(bound, out);
                x.collect_free(bound, out);
                y.collect_free(bound, out);
            }
            Expr::Bool(_) | Expr::Skip | Expr::Obj(_) | Expr::Exception | Expr::Const(_) => {}
        }
    }

    /// Capture-avoiding substitution of `replacement` for the free
    /// occurrences of `var`.
    pub fn substitute(&self, var: &str, replacement: &Expr) -> Expr {
        let repl_free = replacement.free_vars();
        self.subst(var, replacement, &repl_free)
    }

    fn subst(&self, var: &str, repl: &Expr, repl_free: &BTreeSet<String>) -> Expr {
        match self {
            Expr::Var(x) if x == var => repl.clone(),
            Expr::Var(_)
            | Expr::Bool(_)
            | Expr::Skip
            | Expr::Obj(_)
            | Expr::Exception
            | Expr::Const(_) => self.clone(),
            Expr::Lambda { param, ty, body } => {
                if param == var {
                    return self.clone();
                }
                let body_free = body.free_vars();
                if !body_free.contains(var) {
                    return self.clone();
                }
                if repl_free.contains(param) {
                    let mut avoid = body_free;
                    avoid.extend(repl_free.iter().cloned());
                    avoid.insert(var.to_owned());
                    let fresh = fresh_name(param, &avoid);
                    let fresh_var = Expr::Var(fresh.clone());
                    let renamed = body.subst(param, &fresh_var, &fresh_var.free_vars());
                    Expr::lambda(fresh, ty.clone(), renamed.subst(var, repl, repl_free))
                } else {
                    Expr::lambda(param.clone(), ty.clone(), body.subst(var, repl, repl_free))
                }
            }
            Expr::Pred(name, args) => {
                Expr::Pred(name.clone(), args.iter().map(|a| a.subst(var, repl, repl_free)).collect())
            }
            Expr::Act(name, args) => {
                Expr::Act(name.clone(), args.iter().map(|a| a.subst(var, repl, repl_free)).collect())
            }
            Expr::App(f, a) => {
                Expr::app(f.subst(var, repl, repl_free), a.subst(var, repl, repl_free))
            }
            Expr::Seq(f, a) => {
                Expr::seq(f.subst(var, repl, repl_free), a.subst(var, repl, repl_free))
            }
            Expr::Cond(t, x, y) => Expr::cond(
                t.subst(var, repl, repl_free),
                x.subst(var, repl, repl_free),
                y.subst(var, repl, repl_free),
            ),
        }
    }

    /// Renames every bound variable to a positional name that cannot clash
    /// with a user identifier; two terms are alpha-equivalent exactly when
    /// their canonical forms are equal.
    pub fn alpha_canonical(&self) -> Expr {
        self.canon(&mut Vec::new())
    }

    fn canon(&self, scope: &mut Vec<(String, String)>) -> Expr {
        match self {
            Expr::Var(x) => match scope.iter().rev().find(|(orig, _)| orig == x) {
                Some((_, canonical)) => Expr::Var(canonical.clone()),
                None => self.clone(),
            },
            Expr::Lambda { param, ty, body } => {
                let canonical = format!("#{}", scope.len());
                scope.push((param.clone(), canonical.clone()));
                let body = body.canon(scope);
                scope.pop();
                Expr::lambda(canonical, ty.clone(), body)
            }
            Expr::Pred(name, args) => {
                Expr::Pred(name.clone(), args.iter().map(|a| a.canon(scope)).collect())
            }
            Expr::Act(name, args) => {
                Expr::Act(name.clone(), args.iter().map(|a| a.canon(scope)).collect())
            }
            Expr::App(f, a) => Expr::app(f.canon(scope), a.canon(scope)),
            Expr::Seq(f, a) => Expr::seq(f.canon(scope), a.canon(scope)),
            Expr::Cond(t, x, y) => Expr::cond(t.canon(scope), x.canon(scope), y.canon(scope)),
            _ => self.clone(),
        }
    }

    pub fn alpha_eq(&self, other: &Expr) -> bool {
        self.alpha_canonical() == other.alpha_canonical()
    }
}

/// `base` with its trailing digits replaced by the smallest numeric suffix
/// (starting at 1) that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "x" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded supply of names")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn free_var_examples() {
        assert_eq!(Expr::var("x").free_vars(), set(&["x"]));
        assert_eq!(Expr::lambda("x", Type::Obj, Expr::var("x")).free_vars(), set(&[]));
        let e = Expr::app(Expr::var("f"), Expr::lambda("x", Type::Obj, Expr::var("y")));
        assert_eq!(e.free_vars(), set(&["f", "y"]));
    }

    #[test]
    fn value_examples() {
        assert!(Expr::Skip.is_value());
        assert!(!Expr::constant("b1").is_value());
        assert!(Expr::Exception.is_value());
        assert!(!Expr::var("x").is_value());
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(Expr::var("x").substitute("x", &Expr::Skip), Expr::Skip);

        let body = Expr::lambda("y", Type::Obj, Expr::app(Expr::var("x"), Expr::var("y")));
        let got = body.substitute("x", &Expr::var("y"));
        assert_eq!(
            got,
            Expr::lambda("y1", Type::Obj, Expr::app(Expr::var("y"), Expr::var("y1")))
        );

        let c = Expr::cond(Expr::var("x"), Expr::Skip, Expr::Skip);
        assert_eq!(
            c.substitute("x", &Expr::Bool(true)),
            Expr::cond(Expr::Bool(true), Expr::Skip, Expr::Skip)
        );
    }

    #[test]
    fn substitution_stops_at_shadowing_binder() {
        let e = Expr::lambda("x", Type::Obj, Expr::var("x"));
        assert_eq!(e.substitute("x", &Expr::constant("b1")), e);
    }

    #[test]
    fn fresh_names_skip_taken_suffixes() {
        assert_eq!(fresh_name("y", &set(&["y", "y1"])), "y2");
        assert_eq!(fresh_name("x3", &set(&["x3"])), "x1");
    }

    #[test]
    fn alpha_equivalence() {
        let a = Expr::lambda("x", Type::Obj, Expr::act("move", vec![Expr::var("x"), Expr::var("z")]));
        let b = Expr::lambda("w", Type::Obj, Expr::act("move", vec![Expr::var("w"), Expr::var("z")]));
        let c = Expr::lambda("z", Type::Obj, Expr::act("move", vec![Expr::var("z"), Expr::var("z")]));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
    }
}
