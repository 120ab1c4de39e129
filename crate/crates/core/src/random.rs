//! Random closed, type-correct terms for property tests and benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::app::InterfaceDescriptor;
use crate::calculus::{Expr, Type};

/// A random well-formed type with at most `spine` arrows along its
/// codomain. Domains are base types or single arrows.
pub fn random_type<R: Rng + ?Sized>(rng: &mut R, spine: usize) -> Type {
    if spine == 0 || rng.random_bool(0.5) {
        return [Type::Obj, Type::Bool, Type::Act][rng.random_range(0..3)].clone();
    }
    let codomain = random_type(rng, spine - 1);
    let domain = if codomain == Type::Act {
        random_domain(rng, true)
    } else {
        random_domain(rng, false)
    };
    Type::fun(domain, codomain)
}

fn random_domain<R: Rng + ?Sized>(rng: &mut R, allow_act: bool) -> Type {
    let base = |rng: &mut R, act: bool| {
        let choices: &[Type] = if act { &[Type::Obj, Type::Bool, Type::Act] } else { &[Type::Obj, Type::Bool] };
        choices.choose(rng).expect("nonempty").clone()
    };
    if rng.random_bool(0.8) {
        base(rng, allow_act)
    } else {
        let codomain = base(rng, true);
        Type::fun(base(rng, codomain == Type::Act), codomain)
    }
}

/// Generates terms over an interface. Every term produced is closed, has
/// the requested type and has depth at most the requested depth.
pub struct TermGenerator<'a> {
    iface: &'a InterfaceDescriptor,
    constants: Vec<&'a str>,
    predicates: Vec<(&'a str, usize)>,
    actions: Vec<(&'a str, usize)>,
}

impl<'a> TermGenerator<'a> {
    /// # Panics
    /// If the interface has no constants, since object terms need one.
    pub fn new(iface: &'a InterfaceDescriptor) -> Self {
        assert!(!iface.constants.is_empty(), "term generation needs at least one constant");
        TermGenerator {
            iface,
            constants: iface.constants.iter().map(String::as_str).collect(),
            predicates: iface.predicates.iter().map(|(n, &a)| (n.as_str(), a)).collect(),
            actions: iface.actions.iter().map(|(n, &a)| (n.as_str(), a)).collect(),
        }
    }

    pub fn descriptor(&self) -> &InterfaceDescriptor {
        self.iface
    }

    /// A random type and a closed term of that type within `depth`.
    pub fn any_term<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize) -> (Type, Expr) {
        let ty = random_type(rng, depth.min(3));
        let e = self.term(rng, &ty, depth);
        (ty, e)
    }

    /// A closed term of type `ty`.
    ///
    /// # Panics
    /// If `ty` has more arrows along its codomain than `depth`.
    pub fn term<R: Rng + ?Sized>(&self, rng: &mut R, ty: &Type, depth: usize) -> Expr {
        assert!(ty.spine() <= depth, "no term of type {ty} fits in depth {depth}");
        self.gen(rng, &mut Vec::new(), ty, depth)
    }

    fn gen<R: Rng + ?Sized>(&self, rng: &mut R, env: &mut Vec<(String, Type)>, ty: &Type, depth: usize) -> Expr {
        let vars: Vec<&String> = env.iter().filter(|(_, t)| t == ty).map(|(x, _)| x).collect();
        let leaf_bias = if depth == 0 { 1.0 } else { 0.25 };
        if !vars.is_empty() && rng.random_bool(leaf_bias * 0.6) {
            return Expr::var(vars.choose(rng).expect("nonempty").as_str());
        }
        if let Type::Fun(domain, codomain) = ty {
            // Lambdas are the only closed introduction form for functions,
            // but an application or conditional may also produce one.
            if depth > ty.spine() && rng.random_bool(0.2) {
                return self.compound(rng, env, ty, depth);
            }
            let param = format!("v{}", env.len());
            env.push((param.clone(), (**domain).clone()));
            let body = self.gen(rng, env, codomain, depth - 1);
            env.pop();
            return Expr::lambda(param, (**domain).clone(), body);
        }
        if depth == 0 || rng.random_bool(leaf_bias) {
            return self.leaf(rng, ty);
        }
        self.compound(rng, env, ty, depth)
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R, ty: &Type) -> Expr {
        match ty {
            Type::Bool => Expr::Bool(rng.random_bool(0.5)),
            Type::Act => Expr::Skip,
            Type::Obj => Expr::constant(*self.constants.choose(rng).expect("nonempty")),
            Type::Fun(..) => unreachable!("function types have no leaves"),
        }
    }

    /// A term of type `ty` built from a call, conditional, sequence or
    /// application. Needs `depth >= 1 + spine(ty)`.
    fn compound<R: Rng + ?Sized>(&self, rng: &mut R, env: &mut Vec<(String, Type)>, ty: &Type, depth: usize) -> Expr {
        let sub = depth - 1;
        let can_apply = ty.spine() < sub;
        let calls: &[(&str, usize)] = match ty {
            Type::Bool => &self.predicates,
            Type::Act => &self.actions,
            _ => &[],
        };
        let mut options = vec![0]; // conditional
        if !calls.is_empty() {
            options.extend([1, 1]);
        }
        if *ty == Type::Act {
            options.push(2);
        }
        if can_apply {
            options.extend([3, 3]);
        }
        match *options.choose(rng).expect("nonempty") {
            1 => {
                let &(name, arity) = calls.choose(rng).expect("nonempty");
                let args = (0..arity).map(|_| self.gen(rng, env, &Type::Obj, sub)).collect();
                if *ty == Type::Bool {
                    Expr::pred(name, args)
                } else {
                    Expr::act(name, args)
                }
            }
            2 => Expr::seq(self.gen(rng, env, &Type::Act, sub), self.gen(rng, env, &Type::Act, sub)),
            3 => {
                let domain = loop {
                    let d = random_domain(rng, *ty == Type::Act);
                    if d.spine() <= sub {
                        break d;
                    }
                };
                let fun_ty = Type::fun(domain.clone(), ty.clone());
                Expr::app(self.gen(rng, env, &fun_ty, sub), self.gen(rng, env, &domain, sub))
            }
            _ => Expr::cond(
                self.gen(rng, env, &Type::Bool, sub),
                self.gen(rng, env, ty, sub),
                self.gen(rng, env, ty, sub),
            ),
        }
    }
}
