//! Test oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::{Arc, Mutex};

use nlui_core::app::{guard_check, AppError, Class, Connector, InterfaceDescriptor, ObjectRef, Outcome};
use nlui_core::grammar::{Category, TypeAssignment};
use nlui_core::Expr;

/// The `is_on` table of the ToyBlocks model, row by row: state, block,
/// position, value.
pub const IS_ON_TABLE: [(&str, &str, &str, bool); 18] = [
    ("s1", "b1", "t", true),
    ("s1", "b2", "t", true),
    ("s1", "b1", "b1", false),
    ("s1", "b1", "b2", false),
    ("s1", "b2", "b1", false),
    ("s1", "b2", "b2", false),
    ("s2", "b1", "b2", true),
    ("s2", "b2", "t", true),
    ("s2", "b1", "t", false),
    ("s2", "b1", "b1", false),
    ("s2", "b2", "b1", false),
    ("s2", "b2", "b2", false),
    ("s3", "b1", "t", true),
    ("s3", "b2", "b1", true),
    ("s3", "b1", "b1", false),
    ("s3", "b1", "b2", false),
    ("s3", "b2", "t", false),
    ("s3", "b2", "b2", false),
];

/// The `move` table: state, block, position, resulting state.
pub const MOVE_TABLE: [(&str, &str, &str, &str); 18] = [
    ("s1", "b1", "b2", "s2"),
    ("s1", "b2", "b1", "s3"),
    ("s1", "b1", "t", "s1"),
    ("s1", "b1", "b1", "s1"),
    ("s1", "b2", "t", "s1"),
    ("s1", "b2", "b2", "s1"),
    ("s2", "b1", "t", "s1"),
    ("s2", "b1", "b1", "s2"),
    ("s2", "b1", "b2", "s2"),
    ("s2", "b2", "t", "s2"),
    ("s2", "b2", "b1", "s2"),
    ("s2", "b2", "b2", "s2"),
    ("s3", "b2", "t", "s1"),
    ("s3", "b1", "t", "s3"),
    ("s3", "b1", "b1", "s3"),
    ("s3", "b1", "b2", "s3"),
    ("s3", "b2", "b1", "s3"),
    ("s3", "b2", "b2", "s3"),
];

pub fn object(id: &str) -> ObjectRef {
    match id {
        "b1" => nlui_core::toyblocks::block_one(),
        "b2" => nlui_core::toyblocks::block_two(),
        "t" => nlui_core::toyblocks::table(),
        _ => panic!("no object {id}"),
    }
}

#[derive(Debug, Default)]
pub struct SpyLog {
    pub resolved: Vec<String>,
    pub queried: Vec<(String, Vec<ObjectRef>)>,
    pub performed: Vec<(String, Vec<ObjectRef>)>,
    /// Calls whose arguments fail the guard of the callee.
    pub unguarded: Vec<(String, Vec<ObjectRef>)>,
}

/// Wraps a connector and records every call made through it.
pub struct SpyConnector<C> {
    inner: C,
    pub log: Arc<Mutex<SpyLog>>,
}

impl<C: Connector> SpyConnector<C> {
    pub fn new(inner: C) -> (Self, Arc<Mutex<SpyLog>>) {
        let log = Arc::new(Mutex::new(SpyLog::default()));
        (SpyConnector { inner, log: log.clone() }, log)
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }

    fn check_guard(&mut self, name: &str, args: &[ObjectRef], sigma: Option<&BTreeSet<Vec<Class>>>) {
        let classes: Vec<_> = args.iter().map(|o| self.inner.classes_of(o).unwrap_or_default()).collect();
        if !sigma.is_some_and(|s| guard_check(s, &classes)) {
            self.log.lock().unwrap().unguarded.push((name.to_owned(), args.to_vec()));
        }
    }
}

impl<C: Connector> Connector for SpyConnector<C> {
    fn descriptor(&self) -> &InterfaceDescriptor {
        self.inner.descriptor()
    }

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError> {
        self.log.lock().unwrap().resolved.push(name.to_owned());
        self.inner.resolve_constant(name)
    }

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError> {
        let sigma = self.inner.descriptor().sigma_pred.get(name).cloned();
        self.check_guard(name, args, sigma.as_ref());
        self.log.lock().unwrap().queried.push((name.to_owned(), args.to_vec()));
        self.inner.query_predicate(name, args)
    }

    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError> {
        let sigma = self.inner.descriptor().sigma_act.get(name).cloned();
        self.check_guard(name, args, sigma.as_ref());
        self.log.lock().unwrap().performed.push((name.to_owned(), args.to_vec()));
        self.inner.perform_action(name, args)
    }

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        self.inner.classes_of(obj)
    }
}

/// Every term some derivation of `antecedent ⇒ goal` synthesizes, found by
/// trying each rule schema against every decomposition of the sequent.
/// No memoization and no pruning; hypotheses are named `h<n>`.
pub fn naive_terms(antecedent: &[(Expr, Category)], goal: &Category, types: &TypeAssignment) -> Vec<Expr> {
    let mut counter = 0;
    naive(antecedent, goal, types, &mut counter)
}

fn naive(ant: &[(Expr, Category)], goal: &Category, types: &TypeAssignment, counter: &mut usize) -> Vec<Expr> {
    let mut out = Vec::new();
    if ant.is_empty() {
        return out;
    }
    // (Seq Id)
    if let [(term, cat)] = ant {
        if cat == goal {
            out.push(term.clone());
        }
    }
    // (Seq App Right): Σ1, α:A/B, Δ, Σ2  and  (Seq App Left): Σ1, Δ, α:B\A, Σ2
    let n = ant.len();
    for a in 0..=n {
        for b in a..=n {
            for c in b..=n {
                // ant = [0,a) ++ [a,b) ++ [b,c) ++ [c,n)
                let (sigma1, mid1, mid2, sigma2) = (&ant[..a], &ant[a..b], &ant[b..c], &ant[c..]);
                if let [(alpha, Category::Over(result, arg))] = mid1 {
                    for beta in naive(mid2, arg, types, counter) {
                        let mut rest = sigma1.to_vec();
                        rest.push((Expr::app(alpha.clone(), beta), (**result).clone()));
                        rest.extend_from_slice(sigma2);
                        out.extend(naive(&rest, goal, types, counter));
                    }
                }
                if let [(alpha, Category::Under(arg, result))] = mid2 {
                    for beta in naive(mid1, arg, types, counter) {
                        let mut rest = sigma1.to_vec();
                        rest.push((Expr::app(alpha.clone(), beta), (**result).clone()));
                        rest.extend_from_slice(sigma2);
                        out.extend(naive(&rest, goal, types, counter));
                    }
                }
            }
        }
    }
    // (Seq Abs Right) and (Seq Abs Left)
    let abs = match goal {
        Category::Over(result, arg) => Some((true, result, arg)),
        Category::Under(arg, result) => Some((false, result, arg)),
        Category::Base(_) => None,
    };
    if let Some((right, result, arg)) = abs {
        *counter += 1;
        let h = format!("h{counter}");
        let hyp = (Expr::var(h.clone()), (**arg).clone());
        let extended: Vec<_> = if right {
            ant.iter().cloned().chain(std::iter::once(hyp)).collect()
        } else {
            std::iter::once(hyp).chain(ant.iter().cloned()).collect()
        };
        let ty = types.assign(arg).expect("known base categories");
        for body in naive(&extended, result, types, counter) {
            out.push(Expr::lambda(h.clone(), ty.clone(), body));
        }
    }
    out
}
