//! Small-step evaluation against a live application.
//!
//! The interpreter never sees application state: constants, predicates and
//! actions are reduced by calling the connector. Application is
//! call-by-name, call arguments are reduced left to right, and a class-guard
//! failure turns the call into the exception value `*`, which then swallows
//! every enclosing redex.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::app::{
    format_classes, format_signature, guard_check, AppError, Class, Connector, InterfaceDescriptor,
    ObjectRef, Outcome, Signature,
};
use crate::calculus::{has_runtime_type, type_of, Expr, TypeEnv};

pub const DEFAULT_FUEL: usize = 10_000;

/// The reduction rules, named as in the trace output.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    App1,
    App2,
    App3,
    OCon,
    PCon1,
    PCon2,
    PCon3,
    If1,
    If2,
    If3,
    Seq1,
    Seq2,
    Seq3,
    ACon1,
    ACon2,
    ACon3,
    ACon4,
}

impl Rule {
    pub const ALL: [Rule; 17] = [
        Rule::App1,
        Rule::App2,
        Rule::App3,
        Rule::OCon,
        Rule::PCon1,
        Rule::PCon2,
        Rule::PCon3,
        Rule::If1,
        Rule::If2,
        Rule::If3,
        Rule::Seq1,
        Rule::Seq2,
        Rule::Seq3,
        Rule::ACon1,
        Rule::ACon2,
        Rule::ACon3,
        Rule::ACon4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::App1 => "Red App 1",
            Rule::App2 => "Red App 2",
            Rule::App3 => "Red App 3",
            Rule::OCon => "Red OCon",
            Rule::PCon1 => "Red PCon 1",
            Rule::PCon2 => "Red PCon 2",
            Rule::PCon3 => "Red PCon 3",
            Rule::If1 => "Red If 1",
            Rule::If2 => "Red If 2",
            Rule::If3 => "Red If 3",
            Rule::Seq1 => "Red Seq 1",
            Rule::Seq2 => "Red Seq 2",
            Rule::Seq3 => "Red Seq 3",
            Rule::ACon1 => "Red ACon 1",
            Rule::ACon2 => "Red ACon 2",
            Rule::ACon3 => "Red ACon 3",
            Rule::ACon4 => "Red ACon 4",
        }
    }

    /// Rules that turn a subterm's exception into the whole term's.
    pub fn propagates_exception(self) -> bool {
        matches!(self, Rule::App2 | Rule::PCon2 | Rule::If2 | Rule::Seq2 | Rule::ACon2)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a transition did to or learned from the application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Note {
    Resolved { constant: String, object: ObjectRef },
    Queried { predicate: String, args: Vec<ObjectRef>, value: bool },
    Performed { action: String, args: Vec<ObjectRef> },
    /// The call was refused, either by the class guard (before reaching the
    /// application) or by the application itself.
    Rejected {
        name: String,
        args: Vec<ObjectRef>,
        classes: Vec<BTreeSet<Class>>,
        signature: Signature,
        by_application: bool,
    },
}

fn call_text(name: &str, args: &[ObjectRef]) -> String {
    let args: Vec<&str> = args.iter().map(ObjectRef::display_name).collect();
    format!("{name}({})", args.join(", "))
}

impl fmt::Display for Note {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Note::Resolved { constant, object } => write!(f, "{constant}() is {object}"),
            Note::Queried { predicate, args, value } => {
                write!(f, "{} = {value}", call_text(predicate, args))
            }
            Note::Performed { action, args } => write!(f, "performed {}", call_text(action, args)),
            Note::Rejected { name, args, by_application: true, .. } => {
                write!(f, "{} raised an exception in the application", call_text(name, args))
            }
            Note::Rejected { name, args, classes, signature, by_application: false } => {
                let classes: Vec<String> = classes.iter().map(format_classes).collect();
                write!(
                    f,
                    "{} was not invoked: argument classes ({}) fit no signature of {name}: {}",
                    call_text(name, args),
                    classes.join(", "),
                    format_signature(signature)
                )
            }
        }
    }
}

/// One transition `e -> expr`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub expr: Expr,
    /// The rule concluding the transition.
    pub rule: Rule,
    /// The axiom at the top of the derivation, where the redex was contracted.
    pub redex_rule: Rule,
    pub note: Option<Note>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// The term before the transition.
    pub expr: Expr,
    pub rule: Rule,
    pub redex_rule: Rule,
    pub note: Option<Note>,
}

/// Every transition of a run, and the value it ended in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepTrace {
    pub steps: Vec<TraceStep>,
    pub value: Expr,
}

impl StepTrace {
    /// `<rule> | <term>` per step, then `value: <term>`.
    pub fn lines(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|s| format!("{} | {}", s.rule, s.expr))
            .chain(std::iter::once(format!("value: {}", self.value)))
            .collect()
    }

    pub fn snapshots(&self) -> impl Iterator<Item = &Expr> {
        self.steps.iter().map(|s| &s.expr).chain(std::iter::once(&self.value))
    }

    pub fn raised_exception(&self) -> bool {
        self.value == Expr::Exception
    }

    /// The call that raised the exception, if any.
    pub fn rejection(&self) -> Option<&Note> {
        self.steps
            .iter()
            .filter_map(|s| s.note.as_ref())
            .rfind(|n| matches!(n, Note::Rejected { .. }))
    }

    pub fn notes(&self) -> impl Iterator<Item = &Note> {
        self.steps.iter().filter_map(|s| s.note.as_ref())
    }
}

impl fmt::Display for StepTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no reduction rule applies to `{0}`")]
    Stuck(Expr),
    #[error("evaluation did not finish within {0} steps")]
    FuelExhausted(usize),
    #[error(transparent)]
    App(#[from] AppError),
}

/// Performs one transition, or returns `None` if `e` is already a value.
pub fn step<C: Connector + ?Sized>(conn: &mut C, e: &Expr) -> Result<Option<Transition>, EvalError> {
    if e.is_value() {
        Ok(None)
    } else {
        reduce(conn, e).map(Some)
    }
}

fn axiom(expr: Expr, rule: Rule, note: Option<Note>) -> Transition {
    Transition { expr, rule, redex_rule: rule, note }
}

/// Lifts a subterm transition through a congruence rule, or through the
/// matching propagation rule when the subterm became `*`.
fn lift(
    sub: Transition,
    congruence: Rule,
    propagation: Rule,
    rebuild: impl FnOnce(Expr) -> Expr,
) -> Transition {
    if sub.expr == Expr::Exception {
        Transition { expr: Expr::Exception, rule: propagation, ..sub }
    } else {
        Transition { expr: rebuild(sub.expr), rule: congruence, redex_rule: sub.redex_rule, note: sub.note }
    }
}

fn reduce<C: Connector + ?Sized>(conn: &mut C, e: &Expr) -> Result<Transition, EvalError> {
    let stuck = || EvalError::Stuck(e.clone());
    match e {
        Expr::App(fun, arg) => match &**fun {
            Expr::Lambda { param, body, .. } => {
                Ok(axiom(body.substitute(param, arg), Rule::App3, None))
            }
            Expr::Exception => Ok(axiom(Expr::Exception, Rule::App2, None)),
            f if f.is_value() => Err(stuck()),
            f => {
                let sub = reduce(conn, f)?;
                Ok(lift(sub, Rule::App1, Rule::App2, |f2| Expr::app(f2, (**arg).clone())))
            }
        },
        Expr::Const(name) => {
            let object = conn.resolve_constant(name)?;
            let note = Note::Resolved { constant: name.clone(), object: object.clone() };
            Ok(axiom(Expr::Obj(object), Rule::OCon, Some(note)))
        }
        Expr::Pred(name, args) => reduce_call(conn, e, name, args, true),
        Expr::Act(name, args) => reduce_call(conn, e, name, args, false),
        Expr::Cond(test, then, otherwise) => match &**test {
            Expr::Bool(true) => Ok(axiom((**then).clone(), Rule::If3, None)),
            Expr::Bool(false) => Ok(axiom((**otherwise).clone(), Rule::If3, None)),
            Expr::Exception => Ok(axiom(Expr::Exception, Rule::If2, None)),
            t if t.is_value() => Err(stuck()),
            t => {
                let sub = reduce(conn, t)?;
                Ok(lift(sub, Rule::If1, Rule::If2, |t2| {
                    Expr::cond(t2, (**then).clone(), (**otherwise).clone())
                }))
            }
        },
        Expr::Seq(first, second) => match &**first {
            Expr::Skip => Ok(axiom((**second).clone(), Rule::Seq3, None)),
            Expr::Exception => Ok(axiom(Expr::Exception, Rule::Seq2, None)),
            a if a.is_value() => Err(stuck()),
            a => {
                // An exception in the first action is kept in place and
                // discharged by the next step.
                let sub = reduce(conn, a)?;
                Ok(Transition {
                    expr: Expr::seq(sub.expr, (**second).clone()),
                    rule: Rule::Seq1,
                    redex_rule: sub.redex_rule,
                    note: sub.note,
                })
            }
        },
        Expr::Var(_)
        | Expr::Bool(_)
        | Expr::Lambda { .. }
        | Expr::Skip
        | Expr::Obj(_)
        | Expr::Exception => Err(stuck()),
    }
}

fn reduce_call<C: Connector + ?Sized>(
    conn: &mut C,
    e: &Expr,
    name: &str,
    args: &[Expr],
    is_pred: bool,
) -> Result<Transition, EvalError> {
    let (arg_rule, exc_rule) = if is_pred { (Rule::PCon1, Rule::PCon2) } else { (Rule::ACon1, Rule::ACon2) };
    let rebuild = |args: Vec<Expr>| {
        if is_pred {
            Expr::Pred(name.to_owned(), args)
        } else {
            Expr::Act(name.to_owned(), args)
        }
    };

    if let Some(i) = args.iter().position(|a| !a.is_value()) {
        let sub = reduce(conn, &args[i])?;
        return Ok(lift(sub, arg_rule, exc_rule, |a2| {
            let mut new_args = args.to_vec();
            new_args[i] = a2;
            rebuild(new_args)
        }));
    }
    if args.contains(&Expr::Exception) {
        return Ok(axiom(Expr::Exception, exc_rule, None));
    }
    let objects: Vec<ObjectRef> = args
        .iter()
        .map(|a| match a {
            Expr::Obj(o) => Some(o.clone()),
            _ => None,
        })
        .collect::<Option<_>>()
        .ok_or_else(|| EvalError::Stuck(e.clone()))?;

    let descriptor = conn.descriptor();
    let signature = if is_pred { descriptor.sigma_pred.get(name) } else { descriptor.sigma_act.get(name) }
        .cloned()
        .ok_or_else(|| AppError::UnknownName(name.to_owned()))?;
    let classes = objects.iter().map(|o| conn.classes_of(o)).collect::<Result<Vec<_>, _>>()?;
    let rejected = |by_application| Note::Rejected {
        name: name.to_owned(),
        args: objects.clone(),
        classes: classes.clone(),
        signature: signature.clone(),
        by_application,
    };
    let (call_rule, fail_rule) = if is_pred { (Rule::PCon3, Rule::PCon3) } else { (Rule::ACon3, Rule::ACon4) };

    if !guard_check(&signature, &classes) {
        return Ok(axiom(Expr::Exception, fail_rule, Some(rejected(false))));
    }
    if is_pred {
        match conn.query_predicate(name, &objects)? {
            Outcome::Value(value) => {
                let note = Note::Queried { predicate: name.to_owned(), args: objects.clone(), value };
                Ok(axiom(Expr::Bool(value), call_rule, Some(note)))
            }
            Outcome::Exception => Ok(axiom(Expr::Exception, fail_rule, Some(rejected(true)))),
        }
    } else {
        match conn.perform_action(name, &objects)? {
            Outcome::Value(()) => {
                let note = Note::Performed { action: name.to_owned(), args: objects.clone() };
                Ok(axiom(Expr::Skip, call_rule, Some(note)))
            }
            Outcome::Exception => Ok(axiom(Expr::Exception, fail_rule, Some(rejected(true)))),
        }
    }
}

/// Reduces `e` to a value, recording every transition. Gives up after
/// `fuel` transitions.
pub fn evaluate<C: Connector + ?Sized>(
    conn: &mut C,
    e: &Expr,
    fuel: usize,
) -> Result<StepTrace, EvalError> {
    let mut steps = Vec::new();
    let mut current = e.clone();
    loop {
        if steps.len() == fuel && !current.is_value() {
            return Err(EvalError::FuelExhausted(fuel));
        }
        let Some(t) = step(conn, &current)? else { break };
        let next = t.expr;
        steps.push(TraceStep { expr: current, rule: t.rule, redex_rule: t.redex_rule, note: t.note });
        current = next;
    }
    Ok(StepTrace { steps, value: current })
}

/// True when every term of the trace, including the final value, has the
/// type of `e`. The exception value counts as having every type.
pub fn check_preservation(e: &Expr, trace: &StepTrace, iface: &InterfaceDescriptor) -> bool {
    let Ok(ty) = type_of(&TypeEnv::new(), e, iface) else {
        return false;
    };
    trace.snapshots().all(|s| has_runtime_type(s, &ty, iface))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{parse_expr, Type};
    use crate::toyblocks::{self, block_one, block_two};

    fn parse(src: &str) -> Expr {
        parse_expr(src, &toyblocks::descriptor()).unwrap()
    }

    #[test]
    fn seq_drops_completed_skip() {
        let mut c = toyblocks::model().into_connector();
        let t = step(&mut c, &Expr::seq(Expr::Skip, Expr::Skip)).unwrap().unwrap();
        assert_eq!((t.expr, t.rule), (Expr::Skip, Rule::Seq3));
    }

    #[test]
    fn beta_passes_the_unevaluated_argument() {
        let mut c = toyblocks::model().into_connector();
        let e = Expr::app(Expr::lambda("x", Type::Obj, Expr::var("x")), Expr::constant("b2"));
        let t = step(&mut c, &e).unwrap().unwrap();
        assert_eq!((t.expr, t.rule), (Expr::constant("b2"), Rule::App3));
    }

    #[test]
    fn action_on_object_values_advances_the_model() {
        let mut c = toyblocks::model().into_connector();
        let e = Expr::act("move", vec![Expr::Obj(block_one()), Expr::Obj(block_two())]);
        let t = step(&mut c, &e).unwrap().unwrap();
        assert_eq!((t.expr, t.rule), (Expr::Skip, Rule::ACon3));
        assert_eq!(c.current(), "s2");
    }

    #[test]
    fn values_do_not_step() {
        let mut c = toyblocks::model().into_connector();
        assert_eq!(step(&mut c, &Expr::Skip), Ok(None));
        assert_eq!(step(&mut c, &Expr::Exception), Ok(None));
    }

    #[test]
    fn direct_move_trace() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("(\\x:Obj. \\y:Obj. move(x, y)) (b1()) (b2())");
        let trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        let rules: Vec<Rule> = trace.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, [Rule::App1, Rule::App3, Rule::ACon1, Rule::ACon1, Rule::ACon3]);
        assert_eq!(trace.value, Expr::Skip);
        assert_eq!(c.current(), "s2");
    }

    #[test]
    fn guard_failure_raises_without_calling() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("move(table(), b1())");
        let trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        assert_eq!(trace.value, Expr::Exception);
        assert_eq!(trace.steps.last().unwrap().rule, Rule::ACon4);
        assert_eq!(c.current(), "s1");
        let note = trace.rejection().unwrap().to_string();
        assert_eq!(
            note,
            "move(the table, block 1) was not invoked: argument classes ({position}, {block, position}) \
             fit no signature of move: (block, position)"
        );
    }

    #[test]
    fn exception_propagates_through_congruences() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("is_on(table(), b1()) ? skip : move(b1(), b2())");
        let trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        assert_eq!(trace.value, Expr::Exception);
        assert_eq!(trace.steps.last().unwrap().rule, Rule::If2);
        assert_eq!(trace.steps.last().unwrap().redex_rule, Rule::PCon3);

        let mut c = toyblocks::model().into_connector();
        let e = parse("move(table(), b1()); move(b1(), b2())");
        let trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        let rules: Vec<Rule> = trace.steps.iter().map(|s| s.rule).collect();
        assert_eq!(rules, [Rule::Seq1, Rule::Seq1, Rule::Seq1, Rule::Seq2]);
        assert_eq!(c.current(), "s1");
    }

    #[test]
    fn earlier_actions_stay_performed_after_an_exception() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("move(b1(), b2()); move(table(), b1())");
        let trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        assert_eq!(trace.value, Expr::Exception);
        assert_eq!(c.current(), "s2");
    }

    #[test]
    fn conditional_selects_second_operand_on_true() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("is_on(b1(), table()) ? move(b1(), b2()) : skip");
        evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        assert_eq!(c.current(), "s2");
    }

    #[test]
    fn open_and_ill_typed_terms_get_stuck() {
        let mut c = toyblocks::model().into_connector();
        assert!(matches!(evaluate(&mut c, &Expr::var("x"), 10), Err(EvalError::Stuck(_))));
        assert!(matches!(
            evaluate(&mut c, &Expr::seq(Expr::Bool(true), Expr::Skip), 10),
            Err(EvalError::Stuck(_))
        ));
        assert!(matches!(
            evaluate(&mut c, &Expr::act("move", vec![Expr::Bool(true), Expr::Skip]), 10),
            Err(EvalError::Stuck(_))
        ));
    }

    #[test]
    fn fuel_bounds_the_run() {
        let mut c = toyblocks::model().into_connector();
        let e = parse("skip; skip; skip");
        assert_eq!(evaluate(&mut c, &e, 1), Err(EvalError::FuelExhausted(1)));
        assert_eq!(evaluate(&mut c, &e, 2).unwrap().steps.len(), 2);
    }

    #[test]
    fn preservation_checks() {
        let iface = toyblocks::descriptor();
        let mut c = toyblocks::model().into_connector();
        let e = Expr::seq(Expr::Skip, Expr::Skip);
        let mut trace = evaluate(&mut c, &e, DEFAULT_FUEL).unwrap();
        assert!(check_preservation(&e, &trace, &iface));
        trace.steps[0].expr = Expr::Bool(true);
        assert!(!check_preservation(&e, &trace, &iface));
    }
}
