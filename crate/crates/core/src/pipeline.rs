//! Parse, typecheck, evaluate and report: one sentence at a time against a
//! live application.

use std::fmt;

use crate::app::{guard_check, AppError, Connector, InterfaceDescriptor, ObjectRef, Outcome};
use crate::calculus::{type_of, Expr, Type, TypeEnv};
use crate::grammar::{parse_bounded, parse_category, tokenize, Lexicon, ParseError, DEFAULT_SEARCH_LIMIT};
use crate::interp::{evaluate, StepTrace, DEFAULT_FUEL};
use crate::toyblocks;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CommandKind {
    Imperative,
    Query,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Imperative => "imperative",
            CommandKind::Query => "query",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandOutcome {
    Ok,
    /// Evaluation ended in the exception value.
    Exception { detail: String },
    ParseError { variant: &'static str, detail: String },
    /// The application or the evaluator failed outright.
    Failure { detail: String },
}

/// A ground predicate fact, with objects by display name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fact {
    pub predicate: String,
    pub args: Vec<String>,
    pub value: bool,
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) = {}", self.predicate, self.args.join(", "), self.value)
    }
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub kind: CommandKind,
    pub outcome: CommandOutcome,
    /// Set for queries that evaluated to a truth value.
    pub answer: Option<bool>,
    /// The parsed term, when parsing succeeded.
    pub term: Option<Expr>,
    pub trace: Option<StepTrace>,
    /// Every fact after the command ran.
    pub state_view: Vec<Fact>,
}

impl CommandResult {
    pub fn is_ok(&self) -> bool {
        self.outcome == CommandOutcome::Ok
    }

    /// Whether the application may have changed state.
    pub fn evaluated_imperative(&self) -> bool {
        self.kind == CommandKind::Imperative && self.trace.is_some()
    }

    /// One-line summary: `ok`, `yes`, `no`, `exception: ...` or
    /// `error: <variant>: ...`.
    pub fn summary(&self) -> String {
        match &self.outcome {
            CommandOutcome::Ok => match (self.answer, &self.trace) {
                (Some(true), _) => "yes".to_owned(),
                (Some(false), _) => "no".to_owned(),
                (None, Some(t)) if self.kind == CommandKind::Query => format!("value: {}", t.value),
                _ => "ok".to_owned(),
            },
            CommandOutcome::Exception { detail } => format!("exception: {detail}"),
            CommandOutcome::ParseError { variant, detail } => format!("error: {variant}: {detail}"),
            CommandOutcome::Failure { detail } => format!("error: Failure: {detail}"),
        }
    }

    fn failed(kind: CommandKind, outcome: CommandOutcome) -> Self {
        CommandResult { kind, outcome, answer: None, term: None, trace: None, state_view: Vec::new() }
    }
}

/// A lexicon and the application it drives.
pub struct Session {
    lexicon: Lexicon,
    connector: Box<dyn Connector + Send>,
    pub fuel: usize,
    pub search_limit: usize,
}

impl Session {
    pub fn new(lexicon: Lexicon, connector: impl Connector + Send + 'static) -> Self {
        Session { lexicon, connector: Box::new(connector), fuel: DEFAULT_FUEL, search_limit: DEFAULT_SEARCH_LIMIT }
    }

    /// ToyBlocks with the live connector, both blocks on the table.
    pub fn toyblocks() -> Self {
        Session::new(toyblocks::lexicon(), toyblocks::live_connector())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn descriptor(&self) -> &InterfaceDescriptor {
        self.connector.descriptor()
    }

    pub fn connector_mut(&mut self) -> &mut (dyn Connector + Send) {
        self.connector.as_mut()
    }

    /// Runs one sentence. A trailing `?` makes it a query; otherwise it is
    /// read as a command, or as a query if it only parses as one.
    pub fn run_command(&mut self, text: &str) -> CommandResult {
        let sentence = tokenize(text);
        let goals: &[(&str, CommandKind)] = if sentence.query {
            &[("s", CommandKind::Query)]
        } else {
            &[("a", CommandKind::Imperative), ("s", CommandKind::Query)]
        };
        let mut first_error = None;
        for &(goal, kind) in goals {
            let goal_cat = parse_category(goal).expect("base category");
            match parse_bounded(&sentence.words, &self.lexicon, &goal_cat, self.search_limit) {
                Ok(parsed) => return self.run_parsed(kind, parsed.term),
                Err(ParseError::NoParse { .. }) => {
                    first_error.get_or_insert((kind, ParseError::NoParse { goal: goal_cat }));
                }
                Err(e) => {
                    first_error = Some((kind, e));
                    break;
                }
            }
        }
        let (kind, error) = first_error.expect("at least one goal tried");
        let mut result = CommandResult::failed(
            kind,
            CommandOutcome::ParseError { variant: error.variant(), detail: error.to_string() },
        );
        self.attach_state(&mut result);
        result
    }

    /// Typechecks and runs a term directly. `Act` terms run as commands,
    /// anything else as a query.
    pub fn run_term(&mut self, term: Expr) -> CommandResult {
        let kind = match type_of(&TypeEnv::new(), &term, self.descriptor()) {
            Ok(Type::Act) => CommandKind::Imperative,
            Ok(_) => CommandKind::Query,
            Err(e) => {
                let mut result = CommandResult::failed(
                    CommandKind::Query,
                    CommandOutcome::Failure { detail: format!("type error: {e}") },
                );
                result.term = Some(term);
                self.attach_state(&mut result);
                return result;
            }
        };
        self.run_parsed(kind, term)
    }

    fn run_parsed(&mut self, kind: CommandKind, term: Expr) -> CommandResult {
        let expected = match kind {
            CommandKind::Imperative => Type::Act,
            CommandKind::Query => Type::Bool,
        };
        let mut result = CommandResult::failed(kind, CommandOutcome::Ok);
        match type_of(&TypeEnv::new(), &term, self.descriptor()) {
            Ok(ty) if ty == expected || kind == CommandKind::Query => {}
            Ok(ty) => {
                result.outcome = CommandOutcome::Failure { detail: format!("term has type {ty}, expected {expected}") };
            }
            Err(e) => result.outcome = CommandOutcome::Failure { detail: format!("type error: {e}") },
        }
        if result.outcome == CommandOutcome::Ok {
            match evaluate(self.connector.as_mut(), &term, self.fuel) {
                Ok(trace) => {
                    if trace.raised_exception() {
                        let detail = match trace.rejection() {
                            Some(note) => note.to_string(),
                            None => "the command raised an exception".to_owned(),
                        };
                        result.outcome = CommandOutcome::Exception { detail };
                    } else if let Expr::Bool(b) = trace.value {
                        result.answer = Some(b);
                    }
                    result.trace = Some(trace);
                }
                Err(e) => result.outcome = CommandOutcome::Failure { detail: e.to_string() },
            }
        }
        result.term = Some(term);
        self.attach_state(&mut result);
        result
    }

    fn attach_state(&mut self, result: &mut CommandResult) {
        match self.state_view() {
            Ok(facts) => result.state_view = facts,
            Err(e) => {
                if result.outcome == CommandOutcome::Ok {
                    result.outcome = CommandOutcome::Failure { detail: format!("reading state: {e}") };
                }
            }
        }
    }

    /// Every predicate over every tuple of constants that passes its guard.
    pub fn state_view(&mut self) -> Result<Vec<Fact>, AppError> {
        let descriptor = self.connector.descriptor().clone();
        let mut objects: Vec<(ObjectRef, _)> = Vec::new();
        for c in &descriptor.constants {
            let obj = self.connector.resolve_constant(c)?;
            if !objects.iter().any(|(o, _)| *o == obj) {
                let classes = self.connector.classes_of(&obj)?;
                objects.push((obj, classes));
            }
        }
        let mut facts = Vec::new();
        for (pred, &arity) in &descriptor.predicates {
            let signature = &descriptor.sigma_pred[pred];
            let mut tuples: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..arity {
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        (0..objects.len()).map(move |i| {
                            let mut t = t.clone();
                            t.push(i);
                            t
                        })
                    })
                    .collect();
            }
            for tuple in tuples {
                let classes: Vec<_> = tuple.iter().map(|&i| objects[i].1.clone()).collect();
                if !guard_check(signature, &classes) {
                    continue;
                }
                let args: Vec<ObjectRef> = tuple.iter().map(|&i| objects[i].0.clone()).collect();
                if let Outcome::Value(value) = self.connector.query_predicate(pred, &args)? {
                    facts.push(Fact {
                        predicate: pred.clone(),
                        args: args.iter().map(|o| o.display_name().to_owned()).collect(),
                        value,
                    });
                }
            }
        }
        Ok(facts)
    }
}
