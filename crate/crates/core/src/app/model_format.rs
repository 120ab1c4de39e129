//! Line-oriented text format for [`ModelApplication`].
//!
//! ```text
//! # comment
//! classes: block, position
//! constant b1 : {block, position}
//! predicate is_on/2 : (block, position)
//! action move/2 : (block, position) | (position, block)
//! states: s1, s2
//! current: s1
//! object b1 "block 1" : {block, position}
//! const s1 b1 = b1
//! pred s1 is_on(b1, t) = true
//! act s1 move(b1, b2) = s2
//! ```
//!
//! An empty signature is written as nothing after the colon; a nullary
//! action's single empty tuple is `()`. Loading validates the model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::model::ModelViolation;
use super::{format_classes, Class, InterfaceDescriptor, ModelApplication, ObjectRef, Signature};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<ModelViolation>),
}

fn signature_text(sig: &Signature) -> String {
    sig.iter().map(|t| format!("({})", t.join(", "))).collect::<Vec<_>>().join(" | ")
}

fn args_text(args: &[ObjectRef]) -> String {
    args.iter().map(|o| o.id()).collect::<Vec<_>>().join(", ")
}

/// Serialises a model; [`parse_model`] reads the output back unchanged.
pub fn model_to_text(m: &ModelApplication) -> String {
    let d = &m.descriptor;
    let mut out = String::new();
    let join = |items: &BTreeSet<String>| items.iter().cloned().collect::<Vec<_>>().join(", ");

    writeln!(out, "classes: {}", join(&d.classes)).unwrap();
    for c in &d.constants {
        let classes = d.sigma_const.get(c).cloned().unwrap_or_default();
        writeln!(out, "constant {c} : {}", format_classes(&classes)).unwrap();
    }
    for (p, n) in &d.predicates {
        let sig = d.sigma_pred.get(p).cloned().unwrap_or_default();
        writeln!(out, "predicate {p}/{n} : {}", signature_text(&sig)).unwrap();
    }
    for (a, n) in &d.actions {
        let sig = d.sigma_act.get(a).cloned().unwrap_or_default();
        writeln!(out, "action {a}/{n} : {}", signature_text(&sig)).unwrap();
    }
    out.push('\n');
    writeln!(out, "states: {}", join(&m.states)).unwrap();
    writeln!(out, "current: {}", m.current).unwrap();
    for (o, classes) in &m.objects {
        writeln!(out, "object {} {:?} : {}", o.id(), o.display_name(), format_classes(classes)).unwrap();
    }
    out.push('\n');
    for ((s, c), o) in &m.interp_const {
        writeln!(out, "const {s} {c} = {}", o.id()).unwrap();
    }
    out.push('\n');
    for ((s, p, args), v) in &m.interp_pred {
        writeln!(out, "pred {s} {p}({}) = {v}", args_text(args)).unwrap();
    }
    out.push('\n');
    for ((s, a, args), next) in &m.interp_act {
        writeln!(out, "act {s} {a}({}) = {next}", args_text(args)).unwrap();
    }
    // empty signatures leave a trailing space
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

struct LineParser {
    line: usize,
}

impl LineParser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ModelFormatError> {
        Err(ModelFormatError::Syntax { line: self.line, message: message.into() })
    }

    fn split_once<'a>(&self, s: &'a str, sep: &str) -> Result<(&'a str, &'a str), ModelFormatError> {
        match s.split_once(sep) {
            Some((a, b)) => Ok((a.trim(), b.trim())),
            None => self.err(format!("expected `{sep}`")),
        }
    }

    fn name<'a>(&self, s: &'a str) -> Result<&'a str, ModelFormatError> {
        let s = s.trim();
        let valid = !s.is_empty()
            && s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if valid {
            Ok(s)
        } else {
            self.err(format!("invalid name `{s}`"))
        }
    }

    fn list(&self, s: &str) -> Result<Vec<String>, ModelFormatError> {
        if s.trim().is_empty() {
            return Ok(vec![]);
        }
        s.split(',').map(|item| self.name(item).map(str::to_owned)).collect()
    }

    fn class_set(&self, s: &str) -> Result<BTreeSet<Class>, ModelFormatError> {
        match s.trim().strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            Some(inner) => Ok(self.list(inner)?.into_iter().collect()),
            None => self.err("expected a class set `{...}`"),
        }
    }

    fn signature(&self, s: &str) -> Result<Signature, ModelFormatError> {
        if s.trim().is_empty() {
            return Ok(Signature::new());
        }
        s.split('|')
            .map(|tuple| match tuple.trim().strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
                Some(inner) => self.list(inner),
                None => self.err("expected a class tuple `(...)`"),
            })
            .collect()
    }

    /// `name/arity`
    fn arity_decl(&self, s: &str) -> Result<(String, usize), ModelFormatError> {
        let (name, arity) = self.split_once(s, "/")?;
        match arity.parse() {
            Ok(n) => Ok((self.name(name)?.to_owned(), n)),
            Err(_) => self.err(format!("invalid arity `{arity}`")),
        }
    }

    /// `name(a, b)`
    fn call(&self, s: &str) -> Result<(String, Vec<String>), ModelFormatError> {
        let (name, rest) = self.split_once(s, "(")?;
        match rest.strip_suffix(')') {
            Some(inner) => Ok((self.name(name)?.to_owned(), self.list(inner)?)),
            None => self.err("expected `)`"),
        }
    }
}

/// Reads and validates a model.
pub fn parse_model(src: &str) -> Result<ModelApplication, ModelFormatError> {
    let mut d = InterfaceDescriptor::default();
    let mut states = BTreeSet::new();
    let mut current = None;
    let mut objects: BTreeMap<String, (String, BTreeSet<Class>)> = BTreeMap::new();
    let mut consts = Vec::new();
    let mut preds = Vec::new();
    let mut acts = Vec::new();

    for (i, raw) in src.lines().enumerate() {
        let p = LineParser { line: i + 1 };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "classes:" => d.classes.extend(p.list(rest)?),
            "states:" => states.extend(p.list(rest)?),
            "current:" => current = Some(p.name(rest)?.to_owned()),
            "constant" => {
                let (name, classes) = p.split_once(rest, ":")?;
                let name = p.name(name)?.to_owned();
                d.constants.insert(name.clone());
                d.sigma_const.insert(name, p.class_set(classes)?);
            }
            "predicate" | "action" => {
                let (decl, sig) = p.split_once(rest, ":")?;
                let (name, arity) = p.arity_decl(decl)?;
                let sig = p.signature(sig)?;
                if keyword == "predicate" {
                    d.predicates.insert(name.clone(), arity);
                    d.sigma_pred.insert(name, sig);
                } else {
                    d.actions.insert(name.clone(), arity);
                    d.sigma_act.insert(name, sig);
                }
            }
            "object" => {
                let (id, rest) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let id = p.name(id)?.to_owned();
                let (display, classes) = match rest.trim().strip_prefix('"') {
                    Some(quoted) => {
                        let (display, after) = p.split_once(quoted, "\"")?;
                        let classes = match after.strip_prefix(':') {
                            Some(c) => c,
                            None => return p.err("expected `:` after display name"),
                        };
                        (display.to_owned(), classes)
                    }
                    None => match rest.trim().strip_prefix(':') {
                        Some(c) => (id.clone(), c),
                        None => return p.err("expected display name or `:`"),
                    },
                };
                objects.insert(id, (display, p.class_set(classes)?));
            }
            "const" => {
                let (lhs, obj) = p.split_once(rest, "=")?;
                let (state, name) = p.split_once(lhs, " ")?;
                consts.push((p.line, p.name(state)?.to_owned(), p.name(name)?.to_owned(), p.name(obj)?.to_owned()));
            }
            "pred" | "act" => {
                let (lhs, result) = p.split_once(rest, "=")?;
                let (state, call) = p.split_once(lhs, " ")?;
                let state = p.name(state)?.to_owned();
                let (name, args) = p.call(call)?;
                if keyword == "pred" {
                    let value = match result {
                        "true" => true,
                        "false" => false,
                        other => return p.err(format!("expected true or false, found `{other}`")),
                    };
                    preds.push((p.line, state, name, args, value));
                } else {
                    acts.push((p.line, state, name, args, p.name(result)?.to_owned()));
                }
            }
            other => return p.err(format!("unknown keyword `{other}`")),
        }
    }

    let refs: BTreeMap<String, ObjectRef> = objects
        .iter()
        .map(|(id, (display, _))| (id.clone(), ObjectRef::new(id.as_str(), display.as_str())))
        .collect();
    let lookup = |line: usize, id: &str| {
        refs.get(id).cloned().ok_or_else(|| ModelFormatError::Syntax {
            line,
            message: format!("undeclared object `{id}`"),
        })
    };
    let lookup_all = |line: usize, ids: &[String]| {
        ids.iter().map(|id| lookup(line, id)).collect::<Result<Vec<_>, _>>()
    };

    let mut model = ModelApplication {
        descriptor: d,
        states,
        objects: objects
            .into_iter()
            .map(|(id, (_, classes))| (refs[&id].clone(), classes))
            .collect(),
        interp_const: BTreeMap::new(),
        interp_pred: BTreeMap::new(),
        interp_act: BTreeMap::new(),
        current: match current {
            Some(c) => c,
            None => {
                return Err(ModelFormatError::Syntax { line: 0, message: "missing `current:` line".into() })
            }
        },
    };
    for (line, s, c, o) in consts {
        model.interp_const.insert((s, c), lookup(line, &o)?);
    }
    for (line, s, name, args, v) in preds {
        model.interp_pred.insert((s, name, lookup_all(line, &args)?), v);
    }
    for (line, s, name, args, next) in acts {
        model.interp_act.insert((s, name, lookup_all(line, &args)?), next);
    }

    let violations = model.validate();
    if violations.is_empty() {
        Ok(model)
    } else {
        Err(ModelFormatError::Invalid(violations))
    }
}
