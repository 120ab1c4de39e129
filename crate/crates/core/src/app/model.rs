use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{guard_check, AppError, Class, Connector, InterfaceDescriptor, ObjectRef, Outcome, Violation};

pub type StateId = String;

/// An application given by explicit tables: every state, every object and
/// the interpretation of each interface name at each state.
///
/// Used as a reference semantics; a live application keeps its state
/// internally instead.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelApplication {
    pub descriptor: InterfaceDescriptor,
    pub states: BTreeSet<StateId>,
    /// Every object together with the classes it belongs to.
    pub objects: BTreeMap<ObjectRef, BTreeSet<Class>>,
    pub interp_const: BTreeMap<(StateId, String), ObjectRef>,
    pub interp_pred: BTreeMap<(StateId, String, Vec<ObjectRef>), bool>,
    pub interp_act: BTreeMap<(StateId, String, Vec<ObjectRef>), StateId>,
    pub current: StateId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelViolation {
    Descriptor(Violation),
    UnknownCurrentState(StateId),
    UnknownState(StateId),
    UnknownObject(String),
    ClasslessObject(String),
    MissingConstant { state: StateId, name: String },
    ConstantClasses { state: StateId, name: String, object: String },
    /// A guarded tuple has no interpretation.
    Partial { state: StateId, name: String, args: Vec<String> },
}

impl fmt::Display for ModelViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelViolation::Descriptor(v) => write!(f, "{v}"),
            ModelViolation::UnknownCurrentState(s) => write!(f, "current state `{s}` is not declared"),
            ModelViolation::UnknownState(s) => write!(f, "table mentions undeclared state `{s}`"),
            ModelViolation::UnknownObject(o) => write!(f, "table mentions undeclared object `{o}`"),
            ModelViolation::ClasslessObject(o) => write!(f, "object `{o}` belongs to no class"),
            ModelViolation::MissingConstant { state, name } => {
                write!(f, "constant `{name}` has no interpretation in state `{state}`")
            }
            ModelViolation::ConstantClasses { state, name, object } => write!(
                f,
                "in state `{state}`, constant `{name}` denotes `{object}`, which lacks some of its classes"
            ),
            ModelViolation::Partial { state, name, args } => write!(
                f,
                "`{name}({})` is guarded but undefined in state `{state}`",
                args.join(", ")
            ),
        }
    }
}

impl ModelApplication {
    pub fn object(&self, id: &str) -> Option<&ObjectRef> {
        self.objects.keys().find(|o| o.id() == id)
    }

    fn classes(&self, obj: &ObjectRef) -> Result<&BTreeSet<Class>, AppError> {
        self.objects.get(obj).ok_or_else(|| AppError::UnknownObject(obj.id().to_owned()))
    }

    fn check_state(&self, s: &str) -> Result<(), AppError> {
        if self.states.contains(s) {
            Ok(())
        } else {
            Err(AppError::UnknownState(s.to_owned()))
        }
    }

    fn guarded(
        &self,
        signature: Option<&super::Signature>,
        name: &str,
        arity: Option<usize>,
        args: &[ObjectRef],
    ) -> Result<bool, AppError> {
        let (Some(signature), Some(arity)) = (signature, arity) else {
            return Err(AppError::UnknownName(name.to_owned()));
        };
        if arity != args.len() {
            return Err(AppError::Arity { name: name.to_owned(), expected: arity, found: args.len() });
        }
        let classes = args.iter().map(|o| self.classes(o).cloned()).collect::<Result<Vec<_>, _>>()?;
        Ok(guard_check(signature, &classes))
    }

    fn undefined(s: &str, name: &str, args: &[ObjectRef]) -> AppError {
        AppError::Undefined {
            state: s.to_owned(),
            name: name.to_owned(),
            args: args.iter().map(|o| o.id().to_owned()).collect(),
        }
    }

    /// Interpretation of a constant at state `s`.
    pub fn step_constant(&self, s: &str, name: &str) -> Result<ObjectRef, AppError> {
        if !self.descriptor.constants.contains(name) {
            return Err(AppError::UnknownName(name.to_owned()));
        }
        self.check_state(s)?;
        self.interp_const
            .get(&(s.to_owned(), name.to_owned()))
            .cloned()
            .ok_or_else(|| Self::undefined(s, name, &[]))
    }

    /// Guarded predicate evaluation at state `s`.
    pub fn step_predicate(
        &self,
        s: &str,
        name: &str,
        args: &[ObjectRef],
    ) -> Result<Outcome<bool>, AppError> {
        let passes = self.guarded(
            self.descriptor.sigma_pred.get(name),
            name,
            self.descriptor.predicates.get(name).copied(),
            args,
        )?;
        self.check_state(s)?;
        if !passes {
            return Ok(Outcome::Exception);
        }
        self.interp_pred
            .get(&(s.to_owned(), name.to_owned(), args.to_vec()))
            .map(|&v| Outcome::Value(v))
            .ok_or_else(|| Self::undefined(s, name, args))
    }

    /// Guarded action at state `s`; yields the successor state.
    pub fn step_action(
        &self,
        s: &str,
        name: &str,
        args: &[ObjectRef],
    ) -> Result<Outcome<StateId>, AppError> {
        let passes = self.guarded(
            self.descriptor.sigma_act.get(name),
            name,
            self.descriptor.actions.get(name).copied(),
            args,
        )?;
        self.check_state(s)?;
        if !passes {
            return Ok(Outcome::Exception);
        }
        self.interp_act
            .get(&(s.to_owned(), name.to_owned(), args.to_vec()))
            .map(|next| Outcome::Value(next.clone()))
            .ok_or_else(|| Self::undefined(s, name, args))
    }

    /// All argument tuples over the model's objects that pass the guard of
    /// `signature`.
    pub fn guarded_tuples(&self, signature: &super::Signature, arity: usize) -> Vec<Vec<ObjectRef>> {
        let mut tuples: Vec<Vec<ObjectRef>> = vec![vec![]];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|prefix| {
                    self.objects.keys().map(move |o| {
                        let mut t = prefix.clone();
                        t.push(o.clone());
                        t
                    })
                })
                .collect();
        }
        tuples
            .into_iter()
            .filter(|t| {
                let classes: Vec<_> = t.iter().map(|o| self.objects[o].clone()).collect();
                guard_check(signature, &classes)
            })
            .collect()
    }

    pub fn validate(&self) -> Vec<ModelViolation> {
        let mut out: Vec<ModelViolation> =
            self.descriptor.validate().into_iter().map(ModelViolation::Descriptor).collect();
        if !self.states.contains(&self.current) {
            out.push(ModelViolation::UnknownCurrentState(self.current.clone()));
        }
        for (obj, classes) in &self.objects {
            if classes.is_empty() {
                out.push(ModelViolation::ClasslessObject(obj.id().to_owned()));
            }
        }

        let mut mentioned_states = BTreeSet::new();
        let mut mentioned_objects = BTreeSet::new();
        for ((s, _), o) in &self.interp_const {
            mentioned_states.insert(s.clone());
            mentioned_objects.insert(o.clone());
        }
        for (s, _, args) in self.interp_pred.keys() {
            mentioned_states.insert(s.clone());
            mentioned_objects.extend(args.iter().cloned());
        }
        for ((s, _, args), next) in &self.interp_act {
            mentioned_states.insert(s.clone());
            mentioned_states.insert(next.clone());
            mentioned_objects.extend(args.iter().cloned());
        }
        for s in mentioned_states.difference(&self.states) {
            out.push(ModelViolation::UnknownState(s.clone()));
        }
        for o in mentioned_objects.iter().filter(|o| !self.objects.contains_key(*o)) {
            out.push(ModelViolation::UnknownObject(o.id().to_owned()));
        }

        for s in &self.states {
            for name in &self.descriptor.constants {
                match self.interp_const.get(&(s.clone(), name.clone())) {
                    None => out.push(ModelViolation::MissingConstant {
                        state: s.clone(),
                        name: name.clone(),
                    }),
                    Some(obj) => {
                        let wanted = self.descriptor.sigma_const.get(name);
                        let has = self.objects.get(obj);
                        if let (Some(wanted), Some(has)) = (wanted, has) {
                            if !wanted.is_subset(has) {
                                out.push(ModelViolation::ConstantClasses {
                                    state: s.clone(),
                                    name: name.clone(),
                                    object: obj.id().to_owned(),
                                });
                            }
                        }
                    }
                }
            }
            let tables = [
                (&self.descriptor.predicates, &self.descriptor.sigma_pred, true),
                (&self.descriptor.actions, &self.descriptor.sigma_act, false),
            ];
            for (names, sigmas, is_pred) in tables {
                for (name, &arity) in names {
                    let Some(signature) = sigmas.get(name) else { continue };
                    for args in self.guarded_tuples(signature, arity) {
                        let key = (s.clone(), name.clone(), args);
                        let defined = if is_pred {
                            self.interp_pred.contains_key(&key)
                        } else {
                            self.interp_act.contains_key(&key)
                        };
                        if !defined {
                            out.push(ModelViolation::Partial {
                                state: s.clone(),
                                name: name.clone(),
                                args: key.2.iter().map(|o| o.id().to_owned()).collect(),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn into_connector(self) -> ModelConnector {
        ModelConnector { model: self }
    }
}

/// Runs a [`ModelApplication`] as a live application: calls consult the
/// tables at the model's current state, and actions advance it.
#[derive(Clone, Debug)]
pub struct ModelConnector {
    model: ModelApplication,
}

impl ModelConnector {
    pub fn model(&self) -> &ModelApplication {
        &self.model
    }

    pub fn current(&self) -> &str {
        &self.model.current
    }

    pub fn set_current(&mut self, state: &str) -> Result<(), AppError> {
        self.model.check_state(state)?;
        self.model.current = state.to_owned();
        Ok(())
    }

    pub fn into_model(self) -> ModelApplication {
        self.model
    }
}

impl Connector for ModelConnector {
    fn descriptor(&self) -> &InterfaceDescriptor {
        &self.model.descriptor
    }

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError> {
        self.model.step_constant(&self.model.current, name)
    }

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError> {
        self.model.step_predicate(&self.model.current, name, args)
    }

    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError> {
        match self.model.step_action(&self.model.current, name, args)? {
            Outcome::Value(next) => {
                self.model.current = next;
                Ok(Outcome::Value(()))
            }
            Outcome::Exception => Ok(Outcome::Exception),
        }
    }

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        self.model.classes(obj).cloned()
    }
}
