//! The ToyBlocks reference application: two blocks and a table.

use std::collections::{BTreeMap, BTreeSet};

use crate::app::{
    guard_check, AppError, Class, Connector, InterfaceDescriptor, ModelApplication, ModelConnector, ObjectRef,
    Outcome,
};
use crate::grammar::{parse_lexicon, Lexicon};

/// The model in the text format read by [`crate::app::parse_model`].
pub const MODEL_TEXT: &str = include_str!("../data/toyblocks.model");

/// The lexicon in the format read by [`crate::grammar::parse_lexicon`].
pub const LEXICON_TEXT: &str = include_str!("../data/toyblocks.lex");

pub fn block_one() -> ObjectRef {
    ObjectRef::new("b1", "block 1")
}

pub fn block_two() -> ObjectRef {
    ObjectRef::new("b2", "block 2")
}

pub fn table() -> ObjectRef {
    ObjectRef::new("t", "the table")
}

fn classes(names: &[&str]) -> BTreeSet<Class> {
    names.iter().map(|c| c.to_string()).collect()
}

fn block_on_position() -> BTreeSet<Vec<Class>> {
    [vec!["block".to_owned(), "position".to_owned()]].into()
}

pub fn descriptor() -> InterfaceDescriptor {
    InterfaceDescriptor {
        constants: ["b1", "b2", "table"].map(String::from).into(),
        predicates: [("is_on".to_owned(), 2)].into(),
        actions: [("move".to_owned(), 2)].into(),
        classes: classes(&["block", "position"]),
        sigma_const: [
            ("b1".to_owned(), classes(&["block", "position"])),
            ("b2".to_owned(), classes(&["block", "position"])),
            ("table".to_owned(), classes(&["position"])),
        ]
        .into(),
        sigma_pred: [("is_on".to_owned(), block_on_position())].into(),
        sigma_act: [("move".to_owned(), block_on_position())].into(),
    }
}

/// The three-state model with its full interpretation tables. Starts in `s1`.
pub fn model() -> ModelApplication {
    let (b1, b2, t) = (block_one(), block_two(), table());
    let states = ["s1", "s2", "s3"];
    let guarded: Vec<(ObjectRef, ObjectRef)> = [&b1, &b2]
        .into_iter()
        .flat_map(|x| [&b1, &b2, &t].map(|y| (x.clone(), y.clone())))
        .collect();

    let on_true: BTreeMap<&str, Vec<(&ObjectRef, &ObjectRef)>> = [
        ("s1", vec![(&b1, &t), (&b2, &t)]),
        ("s2", vec![(&b1, &b2), (&b2, &t)]),
        ("s3", vec![(&b1, &t), (&b2, &b1)]),
    ]
    .into();
    // state changes; every other guarded move leaves the state alone
    let moves: BTreeMap<(&str, &ObjectRef, &ObjectRef), &str> = [
        (("s1", &b1, &b2), "s2"),
        (("s1", &b2, &b1), "s3"),
        (("s2", &b1, &t), "s1"),
        (("s3", &b2, &t), "s1"),
    ]
    .into();

    let mut interp_const = BTreeMap::new();
    let mut interp_pred = BTreeMap::new();
    let mut interp_act = BTreeMap::new();
    for s in states {
        for (name, obj) in [("b1", &b1), ("b2", &b2), ("table", &t)] {
            interp_const.insert((s.to_owned(), name.to_owned()), obj.clone());
        }
        for (x, y) in &guarded {
            let on = on_true[s].iter().any(|&(a, b)| a == x && b == y);
            interp_pred.insert((s.to_owned(), "is_on".to_owned(), vec![x.clone(), y.clone()]), on);
            let next = moves.get(&(s, x, y)).copied().unwrap_or(s);
            interp_act.insert((s.to_owned(), "move".to_owned(), vec![x.clone(), y.clone()]), next.to_owned());
        }
    }

    ModelApplication {
        descriptor: descriptor(),
        states: states.map(String::from).into(),
        objects: [
            (b1.clone(), classes(&["block", "position"])),
            (b2.clone(), classes(&["block", "position"])),
            (t.clone(), classes(&["position"])),
        ]
        .into(),
        interp_const,
        interp_pred,
        interp_act,
        current: "s1".to_owned(),
    }
}

pub fn model_connector() -> ModelConnector {
    model().into_connector()
}

pub fn lexicon() -> Lexicon {
    parse_lexicon(LEXICON_TEXT, &descriptor()).expect("shipped lexicon is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Table,
    /// On top of the block with this index.
    On(usize),
}

/// Block positions, without state labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyBlocksWorld {
    positions: [Location; 2],
}

impl Default for ToyBlocksWorld {
    fn default() -> Self {
        ToyBlocksWorld { positions: [Location::Table; 2] }
    }
}

impl ToyBlocksWorld {
    /// The configuration a model state label describes.
    pub fn from_state(label: &str) -> Option<Self> {
        let positions = match label {
            "s1" => [Location::Table, Location::Table],
            "s2" => [Location::On(1), Location::Table],
            "s3" => [Location::Table, Location::On(0)],
            _ => return None,
        };
        Some(ToyBlocksWorld { positions })
    }

    pub fn state_label(&self) -> &'static str {
        match self.positions {
            [Location::On(1), Location::Table] => "s2",
            [Location::Table, Location::On(0)] => "s3",
            _ => "s1",
        }
    }

    pub fn location(&self, block: usize) -> Location {
        self.positions[block]
    }

    fn covered(&self, block: usize) -> bool {
        self.positions.contains(&Location::On(block))
    }

    /// Puts `block` on `target`, unless something sits on `block`, the
    /// target is the block itself, or the target is an occupied block.
    pub fn move_block(&mut self, block: usize, target: Location) {
        let blocked = self.covered(block)
            || target == Location::On(block)
            || matches!(target, Location::On(other) if self.covered(other));
        if !blocked {
            self.positions[block] = target;
        }
    }
}

/// Drives a [`ToyBlocksWorld`] directly, working out each call from the
/// block positions.
#[derive(Clone, Debug)]
pub struct LiveConnector {
    world: ToyBlocksWorld,
    descriptor: InterfaceDescriptor,
}

impl Default for LiveConnector {
    fn default() -> Self {
        Self::new(ToyBlocksWorld::default())
    }
}

impl LiveConnector {
    pub fn new(world: ToyBlocksWorld) -> Self {
        LiveConnector { world, descriptor: descriptor() }
    }

    pub fn world(&self) -> &ToyBlocksWorld {
        &self.world
    }

    pub fn world_mut(&mut self) -> &mut ToyBlocksWorld {
        &mut self.world
    }

    fn object_classes(obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        match obj.id() {
            "b1" | "b2" => Ok(classes(&["block", "position"])),
            "t" => Ok(classes(&["position"])),
            other => Err(AppError::UnknownObject(other.to_owned())),
        }
    }

    fn location(obj: &ObjectRef) -> Result<Location, AppError> {
        match obj.id() {
            "b1" => Ok(Location::On(0)),
            "b2" => Ok(Location::On(1)),
            "t" => Ok(Location::Table),
            other => Err(AppError::UnknownObject(other.to_owned())),
        }
    }

    fn block_index(obj: &ObjectRef) -> Option<usize> {
        match obj.id() {
            "b1" => Some(0),
            "b2" => Some(1),
            _ => None,
        }
    }

    /// Checks name, arity and classes of a call. `Ok(false)` means the
    /// guard rejected it.
    fn admit(&self, name: &str, args: &[ObjectRef], action: bool) -> Result<bool, AppError> {
        let (arities, sigma) = if action {
            (&self.descriptor.actions, &self.descriptor.sigma_act)
        } else {
            (&self.descriptor.predicates, &self.descriptor.sigma_pred)
        };
        let arity = *arities.get(name).ok_or_else(|| AppError::UnknownName(name.to_owned()))?;
        if arity != args.len() {
            return Err(AppError::Arity { name: name.to_owned(), expected: arity, found: args.len() });
        }
        let arg_classes = args.iter().map(Self::object_classes).collect::<Result<Vec<_>, _>>()?;
        Ok(guard_check(&sigma[name], &arg_classes))
    }
}

impl Connector for LiveConnector {
    fn descriptor(&self) -> &InterfaceDescriptor {
        &self.descriptor
    }

    fn resolve_constant(&mut self, name: &str) -> Result<ObjectRef, AppError> {
        match name {
            "b1" => Ok(block_one()),
            "b2" => Ok(block_two()),
            "table" => Ok(table()),
            _ => Err(AppError::UnknownName(name.to_owned())),
        }
    }

    fn query_predicate(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<bool>, AppError> {
        if !self.admit(name, args, false)? {
            return Ok(Outcome::Exception);
        }
        let block = Self::block_index(&args[0]).expect("guard admits only blocks");
        Ok(Outcome::Value(self.world.location(block) == Self::location(&args[1])?))
    }

    fn perform_action(&mut self, name: &str, args: &[ObjectRef]) -> Result<Outcome<()>, AppError> {
        if !self.admit(name, args, true)? {
            return Ok(Outcome::Exception);
        }
        let block = Self::block_index(&args[0]).expect("guard admits only blocks");
        self.world.move_block(block, Self::location(&args[1])?);
        Ok(Outcome::Value(()))
    }

    fn classes_of(&mut self, obj: &ObjectRef) -> Result<BTreeSet<Class>, AppError> {
        Self::object_classes(obj)
    }
}

pub fn live_connector() -> LiveConnector {
    LiveConnector::default()
}
