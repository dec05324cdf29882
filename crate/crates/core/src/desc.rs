//! Descriptions of constructor layouts and the arithmetic the wire format
//! is built on.
//!
//! A [`Desc`] describes the arguments of one constructor: nothing, a byte,
//! a pair of descriptions, or a recursive position holding a subtree. A
//! [`Schema`] is an ordered list of named constructors and so defines one
//! algebraic datatype.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Result, WireError};

/// Layout of a constructor's arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Desc {
    /// Unit: nothing is stored.
    None,
    /// One byte of data.
    Byte,
    /// The left layout followed by the right layout.
    Prod(Box<Desc>, Box<Desc>),
    /// A subtree of the datatype being defined.
    Rec,
}

impl Desc {
    pub fn prod(left: Desc, right: Desc) -> Desc {
        Desc::Prod(Box::new(left), Box::new(right))
    }

    /// Bytes of inline data, ignoring subtrees.
    pub fn static_size(&self) -> usize {
        match self {
            Desc::None | Desc::Rec => 0,
            Desc::Byte => 1,
            Desc::Prod(l, r) => l.static_size() + r.static_size(),
        }
    }

    /// Number of offsets a node with this layout stores.
    ///
    /// Every recursive position needs one, except the last one of the
    /// layout when `rightmost` holds: nothing follows it, so there is
    /// nothing to skip to.
    pub fn offset_count(&self, rightmost: bool) -> usize {
        match self {
            Desc::None | Desc::Byte => 0,
            Desc::Rec => usize::from(!rightmost),
            Desc::Prod(l, r) => l.offset_count(false) + r.offset_count(rightmost),
        }
    }

    /// Number of recursive positions.
    pub fn rec_count(&self) -> usize {
        match self {
            Desc::None | Desc::Byte => 0,
            Desc::Rec => 1,
            Desc::Prod(l, r) => l.rec_count() + r.rec_count(),
        }
    }

    /// Nesting depth; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Desc::None | Desc::Byte | Desc::Rec => 1,
            Desc::Prod(l, r) => 1 + l.depth().max(r.depth()),
        }
    }
}

impl fmt::Display for Desc {
    /// Renders in the textual description syntax, e.g. `(rec * (byte * rec))`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Desc::None => f.write_str("none"),
            Desc::Byte => f.write_str("byte"),
            Desc::Rec => f.write_str("rec"),
            Desc::Prod(l, r) => write!(f, "({l} * {r})"),
        }
    }
}

pub fn static_size(d: &Desc) -> usize {
    d.static_size()
}

pub fn offset_count(d: &Desc, rightmost: bool) -> usize {
    d.offset_count(rightmost)
}

/// A named constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ctor {
    pub name: String,
    pub shape: Desc,
}

impl Ctor {
    pub fn new(name: impl Into<String>, shape: Desc) -> Ctor {
        Ctor { name: name.into(), shape }
    }
}

/// Position of a constructor within its schema. Also the on-wire tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CtorIndex(pub u8);

impl CtorIndex {
    pub fn get(self) -> usize {
        usize::from(self.0)
    }
}

impl fmt::Display for CtorIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An ordered list of constructors.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schema {
    ctors: Vec<Ctor>,
}

impl Schema {
    /// Builds a schema, checking the constructor limit and name uniqueness.
    pub fn new(ctors: Vec<Ctor>) -> Result<Schema> {
        let schema = Schema { ctors };
        validate_schema(&schema)?;
        Ok(schema)
    }

    /// Builds a schema from bare shapes, naming constructors `_0`, `_1`, ...
    pub fn from_shapes(shapes: Vec<Desc>) -> Result<Schema> {
        let ctors = shapes.into_iter().enumerate().map(|(k, shape)| Ctor::new(format!("_{k}"), shape)).collect();
        Schema::new(ctors)
    }

    /// Binary trees with a byte in every node:
    /// `mu { leaf: none, node: (rec * (byte * rec)) }`.
    pub fn tree() -> Schema {
        Schema {
            ctors: vec![
                Ctor::new("leaf", Desc::None),
                Ctor::new("node", Desc::prod(Desc::Rec, Desc::prod(Desc::Byte, Desc::Rec))),
            ],
        }
    }

    pub fn ctors(&self) -> &[Ctor] {
        &self.ctors
    }

    pub fn len(&self) -> usize {
        self.ctors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ctors.is_empty()
    }

    /// Checked conversion from a raw tag.
    pub fn index(&self, raw: usize) -> Option<CtorIndex> {
        (raw < self.ctors.len()).then_some(CtorIndex(raw as u8))
    }

    pub fn index_of(&self, name: &str) -> Result<CtorIndex> {
        self.ctors
            .iter()
            .position(|c| c.name == name)
            .map(|k| CtorIndex(k as u8))
            .ok_or_else(|| WireError::UnknownConstructor { name: name.to_owned() })
    }

    /// # Panics
    /// If `i` does not belong to this schema.
    pub fn shape_of(&self, i: CtorIndex) -> &Desc {
        &self.ctors[i.get()].shape
    }

    /// # Panics
    /// If `i` does not belong to this schema.
    pub fn name_of(&self, i: CtorIndex) -> &str {
        &self.ctors[i.get()].name
    }

    pub fn shapes(&self) -> impl Iterator<Item = &Desc> {
        self.ctors.iter().map(|c| &c.shape)
    }

    /// Same shapes in the same order, names ignored.
    pub fn same_shapes(&self, other: &Schema) -> bool {
        self.len() == other.len() && self.shapes().eq(other.shapes())
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("mu {")?;
        for (k, c) in self.ctors.iter().enumerate() {
            let sep = if k == 0 { " " } else { ", " };
            write!(f, "{sep}{}: {}", c.name, c.shape)?;
        }
        f.write_str(if self.ctors.is_empty() { "}" } else { " }" })
    }
}

pub fn index_of(s: &Schema, name: &str) -> Result<CtorIndex> {
    s.index_of(name)
}

pub fn shape_of(s: &Schema, i: CtorIndex) -> &Desc {
    s.shape_of(i)
}

pub fn validate_schema(s: &Schema) -> Result<()> {
    if s.ctors.len() > 255 {
        return Err(WireError::TooManyConstructors { count: s.ctors.len() });
    }
    let mut seen = HashSet::new();
    for c in &s.ctors {
        if !seen.insert(c.name.as_str()) {
            return Err(WireError::DuplicateName { name: c.name.clone() });
        }
    }
    Ok(())
}
