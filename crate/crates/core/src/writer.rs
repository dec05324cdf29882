//! Producing serialised trees.
//!
//! A [`BuildPlan`] is a deferred write: applied to a [`ByteSink`] it
//! appends one tree's encoding and reports where it ended. Plans compose:
//! [`plan_node`] takes a plan for every subtree of a constructor, writes
//! the tag, reserves the offset table, runs the subtree plans and then
//! backfills the table with the sizes they produced.
//!
//! Plans may read other sealed regions while they run ([`plan_copy`],
//! [`swap_tree`], [`map_tree_bytes`]); they never read the sink they are
//! writing to.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::codec::{self, WORD};
use crate::cursor::{view, Region, TreeCursor};
use crate::desc::{CtorIndex, Desc, Schema};
use crate::error::{Result, WireError};
use crate::value::{Meaning, Tree};

/// Growable output buffer. Append-only, except for reserved offset slots.
#[derive(Debug, Default)]
pub struct ByteSink {
    buf: Vec<u8>,
    // Start positions of reserved blocks that still have unfilled slots.
    open: Vec<usize>,
}

/// A run of reserved 8-byte slots, filled front to back.
#[derive(Debug)]
#[must_use = "reserved slots must be filled and closed"]
pub struct SlotBlock {
    pos: usize,
    count: usize,
    filled: usize,
}

impl SlotBlock {
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

impl ByteSink {
    pub fn new() -> ByteSink {
        ByteSink::default()
    }

    pub fn with_capacity(n: usize) -> ByteSink {
        ByteSink { buf: Vec::with_capacity(n), open: Vec::new() }
    }

    /// Current end: where the next byte goes.
    pub fn position(&self) -> usize {
        self.buf.len()
    }

    pub fn push(&mut self, b: u8) {
        self.buf.push(b);
    }

    pub fn extend(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    pub fn reserve_slots(&mut self, count: usize) -> SlotBlock {
        let pos = self.buf.len();
        self.buf.resize(pos + WORD * count, 0);
        if count > 0 {
            self.open.push(pos);
        }
        SlotBlock { pos, count, filled: 0 }
    }

    /// Writes the next slot of `block`.
    pub fn fill(&mut self, block: &mut SlotBlock, value: u64) -> Result<()> {
        if block.filled == block.count {
            return Err(WireError::OffsetSlotUnfilled { pos: block.pos + WORD * block.count });
        }
        let at = block.pos + WORD * block.filled;
        self.buf[at..at + WORD].copy_from_slice(&value.to_le_bytes());
        block.filled += 1;
        Ok(())
    }

    /// Checks that every slot of `block` was filled.
    pub fn close(&mut self, block: SlotBlock) -> Result<()> {
        if block.filled != block.count {
            return Err(WireError::OffsetSlotUnfilled { pos: block.pos + WORD * block.filled });
        }
        if block.count > 0 {
            if let Some(k) = self.open.iter().rposition(|&p| p == block.pos) {
                self.open.remove(k);
            }
        }
        Ok(())
    }

    /// Finishes writing; fails if any reserved block was never closed.
    pub fn seal(self) -> Result<Vec<u8>> {
        match self.open.first() {
            Some(&pos) => Err(WireError::OffsetSlotUnfilled { pos }),
            None => Ok(self.buf),
        }
    }
}

type Action<'a> = Box<dyn FnOnce(&mut ByteSink) -> Result<()> + 'a>;

/// A deferred write of one tree.
pub struct BuildPlan<'a>(Action<'a>);

impl<'a> BuildPlan<'a> {
    pub fn new(f: impl FnOnce(&mut ByteSink) -> Result<()> + 'a) -> BuildPlan<'a> {
        BuildPlan(Box::new(f))
    }

    /// Appends the tree at `sink.position()` and returns the end position.
    pub fn apply(self, sink: &mut ByteSink) -> Result<usize> {
        (self.0)(sink)?;
        Ok(sink.position())
    }
}

impl std::fmt::Debug for BuildPlan<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("BuildPlan(..)")
    }
}

/// Arguments of a node to be written, with a plan at each recursive position.
pub type ArgPlan<'a> = Meaning<BuildPlan<'a>>;

/// Plan for one node of constructor `i` with the given arguments.
pub fn plan_node<'a>(s: &'a Schema, i: CtorIndex, args: ArgPlan<'a>) -> Result<BuildPlan<'a>> {
    let Some(i) = s.index(i.get()) else {
        return Err(WireError::NonConforming { ctor: format!("#{i}") });
    };
    let shape = s.shape_of(i);
    if !args.matches(shape, &mut |_| true) {
        return Err(WireError::ArgShapeMismatch { ctor: s.name_of(i).to_owned() });
    }
    Ok(BuildPlan::new(move |sink| {
        sink.push(i.0);
        let mut slots = sink.reserve_slots(shape.offset_count(true));
        emit_args(shape, args, true, sink, &mut slots)?;
        sink.close(slots)
    }))
}

fn emit_args(d: &Desc, m: ArgPlan<'_>, rightmost: bool, sink: &mut ByteSink, slots: &mut SlotBlock) -> Result<()> {
    match (d, m) {
        (Desc::None, Meaning::Unit) => Ok(()),
        (Desc::Byte, Meaning::Byte(b)) => {
            sink.push(b);
            Ok(())
        }
        (Desc::Prod(dl, dr), Meaning::Pair(l, r)) => {
            emit_args(dl, *l, false, sink, slots)?;
            emit_args(dr, *r, rightmost, sink, slots)
        }
        (Desc::Rec, Meaning::Rec(plan)) => {
            let start = sink.position();
            let end = plan.apply(sink)?;
            if rightmost {
                Ok(())
            } else {
                sink.fill(slots, (end - start) as u64)
            }
        }
        _ => unreachable!("argument layout checked by plan_node"),
    }
}

/// Plan writing an in-memory tree.
pub fn plan_tree<'a>(s: &'a Schema, t: &'a Tree) -> BuildPlan<'a> {
    BuildPlan::new(move |sink| {
        if s.index(t.tag.get()).is_none() {
            return Err(WireError::NonConforming { ctor: format!("#{}", t.tag) });
        }
        let args = t.args.map_ref(&mut |sub| plan_tree(s, sub));
        plan_node(s, t.tag, args)
            .map_err(|_| WireError::NonConforming { ctor: s.name_of(t.tag).to_owned() })?
            .apply(sink)
            .map(drop)
    })
}

/// Plan copying the raw bytes of an already serialised subtree.
pub fn plan_copy(src: TreeCursor<'_>) -> BuildPlan<'_> {
    BuildPlan::new(move |sink| {
        sink.extend(src.raw_bytes()?);
        Ok(())
    })
}

/// Runs `p` after the header of `s` and seals the result.
pub fn exec(s: &Schema, p: BuildPlan<'_>) -> Result<Region> {
    let header = codec::encode_header(s);
    let mut sink = ByteSink::new();
    sink.extend(&header);
    p.apply(&mut sink)?;
    Ok(Region::from_parts(sink.seal()?, s.clone(), header.len()))
}

/// Writes the header of `c`'s region followed by the subtree at `c`.
pub fn write_to_file(path: impl AsRef<Path>, c: TreeCursor<'_>) -> Result<()> {
    let mut file = File::create(path)?;
    file.write_all(c.region().header_bytes())?;
    file.write_all(c.raw_bytes()?)?;
    file.flush()?;
    Ok(())
}

/// Plan rewriting every inline byte of the subtree at `src` with `f`.
pub fn map_tree_bytes<'a, F>(f: &'a F, src: TreeCursor<'a>) -> BuildPlan<'a>
where
    F: Fn(u8) -> u8,
{
    BuildPlan::new(move |sink| {
        let (k, layer) = view(src)?;
        let args = map_layer(f, layer);
        plan_node(src.region().schema(), k, args)?.apply(sink).map(drop)
    })
}

fn map_layer<'a, F: Fn(u8) -> u8>(f: &'a F, layer: Meaning<TreeCursor<'a>>) -> ArgPlan<'a> {
    match layer {
        Meaning::Unit => Meaning::Unit,
        Meaning::Byte(b) => Meaning::Byte(f(b)),
        Meaning::Pair(l, r) => {
            let l = map_layer(f, *l);
            Meaning::pair(l, map_layer(f, *r))
        }
        Meaning::Rec(c) => Meaning::Rec(map_tree_bytes(f, c)),
    }
}

/// Plan for a tree whose root children are exchanged; both children are
/// copied as raw bytes. Tree schema only.
pub fn swap_tree(src: TreeCursor<'_>) -> BuildPlan<'_> {
    BuildPlan::new(move |sink| {
        let schema = src.region().schema();
        let tree = Schema::tree();
        if !schema.same_shapes(&tree) {
            return Err(WireError::SchemaMismatch {
                expected: codec::encode_shapes(&tree),
                found: codec::encode_shapes(schema),
            });
        }
        let (k, layer) = view(src)?;
        let args = match layer {
            Meaning::Pair(l, rest) => match (*l, *rest) {
                (Meaning::Rec(l), Meaning::Pair(b, r)) => match (*b, *r) {
                    (Meaning::Byte(b), Meaning::Rec(r)) => Meaning::pair(
                        Meaning::Rec(plan_copy(r)),
                        Meaning::pair(Meaning::Byte(b), Meaning::Rec(plan_copy(l))),
                    ),
                    _ => unreachable!("tree node layout"),
                },
                _ => unreachable!("tree node layout"),
            },
            _ => Meaning::Unit,
        };
        plan_node(schema, k, args)?.apply(sink).map(drop)
    })
}
