//! Reading trees in place.
//!
//! A [`Region`] owns a sealed file image: header plus tree block. Cursors
//! are small `Copy`-able locations into it. A [`TreeCursor`] points at a
//! node tag; [`out`] exposes the constructor and a [`MeaningCursor`] over
//! its argument block, which [`poke`] unfolds one description step at a
//! time. Non-rightmost subtrees are skipped using the stored offsets, so
//! reaching any argument never requires walking the subtrees before it.
//!
//! Every access is bounds-checked against the extent of the cursor that
//! performs it, so corrupt input surfaces as a [`WireError`], never as an
//! out-of-bounds read.
//!
//! Traversals recurse on the host stack, one frame group per tree level.
//! Trees a few thousand levels deep are fine; degenerate lists of millions
//! of elements are not.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use smallvec::SmallVec;

use crate::codec::{self, WORD};
use crate::desc::{CtorIndex, Desc, Schema};
use crate::error::{Result, WireError};
use crate::value::{Algebra, Meaning, Tree};

/// Read counters for an instrumented region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadStats {
    pub bytes_read: u64,
    pub reads: u64,
}

#[derive(Debug, Default)]
struct Counters {
    bytes_read: AtomicU64,
    reads: AtomicU64,
}

/// An immutable buffer holding a header and a tree block.
#[derive(Debug)]
pub struct Region {
    bytes: Vec<u8>,
    schema: Schema,
    data_start: usize,
    counters: Option<Counters>,
}

impl Region {
    /// Decodes the header of `bytes` and checks it against `expected`.
    pub fn attach(bytes: impl Into<Vec<u8>>, expected: &Schema) -> Result<Region> {
        let bytes = bytes.into();
        let (header, data_start) = codec::decode_header(&bytes)?;
        codec::check_compat(expected, &header)?;
        Ok(Region::from_parts(bytes, expected.clone(), data_start))
    }

    pub fn open(path: impl AsRef<Path>, expected: &Schema) -> Result<Region> {
        Region::attach(fs::read(path)?, expected)
    }

    pub(crate) fn from_parts(bytes: Vec<u8>, schema: Schema, data_start: usize) -> Region {
        Region { bytes, schema, data_start, counters: None }
    }

    /// Turns on read counting. Counters start at zero.
    pub fn instrumented(mut self) -> Region {
        self.counters = Some(Counters::default());
        self
    }

    /// Cursor on the root node: everything after the header.
    pub fn root(&self) -> TreeCursor<'_> {
        TreeCursor { region: self, pos: self.data_start, size: self.bytes.len() - self.data_start }
    }

    /// Rebuilds a cursor from a position and size taken from an earlier
    /// cursor of this region. Only the bounds are checked.
    pub fn cursor_at(&self, pos: usize, size: usize) -> Result<TreeCursor<'_>> {
        let end = self.bytes.len();
        if pos < self.data_start || pos.checked_add(size).is_none_or(|stop| stop > end) {
            return Err(WireError::TruncatedBuffer { pos, needed: size, end });
        }
        Ok(TreeCursor { region: self, pos, size })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    pub fn header_bytes(&self) -> &[u8] {
        &self.bytes[..self.data_start]
    }

    pub fn data_start(&self) -> usize {
        self.data_start
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Zero unless the region is instrumented.
    pub fn read_stats(&self) -> ReadStats {
        self.counters.as_ref().map_or_else(ReadStats::default, |c| ReadStats {
            bytes_read: c.bytes_read.load(Ordering::Relaxed),
            reads: c.reads.load(Ordering::Relaxed),
        })
    }

    pub fn reset_stats(&self) {
        if let Some(c) = &self.counters {
            c.bytes_read.store(0, Ordering::Relaxed);
            c.reads.store(0, Ordering::Relaxed);
        }
    }

    /// Reads `len` bytes at `pos`, which must lie before `end`.
    fn read(&self, pos: usize, len: usize, end: usize) -> Result<&[u8]> {
        let end = end.min(self.bytes.len());
        let stop = pos.checked_add(len).filter(|&stop| stop <= end);
        let Some(stop) = stop else {
            return Err(WireError::TruncatedBuffer { pos, needed: len, end });
        };
        if let Some(c) = self.counters.as_ref().filter(|_| len > 0) {
            c.bytes_read.fetch_add(len as u64, Ordering::Relaxed);
            c.reads.fetch_add(1, Ordering::Relaxed);
        }
        Ok(&self.bytes[pos..stop])
    }
}

/// Location of a serialised subtree: its tag position and byte length.
#[derive(Debug, Clone, Copy)]
pub struct TreeCursor<'r> {
    region: &'r Region,
    pos: usize,
    size: usize,
}

impl<'r> TreeCursor<'r> {
    pub fn region(&self) -> &'r Region {
        self.region
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn end(&self) -> usize {
        self.pos.saturating_add(self.size)
    }

    /// The subtree's encoding, read in one access.
    pub fn raw_bytes(&self) -> Result<&'r [u8]> {
        self.region.read(self.pos, self.size, self.end())
    }

    pub fn read_stats(&self) -> ReadStats {
        self.region.read_stats()
    }
}

impl PartialEq for TreeCursor<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.region, other.region) && self.pos == other.pos && self.size == other.size
    }
}

impl Eq for TreeCursor<'_> {}

/// Location of (part of) a node's argument block, laid out as `shape`.
#[derive(Debug, Clone)]
pub struct MeaningCursor<'r> {
    region: &'r Region,
    pos: usize,
    size: usize,
    offsets: SmallVec<[u64; 4]>,
    shape: &'r Desc,
}

impl<'r> MeaningCursor<'r> {
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Sizes of the non-rightmost subtrees within this block, in order.
    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn shape(&self) -> &'r Desc {
        self.shape
    }

    pub fn read_stats(&self) -> ReadStats {
        self.region.read_stats()
    }

    fn end(&self) -> usize {
        self.pos.saturating_add(self.size)
    }
}

/// One step of unfolding a [`MeaningCursor`].
#[derive(Debug, Clone)]
pub enum PokeResult<'r> {
    Unit,
    Byte(u8),
    Pair(MeaningCursor<'r>, MeaningCursor<'r>),
    Subtree(TreeCursor<'r>),
}

/// A fully expanded argument tuple with cursors at recursive positions.
pub type Layer<'r> = Meaning<TreeCursor<'r>>;

/// Same as [`Region::attach`].
pub fn attach(bytes: impl Into<Vec<u8>>, expected: &Schema) -> Result<Region> {
    Region::attach(bytes, expected)
}

/// Reads the tag and offset table of the node at `c`.
pub fn out<'r>(c: TreeCursor<'r>) -> Result<(CtorIndex, MeaningCursor<'r>)> {
    let region = c.region;
    let tag = region.read(c.pos, 1, c.end())?[0];
    let schema = &region.schema;
    let Some(k) = schema.index(usize::from(tag)) else {
        return Err(WireError::BadTag { pos: c.pos, tag, count: schema.len() });
    };
    let shape = schema.shape_of(k);
    let count = shape.offset_count(true);
    let table = region.read(c.pos + 1, WORD * count, c.end())?;
    let offsets = table.chunks_exact(WORD).map(|w| u64::from_le_bytes(w.try_into().expect("8-byte chunk"))).collect();
    let header = 1 + WORD * count;
    let meaning = MeaningCursor { region, pos: c.pos + header, size: c.size - header, offsets, shape };
    Ok((k, meaning))
}

/// Unfolds `m` by one step of its description.
pub fn poke<'r>(m: MeaningCursor<'r>) -> Result<PokeResult<'r>> {
    match m.shape {
        Desc::None => {
            if m.size != 0 {
                return Err(WireError::SizeMismatch { pos: m.pos, expected: 0, found: m.size });
            }
            Ok(PokeResult::Unit)
        }
        Desc::Byte => {
            if m.size > 1 {
                return Err(WireError::SizeMismatch { pos: m.pos, expected: 1, found: m.size });
            }
            let b = m.region.read(m.pos, 1, m.end())?[0];
            Ok(PokeResult::Byte(b))
        }
        Desc::Rec => Ok(PokeResult::Subtree(TreeCursor { region: m.region, pos: m.pos, size: m.size })),
        Desc::Prod(l, r) => {
            let split = l.offset_count(false);
            let (left_offsets, right_offsets) = m.offsets.split_at(split.min(m.offsets.len()));
            let left_size = left_offsets
                .iter()
                .try_fold(l.static_size(), |acc, &o| usize::try_from(o).ok().and_then(|o| acc.checked_add(o)));
            let left_size = match left_size {
                Some(n) if n <= m.size => n,
                n => {
                    return Err(WireError::TruncatedBuffer {
                        pos: m.pos,
                        needed: n.unwrap_or(usize::MAX),
                        end: m.end(),
                    })
                }
            };
            let left =
                MeaningCursor { region: m.region, pos: m.pos, size: left_size, offsets: left_offsets.into(), shape: l };
            let right = MeaningCursor {
                region: m.region,
                pos: m.pos + left_size,
                size: m.size - left_size,
                offsets: right_offsets.into(),
                shape: r,
            };
            Ok(PokeResult::Pair(left, right))
        }
    }
}

/// Expands a whole argument tuple, leaving subtrees as cursors.
pub fn layer<'r>(m: MeaningCursor<'r>) -> Result<Layer<'r>> {
    fmap_region(m, &mut |sub| Ok(sub))
}

/// [`out`] followed by [`layer`].
pub fn view<'r>(c: TreeCursor<'r>) -> Result<(CtorIndex, Layer<'r>)> {
    let (k, m) = out(c)?;
    Ok((k, layer(m)?))
}

/// Applies `f` to every subtree cursor of the argument block, left to
/// right, keeping the inline data.
pub fn fmap_region<'r, A>(m: MeaningCursor<'r>, f: &mut impl FnMut(TreeCursor<'r>) -> Result<A>) -> Result<Meaning<A>> {
    Ok(match poke(m)? {
        PokeResult::Unit => Meaning::Unit,
        PokeResult::Byte(b) => Meaning::Byte(b),
        PokeResult::Pair(l, r) => {
            let l = fmap_region(l, f)?;
            Meaning::pair(l, fmap_region(r, f)?)
        }
        PokeResult::Subtree(c) => Meaning::Rec(f(c)?),
    })
}

/// Decodes the whole subtree at `c` into memory.
pub fn deserialise(c: TreeCursor<'_>) -> Result<Tree> {
    let (k, layer) = view(c)?;
    Ok(Tree::new(k, layer.try_map(&mut |sub| deserialise(sub))?))
}

/// Folds the subtree at `c` without building it in memory first.
pub fn fold_region<A>(alg: &impl Algebra<A>, c: TreeCursor<'_>) -> Result<A> {
    let (k, m) = out(c)?;
    let args = fmap_region(m, &mut |sub| fold_region(alg, sub))?;
    Ok(alg.apply(k, args))
}

/// Cursors on the direct subtrees of `c`, left to right.
pub fn children(c: TreeCursor<'_>) -> Result<Vec<TreeCursor<'_>>> {
    let (_, layer) = view(c)?;
    Ok(layer.recs().into_iter().copied().collect())
}

fn expect_tree_schema(c: &TreeCursor<'_>) -> Result<()> {
    let tree = Schema::tree();
    if c.region.schema.same_shapes(&tree) {
        Ok(())
    } else {
        Err(WireError::SchemaMismatch {
            expected: codec::encode_shapes(&tree),
            found: codec::encode_shapes(&c.region.schema),
        })
    }
}

/// Rightmost node byte using [`view`]: reads every byte on the right spine.
pub fn rightmost_via_view(c: TreeCursor<'_>) -> Result<Option<u8>> {
    expect_tree_schema(&c)?;
    rightmost_view(c)
}

fn rightmost_view(c: TreeCursor<'_>) -> Result<Option<u8>> {
    let (_, layer) = view(c)?;
    let Meaning::Pair(_, rest) = layer else {
        return Ok(None);
    };
    let Meaning::Pair(b, r) = *rest else { unreachable!("tree node layout") };
    let (Meaning::Byte(b), Meaning::Rec(r)) = (*b, *r) else { unreachable!("tree node layout") };
    Ok(rightmost_view(r)?.or(Some(b)))
}

/// Rightmost node byte using [`out`] and [`poke`]: skips each left
/// subtree through its offset and reads only the final node's byte.
pub fn rightmost_via_poke(c: TreeCursor<'_>) -> Result<Option<u8>> {
    expect_tree_schema(&c)?;
    rightmost_poke(c)
}

fn rightmost_poke(c: TreeCursor<'_>) -> Result<Option<u8>> {
    let (k, m) = out(c)?;
    if k == CtorIndex(0) {
        return Ok(None);
    }
    let PokeResult::Pair(_, rest) = poke(m)? else { unreachable!("tree node layout") };
    let PokeResult::Pair(byte, right) = poke(rest)? else { unreachable!("tree node layout") };
    let PokeResult::Subtree(right) = poke(right)? else { unreachable!("tree node layout") };
    if let Some(b) = rightmost_poke(right)? {
        return Ok(Some(b));
    }
    let PokeResult::Byte(b) = poke(byte)? else { unreachable!("tree node layout") };
    Ok(Some(b))
}

/// Sum of node bytes computed over the buffer.
pub fn sum_region(c: TreeCursor<'_>) -> Result<u64> {
    expect_tree_schema(&c)?;
    fold_region(&crate::value::sum_algebra, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{example_tree, sum_algebra};
    use crate::writer::{exec, plan_tree};

    const GOLDEN: &[u8] = &[
        0x07, 0, 0, 0, 0, 0, 0, 0, 0x02, 0x00, 0x02, 0x03, 0x02, 0x01, 0x03, 0x01, //
        0x17, 0, 0, 0, 0, 0, 0, 0, 0x01, 0x0c, 0, 0, 0, 0, 0, 0, //
        0, 0x01, 0x01, 0, 0, 0, 0, 0, 0, 0, 0x00, 0x01, 0x00, 0x05, 0x00, 0x0a, //
        0x01, 0x01, 0, 0, 0, 0, 0, 0, 0, 0x00, 0x14, 0x00,
    ];

    fn golden() -> Region {
        Region::attach(GOLDEN, &Schema::tree()).unwrap().instrumented()
    }

    #[test]
    fn attach_golden() {
        let r = golden();
        let root = r.root();
        assert_eq!((root.pos(), root.size()), (15, 45));

        let one = Schema::new(vec![crate::desc::Ctor::new("x", Desc::None)]).unwrap();
        assert!(matches!(Region::attach(GOLDEN, &one), Err(WireError::SchemaMismatch { .. })));
    }

    #[test]
    fn out_on_root_and_leaf() {
        let r = golden();
        let (k, m) = out(r.root()).unwrap();
        assert_eq!(k, CtorIndex(1));
        assert_eq!((m.pos(), m.size()), (24, 36));
        assert_eq!(m.offsets(), [23]);
        assert!(r.read_stats().reads >= 2);

        let leaf = Region::attach(&[1, 0, 0, 0, 0, 0, 0, 0, 0][..], &Schema::default());
        assert!(leaf.is_ok());

        let leaf_file = exec(&Schema::tree(), plan_tree(&Schema::tree(), &Tree::leaf())).unwrap();
        let (k, m) = out(leaf_file.root()).unwrap();
        assert_eq!((k, m.size(), m.offsets().len()), (CtorIndex(0), 0, 0));
    }

    #[test]
    fn corrupt_tag() {
        let mut bytes = GOLDEN.to_vec();
        bytes[15] = 7;
        let r = Region::attach(bytes, &Schema::tree()).unwrap();
        assert!(matches!(out(r.root()), Err(WireError::BadTag { pos: 15, tag: 7, count: 2 })));
    }

    #[test]
    fn poke_splits_by_offsets() {
        let r = golden();
        let (_, m) = out(r.root()).unwrap();
        let PokeResult::Pair(left, right) = poke(m).unwrap() else { panic!() };
        assert_eq!((left.pos(), left.size()), (24, 23));
        assert_eq!((right.pos(), right.size()), (47, 13));
        let PokeResult::Pair(byte, rec) = poke(right).unwrap() else { panic!() };
        assert!(matches!(poke(byte).unwrap(), PokeResult::Byte(0x0a)));
        let PokeResult::Subtree(sub) = poke(rec).unwrap() else { panic!() };
        assert_eq!((sub.pos(), sub.size()), (48, 12));
    }

    #[test]
    fn layer_and_view() {
        let r = golden();
        let (k, layer) = view(r.root()).unwrap();
        assert_eq!(k, CtorIndex(1));
        let recs = layer.recs();
        assert_eq!((recs[0].size(), recs[1].size()), (23, 12));
        let mut bytes = Vec::new();
        layer.visit(&mut |a| {
            if let Meaning::Byte(b) = a {
                bytes.push(*b)
            }
        });
        assert_eq!(bytes, [10]);

        // After out, layer only reads the node's byte.
        let (_, m) = out(r.root()).unwrap();
        let before = r.read_stats();
        layer_of(m);
        let after = r.read_stats();
        assert_eq!(after.bytes_read - before.bytes_read, 1);
    }

    fn layer_of(m: MeaningCursor<'_>) {
        layer(m).unwrap();
    }

    #[test]
    fn leaf_view_is_unit() {
        let region = exec(&Schema::tree(), plan_tree(&Schema::tree(), &Tree::leaf())).unwrap();
        let (k, layer) = view(region.root()).unwrap();
        assert_eq!((k, layer), (CtorIndex(0), Meaning::Unit));
    }

    #[test]
    fn deserialise_and_fold() {
        let r = golden();
        assert_eq!(deserialise(r.root()).unwrap(), example_tree());
        assert_eq!(r.read_stats().bytes_read, 45);
        assert_eq!(fold_region(&sum_algebra, r.root()).unwrap(), 36);
        assert_eq!(sum_region(r.root()).unwrap(), 36);
    }

    #[test]
    fn rightmost_variants() {
        let r = golden();
        assert_eq!(rightmost_via_view(r.root()).unwrap(), Some(20));
        assert_eq!(rightmost_via_poke(r.root()).unwrap(), Some(20));

        let leaf = exec(&Schema::tree(), plan_tree(&Schema::tree(), &Tree::leaf())).unwrap();
        assert_eq!(rightmost_via_view(leaf.root()).unwrap(), None);
        assert_eq!(rightmost_via_poke(leaf.root()).unwrap(), None);
    }

    #[test]
    fn rightmost_rejects_other_schemas() {
        let s = Schema::from_shapes(vec![Desc::None]).unwrap();
        let r = exec(&s, plan_tree(&s, &Tree::new(CtorIndex(0), Meaning::Unit))).unwrap();
        assert!(matches!(rightmost_via_poke(r.root()), Err(WireError::SchemaMismatch { .. })));
    }

    #[test]
    fn leftover_bytes_are_reported() {
        let mut bytes = GOLDEN.to_vec();
        bytes.push(0);
        let r = Region::attach(bytes, &Schema::tree()).unwrap();
        assert!(matches!(deserialise(r.root()), Err(WireError::SizeMismatch { .. })));
    }

    #[test]
    fn oversized_offset_is_truncation() {
        let mut bytes = GOLDEN.to_vec();
        bytes[16] = 0xff;
        bytes[23] = 0xff;
        let r = Region::attach(bytes, &Schema::tree()).unwrap();
        assert!(matches!(deserialise(r.root()), Err(WireError::TruncatedBuffer { .. })));
    }

    #[test]
    fn empty_data_block() {
        let r = Region::attach(&GOLDEN[..15], &Schema::tree()).unwrap();
        assert!(matches!(out(r.root()), Err(WireError::TruncatedBuffer { pos: 15, .. })));
    }
}
