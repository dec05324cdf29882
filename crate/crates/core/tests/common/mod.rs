#![allow(dead_code)]

use mu_wire::cursor::{children, out};
use mu_wire::writer::{exec, plan_tree};
use mu_wire::{CtorIndex, Desc, Meaning, Region, Schema, Tree, TreeCursor};
use rand::Rng;

/// The 60-byte file for `node (node (node leaf 1 leaf) 5 leaf) 10 (node leaf 20 leaf)`.
pub const GOLDEN: [u8; 60] = [
    0x07, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x02, 0x03, 0x02, 0x01, 0x03, 0x01, //
    0x17, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x0c, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, //
    0x00, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x00, 0x05, 0x00, 0x0a, //
    0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x14, 0x00,
];

pub const EXAMPLE_LITERAL: &str = "(node (node (node leaf 1 leaf) 5 leaf) 10 (node leaf 20 leaf))";

/// Random description of depth at most `depth` (atoms have depth 1).
pub fn random_desc(rng: &mut impl Rng, depth: usize) -> Desc {
    if depth > 1 && rng.random_bool(0.5) {
        let l = random_desc(rng, depth - 1);
        let r = random_desc(rng, depth - 1);
        return Desc::prod(l, r);
    }
    match rng.random_range(0..3) {
        0 => Desc::None,
        1 => Desc::Byte,
        _ => Desc::Rec,
    }
}

/// Random schema with 1..=`max_ctors` constructors, at least one of which
/// has no recursive position so finite trees exist.
pub fn random_schema(rng: &mut impl Rng, max_ctors: usize, max_desc_depth: usize) -> Schema {
    let n = rng.random_range(1..=max_ctors);
    let mut shapes: Vec<Desc> = (0..n)
        .map(|_| {
            let depth = rng.random_range(1..=max_desc_depth);
            random_desc(rng, depth)
        })
        .collect();
    if shapes.iter().all(|d| d.rec_count() > 0) {
        let k = rng.random_range(0..n);
        shapes[k] = if rng.random_bool(0.5) { Desc::None } else { Desc::prod(Desc::Byte, Desc::Byte) };
    }
    Schema::from_shapes(shapes).unwrap()
}

/// Random conforming tree of height at most `max_depth`. `budget` caps the
/// node count; once spent only base constructors are chosen.
pub fn random_tree(rng: &mut impl Rng, s: &Schema, max_depth: usize, budget: &mut usize) -> Tree {
    let base: Vec<usize> = (0..s.len()).filter(|&k| s.ctors()[k].shape.rec_count() == 0).collect();
    let k = if max_depth == 0 || *budget == 0 {
        base[rng.random_range(0..base.len())]
    } else {
        rng.random_range(0..s.len())
    };
    *budget = budget.saturating_sub(1);
    let tag = CtorIndex(k as u8);
    let args = random_args(rng, s, s.shape_of(tag), max_depth, budget);
    Tree::new(tag, args)
}

fn random_args(rng: &mut impl Rng, s: &Schema, d: &Desc, max_depth: usize, budget: &mut usize) -> Meaning<Tree> {
    match d {
        Desc::None => Meaning::Unit,
        Desc::Byte => Meaning::Byte(rng.random()),
        Desc::Rec => Meaning::Rec(random_tree(rng, s, max_depth.saturating_sub(1), budget)),
        Desc::Prod(l, r) => {
            let l = random_args(rng, s, l, max_depth, budget);
            Meaning::pair(l, random_args(rng, s, r, max_depth, budget))
        }
    }
}

/// Random tree of [`Schema::tree`].
pub fn random_binary_tree(rng: &mut impl Rng, max_depth: usize) -> Tree {
    if max_depth == 0 || rng.random_bool(0.3) {
        Tree::leaf()
    } else {
        let l = random_binary_tree(rng, max_depth - 1);
        let b = rng.random();
        Tree::node(l, b, random_binary_tree(rng, max_depth - 1))
    }
}

/// Full binary tree of the given height.
pub fn full_tree(depth: u32) -> Tree {
    mu_wire::bench::gen_full_tree(depth)
}

pub fn serialise(s: &Schema, t: &Tree) -> Region {
    exec(s, plan_tree(s, t)).unwrap()
}

fn word(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

/// Walks a region alongside the tree it should hold. Every stored offset
/// must equal the size of its subtree serialised on its own, and every
/// node's extent must add up. Returns the number of nodes checked.
pub fn check_layout(c: TreeCursor<'_>, s: &Schema, t: &Tree) -> Result<usize, String> {
    let bytes = c.region().bytes();
    let shape = s.shape_of(t.tag);
    let o = shape.offset_count(true);
    if bytes[c.pos()] != t.tag.0 {
        return Err(format!("tag at {}: {} != {}", c.pos(), bytes[c.pos()], t.tag.0));
    }
    let subs = t.args.recs();
    let mut stored_total = 0;
    for (k, sub) in subs.iter().take(o).enumerate() {
        let stored = word(bytes, c.pos() + 1 + 8 * k) as usize;
        let alone = serialise(s, sub).root().size();
        if stored != alone {
            return Err(format!("offset {k} at {}: stored {stored}, subtree {alone}", c.pos()));
        }
        stored_total += stored;
    }
    let trailing = subs.get(o).map_or(0, |sub| serialise(s, sub).root().size());
    let expect = 1 + 8 * o + stored_total + shape.static_size() + trailing;
    if expect != c.size() {
        return Err(format!("node at {}: extent {} != {expect}", c.pos(), c.size()));
    }
    let (_, m) = out(c).map_err(|e| e.to_string())?;
    if 1 + 8 * o + m.size() != c.size() {
        return Err(format!("meaning at {}: size {}", m.pos(), m.size()));
    }
    let kids = children(c).map_err(|e| e.to_string())?;
    let mut n = 1;
    for (&k, sub) in kids.iter().zip(subs) {
        n += check_layout(k, s, sub)?;
    }
    Ok(n)
}
