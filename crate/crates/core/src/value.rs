//! In-memory trees and the pure generic fold.

use crate::desc::{CtorIndex, Desc, Schema};

/// One layer of a description's interpretation: the argument tuple of a
/// constructor, with `T` sitting at every recursive position.
///
/// Pairs nest to the right exactly as the `Prod`s of the description do.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Meaning<T> {
    Unit,
    Byte(u8),
    Pair(Box<Meaning<T>>, Box<Meaning<T>>),
    Rec(T),
}

/// Arguments of an in-memory node.
pub type Arg = Meaning<Tree>;

impl<T> Meaning<T> {
    pub fn pair(left: Meaning<T>, right: Meaning<T>) -> Meaning<T> {
        Meaning::Pair(Box::new(left), Box::new(right))
    }

    /// Structural map over the recursive positions.
    pub fn map<U>(self, f: &mut impl FnMut(T) -> U) -> Meaning<U> {
        match self {
            Meaning::Unit => Meaning::Unit,
            Meaning::Byte(b) => Meaning::Byte(b),
            Meaning::Pair(l, r) => {
                let l = l.map(f);
                Meaning::pair(l, r.map(f))
            }
            Meaning::Rec(t) => Meaning::Rec(f(t)),
        }
    }

    pub fn map_ref<'a, U>(&'a self, f: &mut impl FnMut(&'a T) -> U) -> Meaning<U> {
        match self {
            Meaning::Unit => Meaning::Unit,
            Meaning::Byte(b) => Meaning::Byte(*b),
            Meaning::Pair(l, r) => {
                let l = l.map_ref(f);
                Meaning::pair(l, r.map_ref(f))
            }
            Meaning::Rec(t) => Meaning::Rec(f(t)),
        }
    }

    /// Fallible structural map; stops at the first error, left to right.
    pub fn try_map<U, E>(self, f: &mut impl FnMut(T) -> Result<U, E>) -> Result<Meaning<U>, E> {
        Ok(match self {
            Meaning::Unit => Meaning::Unit,
            Meaning::Byte(b) => Meaning::Byte(b),
            Meaning::Pair(l, r) => {
                let l = l.try_map(f)?;
                Meaning::pair(l, r.try_map(f)?)
            }
            Meaning::Rec(t) => Meaning::Rec(f(t)?),
        })
    }

    /// Recursive positions, left to right.
    pub fn recs(&self) -> Vec<&T> {
        let mut out = Vec::new();
        self.visit(&mut |atom| {
            if let Meaning::Rec(t) = atom {
                out.push(t);
            }
        });
        out
    }

    /// Calls `f` on every atom (non-pair), left to right.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Meaning<T>)) {
        match self {
            Meaning::Pair(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            atom => f(atom),
        }
    }

    /// Whether this tuple has the structure `d` describes; `rec` checks
    /// the values at recursive positions.
    pub fn matches(&self, d: &Desc, rec: &mut impl FnMut(&T) -> bool) -> bool {
        match (d, self) {
            (Desc::None, Meaning::Unit) | (Desc::Byte, Meaning::Byte(_)) => true,
            (Desc::Prod(dl, dr), Meaning::Pair(l, r)) => l.matches(dl, rec) && r.matches(dr, rec),
            (Desc::Rec, Meaning::Rec(t)) => rec(t),
            _ => false,
        }
    }
}

/// A value of the datatype a schema describes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    pub tag: CtorIndex,
    pub args: Box<Arg>,
}

impl Tree {
    pub fn new(tag: CtorIndex, args: Arg) -> Tree {
        Tree { tag, args: Box::new(args) }
    }

    /// `leaf` of [`Schema::tree`].
    pub fn leaf() -> Tree {
        Tree::new(CtorIndex(0), Meaning::Unit)
    }

    /// `node` of [`Schema::tree`].
    pub fn node(left: Tree, byte: u8, right: Tree) -> Tree {
        Tree::new(
            CtorIndex(1),
            Meaning::pair(Meaning::Rec(left), Meaning::pair(Meaning::Byte(byte), Meaning::Rec(right))),
        )
    }

    /// Height: 0 for a node without subtrees.
    pub fn depth(&self) -> usize {
        self.args.recs().into_iter().map(|t| 1 + t.depth()).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.args.recs().into_iter().map(Tree::node_count).sum::<usize>()
    }
}

/// A function consuming one constructor whose subtrees were already
/// folded into `A`.
pub trait Algebra<A> {
    fn apply(&self, ctor: CtorIndex, args: Meaning<A>) -> A;
}

impl<A, F> Algebra<A> for F
where
    F: Fn(CtorIndex, Meaning<A>) -> A,
{
    fn apply(&self, ctor: CtorIndex, args: Meaning<A>) -> A {
        self(ctor, args)
    }
}

pub fn conforms(s: &Schema, t: &Tree) -> bool {
    match s.index(t.tag.get()) {
        Some(k) => t.args.matches(s.shape_of(k), &mut |sub| conforms(s, sub)),
        None => false,
    }
}

/// Applies `f` at every recursive position of `m`, which is laid out as `d`.
///
/// # Panics
/// If `m` does not have the structure of `d`.
pub fn fmap_meaning<T, X>(d: &Desc, f: &mut impl FnMut(T) -> X, m: Meaning<T>) -> Meaning<X> {
    match (d, m) {
        (Desc::None, Meaning::Unit) => Meaning::Unit,
        (Desc::Byte, Meaning::Byte(b)) => Meaning::Byte(b),
        (Desc::Prod(dl, dr), Meaning::Pair(l, r)) => {
            let l = fmap_meaning(dl, f, *l);
            Meaning::pair(l, fmap_meaning(dr, f, *r))
        }
        (Desc::Rec, Meaning::Rec(t)) => Meaning::Rec(f(t)),
        (d, _) => panic!("meaning does not have the layout {d}"),
    }
}

/// Bottom-up catamorphism. `t` must conform to `s`.
#[allow(clippy::only_used_in_recursion)]
pub fn fold<A>(s: &Schema, alg: &impl Algebra<A>, t: &Tree) -> A {
    let args = t.args.map_ref(&mut |sub| fold(s, alg, sub));
    alg.apply(t.tag, args)
}

/// Rebuilds each node; folding with it is the identity.
pub fn rebuild_algebra(ctor: CtorIndex, args: Meaning<Tree>) -> Tree {
    Tree::new(ctor, args)
}

/// Sum of every byte stored anywhere in the tree.
pub fn sum_algebra(_: CtorIndex, args: Meaning<u64>) -> u64 {
    let mut total = 0;
    args.visit(&mut |atom| match atom {
        Meaning::Byte(b) => total += u64::from(*b),
        Meaning::Rec(n) => total += n,
        _ => {}
    });
    total
}

/// Node count.
pub fn size_algebra(_: CtorIndex, args: Meaning<u64>) -> u64 {
    1 + args.recs().into_iter().sum::<u64>()
}

/// Height, matching [`Tree::depth`].
pub fn depth_algebra(_: CtorIndex, args: Meaning<u64>) -> u64 {
    args.recs().into_iter().map(|d| d + 1).max().unwrap_or(0)
}

/// Sum of node bytes of a [`Schema::tree`] value.
///
/// A `u64` cannot overflow here: each node holds at most 255 and costs at
/// least ten bytes of memory.
pub fn sum_tree(t: &Tree) -> u64 {
    match t.args.as_ref() {
        Meaning::Pair(l, rest) => match (l.as_ref(), rest.as_ref()) {
            (Meaning::Rec(l), Meaning::Pair(b, r)) => match (b.as_ref(), r.as_ref()) {
                (Meaning::Byte(b), Meaning::Rec(r)) => sum_tree(l) + u64::from(*b) + sum_tree(r),
                _ => unreachable!("not a tree node"),
            },
            _ => unreachable!("not a tree node"),
        },
        _ => 0,
    }
}

/// Byte of the deepest node on the right spine of a [`Schema::tree`] value.
pub fn rightmost_tree(t: &Tree) -> Option<u8> {
    match t.args.as_ref() {
        Meaning::Pair(_, rest) => match rest.as_ref() {
            Meaning::Pair(b, r) => match (b.as_ref(), r.as_ref()) {
                (Meaning::Byte(b), Meaning::Rec(r)) => rightmost_tree(r).or(Some(*b)),
                _ => unreachable!("not a tree node"),
            },
            _ => unreachable!("not a tree node"),
        },
        _ => None,
    }
}

/// The running example: `node (node (node leaf 1 leaf) 5 leaf) 10 (node leaf 20 leaf)`.
pub fn example_tree() -> Tree {
    let l = Tree::leaf;
    Tree::node(Tree::node(Tree::node(l(), 1, l()), 5, l()), 10, Tree::node(l(), 20, l()))
}
