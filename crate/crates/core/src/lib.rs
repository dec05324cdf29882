//! A self-describing binary format for trees of algebraic datatypes,
//! together with the machinery to compute on them without decoding.
//!
//! A file is a header describing the datatype followed by the tree. Each
//! node is a one-byte constructor tag, a table of 64-bit little-endian
//! offsets giving the byte size of every subtree except the last, and the
//! constructor's arguments. With those offsets a reader can jump straight
//! to any subtree, fold over the buffer, or copy a subtree as raw bytes.
//!
//! ```
//! use mu_wire::{cursor, syntax, writer, Schema};
//!
//! let schema = Schema::tree();
//! let tree = syntax::parse_tree(&schema, "(node (node leaf 1 leaf) 5 (node leaf 20 leaf))").unwrap();
//! let region = writer::exec(&schema, writer::plan_tree(&schema, &tree)).unwrap();
//! assert_eq!(cursor::rightmost_via_poke(region.root()).unwrap(), Some(20));
//! assert_eq!(cursor::sum_region(region.root()).unwrap(), 26);
//! ```

pub mod bench;
pub mod cli;
pub mod codec;
pub mod cursor;
pub mod desc;
pub mod error;
pub mod syntax;
pub mod value;
pub mod writer;

pub use cursor::{MeaningCursor, PokeResult, ReadStats, Region, TreeCursor};
pub use desc::{Ctor, CtorIndex, Desc, Schema};
pub use error::{Result, WireError};
pub use value::{Algebra, Meaning, Tree};
pub use writer::{BuildPlan, ByteSink};
