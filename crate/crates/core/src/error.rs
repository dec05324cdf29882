use thiserror::Error;

/// Everything that can go wrong while describing, writing or reading a
/// serialised tree.
#[derive(Debug, Error)]
pub enum WireError {
    #[error("unknown constructor `{name}`")]
    UnknownConstructor { name: String },

    #[error("schema has {count} constructors, at most 255 fit in a tag byte")]
    TooManyConstructors { count: usize },

    #[error("constructor name `{name}` is used twice")]
    DuplicateName { name: String },

    /// A read of `needed` bytes at `pos` would run past `end`.
    #[error("truncated buffer: need {needed} byte(s) at offset {pos}, region ends at {end}")]
    TruncatedBuffer { pos: usize, needed: usize, end: usize },

    #[error("bad description code {code:#04x} at offset {pos}")]
    BadDescTag { pos: usize, code: u8 },

    #[error("header declares {declared} description bytes but its shapes occupy {actual}")]
    TrailingGarbageInHeader { declared: u64, actual: u64 },

    /// Both sides are carried in their wire encoding (count byte + shapes).
    #[error("schema mismatch: expected shapes {}, found {}", hex(expected), hex(found))]
    SchemaMismatch { expected: Vec<u8>, found: Vec<u8> },

    #[error("bad constructor tag {tag} at offset {pos} (schema has {count} constructors)")]
    BadTag { pos: usize, tag: u8, count: usize },

    /// Stored offsets disagree with the bytes actually present.
    #[error("size mismatch at offset {pos}: layout leaves {found} byte(s) where {expected} are required")]
    SizeMismatch { pos: usize, expected: usize, found: usize },

    #[error("offset slot at offset {pos} was reserved but never filled")]
    OffsetSlotUnfilled { pos: usize },

    #[error("arguments supplied for constructor `{ctor}` do not match its description")]
    ArgShapeMismatch { ctor: String },

    #[error("tree does not conform to the schema at constructor `{ctor}`")]
    NonConforming { ctor: String },

    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("byte literal {value} at column {pos} is out of range 0..=255")]
    ByteOutOfRange { pos: usize, value: String },

    #[error("path step {step}: child index {index} out of range ({available} subtree(s))")]
    PathOutOfRange { step: usize, index: usize, available: usize },

    #[error("benchmark `{experiment}` disagrees with the in-memory oracle at depth {depth}")]
    OracleMismatch { experiment: String, depth: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = WireError> = std::result::Result<T, E>;

fn hex(bytes: &[u8]) -> String {
    let parts: Vec<String> = bytes.iter().map(|b| format!("{b:02x}")).collect();
    format!("[{}]", parts.join(" "))
}
