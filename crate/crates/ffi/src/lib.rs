//! C ABI for `mu-wire`.
//!
//! Schemas and regions are opaque heap handles released with their
//! `_free` function. Cursors are plain `(pos, size)` values that are only
//! meaningful together with the region they came from. Every fallible call
//! returns an `MwStatus`; on failure `mw_last_error_message` describes the
//! error until the next call on the same thread.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mu_wire::cursor::{self, Region};
use mu_wire::{syntax, writer, Schema, WireError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MwStatus {
    Ok = 0,
    NullArgument,
    InvalidUtf8,
    Parse,
    InvalidSchema,
    TruncatedBuffer,
    BadDescTag,
    TrailingGarbageInHeader,
    SchemaMismatch,
    BadTag,
    SizeMismatch,
    PathOutOfRange,
    Io,
    Internal,
}

impl From<&WireError> for MwStatus {
    fn from(e: &WireError) -> MwStatus {
        match e {
            WireError::Parse { .. } | WireError::ByteOutOfRange { .. } | WireError::UnknownConstructor { .. } => {
                MwStatus::Parse
            }
            WireError::TooManyConstructors { .. } | WireError::DuplicateName { .. } => MwStatus::InvalidSchema,
            WireError::TruncatedBuffer { .. } => MwStatus::TruncatedBuffer,
            WireError::BadDescTag { .. } => MwStatus::BadDescTag,
            WireError::TrailingGarbageInHeader { .. } => MwStatus::TrailingGarbageInHeader,
            WireError::SchemaMismatch { .. } => MwStatus::SchemaMismatch,
            WireError::BadTag { .. } => MwStatus::BadTag,
            WireError::SizeMismatch { .. } => MwStatus::SizeMismatch,
            WireError::PathOutOfRange { .. } => MwStatus::PathOutOfRange,
            WireError::Io(_) => MwStatus::Io,
            WireError::OffsetSlotUnfilled { .. }
            | WireError::ArgShapeMismatch { .. }
            | WireError::NonConforming { .. }
            | WireError::OracleMismatch { .. } => MwStatus::Internal,
        }
    }
}

/// Opaque schema handle.
pub struct MwSchema(Schema);

/// Opaque handle on a sealed file image.
pub struct MwRegion(Region);

/// Location of a subtree inside a region.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MwCursor {
    pub pos: u64,
    pub size: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(msg));
}

enum Failure {
    Status(MwStatus, String),
    Wire(WireError),
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Failure {
        Failure::Wire(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MwStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MwStatus::Ok,
        Ok(Err(Failure::Wire(e))) => {
            set_error(e.to_string());
            MwStatus::from(&e)
        }
        Ok(Err(Failure::Status(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".to_owned());
            MwStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(MwStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::Status(MwStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn cursor_of(region: &Region, c: MwCursor) -> Result<cursor::TreeCursor<'_>, Failure> {
    let pos = usize::try_from(c.pos).unwrap_or(usize::MAX);
    let size = usize::try_from(c.size).unwrap_or(usize::MAX);
    Ok(region.cursor_at(pos, size)?)
}

fn to_c(c: cursor::TreeCursor<'_>) -> MwCursor {
    MwCursor { pos: c.pos() as u64, size: c.size() as u64 }
}

fn boxed_region(region: Region) -> *mut MwRegion {
    Box::into_raw(Box::new(MwRegion(region)))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call.
#[no_mangle]
pub extern "C" fn mw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a schema written as `mu { name: desc, ... }`.
#[no_mangle]
pub unsafe extern "C" fn mw_schema_parse(dsl: *const c_char, out: *mut *mut MwSchema) -> MwStatus {
    guard(|| {
        let schema = syntax::parse_schema(text(dsl, "dsl")?)?;
        put(out, Box::into_raw(Box::new(MwSchema(schema))), "out")
    })
}

/// The binary tree schema `mu { leaf: none, node: (rec * (byte * rec)) }`.
#[no_mangle]
pub extern "C" fn mw_schema_tree() -> *mut MwSchema {
    Box::into_raw(Box::new(MwSchema(Schema::tree())))
}

#[no_mangle]
pub unsafe extern "C" fn mw_schema_len(schema: *const MwSchema) -> usize {
    schema.as_ref().map_or(0, |s| s.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn mw_schema_free(schema: *mut MwSchema) {
    if !schema.is_null() {
        drop(Box::from_raw(schema));
    }
}

/// Copies `len` bytes and checks their header against `schema`.
#[no_mangle]
pub unsafe extern "C" fn mw_region_attach(
    schema: *const MwSchema,
    data: *const u8,
    len: usize,
    out: *mut *mut MwRegion,
) -> MwStatus {
    guard(|| {
        let schema = borrow(schema, "schema")?;
        if data.is_null() && len > 0 {
            return Err(null("data"));
        }
        let bytes = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(data, len).to_vec() };
        let region = Region::attach(bytes, &schema.0)?;
        put(out, boxed_region(region), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mw_region_open(
    schema: *const MwSchema,
    path: *const c_char,
    out: *mut *mut MwRegion,
) -> MwStatus {
    guard(|| {
        let schema = borrow(schema, "schema")?;
        let region = Region::open(text(path, "path")?, &schema.0)?;
        put(out, boxed_region(region), "out")
    })
}

/// Serialises a tree literal such as `(node leaf 1 leaf)`.
#[no_mangle]
pub unsafe extern "C" fn mw_region_encode(
    schema: *const MwSchema,
    literal: *const c_char,
    out: *mut *mut MwRegion,
) -> MwStatus {
    guard(|| {
        let schema = &borrow(schema, "schema")?.0;
        let tree = syntax::parse_tree(schema, text(literal, "literal")?)?;
        let region = writer::exec(schema, writer::plan_tree(schema, &tree))?;
        put(out, boxed_region(region), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mw_region_free(region: *mut MwRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Borrows the whole file image; valid while the region lives.
#[no_mangle]
pub unsafe extern "C" fn mw_region_bytes(region: *const MwRegion, data: *mut *const u8, len: *mut usize) -> MwStatus {
    guard(|| {
        let bytes = borrow(region, "region")?.0.bytes();
        put(data, bytes.as_ptr(), "data")?;
        put(len, bytes.len(), "len")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mw_region_root(region: *const MwRegion, out: *mut MwCursor) -> MwStatus {
    guard(|| put(out, to_c(borrow(region, "region")?.0.root()), "out"))
}

/// Constructor tag of the node at `c`.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_tag(region: *const MwRegion, c: MwCursor, out: *mut u8) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let (k, _) = cursor::out(cursor_of(region, c)?)?;
        put(out, k.0, "out")
    })
}

/// The `index`-th subtree (left to right) of the node at `c`.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_child(
    region: *const MwRegion,
    c: MwCursor,
    index: usize,
    out: *mut MwCursor,
) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let subs = cursor::children(cursor_of(region, c)?)?;
        let child =
            subs.get(index).copied().ok_or(WireError::PathOutOfRange { step: 0, index, available: subs.len() })?;
        put(out, to_c(child), "out")
    })
}

/// Sum of node bytes; binary tree schema only.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_sum(region: *const MwRegion, c: MwCursor, out: *mut u64) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        put(out, cursor::sum_region(cursor_of(region, c)?)?, "out")
    })
}

/// Byte of the rightmost node, or -1 for a leaf; binary tree schema only.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_rightmost(region: *const MwRegion, c: MwCursor, out: *mut i32) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let b = cursor::rightmost_via_poke(cursor_of(region, c)?)?;
        put(out, b.map_or(-1, i32::from), "out")
    })
}

/// Renders the subtree at `c` as a literal. Free with `mw_string_free`.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_dump(region: *const MwRegion, c: MwCursor, out: *mut *mut c_char) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let tree = cursor::deserialise(cursor_of(region, c)?)?;
        let text = CString::new(syntax::print_tree(region.schema(), &tree)).expect("literal has no NUL");
        put(out, text.into_raw(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn mw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Writes the region's header followed by the subtree at `c`.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_write_file(region: *const MwRegion, c: MwCursor, path: *const c_char) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        writer::write_to_file(text(path, "path")?, cursor_of(region, c)?)?;
        Ok(())
    })
}

/// New region holding a raw-byte copy of the subtree at `c`.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_copy(region: *const MwRegion, c: MwCursor, out: *mut *mut MwRegion) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let copy = writer::exec(region.schema(), writer::plan_copy(cursor_of(region, c)?))?;
        put(out, boxed_region(copy), "out")
    })
}

/// New region holding the subtree at `c` with its root children exchanged;
/// binary tree schema only.
#[no_mangle]
pub unsafe extern "C" fn mw_cursor_swap(region: *const MwRegion, c: MwCursor, out: *mut *mut MwRegion) -> MwStatus {
    guard(|| {
        let region = &borrow(region, "region")?.0;
        let swapped = writer::exec(region.schema(), writer::swap_tree(cursor_of(region, c)?))?;
        put(out, boxed_region(swapped), "out")
    })
}
