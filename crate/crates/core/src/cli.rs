//! Command implementations behind the `mu-wire` binary.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{self, BenchSpec, Experiment};
use crate::codec;
use crate::cursor::{children, deserialise, rightmost_via_poke, rightmost_via_view, sum_region, Region, TreeCursor};
use crate::desc::Schema;
use crate::error::{Result, WireError};
use crate::syntax;
use crate::writer::{exec, map_tree_bytes, plan_copy, plan_tree, swap_tree, write_to_file};

#[derive(Debug, Parser)]
#[command(name = "mu-wire", version, about = "Inspect, build and transform serialised algebraic trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the header of a file: description length, shapes, data size.
    Inspect { path: PathBuf },
    /// Check that a file holds a well-formed tree of the given schema.
    Validate {
        path: PathBuf,
        #[arg(long)]
        schema: String,
    },
    /// Print the stored tree as a literal.
    Dump {
        path: PathBuf,
        #[arg(long)]
        schema: String,
    },
    /// Serialise a tree literal.
    Encode {
        literal: String,
        #[arg(long)]
        schema: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the subtree at a child path to its own file.
    Extract {
        file: PathBuf,
        #[arg(long)]
        schema: String,
        /// Comma-separated subtree indices, counted per node left to right.
        #[arg(long = "path", default_value = "")]
        child_path: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one of the binary-tree demos on a file.
    Demo {
        name: Demo,
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time in-place operations against deserialise-then-compute.
    Bench {
        #[arg(long)]
        exp: Experiment,
        #[arg(long, default_value = "4..20")]
        depths: String,
        #[arg(long, default_value_t = 20)]
        reps: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Demo {
    Sum,
    RightmostView,
    RightmostPoke,
    Copy,
    Swap,
    MapIncr,
}

/// `dsl` or `@file` containing it.
pub fn resolve_schema(arg: &str) -> Result<Schema> {
    match arg.strip_prefix('@') {
        Some(path) => syntax::parse_schema(&fs::read_to_string(path)?),
        None => syntax::parse_schema(arg),
    }
}

/// `""` is the root, `"1,0"` the first subtree of the second subtree.
pub fn parse_child_path(text: &str) -> Result<Vec<usize>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut col = 1;
    text.split(',')
        .map(|part| {
            let at = col;
            col += part.chars().count() + 1;
            part.trim().parse().map_err(|_| WireError::Parse { pos: at, msg: format!("bad path step `{part}`") })
        })
        .collect()
}

/// `4..20` (inclusive) or `4,8,12`.
pub fn parse_depths(text: &str) -> Result<Vec<u32>> {
    let bad = || WireError::Parse { pos: 1, msg: format!("bad depth list `{text}`") };
    let depths: Vec<u32> = match text.split_once("..") {
        Some((lo, hi)) => {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            (lo..=hi).collect()
        }
        None => text.split(',').map(|d| d.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?,
    };
    if depths.is_empty() || depths.contains(&0) {
        return Err(bad());
    }
    Ok(depths)
}

pub fn inspect(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    let (header, data_start) = codec::decode_header(&bytes)?;
    let shapes = Schema::from_shapes(header.shapes)?;
    Ok(format!("desc_len={}; {}; data={}B", header.desc_len, shapes, bytes.len() - data_start))
}

pub fn validate(path: &Path, schema: &Schema) -> Result<String> {
    let region = Region::open(path, schema)?;
    let tree = deserialise(region.root())?;
    Ok(format!("ok: {} node(s), data={}B", tree.node_count(), region.root().size()))
}

pub fn dump(path: &Path, schema: &Schema) -> Result<String> {
    let region = Region::open(path, schema)?;
    Ok(syntax::print_tree(schema, &deserialise(region.root())?))
}

pub fn encode(schema: &Schema, literal: &str, out: &Path) -> Result<()> {
    let tree = syntax::parse_tree(schema, literal)?;
    let region = exec(schema, plan_tree(schema, &tree))?;
    fs::write(out, region.bytes())?;
    Ok(())
}

/// Follows `steps` from the root, one subtree index per level.
pub fn navigate<'r>(root: TreeCursor<'r>, steps: &[usize]) -> Result<TreeCursor<'r>> {
    steps.iter().enumerate().try_fold(root, |c, (step, &index)| {
        let subs = children(c)?;
        subs.get(index).copied().ok_or(WireError::PathOutOfRange { step, index, available: subs.len() })
    })
}

pub fn extract(path: &Path, schema: &Schema, steps: &[usize], out: &Path) -> Result<()> {
    let region = Region::open(path, schema)?;
    write_to_file(out, navigate(region.root(), steps)?)
}

pub fn demo(name: Demo, path: &Path, out: Option<&Path>) -> Result<String> {
    let schema = Schema::tree();
    let region = Region::open(path, &schema)?;
    let root = region.root();
    let show = |b: Option<u8>| b.map_or_else(|| "absent".to_owned(), |b| b.to_string());
    let plan = match name {
        Demo::Sum => return Ok(sum_region(root)?.to_string()),
        Demo::RightmostView => return Ok(show(rightmost_via_view(root)?)),
        Demo::RightmostPoke => return Ok(show(rightmost_via_poke(root)?)),
        Demo::Copy => plan_copy(root),
        Demo::Swap => swap_tree(root),
        Demo::MapIncr => map_tree_bytes(&|b: u8| b.wrapping_add(1), root),
    };
    let out = out.ok_or_else(|| WireError::Io(io::Error::other("this demo writes a file: pass --out")))?;
    let result = exec(&schema, plan)?;
    fs::write(out, result.bytes())?;
    Ok(format!("wrote {} byte(s) to {}", result.bytes().len(), out.display()))
}

pub fn run_bench(spec: &BenchSpec, out: Option<&Path>) -> Result<()> {
    let rows = bench::run_bench(spec)?;
    match out {
        Some(path) => bench::write_csv(fs::File::create(path)?, &rows),
        None => bench::write_csv(io::stdout().lock(), &rows),
    }
}

/// Runs one parsed command; text meant for stdout is written to `stdout`.
pub fn run(cli: Cli, stdout: &mut impl Write) -> Result<()> {
    let text = match cli.command {
        Command::Inspect { path } => inspect(&path)?,
        Command::Validate { path, schema } => validate(&path, &resolve_schema(&schema)?)?,
        Command::Dump { path, schema } => dump(&path, &resolve_schema(&schema)?)?,
        Command::Encode { literal, schema, out } => {
            encode(&resolve_schema(&schema)?, &literal, &out)?;
            return Ok(());
        }
        Command::Extract { file, schema, child_path, out } => {
            extract(&file, &resolve_schema(&schema)?, &parse_child_path(&child_path)?, &out)?;
            return Ok(());
        }
        Command::Demo { name, path, out } => demo(name, &path, out.as_deref())?,
        Command::Bench { exp, depths, reps, out } => {
            let spec = BenchSpec { experiment: exp, depths: parse_depths(&depths)?, repetitions: reps.max(1) };
            return run_bench(&spec, out.as_deref());
        }
    };
    writeln!(stdout, "{text}")?;
    Ok(())
}
