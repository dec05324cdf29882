//! Timing harness comparing in-place operations with
//! deserialise-then-compute on full binary trees.

use std::fmt;
use std::hint::black_box;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::cursor::{deserialise, rightmost_via_poke, sum_region, Region};
use crate::desc::Schema;
use crate::error::{Result, WireError};
use crate::value::{rightmost_tree, sum_tree, Tree};
use crate::writer::{exec, plan_copy, plan_tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Sum,
    Rightmost,
    Copy,
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sum" => Ok(Experiment::Sum),
            "rightmost" => Ok(Experiment::Rightmost),
            "copy" => Ok(Experiment::Copy),
            other => Err(format!("unknown experiment `{other}` (expected sum, rightmost or copy)")),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Sum => "sum",
            Experiment::Rightmost => "rightmost",
            Experiment::Copy => "copy",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchSpec {
    pub experiment: Experiment,
    pub depths: Vec<u32>,
    pub repetitions: u32,
}

impl BenchSpec {
    pub fn new(experiment: Experiment, depths: Vec<u32>) -> BenchSpec {
        BenchSpec { experiment, depths, repetitions: 20 }
    }
}

/// Mean timings in nanoseconds for one tree depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchRow {
    pub size: u32,
    pub serialised: f64,
    pub deserialised: f64,
}

/// Full binary tree of the given depth; every node holds its own height.
pub fn gen_full_tree(depth: u32) -> Tree {
    if depth == 0 {
        Tree::leaf()
    } else {
        let child = gen_full_tree(depth - 1);
        Tree::node(child.clone(), (depth % 256) as u8, child)
    }
}

/// Serialised block size of [`gen_full_tree`]: ten bytes per node
/// (tag, one offset, one byte) and one per leaf.
pub fn full_tree_size(depth: u32) -> u64 {
    let leaves = 1u64 << depth;
    10 * (leaves - 1) + leaves
}

/// Serialises the full tree of the given depth.
pub fn full_tree_region(depth: u32) -> Result<Region> {
    let schema = Schema::tree();
    let tree = gen_full_tree(depth);
    exec(&schema, plan_tree(&schema, &tree))
}

/// Mean wall-clock nanoseconds over `reps` runs, after one untimed warm-up.
pub fn time_mean<T>(reps: u32, mut f: impl FnMut() -> T) -> f64 {
    black_box(f());
    let start = Instant::now();
    for _ in 0..reps {
        black_box(f());
    }
    start.elapsed().as_nanos() as f64 / f64::from(reps.max(1))
}

fn wrong_answer(experiment: &str, depth: u32) -> WireError {
    WireError::OracleMismatch { experiment: experiment.to_owned(), depth }
}

/// Times both routes of one experiment at one depth. Results are checked
/// against the in-memory oracle before any timing.
pub fn measure(experiment: Experiment, depth: u32, reps: u32) -> Result<BenchRow> {
    let region = full_tree_region(depth)?;
    let root = region.root();
    let tree = gen_full_tree(depth);
    let (serialised, deserialised) = match experiment {
        Experiment::Sum => {
            let expect = sum_tree(&tree);
            if sum_region(root)? != expect || sum_tree(&deserialise(root)?) != expect {
                return Err(wrong_answer("sum", depth));
            }
            (time_mean(reps, || sum_region(root)), time_mean(reps, || deserialise(root).map(|t| sum_tree(&t))))
        }
        Experiment::Rightmost => {
            let expect = rightmost_tree(&tree);
            if rightmost_via_poke(root)? != expect || rightmost_tree(&deserialise(root)?) != expect {
                return Err(wrong_answer("rightmost", depth));
            }
            (
                time_mean(reps, || rightmost_via_poke(root)),
                time_mean(reps, || deserialise(root).map(|t| rightmost_tree(&t))),
            )
        }
        Experiment::Copy => {
            let schema = region.schema();
            let fast = exec(schema, plan_copy(root))?;
            let deep = exec(schema, plan_tree(schema, &deserialise(root)?))?;
            if fast.bytes() != region.bytes() || deep.bytes() != region.bytes() {
                return Err(wrong_answer("copy", depth));
            }
            drop((fast, deep));
            (
                time_mean(reps, || exec(schema, plan_copy(root))),
                time_mean(reps, || deserialise(root).and_then(|t| exec(schema, plan_tree(schema, &t)))),
            )
        }
    };
    Ok(BenchRow { size: depth, serialised, deserialised })
}

pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    spec.depths.iter().map(|&d| measure(spec.experiment, d, spec.repetitions)).collect()
}

/// Writes rows under the header `size,serialised,deserialised`.
pub fn write_csv<W: io::Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| WireError::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}
