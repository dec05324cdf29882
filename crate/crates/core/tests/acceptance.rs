//! One line per acceptance criterion. Exits non-zero if any fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use mu_wire::bench::{full_tree_region, full_tree_size, gen_full_tree, measure, time_mean, Experiment};
use mu_wire::cursor::{deserialise, fold_region, rightmost_via_poke, rightmost_via_view};
use mu_wire::value::{depth_algebra, example_tree, fold, rightmost_tree, size_algebra, sum_algebra};
use mu_wire::writer::{exec, plan_copy, plan_tree};
use mu_wire::{Region, Schema, WireError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn golden_bytes() -> Outcome {
    let s = Schema::tree();
    let region = serialise(&s, &example_tree());
    if region.bytes() != GOLDEN {
        return Err(format!("got {} bytes {:02x?}", region.bytes().len(), region.bytes()));
    }
    let back = deserialise(Region::attach(GOLDEN, &s).map_err(|e| e.to_string())?.root()).map_err(|e| e.to_string())?;
    if back != example_tree() {
        return Err("golden file does not read back as the example tree".into());
    }
    Ok("60 bytes identical".into())
}

fn round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let start = Instant::now();
    let n = 10_000;
    for i in 0..n {
        let s = random_schema(&mut rng, 10, 6);
        let t = random_tree(&mut rng, &s, 6, &mut 500);
        let region = serialise(&s, &t);
        let back = deserialise(region.root()).map_err(|e| format!("pair {i}: {e}"))?;
        if back != t {
            return Err(format!("pair {i}: tree differs after round trip under {s}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 60.0 {
        return Err(format!("{n} pairs took {secs:.1}s"));
    }
    Ok(format!("{n} pairs in {secs:.2}s"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let n = 1_000;
    for i in 0..n {
        let s = random_schema(&mut rng, 10, 6);
        let t = random_tree(&mut rng, &s, 6, &mut 500);
        let region = serialise(&s, &t);
        let root = region.root();
        let err = |e: WireError| format!("tree {i}: {e}");
        let got = (
            fold_region(&sum_algebra, root).map_err(err)?,
            fold_region(&size_algebra, root).map_err(err)?,
            fold_region(&depth_algebra, root).map_err(err)?,
        );
        let pure = deserialise(root).map_err(err)?;
        let want = (fold(&s, &sum_algebra, &pure), fold(&s, &size_algebra, &pure), fold(&s, &depth_algebra, &pure));
        if got != want {
            return Err(format!("tree {i}: fold over region {got:?}, over value {want:?}"));
        }
    }
    let s = Schema::tree();
    for i in 0..n {
        let t = random_binary_tree(&mut rng, 8);
        let region = serialise(&s, &t);
        let want = rightmost_tree(&t);
        let view = rightmost_via_view(region.root()).map_err(|e| e.to_string())?;
        let poke = rightmost_via_poke(region.root()).map_err(|e| e.to_string())?;
        if view != want || poke != want {
            return Err(format!("binary tree {i}: view {view:?}, poke {poke:?}, pure {want:?}"));
        }
    }
    Ok(format!("{n} folds with three algebras, {n} rightmost lookups"))
}

fn layout_arithmetic() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut nodes = 0;
    for i in 0..1_000 {
        let s = random_schema(&mut rng, 10, 6);
        let t = random_tree(&mut rng, &s, 6, &mut 200);
        let region = serialise(&s, &t);
        nodes += check_layout(region.root(), &s, &t).map_err(|e| format!("tree {i}: {e}"))?;
    }
    Ok(format!("{nodes} nodes checked"))
}

fn access_pattern() -> Outcome {
    let mut notes = Vec::new();
    for d in [4u32, 8, 12, 16, 20] {
        let region = full_tree_region(d).map_err(|e| e.to_string())?.instrumented();
        rightmost_via_poke(region.root()).map_err(|e| e.to_string())?;
        let poked = region.read_stats().bytes_read;
        if poked > 32 * u64::from(d) {
            return Err(format!("depth {d}: poke read {poked} bytes"));
        }
        region.reset_stats();
        deserialise(region.root()).map_err(|e| e.to_string())?;
        let full = region.read_stats().bytes_read;
        if full != full_tree_size(d) {
            return Err(format!("depth {d}: deserialise read {full} of {} bytes", full_tree_size(d)));
        }
        notes.push(format!("d={d}:{poked}/{full}"));
    }
    let row = measure(Experiment::Rightmost, 20, 20).map_err(|e| e.to_string())?;
    let ratio = row.deserialised / row.serialised;
    if ratio <= 100.0 {
        return Err(format!("rightmost speedup at depth 20 is {ratio:.0}x"));
    }
    Ok(format!("bytes poke/full {}; speedup at depth 20 {ratio:.0}x", notes.join(" ")))
}

fn copy_speed() -> Outcome {
    let region = full_tree_region(20).map_err(|e| e.to_string())?;
    let s = region.schema();
    let root = region.root();
    let fast = exec(s, plan_copy(root)).map_err(|e| e.to_string())?;
    let deep = exec(s, plan_tree(s, &deserialise(root).map_err(|e| e.to_string())?)).map_err(|e| e.to_string())?;
    if fast.bytes() != deep.bytes() || fast.bytes() != region.bytes() {
        return Err("copies differ".into());
    }
    drop((fast, deep));
    let row = measure(Experiment::Copy, 20, 10).map_err(|e| e.to_string())?;
    let ratio = row.deserialised / row.serialised;
    if ratio < 50.0 {
        return Err(format!("raw copy only {ratio:.1}x faster"));
    }
    Ok(format!("identical output, raw copy {ratio:.0}x faster"))
}

fn sum_parity() -> Outcome {
    let region = full_tree_region(18).map_err(|e| e.to_string())?;
    let root = region.root();
    let want = mu_wire::value::sum_tree(&gen_full_tree(18));
    let direct = mu_wire::cursor::sum_region(root).map_err(|e| e.to_string())?;
    let via = mu_wire::value::sum_tree(&deserialise(root).map_err(|e| e.to_string())?);
    if direct != want || via != want {
        return Err(format!("sums {direct} and {via}, expected {want}"));
    }
    let fast = time_mean(20, || mu_wire::cursor::sum_region(root));
    let slow = time_mean(20, || deserialise(root).map(|t| mu_wire::value::sum_tree(&t)));
    let ratio = fast.max(slow) / fast.min(slow);
    if ratio >= 10.0 {
        return Err(format!("timings {fast:.0}ns vs {slow:.0}ns differ {ratio:.1}x"));
    }
    Ok(format!("sum {want}; timings within {ratio:.2}x"))
}

fn error_kind(e: &WireError) -> Option<&'static str> {
    Some(match e {
        WireError::BadTag { .. } => "bad tag",
        WireError::TruncatedBuffer { .. } => "truncated",
        WireError::BadDescTag { .. } => "bad desc tag",
        WireError::SchemaMismatch { .. } => "schema mismatch",
        WireError::SizeMismatch { .. } => "size mismatch",
        WireError::TrailingGarbageInHeader { .. } => "trailing header bytes",
        _ => return None,
    })
}

fn robustness() -> Outcome {
    let s = Schema::tree();
    let mut kinds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut cases = 0;
    for at in 0..GOLDEN.len() {
        for v in 0..=255u8 {
            if GOLDEN[at] == v {
                continue;
            }
            cases += 1;
            let mut bytes = GOLDEN;
            bytes[at] = v;
            let verdict = catch_unwind(AssertUnwindSafe(|| -> Result<&'static str, String> {
                let typed = |e: WireError| error_kind(&e).ok_or_else(|| format!("untyped failure {e}"));
                let region = match Region::attach(bytes.to_vec(), &s) {
                    Ok(r) => r,
                    Err(e) => return typed(e),
                };
                let _ = rightmost_via_poke(region.root());
                let _ = rightmost_via_view(region.root());
                let _ = fold_region(&sum_algebra, region.root());
                match deserialise(region.root()) {
                    Err(e) => typed(e),
                    Ok(t) if serialise(&s, &t).bytes() == bytes => Ok("round trip"),
                    Ok(_) => Err("decoded but re-encodes differently".into()),
                }
            }));
            match verdict {
                Err(_) => return Err(format!("panic at byte {at} = {v:#04x}")),
                Ok(Err(e)) => return Err(format!("byte {at} = {v:#04x}: {e}")),
                Ok(Ok(kind)) => *kinds.entry(kind).or_default() += 1,
            }
        }
    }
    let breakdown: Vec<String> = kinds.iter().map(|(k, n)| format!("{k} {n}")).collect();
    Ok(format!("{cases} corruptions, no panics: {}", breakdown.join(", ")))
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [Criterion; 8] = [
        ("golden bytes", golden_bytes),
        ("round trip", round_trip),
        ("oracle equivalence", oracle_equivalence),
        ("layout arithmetic", layout_arithmetic),
        ("access pattern", access_pattern),
        ("copy speed", copy_speed),
        ("sum parity", sum_parity),
        ("robustness", robustness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
