//! Benchmark harness: one timed construction per record.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::time::Instant;

use anyhow::{ensure, Result};
use mrcode::{
    construct_lengths, distinct_length_count, huffman_lengths, huffman_sorted_lengths, Algorithm,
    ConstructionMode, WeightList,
};

use crate::gen::{generate, Family};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum)]
pub enum Mode {
    Detailed,
    DetailedSorted,
    Basic,
    BasicSorted,
    Huffman,
    TwoQueue,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Detailed => "detailed",
            Mode::DetailedSorted => "detailed-sorted",
            Mode::Basic => "basic",
            Mode::BasicSorted => "basic-sorted",
            Mode::Huffman => "huffman",
            Mode::TwoQueue => "two-queue",
        }
    }

    fn sorted_input(self) -> bool {
        matches!(self, Mode::DetailedSorted | Mode::BasicSorted | Mode::TwoQueue)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub family: Family,
    /// Size parameter handed to the generator.
    pub n: usize,
    pub k: usize,
    pub mode: Mode,
    pub time_ns: u128,
    pub comparisons: u64,
    pub iterations: usize,
}

pub const HEADER: [&str; 7] = ["family", "n", "k", "mode", "time_ns", "comparisons", "iterations"];

/// Generates one instance and times a single construction on it. Input
/// preparation (sorting, validation) happens before the clock starts.
pub fn run_one(family: Family, n: usize, mode: Mode, seed: u64) -> Result<BenchRecord> {
    let mut values = generate(family, n, seed)?;
    let weights = if mode.sorted_input() {
        values.sort_unstable();
        WeightList::sorted(&values)?
    } else {
        WeightList::new(&values)?
    };
    let algorithm = |a| ConstructionMode { algorithm: a, comparison_counting: true };
    let start = Instant::now();
    let (profile, comparisons, iterations) = match mode {
        Mode::Detailed | Mode::DetailedSorted => {
            let (p, s) = construct_lengths(&weights, algorithm(Algorithm::Detailed))?;
            (p, s.weight_comparisons, s.iterations)
        }
        Mode::Basic | Mode::BasicSorted => {
            let (p, s) = construct_lengths(&weights, algorithm(Algorithm::Basic))?;
            (p, s.weight_comparisons, s.iterations)
        }
        Mode::Huffman => (huffman_lengths(&weights)?, 0, 0),
        Mode::TwoQueue => (huffman_sorted_lengths(&weights)?, 0, 0),
    };
    let time_ns = start.elapsed().as_nanos();
    let k = distinct_length_count(&profile);
    ensure!(iterations <= 2 * k, "{family} n={n} {mode}: {iterations} iterations exceed 2k = {}", 2 * k);
    Ok(BenchRecord { family, n, k, mode, time_ns, comparisons, iterations })
}

/// Every (family, size, mode) combination, `repeat` times each. Repeats
/// use seeds `seed, seed+1, ...`.
pub fn run(families: &[Family], sizes: &[usize], modes: &[Mode], repeat: usize, seed: u64) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for &family in families {
        for &n in sizes {
            for &mode in modes {
                for r in 0..repeat {
                    out.push(run_one(family, n, mode, seed + r as u64)?);
                }
            }
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write>(records: &[BenchRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.family.name().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.mode.name().to_string(),
            r.time_ns.to_string(),
            r.comparisons.to_string(),
            r.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn median<T: Ord + Copy>(mut v: Vec<T>) -> T {
    v.sort_unstable();
    v[(v.len() - 1) / 2]
}

/// One record per (family, n, mode) holding the median of each measured
/// column over its repetitions.
pub fn summarize(records: &[BenchRecord]) -> Vec<BenchRecord> {
    let mut groups: BTreeMap<(&'static str, usize, Mode), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.family.name(), r.n, r.mode)).or_default().push(r);
    }
    groups
        .into_values()
        .map(|g| BenchRecord {
            family: g[0].family,
            n: g[0].n,
            k: median(g.iter().map(|r| r.k).collect()),
            mode: g[0].mode,
            time_ns: median(g.iter().map(|r| r.time_ns).collect()),
            comparisons: median(g.iter().map(|r| r.comparisons).collect()),
            iterations: median(g.iter().map(|r| r.iterations).collect()),
        })
        .collect()
}
