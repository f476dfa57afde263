use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mrcode::codec::{read_container, write_container};
use mrcode::verify::levels_from_lengths;
use mrcode::{
    canonical_codes, code_cost, construct_lengths, decode, encode, huffman_lengths, huffman_sorted_lengths,
    is_monotone, verify_exclusion, Algorithm, CodeLengthProfile, ConstructionMode, LevelState, WeightList,
};
use mrcode_cli::bench::{self, Mode};
use mrcode_cli::gen::{generate, Family};
use mrcode_cli::io::{parse_lengths, parse_symbols, parse_weights, render_lines};

#[derive(Parser)]
#[command(name = "mrcode", version, about = "Optimal prefix code lengths, verification and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Detailed,
    Basic,
    Huffman,
    TwoQueue,
}

#[derive(Subcommand)]
enum Command {
    /// Compute codeword lengths for a weight file.
    Lengths {
        #[arg(long, value_enum, default_value = "detailed")]
        algo: Algo,
        /// Declare the weights non-decreasing; checked before use.
        #[arg(long)]
        sorted: bool,
        /// Weight file, one positive integer per line. Defaults to stdin.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Lengths file. Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print run statistics to stderr as key=value lines.
        #[arg(long)]
        stats: bool,
    },
    /// Check a lengths file against its weights.
    Verify {
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        lengths: PathBuf,
    },
    /// Write a generated weight file.
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time constructions and write one CSV row per run.
    Bench {
        #[arg(long, value_enum, value_delimiter = ',', default_value = "example41")]
        families: Vec<Family>,
        /// Sizes; `2^k` is accepted.
        #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "1024")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "detailed")]
        modes: Vec<Mode>,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output. Medians go to a `.summary.csv` file beside it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a symbol stream with the optimal code for a weight file.
    Encode {
        #[arg(long)]
        weights: PathBuf,
        /// Symbol indices, one per line.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Restore the symbol stream from an encoded container.
    Decode {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_size(s: &str) -> Result<usize, String> {
    let bad = || format!("invalid size `{s}`");
    match s.split_once('^') {
        Some(("2", e)) => {
            let e: u32 = e.parse().map_err(|_| bad())?;
            1usize.checked_shl(e).filter(|_| e < usize::BITS).ok_or_else(bad)
        }
        Some(_) => Err(bad()),
        None => s.parse().map_err(|_| bad()),
    }
}

fn read_text(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(bytes).context("writing stdout"),
    }
}

fn load_weights(path: Option<&Path>, sorted: bool) -> Result<WeightList> {
    let text = read_text(path)?;
    let values = parse_weights(&text).with_context(|| format!("parsing weights from {}", describe(path)))?;
    if values.is_empty() {
        bail!("no weights in {}", describe(path));
    }
    Ok(if sorted { WeightList::sorted(&values)? } else { WeightList::new(&values)? })
}

fn describe(path: Option<&Path>) -> String {
    path.map_or_else(|| "stdin".to_string(), |p| p.display().to_string())
}

fn optimal_lengths(weights: &WeightList) -> Result<CodeLengthProfile> {
    Ok(construct_lengths(weights, ConstructionMode::DETAILED)?.0)
}

/// `Ok(true)` on success, `Ok(false)` when a verification failed.
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Lengths { algo, sorted, input, out, stats } => {
            let weights = load_weights(input.as_deref(), sorted)?;
            let mode = |a| ConstructionMode { algorithm: a, comparison_counting: true };
            let (profile, run_stats) = match algo {
                Algo::Detailed => {
                    let (p, s) = construct_lengths(&weights, mode(Algorithm::Detailed))?;
                    (p, Some(s))
                }
                Algo::Basic => {
                    let (p, s) = construct_lengths(&weights, mode(Algorithm::Basic))?;
                    (p, Some(s))
                }
                Algo::Huffman => (huffman_lengths(&weights)?, None),
                Algo::TwoQueue => {
                    if !weights.is_sorted() {
                        bail!("two-queue needs --sorted input");
                    }
                    (huffman_sorted_lengths(&weights)?, None)
                }
            };
            write_out(out.as_deref(), render_lines(profile.lengths()).as_bytes())?;
            if stats {
                let mut e = io::stderr().lock();
                writeln!(e, "n={}", weights.len())?;
                writeln!(e, "k={}", mrcode::distinct_length_count(&profile))?;
                writeln!(e, "cost={}", code_cost(&weights, &profile)?)?;
                writeln!(e, "kraft={}", profile.kraft())?;
                if let Some(s) = run_stats {
                    writeln!(e, "iterations={}", s.iterations)?;
                    writeln!(e, "comparisons={}", s.weight_comparisons)?;
                }
            }
            Ok(true)
        }
        Command::Verify { weights, lengths } => {
            let w = load_weights(Some(&weights), false)?;
            let text = read_text(Some(&lengths))?;
            let l = parse_lengths(&text).with_context(|| format!("parsing lengths from {}", lengths.display()))?;
            if l.len() != w.len() {
                bail!("{} weights but {} lengths", w.len(), l.len());
            }
            let profile = CodeLengthProfile::new(l)?;
            let kraft = profile.kraft();
            let cost = code_cost(&w, &profile)?;
            let best = code_cost(&w, &huffman_lengths(&w)?)?;
            let monotone = is_monotone(&w, &profile)?;
            let kraft_ok = kraft.cmp_one() != std::cmp::Ordering::Greater;
            let yes = |b: bool| if b { "yes" } else { "no" };
            println!("kraft={kraft}{}", match kraft.cmp_one() {
                std::cmp::Ordering::Less => " (below one)",
                std::cmp::Ordering::Greater => " (exceeds one, rejected)",
                std::cmp::Ordering::Equal => "",
            });
            println!("cost={cost}");
            println!("monotone={}", yes(monotone));
            println!("optimal={} (huffman cost {best})", yes(kraft_ok && cost == best));
            let mut ok = kraft.is_one() && monotone && cost == best;
            if kraft.is_one() && w.len() >= 2 {
                let state = LevelState::from_levels(&w, &levels_from_lengths(&profile))?;
                let holds = verify_exclusion(&w, &state)?.holds();
                println!("exclusion={}", yes(holds));
                ok &= holds;
            }
            Ok(ok)
        }
        Command::Gen { family, n, seed, out } => {
            let w = generate(family, n, seed)?;
            write_out(out.as_deref(), render_lines(w).as_bytes())?;
            Ok(true)
        }
        Command::Bench { families, sizes, modes, repeat, seed, out } => {
            if repeat == 0 {
                bail!("--repeat must be at least 1");
            }
            let records = bench::run(&families, &sizes, &modes, repeat, seed)?;
            let file = fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            bench::write_csv(&records, file)?;
            let summary = out.with_extension("summary.csv");
            let file = fs::File::create(&summary).with_context(|| format!("creating {}", summary.display()))?;
            bench::write_csv(&bench::summarize(&records), file)?;
            Ok(true)
        }
        Command::Encode { weights, input, out } => {
            let w = load_weights(Some(&weights), false)?;
            let profile = optimal_lengths(&w)?;
            let table = canonical_codes(&profile)?;
            let text = read_text(Some(&input))?;
            let symbols = parse_symbols(&text, w.len()).with_context(|| format!("parsing {}", input.display()))?;
            let (payload, bits) = encode(&symbols, &table)?;
            write_out(Some(&out), &write_container(profile.lengths(), &payload, bits)?)?;
            Ok(true)
        }
        Command::Decode { input, out } => {
            let bytes = fs::read(&input).with_context(|| format!("reading {}", input.display()))?;
            let c = read_container(&bytes).with_context(|| format!("reading container {}", input.display()))?;
            let profile = CodeLengthProfile::new(c.lengths)?;
            let table = canonical_codes(&profile)?;
            let symbols = decode(&c.payload, c.bit_count, &table)?;
            write_out(Some(&out), render_lines(symbols).as_bytes())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
