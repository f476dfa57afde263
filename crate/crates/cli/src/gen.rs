//! Seeded weight generators.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Result};
use mrcode::{construct, ConstructionMode, WeightList};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Family {
    /// Three distinct lengths with two leaf levels far apart.
    Example41,
    Equal,
    /// Powers of two, one apart.
    Exponential,
    Uniform,
    Geometric,
    TwoCluster,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Example41,
        Family::Equal,
        Family::Exponential,
        Family::Uniform,
        Family::Geometric,
        Family::TwoCluster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Example41 => "example41",
            Family::Equal => "equal",
            Family::Exponential => "exponential",
            Family::Uniform => "uniform",
            Family::Geometric => "geometric",
            Family::TwoCluster => "two-cluster",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| anyhow::anyhow!("unknown family `{s}`"))
    }
}

/// Weights of `family` with size parameter `n`. For `example41` the output
/// holds `3n/2 + 2` weights; every other family emits exactly `n`.
pub fn generate(family: Family, n: usize, seed: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ensure!(n >= 1, "n must be at least 1");
    Ok(match family {
        Family::Example41 => return example41(n, &mut rng),
        Family::Equal => vec![1; n],
        Family::Exponential => {
            ensure!(n <= 63, "exponential weights need n <= 63");
            (0..n).map(|i| 1u64 << i).collect()
        }
        Family::Uniform => (0..n).map(|_| rng.gen_range(1..=1_000_000_000)).collect(),
        Family::Geometric => {
            // Inverse transform with success probability 1/16.
            let q = (15.0f64 / 16.0).ln();
            (0..n).map(|_| 1 + (rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() / q) as u64).collect()
        }
        Family::TwoCluster => (0..n)
            .map(|i| if i % 2 == 0 { rng.gen_range(1..=100) } else { rng.gen_range(1_000_000..=1_000_100) })
            .collect(),
    })
}

/// `n` weights that pair up completely at level 0, `n/2` that fill level 1
/// exactly, and two heavy weights that only fit at level `lg n`. The
/// result is checked by construction to have three distinct lengths;
/// unlucky draws are redrawn from the same stream.
fn example41(n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    if n < 4 || !n.is_power_of_two() {
        bail!("example41 needs n a power of two and at least 4, got {n}");
    }
    let big = n as u64;
    for _ in 0..64 {
        let mut w: Vec<u64> = (0..n).map(|_| rng.gen_range(1000..=1100)).collect();
        w.extend((0..n / 2).map(|_| rng.gen_range(2300..=3900)));
        w.extend((0..2).map(|_| rng.gen_range(1100 * big..=2100 * big)));
        let mut sorted = w.clone();
        sorted.sort_unstable();
        let c = construct(&WeightList::sorted(&sorted)?, ConstructionMode::DETAILED)?;
        if c.stats.k == 3 {
            return Ok(w);
        }
    }
    bail!("could not draw an example41 instance with three lengths for n = {n}")
}
