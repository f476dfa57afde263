//! Domain values shared by the constructors, oracles and verifiers.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigUint;

use crate::error::{Error, Result};

/// Largest input size. Leaf positions are stored as `u32`.
pub const MAX_WEIGHTS: usize = u32::MAX as usize - 1;

/// A positive weight tagged with its position in the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeightItem {
    pub value: u64,
    pub index: usize,
}

impl WeightItem {
    /// Strict order used everywhere a rank is needed: value first, then
    /// input position.
    pub fn rank_cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value).then(self.index.cmp(&other.index))
    }
}

/// The input multiset of weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightList {
    items: Vec<WeightItem>,
    sorted: bool,
}

impl WeightList {
    /// Unsorted weights. Every value must be at least one.
    pub fn new(values: &[u64]) -> Result<Self> {
        if values.len() > MAX_WEIGHTS {
            return Err(Error::TooLarge { n: values.len(), max: MAX_WEIGHTS });
        }
        if let Some(index) = values.iter().position(|&v| v == 0) {
            return Err(Error::ZeroWeight { index });
        }
        let items = values
            .iter()
            .enumerate()
            .map(|(index, &value)| WeightItem { value, index })
            .collect();
        Ok(WeightList { items, sorted: false })
    }

    /// Weights declared non-decreasing; the declaration is checked.
    pub fn sorted(values: &[u64]) -> Result<Self> {
        let mut list = Self::new(values)?;
        if let Some(i) = values.windows(2).position(|w| w[0] > w[1]) {
            return Err(Error::NotSorted { index: i + 1 });
        }
        list.sorted = true;
        Ok(list)
    }

    /// Same weights, sorted flag set when they happen to be non-decreasing.
    pub fn detect_sorted(values: &[u64]) -> Result<Self> {
        let mut list = Self::new(values)?;
        list.sorted = values.windows(2).all(|w| w[0] <= w[1]);
        Ok(list)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn items(&self) -> &[WeightItem] {
        &self.items
    }

    pub fn value(&self, index: usize) -> u64 {
        self.items[index].value
    }

    pub fn values(&self) -> impl ExactSizeIterator<Item = u64> + '_ {
        self.items.iter().map(|it| it.value)
    }
}

/// An exact dyadic rational `numerator / 2^exponent`, kept reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KraftSum {
    numerator: BigUint,
    exponent: u32,
}

impl KraftSum {
    /// Sum of `2^-l` over the given lengths.
    ///
    /// Lengths are bucketed by value and carried upward like binary
    /// addition, so the result is exact for any count.
    pub fn of_lengths(lengths: &[u32]) -> Self {
        let Some(&deepest) = lengths.iter().max() else {
            return KraftSum { numerator: BigUint::default(), exponent: 0 };
        };
        let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
        for &l in lengths {
            *counts.entry(l).or_default() += 1;
        }
        let mut numerator = BigUint::default();
        for (&l, &c) in &counts {
            numerator += BigUint::from(c) << (deepest - l) as usize;
        }
        let mut sum = KraftSum { numerator, exponent: deepest };
        sum.reduce();
        sum
    }

    fn reduce(&mut self) {
        if self.numerator == BigUint::default() {
            self.exponent = 0;
            return;
        }
        let tz = self.numerator.trailing_zeros().unwrap_or(0);
        let shift = tz.min(self.exponent as u64);
        self.numerator >>= shift as usize;
        self.exponent -= shift as u32;
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    /// Base-two logarithm of the denominator.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::from(1u8) << self.exponent as usize
    }

    pub fn cmp_one(&self) -> Ordering {
        self.numerator.cmp(&self.denominator())
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0 && self.numerator == BigUint::from(1u8)
    }
}

impl fmt::Display for KraftSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator())
        }
    }
}

/// Codeword lengths indexed like the input weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeLengthProfile {
    lengths: Vec<u32>,
    kraft: KraftSum,
}

impl CodeLengthProfile {
    pub fn new(lengths: Vec<u32>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(index) = lengths.iter().position(|&l| l == 0) {
            return Err(Error::ZeroLength { index });
        }
        let kraft = KraftSum::of_lengths(&lengths);
        Ok(CodeLengthProfile { lengths, kraft })
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn kraft(&self) -> &KraftSum {
        &self.kraft
    }

    /// True when the lengths describe a full binary tree.
    pub fn kraft_is_equality(&self) -> bool {
        self.kraft.is_one()
    }

    pub fn max_length(&self) -> u32 {
        self.lengths.iter().copied().max().unwrap_or(0)
    }

    pub fn into_lengths(self) -> Vec<u32> {
        self.lengths
    }
}

pub(crate) const UNASSIGNED: u32 = u32::MAX;

/// Leaves assigned so far, by bottom-up level number (0 is the deepest).
///
/// Internal nodes are never stored: they are implied by pairing the nodes
/// of each level in rank order, bottom up. `tiers` lists the levels the
/// split engine walks; it always contains every level holding a leaf and
/// may additionally hold one level that is about to receive leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelState {
    values: Vec<u64>,
    level: Vec<u32>,
    tiers: Vec<u32>,
    sorted: bool,
}

impl LevelState {
    /// Nothing assigned yet.
    pub fn empty(weights: &WeightList) -> Self {
        LevelState {
            values: weights.values().collect(),
            level: alloc::vec![UNASSIGNED; weights.len()],
            tiers: Vec::new(),
            sorted: weights.is_sorted(),
        }
    }

    /// Every weight placed at the given level.
    pub fn from_levels(weights: &WeightList, levels: &[u32]) -> Result<Self> {
        if levels.len() != weights.len() {
            return Err(Error::LengthMismatch { expected: weights.len(), found: levels.len() });
        }
        if levels.contains(&UNASSIGNED) {
            return Err(Error::InvalidAssignment("level number out of range"));
        }
        let mut state = Self::empty(weights);
        state.level.copy_from_slice(levels);
        state.refresh_tiers(None);
        Ok(state)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether positions are in rank order, enabling comparison-free selection.
    pub fn is_sorted(&self) -> bool {
        self.sorted
    }

    pub fn value(&self, index: usize) -> u64 {
        self.values[index]
    }

    pub fn level_of(&self, index: usize) -> Option<u32> {
        match self.level[index] {
            UNASSIGNED => None,
            l => Some(l),
        }
    }

    pub(crate) fn raw_level(&self, index: u32) -> u32 {
        self.level[index as usize]
    }

    pub(crate) fn set_level(&mut self, index: u32, level: u32) {
        self.level[index as usize] = level;
    }

    /// Levels visited by the split engine, ascending.
    pub fn tiers(&self) -> &[u32] {
        &self.tiers
    }

    /// Keeps `level` among the tiers even while it holds no leaf.
    pub fn with_tier(mut self, level: u32) -> Self {
        self.refresh_tiers(Some(level));
        self
    }

    /// Recomputes the tier list from the leaves, optionally keeping one
    /// extra level that has no leaves yet.
    pub(crate) fn refresh_tiers(&mut self, pending: Option<u32>) {
        let mut seen: Vec<u32> = Vec::new();
        for &l in &self.level {
            if l != UNASSIGNED && !seen.contains(&l) {
                seen.push(l);
            }
        }
        if let Some(p) = pending {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen.sort_unstable();
        self.tiers = seen;
    }

    /// Indices of all assigned leaves, in index order.
    pub fn assigned(&self) -> Vec<u32> {
        (0..self.level.len() as u32).filter(|&i| self.raw_level(i) != UNASSIGNED).collect()
    }

    pub fn assigned_count(&self) -> usize {
        self.level.iter().filter(|&&l| l != UNASSIGNED).count()
    }

    /// Leaves at one level, in rank order.
    pub fn leaves_at(&self, level: u32) -> Vec<WeightItem> {
        let mut items: Vec<WeightItem> = (0..self.level.len())
            .filter(|&i| self.level[i] == level)
            .map(|index| WeightItem { value: self.values[index], index })
            .collect();
        items.sort_by(WeightItem::rank_cmp);
        items
    }

    /// The leaf-bearing levels as an ordered map.
    pub fn levels(&self) -> BTreeMap<u32, Vec<WeightItem>> {
        let mut map: BTreeMap<u32, Vec<WeightItem>> = BTreeMap::new();
        for (index, &l) in self.level.iter().enumerate() {
            if l != UNASSIGNED {
                map.entry(l).or_default().push(WeightItem { value: self.values[index], index });
            }
        }
        for items in map.values_mut() {
            items.sort_by(WeightItem::rank_cmp);
        }
        map
    }

    /// `(level, n_i)` for every leaf-bearing level, ascending.
    pub fn leaf_counts(&self) -> Vec<(u32, usize)> {
        self.levels().into_iter().map(|(l, v)| (l, v.len())).collect()
    }

    /// Running totals `N_j` of [`Self::leaf_counts`].
    pub fn prefix_counts(&self) -> Vec<usize> {
        let mut acc = 0;
        self.leaf_counts()
            .into_iter()
            .map(|(_, c)| {
                acc += c;
                acc
            })
            .collect()
    }

    /// Level of every leaf; panics if some weight is unassigned.
    pub fn level_vec(&self) -> Vec<u32> {
        assert!(self.level.iter().all(|&l| l != UNASSIGNED), "unassigned weights");
        self.level.clone()
    }
}

/// One pass of the main construction loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceStep {
    /// Level that received weights from the pool in this pass.
    pub level: u32,
    /// Number of weights it received.
    pub assigned: usize,
    /// Subtrees moved up when balancing the level below afterwards.
    pub moved: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstructionStats {
    /// Main-loop passes. The basic driver visits every level and counts
    /// only those that received weights from the pool.
    pub iterations: usize,
    /// Value comparisons, as defined by [`crate::select::Comparisons`].
    pub weight_comparisons: u64,
    /// Distinct codeword lengths in the output.
    pub k: usize,
    pub trace: Vec<TraceStep>,
}
