//! Construction of optimal codeword lengths, level by level from the bottom.
//!
//! Both drivers keep only leaf levels (a [`LevelState`]) and a pool of
//! weights not yet placed. Internal nodes are evaluated on demand by the
//! split engine.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::select::Comparisons;
use crate::split::SplitEngine;
use crate::types::{CodeLengthProfile, ConstructionStats, LevelState, TraceStep, WeightList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Visits every level between the deepest and the root.
    Basic,
    /// Jumps straight to the next level that can receive weights.
    Detailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstructionMode {
    pub algorithm: Algorithm,
    /// Report counted comparisons in the stats. Counting itself is always on.
    pub comparison_counting: bool,
}

impl ConstructionMode {
    pub const BASIC: Self = ConstructionMode { algorithm: Algorithm::Basic, comparison_counting: true };
    pub const DETAILED: Self = ConstructionMode { algorithm: Algorithm::Detailed, comparison_counting: true };
}

impl Default for ConstructionMode {
    fn default() -> Self {
        Self::DETAILED
    }
}

/// Weights not yet assigned to a level.
///
/// Unsorted input keeps a flat list scanned in full; sorted input keeps a
/// cursor, since the pool is always a suffix of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PendingPool {
    Flat(Vec<u32>),
    Cursor { next: u32, end: u32 },
}

impl PendingPool {
    pub fn new(weights: &WeightList) -> Self {
        let n = weights.len() as u32;
        if weights.is_sorted() {
            PendingPool::Cursor { next: 0, end: n }
        } else {
            PendingPool::Flat((0..n).collect())
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PendingPool::Flat(v) => v.len(),
            PendingPool::Cursor { next, end } => (end - next) as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Remaining indices, in no particular order.
    pub fn indices(&self) -> Vec<u32> {
        match self {
            PendingPool::Flat(v) => v.clone(),
            PendingPool::Cursor { next, end } => (*next..*end).collect(),
        }
    }

    /// The smallest one or two pool entries by rank.
    pub fn two_smallest(&self, state: &LevelState, counter: &Comparisons) -> (Option<u32>, Option<u32>) {
        match self {
            PendingPool::Cursor { next, end } => {
                let first = (next < end).then_some(*next);
                let second = (next + 1 < *end).then_some(next + 1);
                (first, second)
            }
            PendingPool::Flat(v) => {
                let key = |i: u32| (state.value(i as usize), i);
                let mut a: Option<u32> = None;
                let mut b: Option<u32> = None;
                for &i in v {
                    match (a, b) {
                        (None, _) => a = Some(i),
                        (Some(x), None) => {
                            if counter.lt(&key(i), &key(x)) {
                                b = a;
                                a = Some(i);
                            } else {
                                b = Some(i);
                            }
                        }
                        (Some(x), Some(y)) => {
                            if counter.lt(&key(i), &key(y)) {
                                if counter.lt(&key(i), &key(x)) {
                                    b = a;
                                    a = Some(i);
                                } else {
                                    b = Some(i);
                                }
                            }
                        }
                    }
                }
                (a, b)
            }
        }
    }

    /// The smallest pool entry by rank.
    pub fn min(&self, state: &LevelState, counter: &Comparisons) -> Option<u32> {
        match self {
            PendingPool::Cursor { next, end } => (next < end).then_some(*next),
            PendingPool::Flat(v) => {
                let key = |i: u32| (state.value(i as usize), i);
                let mut it = v.iter().copied();
                let first = it.next()?;
                Some(it.fold(first, |m, i| if counter.lt(&key(i), &key(m)) { i } else { m }))
            }
        }
    }

    /// Removes and returns every entry whose value is below `s`.
    fn take_below(&mut self, state: &LevelState, s: u128, counter: &Comparisons) -> Vec<u32> {
        match self {
            PendingPool::Cursor { next, end } => {
                let stop = first_at_least(state, *next, *end, s, counter);
                let taken = (*next..stop).collect();
                *next = stop;
                taken
            }
            PendingPool::Flat(v) => {
                let mut taken = Vec::new();
                v.retain(|&i| {
                    if counter.lt(&(state.value(i as usize) as u128), &s) {
                        taken.push(i);
                        false
                    } else {
                        true
                    }
                });
                taken
            }
        }
    }
}

/// First position in `start..end` whose value is at least `s`, by
/// exponential then binary search over sorted values.
fn first_at_least(state: &LevelState, start: u32, end: u32, s: u128, counter: &Comparisons) -> u32 {
    let below = |i: u32| counter.lt(&(state.value(i as usize) as u128), &s);
    let mut lo = start;
    let mut hi = end;
    let mut step = 1u32;
    loop {
        let probe = match lo.checked_add(step - 1) {
            Some(p) if p < end => p,
            _ => break,
        };
        if below(probe) {
            lo = probe + 1;
            step = step.saturating_mul(2);
        } else {
            hi = probe;
            break;
        }
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if below(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

fn tier_index(state: &LevelState, level: u32) -> Result<usize> {
    state
        .tiers()
        .binary_search(&level)
        .map_err(|_| Error::InvalidAssignment("level is not a tier of the state"))
}

fn floor_log2(x: usize) -> u32 {
    usize::BITS - 1 - x.leading_zeros()
}

fn ceil_log2(x: usize) -> u32 {
    if x <= 1 {
        0
    } else {
        floor_log2(x - 1) + 1
    }
}

/// Places the two smallest weights and every weight below their sum at
/// level 0.
pub fn assign_level0(weights: &WeightList, counter: &Comparisons) -> Result<(LevelState, PendingPool)> {
    if weights.len() < 2 {
        return Err(Error::OutOfRange { value: weights.len(), len: 2 });
    }
    let mut state = LevelState::empty(weights);
    let mut pool = PendingPool::new(weights);
    let (a, b) = pool.two_smallest(&state, counter);
    let (a, b) = (a.expect("n >= 2"), b.expect("n >= 2"));
    let s = state.value(a as usize) as u128 + state.value(b as usize) as u128;
    for i in pool.take_below(&state, s, counter) {
        state.set_level(i, 0);
    }
    state.refresh_tiers(Some(0));
    Ok((state, pool))
}

/// Nodes at `level`, leaves and internal alike.
pub fn count_nodes(state: &LevelState, level: u32) -> Result<usize> {
    let tier = tier_index(state, level)?;
    let counter = Comparisons::new();
    let engine = SplitEngine::new(state, &counter)?;
    Ok(engine.node_count(tier, &state.assigned()))
}

/// The next level to receive weights: `current` plus the floor log of the
/// number of smallest nodes at `current` whose total stays below the
/// smallest pool weight.
pub fn compute_next_level(
    state: &LevelState,
    current: u32,
    pool: &PendingPool,
    counter: &Comparisons,
) -> Result<u32> {
    if state.tiers().last() != Some(&current) {
        return Err(Error::InvalidAssignment("current level is not the top tier"));
    }
    let w = pool.min(state, counter).ok_or(Error::Empty)?;
    let engine = SplitEngine::unchecked(state, counter);
    let tier = state.tiers().len() - 1;
    let mut budget = state.value(w as usize) as u128;
    let mut gamma = 0usize;
    let mut list = state.assigned();
    while !list.is_empty() {
        let r = engine.find_splitting_all(tier, &list)?;
        let sum = engine.add_weights(&r.lower) + engine.add_weights(&r.chi);
        if counter.lt(&sum, &budget) {
            budget -= sum;
            gamma += r.pos;
            list = r.upper;
        } else {
            list = r.lower;
        }
    }
    // Under value ties gamma can fall to one; the next level is still above.
    let gap = if gamma < 2 { 1 } else { floor_log2(gamma) };
    current.checked_add(gap).ok_or(Error::Overflow)
}

/// Raises the largest-rank subtrees at `current` by one level so the
/// node count there fills whole nodes at `next`, or a complete tree when
/// `next` is `None`. Returns the number of subtrees moved.
pub fn maintain_kraft(
    state: &mut LevelState,
    current: u32,
    next: Option<u32>,
    counter: &Comparisons,
) -> Result<usize> {
    let tier = tier_index(state, current)?;
    let all = state.assigned();
    let (nu, moved) = {
        let engine = SplitEngine::unchecked(state, counter);
        let m = engine.node_count(tier, &all);
        let nu = match next {
            Some(next) => {
                let gap = next.checked_sub(current).filter(|&g| g >= 1).ok_or(
                    Error::InvalidAssignment("next level must lie above the current one"),
                )?;
                if gap > usize::BITS - 1 {
                    return Err(Error::LevelGap { gap });
                }
                let lambda = 1usize << gap;
                m.div_ceil(lambda) * lambda - m
            }
            None => (1usize << ceil_log2(m)) - m,
        };
        if nu == 0 {
            (0, Vec::new())
        } else {
            (nu, engine.t_largest(nu, tier, all, m).1)
        }
    };
    for &p in &moved {
        let l = state.raw_level(p);
        state.set_level(p, l + 1);
    }
    let pending = match next {
        Some(n) => n,
        None if nu > 0 => current + 1,
        None => current,
    };
    state.refresh_tiers(Some(pending));
    Ok(nu)
}

/// Moves every pool weight smaller than the two smallest candidates among
/// the nodes at `level` and the pool to `level`. Returns how many moved.
pub fn assign_weights_to_level(
    state: &mut LevelState,
    pool: &mut PendingPool,
    level: u32,
    counter: &Comparisons,
) -> Result<usize> {
    state.refresh_tiers(Some(level));
    let tier = tier_index(state, level)?;
    let mut candidates: Vec<u128> = Vec::with_capacity(4);
    {
        let engine = SplitEngine::unchecked(state, counter);
        let all = state.assigned();
        let nodes = engine.node_count(tier, &all);
        if nodes >= 1 {
            let (first, second) = engine.two_smallest(tier, all, nodes);
            candidates.push(engine.add_weights(&first));
            candidates.extend(second.map(|l| engine.add_weights(&l)));
        }
    }
    let (a, b) = pool.two_smallest(state, counter);
    candidates.extend([a, b].into_iter().flatten().map(|i| state.value(i as usize) as u128));
    if candidates.len() < 2 {
        return Err(Error::InvalidAssignment("fewer than two candidates for the level sum"));
    }
    let s = two_smallest_sum(&candidates, counter);
    let taken = pool.take_below(state, s, counter);
    for &i in &taken {
        state.set_level(i, level);
    }
    Ok(taken.len())
}

fn two_smallest_sum(values: &[u128], counter: &Comparisons) -> u128 {
    let mut lo = values[0];
    let mut hi = values[1];
    if counter.lt(&hi, &lo) {
        core::mem::swap(&mut lo, &mut hi);
    }
    for &v in &values[2..] {
        if counter.lt(&v, &hi) {
            if counter.lt(&v, &lo) {
                hi = lo;
                lo = v;
            } else {
                hi = v;
            }
        }
    }
    lo + hi
}

/// Everything a construction run produces.
#[derive(Debug, Clone)]
pub struct Construction {
    pub profile: CodeLengthProfile,
    pub stats: ConstructionStats,
    /// Final leaf levels.
    pub state: LevelState,
    /// Level of the root.
    pub root_level: u32,
    /// Level at which each weight left the pool.
    pub entry_level: Vec<u32>,
}

impl Construction {
    /// The iteration bound: at most two passes per distinct length.
    pub fn iteration_bound_holds(&self) -> bool {
        self.stats.iterations <= 2 * self.stats.k
    }
}

/// Largest number of distinct levels that the currently assigned weights
/// of any one final length occupy in `state`.
pub fn max_level_spread(lengths: &[u32], state: &LevelState) -> usize {
    let mut levels: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
    for (i, &l) in lengths.iter().enumerate() {
        if let Some(level) = state.level_of(i) {
            levels.entry(l).or_default().insert(level);
        }
    }
    levels.values().map(BTreeSet::len).max().unwrap_or(0)
}

struct Driver<'o> {
    observe: &'o mut dyn FnMut(&LevelState),
    state: LevelState,
    pool: PendingPool,
    counter: Comparisons,
    entry: Vec<u32>,
    trace: Vec<TraceStep>,
    current: u32,
}

impl<'o> Driver<'o> {
    fn start(weights: &WeightList, observe: &'o mut dyn FnMut(&LevelState)) -> Result<Self> {
        let counter = Comparisons::new();
        let (state, pool) = assign_level0(weights, &counter)?;
        let assigned = state.assigned_count();
        let mut entry = alloc::vec![u32::MAX; weights.len()];
        for i in state.assigned() {
            entry[i as usize] = 0;
        }
        observe(&state);
        Ok(Driver {
            observe,
            state,
            pool,
            counter,
            entry,
            trace: alloc::vec![TraceStep { level: 0, assigned, moved: 0 }],
            current: 0,
        })
    }

    fn assign(&mut self, level: u32) -> Result<()> {
        let before = self.pool.indices();
        let assigned = assign_weights_to_level(&mut self.state, &mut self.pool, level, &self.counter)?;
        if assigned > 0 {
            for i in before {
                if self.state.level_of(i as usize).is_some() && self.entry[i as usize] == u32::MAX {
                    self.entry[i as usize] = level;
                }
            }
        }
        (self.observe)(&self.state);
        self.trace.push(TraceStep { level, assigned, moved: 0 });
        self.current = level;
        self.state.refresh_tiers(Some(level));
        Ok(())
    }

    fn balance(&mut self, next: Option<u32>) -> Result<()> {
        let moved = maintain_kraft(&mut self.state, self.current, next, &self.counter)?;
        (self.observe)(&self.state);
        self.trace.last_mut().expect("level 0 recorded").moved = moved;
        Ok(())
    }

    fn basic(&mut self) -> Result<()> {
        while !self.pool.is_empty() {
            let next = self.current.checked_add(1).ok_or(Error::Overflow)?;
            self.balance(Some(next))?;
            self.assign(next)?;
        }
        self.balance(None)
    }

    fn detailed(&mut self) -> Result<()> {
        while !self.pool.is_empty() {
            let next = compute_next_level(&self.state, self.current, &self.pool, &self.counter)?;
            self.balance(Some(next))?;
            self.assign(next)?;
        }
        self.balance(None)
    }

    fn finish(self, mode: ConstructionMode) -> Result<Construction> {
        let Driver { state, counter, entry, trace, .. } = self;
        let top_tier = state.tiers().len() - 1;
        let top = state.tiers()[top_tier];
        let count = {
            let engine = SplitEngine::new(&state, &counter)?;
            engine.node_count(top_tier, &state.assigned())
        };
        if !count.is_power_of_two() {
            return Err(Error::InvalidAssignment("top level does not close into a single root"));
        }
        let root_level = top + count.trailing_zeros();
        let lengths: Vec<u32> = state.level_vec().iter().map(|&l| root_level - l).collect();
        let profile = CodeLengthProfile::new(lengths)?;
        let k = distinct(profile.lengths());
        let iterations = match mode.algorithm {
            Algorithm::Detailed => trace.len(),
            // Every level is visited; count only those that took weights.
            Algorithm::Basic => trace.iter().filter(|t| t.assigned > 0).count(),
        };
        let stats = ConstructionStats {
            iterations,
            weight_comparisons: if mode.comparison_counting { counter.get() } else { 0 },
            k,
            trace,
        };
        Ok(Construction { profile, stats, state, root_level, entry_level: entry })
    }
}

fn distinct(lengths: &[u32]) -> usize {
    lengths.iter().collect::<BTreeSet<_>>().len()
}

/// Runs a full construction and keeps the final state alongside the lengths.
pub fn construct(weights: &WeightList, mode: ConstructionMode) -> Result<Construction> {
    construct_observed(weights, mode, &mut |_| {})
}

/// [`construct`], calling `observe` on the state after every step.
pub fn construct_observed(
    weights: &WeightList,
    mode: ConstructionMode,
    observe: &mut dyn FnMut(&LevelState),
) -> Result<Construction> {
    match weights.len() {
        0 => Err(Error::Empty),
        1 => {
            let state = LevelState::from_levels(weights, &[0])?;
            observe(&state);
            Ok(Construction {
                profile: CodeLengthProfile::new(alloc::vec![1])?,
                stats: ConstructionStats {
                    iterations: 1,
                    weight_comparisons: 0,
                    k: 1,
                    trace: alloc::vec![TraceStep { level: 0, assigned: 1, moved: 0 }],
                },
                state,
                root_level: 1,
                entry_level: alloc::vec![0],
            })
        }
        _ => {
            let mut driver = Driver::start(weights, observe)?;
            match mode.algorithm {
                Algorithm::Basic => driver.basic()?,
                Algorithm::Detailed => driver.detailed()?,
            }
            driver.finish(mode)
        }
    }
}

/// Optimal codeword lengths in input order.
pub fn construct_lengths(
    weights: &WeightList,
    mode: ConstructionMode,
) -> Result<(CodeLengthProfile, ConstructionStats)> {
    let c = construct(weights, mode)?;
    Ok((c.profile, c.stats))
}
