//! Order statistics: worst-case linear rank selection and the
//! multiplicity-weighted median over rank-ordered node groups.
//!
//! Every comparison between two values goes through a [`Comparisons`]
//! counter. On sorted input the selection is pure index arithmetic and
//! performs no comparisons at all.

use alloc::vec::Vec;
use core::cell::Cell;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::types::WeightItem;

/// Counts value comparisons.
///
/// One increment per comparison of two weights, two node values, or a node
/// value against a weight. Index arithmetic, prefix sums and the index
/// tie-break inside one rank comparison are not counted.
#[derive(Debug, Default)]
pub struct Comparisons(Cell<u64>);

impl Comparisons {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn tick(&self) {
        self.0.set(self.0.get() + 1);
    }

    pub fn get(&self) -> u64 {
        self.0.get()
    }

    pub fn reset(&self) {
        self.0.set(0);
    }

    /// Counted `a < b`.
    #[inline]
    pub fn lt<T: PartialOrd>(&self, a: &T, b: &T) -> bool {
        self.tick();
        a < b
    }

    /// Counted three-way comparison.
    #[inline]
    pub fn cmp<T: Ord>(&self, a: &T, b: &T) -> Ordering {
        self.tick();
        a.cmp(b)
    }
}

/// The outcome of a selection: the element plus the two partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection<T> {
    pub element: T,
    /// Elements ranked before `element` (in no particular order unless the
    /// input was sorted).
    pub smaller: Vec<T>,
    /// Elements ranked after `element`.
    pub larger: Vec<T>,
}

/// Selects the `t`-th (1-based) element of `list` under the strict rank
/// order (value, then index).
///
/// With `sorted` the list is trusted to already be in rank order.
pub fn select_rank(
    list: &[WeightItem],
    t: usize,
    sorted: bool,
    counter: &Comparisons,
) -> Result<Selection<WeightItem>> {
    if t == 0 || t > list.len() {
        return Err(Error::OutOfRange { value: t, len: list.len() });
    }
    let less = |a: &WeightItem, b: &WeightItem| {
        counter.tick();
        a.rank_cmp(b) == Ordering::Less
    };
    Ok(if sorted { select_sorted(list, t - 1) } else { select_by(list.to_vec(), t - 1, &less) })
}

/// The lower median: rank `⌊(len + 1) / 2⌋`.
pub fn find_median(
    list: &[WeightItem],
    sorted: bool,
    counter: &Comparisons,
) -> Result<Selection<WeightItem>> {
    if list.is_empty() {
        return Err(Error::Empty);
    }
    select_rank(list, list.len().div_ceil(2), sorted, counter)
}

pub(crate) fn select_sorted<T: Copy>(list: &[T], t: usize) -> Selection<T> {
    Selection { element: list[t], smaller: list[..t].to_vec(), larger: list[t + 1..].to_vec() }
}

/// Median-of-medians selection of the element at 0-based rank `t`.
/// `less` must be a strict total order over the (distinct) elements.
pub(crate) fn select_by<T, F>(mut current: Vec<T>, mut t: usize, less: &F) -> Selection<T>
where
    T: Copy + PartialEq,
    F: Fn(&T, &T) -> bool,
{
    debug_assert!(t < current.len());
    let mut smaller = Vec::with_capacity(t);
    let mut larger = Vec::with_capacity(current.len() - t - 1);
    loop {
        if current.len() <= 8 {
            insertion_sort(&mut current, less);
            smaller.extend_from_slice(&current[..t]);
            larger.extend_from_slice(&current[t + 1..]);
            return Selection { element: current[t], smaller, larger };
        }
        let pivot = pivot_of(&current, less);
        let mut lo = Vec::with_capacity(current.len());
        let mut hi = Vec::with_capacity(current.len());
        for &x in &current {
            if x == pivot {
                continue;
            }
            if less(&x, &pivot) {
                lo.push(x);
            } else {
                hi.push(x);
            }
        }
        match t.cmp(&lo.len()) {
            Ordering::Equal => {
                smaller.extend(lo);
                larger.extend(hi);
                return Selection { element: pivot, smaller, larger };
            }
            Ordering::Less => {
                larger.push(pivot);
                larger.extend(hi);
                current = lo;
            }
            Ordering::Greater => {
                t -= lo.len() + 1;
                smaller.extend(lo);
                smaller.push(pivot);
                current = hi;
            }
        }
    }
}

fn pivot_of<T, F>(list: &[T], less: &F) -> T
where
    T: Copy + PartialEq,
    F: Fn(&T, &T) -> bool,
{
    let mut medians: Vec<T> = Vec::with_capacity(list.len() / 5 + 1);
    let mut chunks = list.chunks_exact(5);
    for c in &mut chunks {
        medians.push(median5(c[0], c[1], c[2], c[3], c[4], less));
    }
    let rest = chunks.remainder();
    if !rest.is_empty() {
        let mut tail = rest.to_vec();
        insertion_sort(&mut tail, less);
        medians.push(tail[(tail.len() - 1) / 2]);
    }
    let mid = (medians.len() - 1) / 2;
    select_by(medians, mid, less).element
}

/// Median of five in six comparisons.
fn median5<T: Copy, F: Fn(&T, &T) -> bool>(
    mut a: T,
    mut b: T,
    mut c: T,
    mut d: T,
    mut e: T,
    less: &F,
) -> T {
    if less(&b, &a) {
        core::mem::swap(&mut a, &mut b);
    }
    if less(&d, &c) {
        core::mem::swap(&mut c, &mut d);
    }
    // a < b and c < d; make a the smallest of the four, then drop it.
    if less(&c, &a) {
        core::mem::swap(&mut a, &mut c);
        core::mem::swap(&mut b, &mut d);
    }
    let _ = a;
    if less(&e, &b) {
        core::mem::swap(&mut b, &mut e);
    }
    // b < e and c < d; b is now the smallest of the remaining four.
    if less(&c, &b) {
        core::mem::swap(&mut b, &mut c);
        core::mem::swap(&mut e, &mut d);
    }
    if less(&e, &c) {
        e
    } else {
        c
    }
}

fn insertion_sort<T: Copy, F: Fn(&T, &T) -> bool>(v: &mut [T], less: &F) {
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && less(&v[j], &v[j - 1]) {
            v.swap(j, j - 1);
            j -= 1;
        }
    }
}

/// Rank-ordered nodes, each given by the list of leaves in its subtree.
/// A node's multiplicity is the size of that list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedGroup<T> {
    blocks: Vec<Vec<T>>,
    total: usize,
}

impl<T> RankedGroup<T> {
    pub fn new(blocks: Vec<Vec<T>>) -> Self {
        let total = blocks.iter().map(Vec::len).sum();
        RankedGroup { blocks, total }
    }

    pub fn blocks(&self) -> &[Vec<T>] {
        &self.blocks
    }

    pub fn total_multiplicity(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Result of [`weighted_median`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedMedian<'a, T> {
    /// 1-based rank of the chosen block.
    pub pos: usize,
    pub chosen: &'a [T],
    pub lower: &'a [Vec<T>],
    pub upper: &'a [Vec<T>],
    pub lower_multiplicity: usize,
    pub upper_multiplicity: usize,
}

/// The block whose preceding cumulative multiplicity is the largest value
/// not exceeding `target`. Uses prefix sums only, so no comparisons.
pub fn weighted_median<T>(group: &RankedGroup<T>, target: usize) -> Result<WeightedMedian<'_, T>> {
    if group.is_empty() {
        return Err(Error::Empty);
    }
    if target > group.total {
        return Err(Error::OutOfRange { value: target, len: group.total });
    }
    let mut before = 0;
    let mut chosen = group.blocks.len() - 1;
    for (i, b) in group.blocks.iter().enumerate() {
        if before + b.len() > target {
            chosen = i;
            break;
        }
        before += b.len();
    }
    // With trailing empty blocks the loop can run off the end.
    let before: usize = group.blocks[..chosen].iter().map(Vec::len).sum();
    let size = group.blocks[chosen].len();
    Ok(WeightedMedian {
        pos: chosen + 1,
        chosen: &group.blocks[chosen],
        lower: &group.blocks[..chosen],
        upper: &group.blocks[chosen + 1..],
        lower_multiplicity: before,
        upper_multiplicity: group.total - before - size,
    })
}
