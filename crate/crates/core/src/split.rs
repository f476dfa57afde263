//! The splitting engine.
//!
//! Evaluates selected nodes of the implicit tree described by a
//! [`LevelState`] without building it. A node's value is the sum of the
//! leaves in its subtree; nodes of one level are ranked by (value, smallest
//! leaf index), and consecutive ranks are siblings. So the `r`-th internal
//! node of a tier is made of the `λ` nodes ranked `(r-1)λ+1 ..= rλ` on the
//! tier below, where `λ = 2^gap`.
//!
//! All routines take a *slice*: the leaves of a set of consecutive-rank
//! nodes at some tier. Slices are plain lists of leaf indices. Every list
//! the engine returns is a concatenation of pieces in increasing rank, so on
//! sorted input the leaves of each level appear in rank order and medians
//! are found by index arithmetic alone.
//!
//! Tiers are 0-based indices into [`LevelState::tiers`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::select::{select_by, select_sorted, Comparisons, Selection};
use crate::types::{LevelState, WeightItem, UNASSIGNED};

/// Value of a node plus the smallest leaf index below it, compared
/// lexicographically.
pub(crate) type NodeKey = (u128, u32);

/// Largest supported distance between two consecutive tiers.
pub const MAX_LEVEL_GAP: u32 = 62;

/// A node located by the engine, with the leaves of the nodes ranked
/// before and after it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitResult {
    /// 1-based rank of the node within the slice.
    pub pos: usize,
    /// Leaves of the located node.
    pub chi: Vec<u32>,
    /// Leaves of the nodes ranked before it.
    pub lower: Vec<u32>,
    /// Leaves of the nodes ranked after it.
    pub upper: Vec<u32>,
}

/// Exact sum of a list of weights.
pub fn add_weights(items: &[WeightItem]) -> Result<u128> {
    items.iter().try_fold(0u128, |acc, it| acc.checked_add(it.value as u128).ok_or(Error::Overflow))
}

#[derive(Debug, Clone, Copy)]
enum Goal {
    /// The node covering leaf position `⌊N/2⌋` in rank order.
    Half,
    /// The node of rank `t` among `nodes` nodes.
    Rank { t: usize, nodes: usize },
}

/// Splitting node of the internal nodes of a slice, with its rank among
/// them and the leaves on either side.
struct Inner {
    p: usize,
    key: NodeKey,
    chi: Vec<u32>,
    lo: Vec<u32>,
    hi: Vec<u32>,
}

/// Pieces prepended one at a time, flattened at the end.
#[derive(Default)]
struct Prepend(Vec<Vec<u32>>);

impl Prepend {
    fn push_front(&mut self, piece: Vec<u32>) {
        if !piece.is_empty() {
            self.0.push(piece);
        }
    }

    fn finish(self) -> Vec<u32> {
        let total = self.0.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(total);
        for piece in self.0.into_iter().rev() {
            out.extend(piece);
        }
        out
    }
}

pub struct SplitEngine<'s> {
    state: &'s LevelState,
    tier_of_level: Vec<u32>,
    counter: &'s Comparisons,
}

impl<'s> SplitEngine<'s> {
    /// Engine over `state`. Every tier except the highest must hold a node
    /// count divisible by `2^gap` to the next tier, so internal nodes are
    /// well defined.
    pub fn new(state: &'s LevelState, counter: &'s Comparisons) -> Result<Self> {
        let tiers = state.tiers();
        if let Some(gap) = tiers.windows(2).map(|w| w[1] - w[0]).find(|&g| g > MAX_LEVEL_GAP) {
            return Err(Error::LevelGap { gap });
        }
        let engine = Self::unchecked(state, counter);
        let all = state.assigned();
        let mut counts = vec![0usize; tiers.len()];
        for &p in &all {
            counts[engine.tier_of(p)] += 1;
        }
        let mut nodes = 0usize;
        for i in 0..tiers.len() {
            if i > 0 {
                let gap = tiers[i] - tiers[i - 1];
                if !nodes.is_multiple_of(1usize << gap) {
                    return Err(Error::InvalidAssignment(
                        "node count below a tier does not fill its internal nodes",
                    ));
                }
                nodes >>= gap;
            }
            nodes += counts[i];
        }
        Ok(engine)
    }

    pub(crate) fn unchecked(state: &'s LevelState, counter: &'s Comparisons) -> Self {
        let tiers = state.tiers();
        let top = tiers.last().map_or(0, |&l| l as usize + 1);
        let mut tier_of_level = vec![UNASSIGNED; top];
        for (i, &l) in tiers.iter().enumerate() {
            tier_of_level[l as usize] = i as u32;
        }
        SplitEngine { state, tier_of_level, counter }
    }

    pub fn state(&self) -> &LevelState {
        self.state
    }

    pub fn tier_count(&self) -> usize {
        self.state.tiers().len()
    }

    #[inline]
    fn tier_of(&self, leaf: u32) -> usize {
        self.tier_of_level[self.state.raw_level(leaf) as usize] as usize
    }

    #[inline]
    fn level(&self, tier: usize) -> u32 {
        self.state.tiers()[tier]
    }

    #[inline]
    fn leaf_key(&self, leaf: u32) -> NodeKey {
        (self.state.value(leaf as usize) as u128, leaf)
    }

    /// Value and tie-break key of the node made of `leaves`.
    pub(crate) fn node_key(&self, leaves: &[u32]) -> NodeKey {
        let mut sum = 0u128;
        let mut min = u32::MAX;
        for &p in leaves {
            sum += self.state.value(p as usize) as u128;
            min = min.min(p);
        }
        (sum, min)
    }

    /// Sum of the weights of `leaves`. Cannot overflow for fewer than
    /// 2^64 leaves.
    pub fn add_weights(&self, leaves: &[u32]) -> u128 {
        leaves.iter().map(|&p| self.state.value(p as usize) as u128).sum()
    }

    fn check_slice(&self, tier: usize, leaves: &[u32], strictly_below: bool) -> Result<()> {
        if tier >= self.tier_count() {
            return Err(Error::OutOfRange { value: tier, len: self.tier_count() });
        }
        if leaves.is_empty() {
            return Err(Error::Empty);
        }
        for &p in leaves {
            if p as usize >= self.state.len() || self.state.raw_level(p) == UNASSIGNED {
                return Err(Error::InvalidAssignment("slice holds an unassigned weight"));
            }
            let t = self.tier_of(p);
            if t > tier || (strictly_below && t == tier) {
                return Err(Error::InvalidAssignment("slice holds a leaf above its tier"));
            }
        }
        Ok(())
    }

    /// Splits a slice into its leaves at `tier` and the leaves below it.
    pub fn cut(&self, tier: usize, leaves: &[u32]) -> Result<(Vec<u32>, Vec<u32>)> {
        if leaves.is_empty() {
            return Ok((Vec::new(), Vec::new()));
        }
        self.check_slice(tier, leaves, false)?;
        Ok(self.cut_unchecked(tier, leaves))
    }

    fn cut_unchecked(&self, tier: usize, leaves: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let level = self.level(tier);
        let mut top = Vec::with_capacity(leaves.len());
        let mut below = Vec::with_capacity(leaves.len());
        for &p in leaves {
            let l = self.state.raw_level(p);
            debug_assert!(l <= level);
            if l == level {
                top.push(p);
            } else {
                below.push(p);
            }
        }
        (top, below)
    }

    /// Number of nodes at `tier` whose leaves are `leaves`.
    pub fn node_count(&self, tier: usize, leaves: &[u32]) -> usize {
        let mut counts = vec![0usize; tier + 1];
        for &p in leaves {
            counts[self.tier_of(p)] += 1;
        }
        let mut nodes = 0usize;
        for i in 0..=tier {
            if i > 0 {
                let gap = self.level(i) - self.level(i - 1);
                debug_assert_eq!(nodes % (1usize << gap), 0, "slice splits a node");
                nodes >>= gap;
            }
            nodes += counts[i];
        }
        nodes
    }

    /// Highest tier holding one of `leaves`.
    fn highest_tier(&self, leaves: &[u32]) -> usize {
        leaves.iter().map(|&p| self.tier_of(p)).max().unwrap_or(0)
    }

    fn select(&self, list: Vec<u32>, t: usize) -> Selection<u32> {
        if self.state.is_sorted() {
            debug_assert!(list.windows(2).all(|w| w[0] < w[1]));
            select_sorted(&list, t)
        } else {
            let less = |a: &u32, b: &u32| {
                self.counter.tick();
                self.leaf_key(*a) < self.leaf_key(*b)
            };
            select_by(list, t, &less)
        }
    }

    fn median(&self, list: Vec<u32>) -> Option<Selection<u32>> {
        if list.is_empty() {
            return None;
        }
        let t = list.len().div_ceil(2) - 1;
        Some(self.select(list, t))
    }

    /// The splitting node of all nodes at `tier` within the slice: the node
    /// covering leaf position `⌊N/2⌋` when the nodes are listed by rank.
    pub fn find_splitting_all(&self, tier: usize, leaves: &[u32]) -> Result<SplitResult> {
        self.check_slice(tier, leaves, false)?;
        Ok(self.locate(tier, leaves.to_vec(), Goal::Half))
    }

    /// The splitting node of the internal nodes at `tier`, given the leaves
    /// strictly below it. `pos` is the rank among those internal nodes.
    pub fn find_splitting_internal(&self, tier: usize, leaves: &[u32]) -> Result<SplitResult> {
        self.check_slice(tier, leaves, true)?;
        if tier == 0 {
            return Err(Error::InvalidAssignment("no internal nodes at the lowest tier"));
        }
        let inner = self.split_internal(tier, leaves.to_vec());
        Ok(SplitResult { pos: inner.p, chi: inner.chi, lower: inner.lo, upper: inner.hi })
    }

    /// Leaves of the `t` smallest-rank nodes at `tier`, and the rest.
    pub fn find_t_smallest(&self, t: usize, tier: usize, leaves: &[u32]) -> Result<(Vec<u32>, Vec<u32>)> {
        self.check_slice(tier, leaves, false)?;
        let nodes = self.node_count(tier, leaves);
        if t == 0 || t > nodes {
            return Err(Error::OutOfRange { value: t, len: nodes });
        }
        Ok(self.t_smallest(t, tier, leaves.to_vec(), nodes))
    }

    /// The rest, and the leaves of the `t` largest-rank nodes at `tier`.
    pub fn find_t_largest(&self, t: usize, tier: usize, leaves: &[u32]) -> Result<(Vec<u32>, Vec<u32>)> {
        self.check_slice(tier, leaves, false)?;
        let nodes = self.node_count(tier, leaves);
        if t == 0 || t > nodes {
            return Err(Error::OutOfRange { value: t, len: nodes });
        }
        Ok(self.t_largest(t, tier, leaves.to_vec(), nodes))
    }

    pub(crate) fn t_smallest(&self, t: usize, tier: usize, leaves: Vec<u32>, nodes: usize) -> (Vec<u32>, Vec<u32>) {
        debug_assert!(t >= 1 && t <= nodes);
        if t == nodes {
            return (leaves, Vec::new());
        }
        let r = self.locate(tier, leaves, Goal::Rank { t, nodes });
        let mut small = r.lower;
        small.extend(r.chi);
        (small, r.upper)
    }

    pub(crate) fn t_largest(&self, t: usize, tier: usize, leaves: Vec<u32>, nodes: usize) -> (Vec<u32>, Vec<u32>) {
        debug_assert!(t >= 1 && t <= nodes);
        if t == nodes {
            return (Vec::new(), leaves);
        }
        let r = self.locate(tier, leaves, Goal::Rank { t: nodes - t, nodes });
        let mut rest = r.lower;
        rest.extend(r.chi);
        (rest, r.upper)
    }

    /// Leaves of the smallest and, when there is one, the second smallest
    /// node at `tier`, found in a single pass.
    pub(crate) fn two_smallest(&self, tier: usize, leaves: Vec<u32>, nodes: usize) -> (Vec<u32>, Option<Vec<u32>>) {
        match nodes {
            0 | 1 => (leaves, None),
            _ => {
                let r = self.locate(tier, leaves, Goal::Rank { t: 2, nodes });
                (r.lower, Some(r.chi))
            }
        }
    }

    /// Finds the internal node at `tier` containing the splitting node of
    /// the highest lower tier present in `below`.
    fn split_internal(&self, tier: usize, below: Vec<u32>) -> Inner {
        debug_assert!(!below.is_empty());
        let sub = self.highest_tier(&below);
        debug_assert!(sub < tier);
        let gap = self.level(tier) - self.level(sub);
        let lambda = 1usize << gap;
        let sub_nodes = self.node_count(sub, &below);
        let r = self.locate(sub, below, Goal::Half);
        let alpha = r.pos;
        let beta = (alpha - 1) % lambda;
        let after = lambda - beta - 1;
        let upper_nodes = sub_nodes - alpha;

        let (lo, left) = if beta != 0 {
            self.t_largest(beta, sub, r.lower, alpha - 1)
        } else {
            (r.lower, Vec::new())
        };
        let (right, hi) = if after != 0 {
            self.t_smallest(after, sub, r.upper, upper_nodes)
        } else {
            (Vec::new(), r.upper)
        };
        let mut chi = left;
        chi.extend(r.chi);
        chi.extend(right);
        let key = self.node_key(&chi);
        Inner { p: alpha.div_ceil(lambda), key, chi, lo, hi }
    }

    fn locate(&self, tier: usize, leaves: Vec<u32>, goal: Goal) -> SplitResult {
        let (mut s1, mut s2) = match goal {
            Goal::Half => {
                let n = leaves.len();
                (n / 2, n - n / 2 - 1)
            }
            Goal::Rank { t, nodes } => (t - 1, nodes - t),
        };
        let weighted = matches!(goal, Goal::Half);

        let (top, below) =
            if tier == 0 { (leaves, Vec::new()) } else { self.cut_unchecked(tier, &leaves) };
        if below.is_empty() {
            // Only leaves: the target is a plain order statistic.
            let sel = self.select(top, s1);
            return SplitResult {
                pos: s1 + 1,
                chi: vec![sel.element],
                lower: sel.smaller,
                upper: sel.larger,
            };
        }

        // Internal nodes still in play; only tracked for rank goals.
        let mut inner_nodes = if weighted { 0 } else { self.node_count(tier, &below) };
        let mut inner = Some(self.split_internal(tier, below));
        let mut leaf = self.median(top);

        let mut pos = 1usize;
        let mut lower: Vec<u32> = Vec::new();
        let mut upper = Prepend::default();

        // Measures of the three parts around the internal splitting node.
        let measure = |x: &Inner, inner_nodes: usize| -> (usize, usize, usize) {
            if weighted {
                (x.lo.len(), x.chi.len(), x.hi.len())
            } else {
                (x.p - 1, 1, inner_nodes - x.p)
            }
        };

        while leaf.is_some() && inner.is_some() {
            let m = leaf.take().unwrap();
            let x = inner.take().unwrap();
            let (mu_lo, mu_chi, mu_hi) = measure(&x, inner_nodes);
            self.counter.tick();
            if self.leaf_key(m.element) > x.key {
                if m.smaller.len() + mu_lo + mu_chi > s1 {
                    // M and everything above it rank after the target.
                    s2 -= 1 + m.larger.len();
                    upper.push_front(m.larger);
                    upper.push_front(vec![m.element]);
                    leaf = self.median(m.smaller);
                    inner = Some(x);
                } else {
                    s1 -= mu_lo + mu_chi;
                    pos += x.p;
                    lower.extend(x.lo);
                    lower.extend(x.chi);
                    if !weighted {
                        inner_nodes -= x.p;
                    }
                    inner = self.next_inner(tier, x.hi);
                    leaf = Some(m);
                }
            } else if m.larger.len() + mu_chi + mu_hi > s2 {
                s1 -= m.smaller.len() + 1;
                pos += m.smaller.len() + 1;
                lower.extend(m.smaller);
                lower.push(m.element);
                leaf = self.median(m.larger);
                inner = Some(x);
            } else {
                s2 -= mu_chi + mu_hi;
                upper.push_front(x.hi);
                upper.push_front(x.chi);
                if !weighted {
                    inner_nodes = x.p - 1;
                }
                inner = self.next_inner(tier, x.lo);
                leaf = Some(m);
            }
        }

        if let Some(mut x) = inner {
            // Only internal nodes remain.
            loop {
                let (mu_lo, mu_chi, mu_hi) = measure(&x, inner_nodes);
                debug_assert_eq!(mu_lo + mu_chi + mu_hi, s1 + s2 + 1);
                debug_assert!(mu_lo <= s1 || mu_hi <= s2);
                if mu_hi > s2 {
                    s1 -= mu_lo + mu_chi;
                    pos += x.p;
                    lower.extend(x.lo);
                    lower.extend(x.chi);
                    if !weighted {
                        inner_nodes -= x.p;
                    }
                    x = self.split_internal(tier, x.hi);
                } else if mu_lo > s1 {
                    s2 -= mu_chi + mu_hi;
                    upper.push_front(x.hi);
                    upper.push_front(x.chi);
                    if !weighted {
                        inner_nodes = x.p - 1;
                    }
                    x = self.split_internal(tier, x.lo);
                } else {
                    lower.extend(x.lo);
                    upper.push_front(x.hi);
                    pos += x.p - 1;
                    return SplitResult { pos, chi: x.chi, lower, upper: upper.finish() };
                }
            }
        }

        let mut m = leaf.expect("split target lies outside the slice");
        loop {
            debug_assert_eq!(m.smaller.len() + 1 + m.larger.len(), s1 + s2 + 1);
            if m.larger.len() > s2 {
                s1 -= m.smaller.len() + 1;
                pos += m.smaller.len() + 1;
                lower.extend(m.smaller);
                lower.push(m.element);
                m = self.median(m.larger).expect("non-empty by the size invariant");
            } else if m.smaller.len() > s1 {
                s2 -= 1 + m.larger.len();
                upper.push_front(m.larger);
                upper.push_front(vec![m.element]);
                m = self.median(m.smaller).expect("non-empty by the size invariant");
            } else {
                pos += m.smaller.len();
                lower.extend(m.smaller);
                upper.push_front(m.larger);
                return SplitResult { pos, chi: vec![m.element], lower, upper: upper.finish() };
            }
        }
    }

    fn next_inner(&self, tier: usize, below: Vec<u32>) -> Option<Inner> {
        if below.is_empty() {
            None
        } else {
            Some(self.split_internal(tier, below))
        }
    }
}
