//! Builds every node of the tree implied by a `LevelState`, one level at a
//! time, and answers split queries by scanning the explicit node lists.

#![allow(dead_code)]

use std::collections::BTreeSet;

use mrcode::LevelState;

#[derive(Debug, Clone)]
pub struct Node {
    pub value: u128,
    pub min_index: u32,
    pub leaves: Vec<u32>,
    pub is_leaf: bool,
}

impl Node {
    fn key(&self) -> (u128, u32) {
        (self.value, self.min_index)
    }
}

/// Rank-sorted nodes at every tier of the state.
pub struct Materialized {
    pub tiers: Vec<u32>,
    pub nodes: Vec<Vec<Node>>,
}

pub fn materialize(state: &LevelState) -> Materialized {
    let tiers = state.tiers().to_vec();
    let top = *tiers.last().expect("at least one tier");
    let mut per_tier = Vec::new();
    let mut current: Vec<Node> = Vec::new();
    for level in tiers[0]..=top {
        for i in 0..state.len() {
            if state.level_of(i) == Some(level) {
                current.push(Node {
                    value: state.value(i) as u128,
                    min_index: i as u32,
                    leaves: vec![i as u32],
                    is_leaf: true,
                });
            }
        }
        current.sort_by_key(Node::key);
        if tiers.contains(&level) {
            per_tier.push(current.clone());
        }
        if level == top {
            break;
        }
        assert!(current.len().is_multiple_of(2), "odd node count at level {level}");
        current = current
            .chunks(2)
            .map(|p| {
                let mut leaves = p[0].leaves.clone();
                leaves.extend(&p[1].leaves);
                Node {
                    value: p[0].value + p[1].value,
                    min_index: p[0].min_index.min(p[1].min_index),
                    leaves,
                    is_leaf: false,
                }
            })
            .collect();
    }
    Materialized { tiers, nodes: per_tier }
}

/// A split answer with every leaf list sorted, for set comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub pos: usize,
    pub chi: Vec<u32>,
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v
}

impl Answer {
    pub fn from_lists(pos: usize, chi: Vec<u32>, lower: Vec<u32>, upper: Vec<u32>) -> Self {
        Answer { pos, chi: sorted(chi), lower: sorted(lower), upper: sorted(upper) }
    }
}

impl Materialized {
    /// Nodes at `tier` made only of leaves in `slice`; they must cover it.
    pub fn nodes_of(&self, tier: usize, slice: &[u32], internal_only: bool) -> Vec<&Node> {
        let set: BTreeSet<u32> = slice.iter().copied().collect();
        let picked: Vec<&Node> = self.nodes[tier]
            .iter()
            .filter(|n| !(internal_only && n.is_leaf))
            .filter(|n| n.leaves.iter().all(|p| set.contains(p)))
            .collect();
        let covered: usize = picked.iter().map(|n| n.leaves.len()).sum();
        assert_eq!(covered, set.len(), "slice is not a union of nodes at tier {tier}");
        picked
    }

    fn answer(nodes: &[&Node], r: usize) -> Answer {
        let flat = |ns: &[&Node]| ns.iter().flat_map(|n| n.leaves.iter().copied()).collect::<Vec<_>>();
        Answer::from_lists(r + 1, nodes[r].leaves.clone(), flat(&nodes[..r]), flat(&nodes[r + 1..]))
    }

    /// The node covering leaf position `⌊N/2⌋` (0-based) in rank order.
    fn weighted(nodes: &[&Node]) -> Answer {
        let total: usize = nodes.iter().map(|n| n.leaves.len()).sum();
        let target = total / 2;
        let mut before = 0;
        for (r, n) in nodes.iter().enumerate() {
            if before + n.leaves.len() > target {
                return Self::answer(nodes, r);
            }
            before += n.leaves.len();
        }
        unreachable!("target inside the slice")
    }

    pub fn splitting_all(&self, tier: usize, slice: &[u32]) -> Answer {
        Self::weighted(&self.nodes_of(tier, slice, false))
    }

    pub fn splitting_internal(&self, tier: usize, below: &[u32]) -> Answer {
        Self::weighted(&self.nodes_of(tier, below, true))
    }

    /// Rank-`t` node (1-based) among the slice's nodes.
    pub fn rank(&self, tier: usize, slice: &[u32], t: usize) -> Answer {
        Self::answer(&self.nodes_of(tier, slice, false), t - 1)
    }

    /// Leaves of nodes ranked `lo..hi` (0-based, half-open) at `tier`.
    pub fn range(&self, tier: usize, lo: usize, hi: usize) -> Vec<u32> {
        self.nodes[tier][lo..hi].iter().flat_map(|n| n.leaves.iter().copied()).collect()
    }

    /// Like [`Self::range`] but over the internal nodes only.
    pub fn internal_range(&self, tier: usize, lo: usize, hi: usize) -> Vec<u32> {
        self.nodes[tier]
            .iter()
            .filter(|n| !n.is_leaf)
            .skip(lo)
            .take(hi - lo)
            .flat_map(|n| n.leaves.iter().copied())
            .collect()
    }

    pub fn internal_count(&self, tier: usize) -> usize {
        self.nodes[tier].iter().filter(|n| !n.is_leaf).count()
    }
}

use mrcode::{Comparisons, SplitEngine, WeightList};
use rand::seq::SliceRandom;
use rand::Rng;

/// A random valid state with at most `max_leaves` leaves: 1 to 4 tiers,
/// gaps of 1 to 3 levels, node counts that fill whole internal nodes, and
/// values drawn from a small or large range so ties are common or rare.
pub fn random_state<R: Rng>(rng: &mut R, sorted: bool, max_leaves: usize) -> (WeightList, LevelState) {
    loop {
        let tiers = rng.gen_range(1..=4usize);
        let mut levels = vec![rng.gen_range(0..=2u32)];
        for _ in 1..tiers {
            let last = *levels.last().unwrap();
            levels.push(last + rng.gen_range(1..=3));
        }
        let mut counts = Vec::new();
        let mut nodes = 0usize;
        for i in 0..tiers {
            if i > 0 {
                nodes >>= levels[i] - levels[i - 1];
            }
            let leaves = if i + 1 < tiers {
                let lambda = 1usize << (levels[i + 1] - levels[i]);
                let mut c = (lambda - nodes % lambda) % lambda + lambda * rng.gen_range(0..=2);
                if c == 0 {
                    c = lambda;
                }
                c
            } else if nodes == 0 {
                rng.gen_range(1..=8)
            } else {
                rng.gen_range(0..=6)
            };
            counts.push(leaves);
            nodes += leaves;
        }
        let n: usize = counts.iter().sum();
        if n > max_leaves {
            continue;
        }
        let mut level_of: Vec<u32> =
            counts.iter().zip(&levels).flat_map(|(&c, &l)| std::iter::repeat_n(l, c)).collect();
        level_of.shuffle(rng);
        let hi = *[4u64, 20, 1_000_000].choose(rng).unwrap();
        let mut values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=hi)).collect();
        let weights = if sorted {
            values.sort_unstable();
            WeightList::sorted(&values).unwrap()
        } else {
            WeightList::new(&values).unwrap()
        };
        let state = LevelState::from_levels(&weights, &level_of).unwrap().with_tier(*levels.last().unwrap());
        return (weights, state);
    }
}

/// In sorted mode every returned list must keep each level's leaves in
/// increasing index order.
fn per_level_increasing(state: &LevelState, list: &[u32]) -> bool {
    let mut last: std::collections::BTreeMap<u32, u32> = Default::default();
    list.iter().all(|&p| {
        let l = state.level_of(p as usize).unwrap();
        let ok = last.get(&l).is_none_or(|&q| q < p);
        last.insert(l, p);
        ok
    })
}

fn prepare<R: Rng>(rng: &mut R, state: &LevelState, mut slice: Vec<u32>) -> Vec<u32> {
    if state.is_sorted() {
        slice.sort_unstable();
    } else {
        slice.shuffle(rng);
    }
    slice
}

/// Runs every split query on random slices of `state` and compares with
/// the materialized tree. Returns the number of queries checked.
pub fn check_state<R: Rng>(rng: &mut R, state: &LevelState) -> usize {
    let m = materialize(state);
    let counter = Comparisons::new();
    let engine = SplitEngine::new(state, &counter).expect("valid state");
    let sorted = state.is_sorted();
    let mut checked = 0;
    for tier in 0..m.tiers.len() {
        let total = m.nodes[tier].len();
        if total == 0 {
            continue;
        }
        for _ in 0..3 {
            let lo = rng.gen_range(0..total);
            let hi = rng.gen_range(lo + 1..=total);
            let slice = prepare(rng, state, m.range(tier, lo, hi));

            let r = engine.find_splitting_all(tier, &slice).unwrap();
            if sorted {
                assert!(per_level_increasing(state, &r.lower) && per_level_increasing(state, &r.upper));
            }
            let got = Answer::from_lists(r.pos, r.chi, r.lower, r.upper);
            assert_eq!(got, m.splitting_all(tier, &slice), "splitting-all, tier {tier}, slice {slice:?}");

            let nodes = hi - lo;
            let t = rng.gen_range(1..=nodes);
            let (small, rest) = engine.find_t_smallest(t, tier, &slice).unwrap();
            let want = m.rank(tier, &slice, t);
            let mut want_small = want.lower.clone();
            want_small.extend(&want.chi);
            want_small.sort_unstable();
            assert_eq!(Answer::from_lists(0, vec![], small, rest), Answer::from_lists(0, vec![], want_small, want.upper));

            let (rest, large) = engine.find_t_largest(t, tier, &slice).unwrap();
            let want = m.rank(tier, &slice, nodes - t + 1);
            let mut want_large = want.upper.clone();
            want_large.extend(&want.chi);
            assert_eq!(
                Answer::from_lists(0, vec![], rest, large),
                Answer::from_lists(0, vec![], want.lower, want_large)
            );
            checked += 3;

            let internal = m.internal_count(tier);
            if tier > 0 && internal > 0 {
                let lo = rng.gen_range(0..internal);
                let hi = rng.gen_range(lo + 1..=internal);
                let below = prepare(rng, state, m.internal_range(tier, lo, hi));
                let r = engine.find_splitting_internal(tier, &below).unwrap();
                let got = Answer::from_lists(r.pos, r.chi, r.lower, r.upper);
                assert_eq!(got, m.splitting_internal(tier, &below), "splitting-internal, tier {tier}");
                checked += 1;
            }
        }
    }
    checked
}
