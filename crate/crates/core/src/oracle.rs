//! Reference constructors, independent of the level-based algorithm.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};
use crate::types::{CodeLengthProfile, WeightList};

/// Largest input accepted by [`brute_force_optimal`].
pub const BRUTE_FORCE_MAX: usize = 12;

/// Depth of every leaf given the parent of each node. Leaves are nodes
/// `0..n`; the root is the last node.
fn depths(parent: &[usize], n: usize) -> Vec<u32> {
    let root = parent.len() - 1;
    let mut depth = vec![0u32; parent.len()];
    for v in (0..root).rev() {
        depth[v] = depth[parent[v]] + 1;
    }
    depth.truncate(n);
    depth
}

/// Classic greedy merge with a binary heap. Ties go to the node created
/// first, leaves being created in input order.
pub fn huffman_lengths(weights: &WeightList) -> Result<CodeLengthProfile> {
    let n = weights.len();
    match n {
        0 => return Err(Error::Empty),
        1 => return CodeLengthProfile::new(vec![1]),
        _ => {}
    }
    let mut heap: BinaryHeap<Reverse<(u128, usize)>> =
        weights.values().enumerate().map(|(i, v)| Reverse((v as u128, i))).collect();
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((a, ia)) = heap.pop().expect("two nodes");
        let Reverse((b, ib)) = heap.pop().expect("two nodes");
        parent[ia] = next;
        parent[ib] = next;
        heap.push(Reverse((a.checked_add(b).ok_or(Error::Overflow)?, next)));
        next += 1;
    }
    CodeLengthProfile::new(depths(&parent, n))
}

/// Linear-time merge for non-decreasing input: leaves are consumed in
/// order from one queue and merged nodes appended to a second, which is
/// then also non-decreasing.
pub fn huffman_sorted_lengths(weights: &WeightList) -> Result<CodeLengthProfile> {
    if !weights.is_sorted() {
        return Err(Error::NotSorted { index: 0 });
    }
    let n = weights.len();
    match n {
        0 => return Err(Error::Empty),
        1 => return CodeLengthProfile::new(vec![1]),
        _ => {}
    }
    let leaves: Vec<u128> = weights.values().map(u128::from).collect();
    let mut merged: Vec<u128> = Vec::with_capacity(n - 1);
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let (mut li, mut mi) = (0usize, 0usize);
    let take = |merged: &Vec<u128>, li: &mut usize, mi: &mut usize| -> (u128, usize) {
        let leaf_first = *li < n && (*mi >= merged.len() || leaves[*li] <= merged[*mi]);
        if leaf_first {
            *li += 1;
            (leaves[*li - 1], *li - 1)
        } else {
            *mi += 1;
            (merged[*mi - 1], n + *mi - 1)
        }
    };
    for k in 0..n - 1 {
        let (a, ia) = take(&merged, &mut li, &mut mi);
        let (b, ib) = take(&merged, &mut li, &mut mi);
        parent[ia] = n + k;
        parent[ib] = n + k;
        merged.push(a.checked_add(b).ok_or(Error::Overflow)?);
    }
    CodeLengthProfile::new(depths(&parent, n))
}

/// Minimum cost over every full-binary-tree length multiset, with the
/// longest lengths given to the smallest weights.
pub fn brute_force_optimal(weights: &WeightList) -> Result<(u128, CodeLengthProfile)> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if n > BRUTE_FORCE_MAX {
        return Err(Error::TooLarge { n, max: BRUTE_FORCE_MAX });
    }
    if n == 1 {
        return Ok((weights.value(0) as u128, CodeLengthProfile::new(vec![1])?));
    }
    // Input positions by decreasing weight; they take lengths shortest first.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights.value(b).cmp(&weights.value(a)).then(a.cmp(&b)));

    let mut best: Option<(u128, Vec<u32>)> = None;
    let mut shape: Vec<u32> = Vec::with_capacity(n);
    enumerate(1, 1, n, &mut shape, &mut |lengths| {
        let cost: u128 =
            order.iter().zip(lengths).map(|(&i, &l)| weights.value(i) as u128 * l as u128).sum();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            let mut out = vec![0u32; n];
            for (&i, &l) in order.iter().zip(lengths) {
                out[i] = l;
            }
            best = Some((cost, out));
        }
    });
    let (cost, lengths) = best.expect("a full tree exists for n >= 2");
    Ok((cost, CodeLengthProfile::new(lengths)?))
}

/// Chooses how many of the `slots` nodes at `depth` are leaves; the rest
/// each open two slots one level down. `shape` collects lengths in
/// non-decreasing order.
fn enumerate(depth: u32, slots: usize, left: usize, shape: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
    let slots = slots * 2;
    // Every open slot needs at least one leaf below it.
    if slots > left {
        return;
    }
    for leaves in (0..=slots).rev() {
        let internal = slots - leaves;
        let rest = left - leaves;
        if internal == 0 && rest != 0 {
            continue;
        }
        let mark = shape.len();
        shape.extend(std::iter::repeat_n(depth, leaves));
        if rest == 0 {
            if internal == 0 {
                visit(shape);
            }
        } else {
            enumerate(depth + 1, internal, rest, shape, visit);
        }
        shape.truncate(mark);
    }
}
