//! Checks on length profiles and level assignments.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::types::{CodeLengthProfile, KraftSum, LevelState, WeightList};

pub fn kraft_sum(lengths: &CodeLengthProfile) -> KraftSum {
    lengths.kraft().clone()
}

/// Exact `Σ w_i · l_i`.
pub fn code_cost(weights: &WeightList, lengths: &CodeLengthProfile) -> Result<u128> {
    if weights.len() != lengths.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), found: lengths.len() });
    }
    weights.values().zip(lengths.lengths()).try_fold(0u128, |acc, (w, &l)| {
        (w as u128).checked_mul(l as u128).and_then(|c| acc.checked_add(c)).ok_or(Error::Overflow)
    })
}

pub fn distinct_length_count(lengths: &CodeLengthProfile) -> usize {
    lengths.lengths().iter().collect::<BTreeSet<_>>().len()
}

/// Heavier weights never get longer codewords.
pub fn is_monotone(weights: &WeightList, lengths: &CodeLengthProfile) -> Result<bool> {
    if weights.len() != lengths.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), found: lengths.len() });
    }
    let mut pairs: Vec<(u64, u32)> = weights.values().zip(lengths.lengths().iter().copied()).collect();
    // Equal weights may carry any lengths; order them so only strict
    // weight increases are tested.
    pairs.sort_unstable_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    Ok(pairs.windows(2).all(|w| w[0].0 == w[1].0 || w[0].1 >= w[1].1))
}

/// Leaf levels for a length profile: the root sits at the longest length.
pub fn levels_from_lengths(lengths: &CodeLengthProfile) -> Vec<u32> {
    let root = lengths.max_length();
    lengths.lengths().iter().map(|&l| root - l).collect()
}

/// First place where a level holds a node smaller than one further down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub level: u32,
    /// Smallest node value at `level`.
    pub value: u128,
    /// Largest node value at any lower level.
    pub lower_max: u128,
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "level {} holds a node of value {} below the lower-level maximum {}",
            self.level, self.value, self.lower_max
        )
    }
}

/// Outcome of [`verify_exclusion`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub root_level: u32,
    pub violation: Option<Violation>,
}

impl Exclusion {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// Rebuilds the tree implied by pairing the nodes of every level in rank
/// order and checks that no level holds a value smaller than any value
/// below it.
///
/// Errors when the levels cannot form a full binary tree at all.
pub fn verify_exclusion(weights: &WeightList, assignment: &LevelState) -> Result<Exclusion> {
    if weights.len() != assignment.len() {
        return Err(Error::LengthMismatch { expected: weights.len(), found: assignment.len() });
    }
    if weights.is_empty() {
        return Err(Error::Empty);
    }
    if assignment.assigned_count() != weights.len() {
        return Err(Error::InvalidAssignment("some weights have no level"));
    }
    let levels = assignment.levels();
    let mut pending = levels.iter().peekable();
    let (&first, _) = *pending.peek().expect("non-empty");
    let mut level = first;
    let mut nodes: Vec<(u128, usize)> = Vec::new();
    let mut lower_max: Option<u128> = None;
    let mut violation = None;
    loop {
        if let Some((&l, leaves)) = pending.peek() {
            if l == level {
                nodes.extend(leaves.iter().map(|it| (it.value as u128, it.index)));
                pending.next();
            }
        }
        nodes.sort_unstable();
        let min = nodes[0].0;
        let max = nodes[nodes.len() - 1].0;
        if let Some(m) = lower_max {
            if violation.is_none() && min < m {
                violation = Some(Violation { level, value: min, lower_max: m });
            }
        }
        lower_max = Some(lower_max.map_or(max, |m| m.max(max)));
        if nodes.len() == 1 {
            if pending.peek().is_some() {
                return Err(Error::InvalidAssignment("leaves above the root"));
            }
            if level == first && weights.len() == 1 {
                // A lone leaf still sits one level below its root.
                return Ok(Exclusion { root_level: level + 1, violation });
            }
            return Ok(Exclusion { root_level: level, violation });
        }
        if nodes.len() % 2 == 1 {
            return Err(Error::InvalidAssignment("odd node count below the root"));
        }
        nodes = nodes.chunks_exact(2).map(|p| (p[0].0 + p[1].0, p[0].1.min(p[1].1))).collect();
        level = level.checked_add(1).ok_or(Error::Overflow)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn example() -> WeightList {
        let mut v = vec![2u64; 10];
        v.extend([3; 10]);
        v.extend([5; 5]);
        v.extend([9; 5]);
        WeightList::new(&v).unwrap()
    }

    // Final levels of the worked example: the 2s at 0; the 3s and three 5s
    // at 1; two 5s and the 9s at 2.
    fn example_levels() -> Vec<u32> {
        let mut l = vec![0u32; 10];
        l.extend([1; 10]);
        l.extend([1, 1, 1, 2, 2]);
        l.extend([2; 5]);
        l
    }

    #[test]
    fn kraft_examples() {
        assert!(kraft_sum(&CodeLengthProfile::new(vec![1, 1]).unwrap()).is_one());
        let l: Vec<u32> = example_levels().iter().map(|&x| 6 - x).collect();
        assert!(kraft_sum(&CodeLengthProfile::new(l).unwrap()).is_one());
        let s = kraft_sum(&CodeLengthProfile::new(vec![1, 2, 3]).unwrap());
        assert_eq!(alloc::format!("{s}"), "7/8");
    }

    #[test]
    fn cost_examples() {
        let l: Vec<u32> = example_levels().iter().map(|&x| 6 - x).collect();
        let p = CodeLengthProfile::new(l).unwrap();
        assert_eq!(code_cost(&example(), &p).unwrap(), 565);
        assert_eq!(distinct_length_count(&p), 3);
        let w = WeightList::new(&[1, 2, 4, 8, 16]).unwrap();
        let p = CodeLengthProfile::new(vec![4, 4, 3, 2, 1]).unwrap();
        assert_eq!(code_cost(&w, &p).unwrap(), 56);
        assert_eq!(distinct_length_count(&p), 4);
        assert!(is_monotone(&w, &p).unwrap());
        let bad = CodeLengthProfile::new(vec![1, 4, 3, 2, 4]).unwrap();
        assert!(!is_monotone(&w, &bad).unwrap());
    }

    #[test]
    fn exclusion_on_worked_example() {
        let w = example();
        let state = LevelState::from_levels(&w, &example_levels()).unwrap();
        let r = verify_exclusion(&w, &state).unwrap();
        assert!(r.holds());
        assert_eq!(r.root_level, 6);

        // A nine dropped to level 0 alone leaves an odd count there.
        let mut levels = example_levels();
        levels[29] = 0;
        let state = LevelState::from_levels(&w, &levels).unwrap();
        assert!(matches!(verify_exclusion(&w, &state), Err(Error::InvalidAssignment(_))));
        // Swapping it with a 2 keeps the shape; the values now clash.
        levels[0] = 2;
        let state = LevelState::from_levels(&w, &levels).unwrap();
        let r = verify_exclusion(&w, &state).unwrap();
        assert!(!r.holds());
        assert_eq!(r.violation.unwrap().level, 1);
    }

    #[test]
    fn exclusion_small_cases() {
        let w = WeightList::new(&[7, 7]).unwrap();
        let s = LevelState::from_levels(&w, &[0, 0]).unwrap();
        assert!(verify_exclusion(&w, &s).unwrap().holds());
        let w = WeightList::new(&[1, 1, 1]).unwrap();
        let s = LevelState::from_levels(&w, &[0, 0, 0]).unwrap();
        assert!(verify_exclusion(&w, &s).is_err());
        let s = LevelState::from_levels(&w, &[0, 0, 5]).unwrap();
        assert!(verify_exclusion(&w, &s).is_err());
    }
}
