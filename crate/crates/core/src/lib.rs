//! Optimal prefix code lengths in time that depends on the number of
//! distinct codeword lengths rather than on the whole Huffman tree.
//!
//! The crate is `no_std` with `alloc` when the default `std` feature is off.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod codec;
pub mod construct;
pub mod error;
pub mod oracle;
pub mod select;
pub mod split;
pub mod types;
pub mod verify;

pub use codec::{canonical_codes, decode, encode, CanonicalTable};
pub use construct::{construct, construct_lengths, Algorithm, Construction, ConstructionMode, PendingPool};
pub use error::{Error, Result};
pub use oracle::{brute_force_optimal, huffman_lengths, huffman_sorted_lengths};
pub use select::Comparisons;
pub use split::{SplitEngine, SplitResult};
pub use types::{
    CodeLengthProfile, ConstructionStats, KraftSum, LevelState, TraceStep, WeightItem, WeightList,
};
pub use verify::{code_cost, distinct_length_count, is_monotone, kraft_sum, verify_exclusion};
