//! Canonical prefix codes, bit packing, and the `PFX1` container.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::types::CodeLengthProfile;

/// Longest codeword a table can hold.
pub const MAX_CODE_LENGTH: u32 = 128;

/// Canonical code for a length profile: symbols sorted by (length, index)
/// receive consecutive codewords, shifting left whenever the length grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalTable {
    lengths: Vec<u32>,
    codes: Vec<u128>,
    /// Indexed by length: first codeword, number of codewords, and offset
    /// into `sorted`.
    first_code: Vec<u128>,
    count: Vec<usize>,
    offset: Vec<usize>,
    sorted: Vec<usize>,
}

impl CanonicalTable {
    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn length(&self, symbol: usize) -> u32 {
        self.lengths[symbol]
    }

    /// Codeword of `symbol`, right-aligned in the integer.
    pub fn code(&self, symbol: usize) -> u128 {
        self.codes[symbol]
    }

    pub fn first_code(&self, length: u32) -> Option<u128> {
        let l = length as usize;
        (l < self.count.len() && self.count[l] > 0).then(|| self.first_code[l])
    }

    fn max_length(&self) -> u32 {
        self.count.len() as u32 - 1
    }
}

pub fn canonical_codes(profile: &CodeLengthProfile) -> Result<CanonicalTable> {
    if profile.kraft().cmp_one() == Ordering::Greater {
        return Err(Error::KraftExceeded);
    }
    let max = profile.max_length();
    if max > MAX_CODE_LENGTH {
        return Err(Error::LengthTooLong { length: max, max: MAX_CODE_LENGTH });
    }
    let lengths = profile.lengths().to_vec();
    let mut sorted: Vec<usize> = (0..lengths.len()).collect();
    sorted.sort_by_key(|&i| (lengths[i], i));

    let slots = max as usize + 1;
    let mut count = vec![0usize; slots];
    for &l in &lengths {
        count[l as usize] += 1;
    }
    let mut first_code = vec![0u128; slots];
    let mut offset = vec![0usize; slots];
    let mut code = 0u128;
    let mut seen = 0usize;
    for l in 1..slots {
        code = (code + count[l - 1] as u128) << 1;
        first_code[l] = code;
        offset[l] = seen;
        seen += count[l];
    }
    let mut codes = vec![0u128; lengths.len()];
    for l in 1..slots {
        for (j, &s) in sorted[offset[l]..offset[l] + count[l]].iter().enumerate() {
            codes[s] = first_code[l] + j as u128;
        }
    }
    Ok(CanonicalTable { lengths, codes, first_code, count, offset, sorted })
}

struct BitWriter {
    bytes: Vec<u8>,
    bits: u64,
}

impl BitWriter {
    fn push(&mut self, code: u128, length: u32) {
        for k in (0..length).rev() {
            let bit = (code >> k) & 1;
            let pos = self.bits % 8;
            if pos == 0 {
                self.bytes.push(0);
            }
            if bit == 1 {
                *self.bytes.last_mut().expect("pushed above") |= 0x80 >> pos;
            }
            self.bits += 1;
        }
    }
}

/// Packs the codewords of `symbols` most significant bit first. The last
/// byte is zero-padded; the exact bit count is returned alongside.
pub fn encode(symbols: &[usize], table: &CanonicalTable) -> Result<(Vec<u8>, u64)> {
    let mut w = BitWriter { bytes: Vec::new(), bits: 0 };
    for &s in symbols {
        if s >= table.len() {
            return Err(Error::UnknownSymbol { symbol: s });
        }
        w.push(table.codes[s], table.lengths[s]);
    }
    Ok((w.bytes, w.bits))
}

/// Inverse of [`encode`].
pub fn decode(bytes: &[u8], bit_count: u64, table: &CanonicalTable) -> Result<Vec<usize>> {
    if (bytes.len() as u64) < bit_count.div_ceil(8) {
        return Err(Error::Truncated);
    }
    let bit = |i: u64| (bytes[(i / 8) as usize] >> (7 - i % 8)) & 1;
    let max = table.max_length();
    let mut out = Vec::new();
    let mut i = 0u64;
    while i < bit_count {
        let mut code = 0u128;
        let mut length = 0u32;
        loop {
            if i == bit_count {
                return Err(Error::Truncated);
            }
            code = (code << 1) | bit(i) as u128;
            i += 1;
            length += 1;
            let l = length as usize;
            if table.count[l] > 0 && code >= table.first_code[l] {
                let j = code - table.first_code[l];
                if j < table.count[l] as u128 {
                    out.push(table.sorted[table.offset[l] + j as usize]);
                    break;
                }
            }
            if length == max {
                return Err(Error::InvalidCode);
            }
        }
    }
    Ok(out)
}

pub const MAGIC: &[u8; 4] = b"PFX1";

/// Serializes a length profile and an encoded payload: magic, symbol
/// count, one 16-bit length per symbol, payload bit count, payload. All
/// integers little-endian.
pub fn write_container(lengths: &[u32], payload: &[u8], bit_count: u64) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(20 + 2 * lengths.len() + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(lengths.len() as u64).to_le_bytes());
    for &l in lengths {
        let l = u16::try_from(l).map_err(|_| Error::LengthTooLong { length: l, max: u16::MAX as u32 })?;
        out.extend_from_slice(&l.to_le_bytes());
    }
    out.extend_from_slice(&bit_count.to_le_bytes());
    out.extend_from_slice(payload);
    Ok(out)
}

/// A parsed container.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Container {
    pub lengths: Vec<u32>,
    pub bit_count: u64,
    pub payload: Vec<u8>,
}

pub fn read_container(bytes: &[u8]) -> Result<Container> {
    let take = |at: usize, n: usize| bytes.get(at..at + n).ok_or(Error::Malformed("unexpected end of header"));
    if take(0, 4)? != MAGIC {
        return Err(Error::Malformed("bad magic"));
    }
    let n = u64::from_le_bytes(take(4, 8)?.try_into().expect("eight bytes"));
    let n = usize::try_from(n).map_err(|_| Error::Malformed("symbol count too large"))?;
    let table_bytes = n.checked_mul(2).ok_or(Error::Malformed("symbol count too large"))?;
    let raw = take(12, table_bytes)?;
    let lengths: Vec<u32> = raw.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]]) as u32).collect();
    let at = 12 + table_bytes;
    let bit_count = u64::from_le_bytes(take(at, 8)?.try_into().expect("eight bytes"));
    let payload = bytes[at + 8..].to_vec();
    if payload.len() as u64 != bit_count.div_ceil(8) {
        return Err(Error::Malformed("payload size disagrees with bit count"));
    }
    Ok(Container { lengths, bit_count, payload })
}
