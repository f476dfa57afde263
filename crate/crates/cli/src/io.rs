//! Line-oriented text formats: weights, lengths and symbol streams.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: expected a positive integer, found `{text}`")]
    Invalid { line: usize, text: String },
    #[error("line {line}: value must be at least 1")]
    Zero { line: usize },
    #[error("line {line}: symbol {symbol} is outside 0..{n}")]
    Symbol { line: usize, symbol: usize, n: usize },
    #[error("the file ends without a newline after its last entry")]
    NotCanonical,
}

/// One unsigned integer per line. A trailing newline is optional.
fn numbers<T: std::str::FromStr>(text: &str) -> Result<Vec<(usize, T)>, ParseError> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| {
            let t = raw.trim();
            t.parse::<T>().map(|v| (i + 1, v)).map_err(|_| ParseError::Invalid { line: i + 1, text: t.to_string() })
        })
        .collect()
}

pub fn parse_weights(text: &str) -> Result<Vec<u64>, ParseError> {
    numbers::<u64>(text)?
        .into_iter()
        .map(|(line, v)| if v == 0 { Err(ParseError::Zero { line }) } else { Ok(v) })
        .collect()
}

pub fn parse_lengths(text: &str) -> Result<Vec<u32>, ParseError> {
    numbers::<u32>(text)?
        .into_iter()
        .map(|(line, v)| if v == 0 { Err(ParseError::Zero { line }) } else { Ok(v) })
        .collect()
}

/// Symbol indices, each terminated by a newline, so that writing them
/// back reproduces the input byte for byte.
pub fn parse_symbols(text: &str, n: usize) -> Result<Vec<usize>, ParseError> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(ParseError::NotCanonical);
    }
    let symbols = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let invalid = || ParseError::Invalid { line: i + 1, text: raw.to_string() };
            // Reject anything whose canonical rendering differs.
            let s: usize = raw.parse().map_err(|_| invalid())?;
            if s.to_string() != raw {
                return Err(invalid());
            }
            if s >= n {
                return Err(ParseError::Symbol { line: i + 1, symbol: s, n });
            }
            Ok(s)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(symbols)
}

pub fn render_lines<T: std::fmt::Display>(values: impl IntoIterator<Item = T>) -> String {
    let mut out = String::new();
    for v in values {
        writeln!(out, "{v}").expect("writing to a String");
    }
    out
}
