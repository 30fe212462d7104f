//! Unit-suffixed quantity parsing for command-line values.
//!
//! Everything inside the library is SI. Text crossing the boundary
//! (`0.8um`, `65nm`, `200kHz`) is converted here.

use std::fmt;

use thiserror::Error;

/// Physical dimension of a quantity given on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Length,
    Frequency,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Length => f.write_str("length"),
            Dimension::Frequency => f.write_str("frequency"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum UnitError {
    #[error("`{0}` is not a number")]
    NotANumber(String),
    #[error("unknown {dimension} unit suffix `{suffix}` in `{input}`")]
    BadSuffix {
        input: String,
        suffix: String,
        dimension: Dimension,
    },
    #[error("`{0}` has no unit suffix")]
    MissingSuffix(String),
}

pub const MICRO: f64 = 1e-6;
pub const NANO: f64 = 1e-9;
pub const KILO: f64 = 1e3;

fn scale_for(dimension: Dimension, suffix: &str) -> Option<f64> {
    match (dimension, suffix) {
        (Dimension::Length, "m") => Some(1.0),
        (Dimension::Length, "mm") => Some(1e-3),
        (Dimension::Length, "um" | "µm") => Some(MICRO),
        (Dimension::Length, "nm") => Some(NANO),
        (Dimension::Frequency, "Hz") => Some(1.0),
        (Dimension::Frequency, "kHz") => Some(KILO),
        (Dimension::Frequency, "MHz") => Some(1e6),
        _ => None,
    }
}

/// Parses `<number><suffix>` into SI units.
///
/// When `default_suffix` is `Some`, a bare number is read in that unit;
/// otherwise a suffix is mandatory.
pub fn parse_quantity(
    input: &str,
    dimension: Dimension,
    default_suffix: Option<&str>,
) -> Result<f64, UnitError> {
    let text = input.trim();
    let split = text
        .find(|c: char| c.is_alphabetic() || c == 'µ')
        .unwrap_or(text.len());
    // exponent markers belong to the number, not the suffix
    let split = match text[split..].chars().next() {
        Some('e' | 'E')
            if text[split + 1..]
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_digit() || c == '-' || c == '+') =>
        {
            let rest = &text[split + 1..];
            let offset = rest
                .find(|c: char| c.is_alphabetic() || c == 'µ')
                .unwrap_or(rest.len());
            split + 1 + offset
        }
        _ => split,
    };
    let (number, suffix) = text.split_at(split);
    let value: f64 = number
        .trim()
        .parse()
        .map_err(|_| UnitError::NotANumber(input.to_string()))?;
    let suffix = suffix.trim();
    let suffix = if suffix.is_empty() {
        default_suffix.ok_or_else(|| UnitError::MissingSuffix(input.to_string()))?
    } else {
        suffix
    };
    let scale = scale_for(dimension, suffix).ok_or_else(|| UnitError::BadSuffix {
        input: input.to_string(),
        suffix: suffix.to_string(),
        dimension,
    })?;
    Ok(value * scale)
}
