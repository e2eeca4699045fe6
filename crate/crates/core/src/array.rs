//! Sensor arrays on the half-wavelength grid and their textual form.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Aperture cap applied by [`SensorArray::new`] and [`parse_and_normalize`].
pub const DEFAULT_MAX_APERTURE: u64 = 100_000;

/// Normalized sensor positions: strictly increasing, first element 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SensorArray {
    positions: Vec<u32>,
}

impl SensorArray {
    /// Validates and normalizes raw positions with the default aperture cap.
    ///
    /// Input order does not matter; the minimum is subtracted from every
    /// entry. Duplicates are rejected rather than merged.
    pub fn new(raw: &[i64]) -> Result<Self> {
        Self::with_max_aperture(raw, DEFAULT_MAX_APERTURE)
    }

    pub fn with_max_aperture(raw: &[i64], max_aperture: u64) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(&neg) = raw.iter().find(|&&p| p < 0) {
            return Err(Error::NegativePosition(neg));
        }
        let mut sorted = raw.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePositions(w[0]));
        }
        let min = sorted[0];
        let aperture = (sorted[sorted.len() - 1] - min) as u64;
        if aperture > max_aperture || aperture > u32::MAX as u64 {
            return Err(Error::ApertureTooLarge {
                aperture,
                cap: max_aperture,
            });
        }
        Ok(Self {
            positions: sorted.iter().map(|&p| (p - min) as u32).collect(),
        })
    }

    /// Builds an array from positions already known to be normalized.
    pub(crate) fn from_normalized(positions: Vec<u32>) -> Self {
        debug_assert!(positions.first() == Some(&0));
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        Self { positions }
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn n_sensors(&self) -> usize {
        self.positions.len()
    }

    /// Largest position, L.
    pub fn aperture(&self) -> u32 {
        *self.positions.last().expect("array is never empty")
    }

    pub fn contains(&self, p: u32) -> bool {
        self.positions.binary_search(&p).is_ok()
    }

    /// Interior sensors: every position except the first and last.
    pub fn interior(&self) -> &[u32] {
        match self.positions.len() {
            0..=2 => &[],
            n => &self.positions[1..n - 1],
        }
    }

    /// Mirror image `sort(L - a)`.
    pub fn flipped(&self) -> Self {
        let l = self.aperture();
        Self::from_normalized(self.positions.iter().rev().map(|&p| l - p).collect())
    }

    /// The array with the given sensors removed, renormalized so the first
    /// survivor sits at 0.
    pub fn without(&self, failed: &[u32]) -> Result<Self> {
        for &p in failed {
            if !self.contains(p) {
                return Err(Error::PositionNotInArray(p));
            }
        }
        let rest: Vec<u32> = self
            .positions
            .iter()
            .copied()
            .filter(|p| !failed.contains(p))
            .collect();
        if rest.is_empty() {
            return Err(Error::NoSurvivingSensors);
        }
        let min = rest[0];
        Ok(Self::from_normalized(
            rest.into_iter().map(|p| p - min).collect(),
        ))
    }

    pub(crate) fn require_sensors(&self, needed: usize) -> Result<()> {
        if self.n_sensors() < needed {
            Err(Error::TooFewSensors {
                needed,
                found: self.n_sensors(),
            })
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for SensorArray {
    /// Canonical bracketed form, e.g. `[0 1 5 6]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.positions.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("]")
    }
}

/// Parses the textual array form into raw integers.
///
/// Brackets are optional and entries may be separated by commas and/or
/// whitespace. Integral decimals such as `4.0` are accepted; `1.5` is a
/// [`Error::NonIntegerPosition`].
pub fn parse_positions(text: &str) -> Result<Vec<i64>> {
    let trimmed = text.trim();
    let inner = trimmed
        .strip_prefix('[')
        .map(|s| {
            s.strip_suffix(']')
                .ok_or_else(|| Error::MalformedInput(trimmed.to_string()))
        })
        .transpose()?
        .unwrap_or(trimmed);
    let mut out = Vec::new();
    for token in inner
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        out.push(parse_token(token)?);
    }
    if out.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(out)
}

fn parse_token(token: &str) -> Result<i64> {
    if let Ok(v) = token.parse::<i64>() {
        return Ok(v);
    }
    match token.parse::<f64>() {
        Ok(v) if v.is_finite() && libm::trunc(v) == v && libm::fabs(v) < 9.0e15 => Ok(v as i64),
        Ok(v) if v.is_finite() => Err(Error::NonIntegerPosition(String::from(token))),
        _ => Err(Error::MalformedInput(String::from(token))),
    }
}

/// Text to validated array in one step.
pub fn parse_and_normalize(text: &str) -> Result<SensorArray> {
    parse_and_normalize_with_cap(text, DEFAULT_MAX_APERTURE)
}

pub fn parse_and_normalize_with_cap(text: &str, max_aperture: u64) -> Result<SensorArray> {
    SensorArray::with_max_aperture(&parse_positions(text)?, max_aperture)
}
