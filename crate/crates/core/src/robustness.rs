//! Double-difference verification and single-sensor failure analysis.
//!
//! An array is a double difference baseline (DDB) when every lag magnitude in
//! `[1, L-1]` has weight at least two and the extreme lag `L` has weight one.
//! Such an array nominally tolerates any single sensor loss. The failure
//! sweep checks that claim directly: each interior sensor is removed in turn
//! and the faulty coarray is inspected for holes. Interior sensors whose loss
//! opens a hole are hidden essential sensors (HES).

use alloc::vec::Vec;
use core::fmt;

use crate::array::SensorArray;
use crate::coarray::weight_table;
use crate::error::{Error, Result};

/// Whether `w(i) >= 2` for `i` in `[1, L-1]` and `w(L) == 1`.
pub fn check_ddb(arr: &SensorArray) -> bool {
    let wt = weight_table(arr);
    let half = wt.non_negative();
    let l = half.len() - 1;
    l >= 1 && half[1..l].iter().all(|&w| w >= 2) && half[l] == 1
}

/// Result of failing one interior sensor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FailureOutcome {
    pub removed_position: u32,
    /// Lags in `[1, L]` of the healthy aperture with zero weight after the failure.
    pub residual_holes: Vec<u32>,
}

impl FailureOutcome {
    pub fn breaks_continuity(&self) -> bool {
        !self.residual_holes.is_empty()
    }
}

/// Fails every interior sensor one at a time, in ascending position order.
///
/// The edge sensors survive every failure so the aperture `L` is unchanged;
/// holes are reported against the healthy lag range `[1, L]`. All holes of
/// each faulty array are listed, including any the healthy array already had.
pub fn single_failure_sweep(arr: &SensorArray) -> Result<Vec<FailureOutcome>> {
    arr.require_sensors(3)?;
    Ok(sweep(arr))
}

// Updates one weight table in place per removal: losing sensor p only lowers
// w(|p - q|) for the surviving q, so a removal costs O(N) instead of O(N^2).
fn sweep(arr: &SensorArray) -> Vec<FailureOutcome> {
    let positions = arr.positions();
    let wt = weight_table(arr);
    let mut half: Vec<u32> = wt.non_negative().to_vec();
    let base_holes: Vec<u32> = (1..half.len() as u32)
        .filter(|&m| half[m as usize] == 0)
        .collect();

    let mut outcomes = Vec::with_capacity(arr.interior().len());
    let mut new_zeros = Vec::new();
    for &p in arr.interior() {
        new_zeros.clear();
        for &q in positions {
            if q == p {
                continue;
            }
            let lag = p.abs_diff(q) as usize;
            half[lag] -= 1;
            if half[lag] == 0 {
                new_zeros.push(lag as u32);
            }
        }
        for &q in positions {
            if q != p {
                half[p.abs_diff(q) as usize] += 1;
            }
        }
        let mut residual_holes = base_holes.clone();
        residual_holes.extend_from_slice(&new_zeros);
        residual_holes.sort_unstable();
        residual_holes.dedup();
        outcomes.push(FailureOutcome {
            removed_position: p,
            residual_holes,
        });
    }
    outcomes
}

/// The three robustness classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// Fails the double-difference condition; no failure analysis is run.
    NotDdb,
    /// Satisfies the double-difference condition but has hidden essential sensors.
    DdbWithHes,
    /// Every single interior failure leaves the coarray hole-free.
    True2fra,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NotDdb => "NOT_DDB",
            Verdict::DdbWithHes => "DDB_WITH_HES",
            Verdict::True2fra => "TRUE_2FRA",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Verdict::NotDdb => {
                "Array does not have coarray redundancy and is not eligible for failure analysis."
            }
            Verdict::DdbWithHes => {
                "Array is a double difference baseline with hidden dependencies: \
                 it contains hidden essential sensors and is not a true two-fold redundant array."
            }
            Verdict::True2fra => "Array has true two-fold redundancy.",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Essential-sensor count over total sensor count, kept unreduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fragility {
    pub essential: usize,
    pub sensors: usize,
}

impl Fragility {
    pub fn as_f64(self) -> f64 {
        self.essential as f64 / self.sensors as f64
    }

    /// Exact rational comparison.
    pub fn ratio_eq(self, num: usize, den: usize) -> bool {
        self.essential * den == num * self.sensors
    }
}

impl fmt::Display for Fragility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.essential, self.sensors)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RobustnessReport {
    pub verdict: Verdict,
    pub ddb_satisfied: bool,
    /// One outcome per interior sensor; empty for [`Verdict::NotDdb`].
    pub failure_outcomes: Vec<FailureOutcome>,
    pub hes_positions: Vec<u32>,
    /// `{0, L}` plus the hidden essential sensors. For [`Verdict::NotDdb`]
    /// no sweep runs, so this holds only the edges.
    pub essential_positions: Vec<u32>,
    pub fragility: Fragility,
}

/// Double-difference check followed, when it passes, by the failure sweep.
pub fn classify(arr: &SensorArray) -> Result<RobustnessReport> {
    arr.require_sensors(2)?;
    let ddb = check_ddb(arr);
    let failure_outcomes = if ddb { sweep(arr) } else { Vec::new() };
    let hes_positions: Vec<u32> = failure_outcomes
        .iter()
        .filter(|o| o.breaks_continuity())
        .map(|o| o.removed_position)
        .collect();

    let mut essential_positions = Vec::with_capacity(hes_positions.len() + 2);
    essential_positions.push(0);
    essential_positions.extend_from_slice(&hes_positions);
    essential_positions.push(arr.aperture());

    let verdict = match (ddb, hes_positions.is_empty()) {
        (false, _) => Verdict::NotDdb,
        (true, false) => Verdict::DdbWithHes,
        (true, true) => Verdict::True2fra,
    };
    Ok(RobustnessReport {
        verdict,
        ddb_satisfied: ddb,
        failure_outcomes,
        fragility: Fragility {
            essential: essential_positions.len(),
            sensors: arr.n_sensors(),
        },
        hes_positions,
        essential_positions,
    })
}

/// Whether losing the sensor at `p` changes the coarray span or opens a new
/// hole inside the healthy `[-L, L]`.
///
/// Edge sensors always change the span.
pub fn is_essential(arr: &SensorArray, p: u32) -> Result<bool> {
    if !arr.contains(p) {
        return Err(Error::PositionNotInArray(p));
    }
    if p == 0 || p == arr.aperture() {
        return Ok(true);
    }
    let healthy = weight_table(arr);
    let faulty = weight_table(&arr.without(&[p])?);
    // Interior removal keeps both edges, so the renormalized array is unshifted.
    Ok((1..=arr.aperture() as i64).any(|m| healthy.get(m) > 0 && faulty.get(m) == 0))
}
