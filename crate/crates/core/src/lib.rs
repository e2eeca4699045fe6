#![no_std]

//! Difference-coarray and single-sensor-failure analysis of sparse linear
//! arrays.
//!
//! - [`array`]: validated sensor positions on the half-wavelength grid.
//! - [`coarray`]: difference sets, weight functions, holes and the central
//!   contiguous segment.
//! - [`robustness`]: the double-difference check, the interior failure sweep
//!   and the three-way verdict.
//! - [`family`]: the closed-form two-fold redundant family and its audit.
//! - [`doa`]: simulated reception and coarray MUSIC on healthy or failed arrays.
//!
//! Needs `alloc` only.

extern crate alloc;

pub mod array;
pub mod coarray;
pub mod doa;
pub mod error;
pub mod family;
pub mod robustness;

pub use array::{
    parse_and_normalize, parse_and_normalize_with_cap, SensorArray, DEFAULT_MAX_APERTURE,
};
pub use coarray::{
    coarray_profile, difference_set, indicator_sequence, weight_table,
    weight_table_via_autocorrelation, CoarrayProfile, IndicatorSequence, WeightTable,
};
pub use error::{Error, Result};
pub use family::{
    generate_2fra, optimal_params, periodicity_report, scan_family, FamilyConfig2Fra, ScanRow,
};
pub use robustness::{
    check_ddb, classify, is_essential, single_failure_sweep, FailureOutcome, Fragility,
    RobustnessReport, Verdict,
};
