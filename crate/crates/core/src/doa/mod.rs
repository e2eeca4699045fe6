//! Narrowband DOA simulation and coarray MUSIC on healthy or failed arrays.

mod music;
mod simulate;

use alloc::vec::Vec;

use crate::array::SensorArray;
use crate::error::{Error, Result};

pub use music::{
    angle_grid, coarray_music, lag_averages, smoothed_coarray_matrix, LagAverages, Spectrum,
};
pub use simulate::{simulate_snapshots, steering_vector, DataMatrix, NOISE_STREAM, SOURCE_STREAM};

pub const DEFAULT_SNR_DB: f64 = 0.0;
pub const DEFAULT_SNAPSHOTS: usize = 500;
pub const DEFAULT_GRID_STEP_DEG: f64 = 0.1;
pub const DEFAULT_MATCH_TOLERANCE_DEG: f64 = 1.0;

/// Eleven sources from -20 to 20 degrees in 4 degree steps.
pub fn reference_source_angles() -> Vec<f64> {
    (0..11).map(|i| -20.0 + 4.0 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoaScenario {
    pub array: SensorArray,
    /// Positions (in `array`'s coordinates) whose sensors output nothing.
    pub failed_positions: Vec<u32>,
    pub source_angles_deg: Vec<f64>,
    /// Per-source SNR; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub n_snapshots: usize,
    pub rng_seed: u64,
}

impl DoaScenario {
    pub fn new(array: SensorArray, source_angles_deg: Vec<f64>) -> Self {
        Self {
            array,
            failed_positions: Vec::new(),
            source_angles_deg,
            snr_db: DEFAULT_SNR_DB,
            n_snapshots: DEFAULT_SNAPSHOTS,
            rng_seed: 0,
        }
    }

    pub fn with_failed(&self, failed: &[u32]) -> Self {
        Self {
            failed_positions: failed.to_vec(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.source_angles_deg.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one source angle is required",
            ));
        }
        for &theta in &self.source_angles_deg {
            check_angle(theta)?;
        }
        let mut sorted = self.source_angles_deg.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidScenario("source angles must be distinct"));
        }
        if self.n_snapshots == 0 {
            return Err(Error::InvalidScenario("snapshot count must be positive"));
        }
        if self.snr_db.is_nan() {
            return Err(Error::InvalidScenario("SNR must be a number"));
        }
        self.surviving().map(|_| ())
    }

    /// Indices into `array.positions()` of the sensors still working.
    pub fn surviving_indices(&self) -> Result<Vec<usize>> {
        for &p in &self.failed_positions {
            if !self.array.contains(p) {
                return Err(Error::PositionNotInArray(p));
            }
        }
        let idx: Vec<usize> = self
            .array
            .positions()
            .iter()
            .enumerate()
            .filter(|(_, p)| !self.failed_positions.contains(p))
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            return Err(Error::NoSurvivingSensors);
        }
        Ok(idx)
    }

    /// Surviving sensors, renormalized to start at 0.
    pub fn surviving(&self) -> Result<SensorArray> {
        self.array.without(&self.failed_positions)
    }
}

pub(crate) fn check_angle(theta_deg: f64) -> Result<()> {
    if theta_deg.is_finite() && theta_deg > -90.0 && theta_deg < 90.0 {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(theta_deg))
    }
}

/// Pairing of true and detected angles.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakMatching {
    /// `(true, detected)` pairs, ordered by true angle.
    pub matched: Vec<(f64, f64)>,
    pub missed: Vec<f64>,
    pub ghosts: Vec<f64>,
    pub rmse_deg: Option<f64>,
}

/// Greedy one-to-one matching, closest pairs first, within `tolerance_deg`.
pub fn match_peaks(true_deg: &[f64], detected_deg: &[f64], tolerance_deg: f64) -> PeakMatching {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (ti, &t) in true_deg.iter().enumerate() {
        for (di, &d) in detected_deg.iter().enumerate() {
            let dist = libm::fabs(d - t);
            if dist <= tolerance_deg {
                candidates.push((dist, ti, di));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut true_used = alloc::vec![false; true_deg.len()];
    let mut det_used = alloc::vec![false; detected_deg.len()];
    let mut matched = Vec::new();
    for (_, ti, di) in candidates {
        if !true_used[ti] && !det_used[di] {
            true_used[ti] = true;
            det_used[di] = true;
            matched.push((true_deg[ti], detected_deg[di]));
        }
    }
    matched.sort_by(|a, b| a.0.total_cmp(&b.0));

    let rmse_deg = (!matched.is_empty()).then(|| {
        let sq: f64 = matched.iter().map(|(t, d)| (d - t) * (d - t)).sum();
        libm::sqrt(sq / matched.len() as f64)
    });
    PeakMatching {
        missed: true_deg
            .iter()
            .zip(&true_used)
            .filter(|(_, &u)| !u)
            .map(|(&t, _)| t)
            .collect(),
        ghosts: detected_deg
            .iter()
            .zip(&det_used)
            .filter(|(_, &u)| !u)
            .map(|(&d, _)| d)
            .collect(),
        matched,
        rmse_deg,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MusicOptions {
    pub grid_step_deg: f64,
    pub match_tolerance_deg: f64,
}

impl Default for MusicOptions {
    fn default() -> Self {
        Self {
            grid_step_deg: DEFAULT_GRID_STEP_DEG,
            match_tolerance_deg: DEFAULT_MATCH_TOLERANCE_DEG,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoaResult {
    pub failed_positions: Vec<u32>,
    pub spectrum: Spectrum,
    pub matching: PeakMatching,
}

impl DoaResult {
    /// All sources found and nothing spurious.
    pub fn is_clean(&self) -> bool {
        self.matching.missed.is_empty() && self.matching.ghosts.is_empty()
    }
}

/// Simulates `sc`, runs coarray MUSIC with one peak per true source and
/// scores the detections.
pub fn run_scenario(sc: &DoaScenario, opts: &MusicOptions) -> Result<DoaResult> {
    let x = simulate_snapshots(sc)?;
    let surviving = sc.surviving()?;
    let spectrum = coarray_music(
        &x,
        &surviving,
        sc.source_angles_deg.len(),
        opts.grid_step_deg,
    )?;
    let matching = match_peaks(
        &sc.source_angles_deg,
        &spectrum.peaks_deg,
        opts.match_tolerance_deg,
    );
    Ok(DoaResult {
        failed_positions: sc.failed_positions.clone(),
        spectrum,
        matching,
    })
}

/// Runs the same sources, seed and noise realization once per failure set.
///
/// `base.failed_positions` is ignored.
pub fn compare_health_states(
    base: &DoaScenario,
    failure_sets: &[Vec<u32>],
    opts: &MusicOptions,
) -> Result<Vec<DoaResult>> {
    failure_sets
        .iter()
        .map(|failed| run_scenario(&base.with_failed(failed), opts))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matching_partitions() {
        let m = match_peaks(&[-10.0, 0.0, 10.0], &[0.3, 9.0, 30.0, -0.2], 1.0);
        assert_eq!(m.matched, vec![(0.0, -0.2), (10.0, 9.0)]);
        assert_eq!(m.missed, vec![-10.0]);
        assert_eq!(m.ghosts, vec![0.3, 30.0]);
        let rmse = m.rmse_deg.unwrap();
        assert!((rmse - libm::sqrt((0.04 + 1.0) / 2.0)).abs() < 1e-12);
    }

    #[test]
    fn matching_empty() {
        let m = match_peaks(&[1.0], &[], 1.0);
        assert!(m.matched.is_empty());
        assert_eq!(m.missed, vec![1.0]);
        assert_eq!(m.rmse_deg, None);
    }

    #[test]
    fn scenario_validation() {
        let a = SensorArray::new(&[0, 1, 2, 3]).unwrap();
        let mut sc = DoaScenario::new(a.clone(), vec![0.0, 10.0]);
        assert!(sc.validate().is_ok());
        sc.source_angles_deg = vec![];
        assert!(matches!(sc.validate(), Err(Error::InvalidScenario(_))));
        sc.source_angles_deg = vec![5.0, 5.0];
        assert!(matches!(sc.validate(), Err(Error::InvalidScenario(_))));
        sc.source_angles_deg = vec![90.0];
        assert_eq!(sc.validate(), Err(Error::AngleOutOfRange(90.0)));
        sc.source_angles_deg = vec![1.0];
        sc.n_snapshots = 0;
        assert!(matches!(sc.validate(), Err(Error::InvalidScenario(_))));
        sc.n_snapshots = 10;
        sc.failed_positions = vec![7];
        assert_eq!(sc.validate(), Err(Error::PositionNotInArray(7)));
        sc.failed_positions = vec![0, 1, 2, 3];
        assert_eq!(sc.validate(), Err(Error::NoSurvivingSensors));
    }

    #[test]
    fn reference_angles() {
        let a = reference_source_angles();
        assert_eq!(a.len(), 11);
        assert_eq!(a[0], -20.0);
        assert_eq!(a[10], 20.0);
    }
}
