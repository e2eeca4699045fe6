//! Coarray MUSIC.
//!
//! Pipeline:
//! 1. sample covariance `R = X X^H / T`;
//! 2. average `R[i, j]` over every sensor pair sharing the lag `p_i - p_j`;
//! 3. keep the central contiguous lags `[-Lc, Lc]` and form the Hermitian
//!    Toeplitz matrix `Rv[u, v] = z(u - v)` of size `Lc + 1`;
//! 4. spatially smooth: `Rss = Rv Rv^H / (Lc + 1)`, which is PSD and shares
//!    `Rv`'s eigenvectors (forward-only smoothing);
//! 5. the eigenvectors past the `K` largest eigenvalues span the noise
//!    subspace `En`, and `P(theta) = 1 / ||En^H a(theta)||^2`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::simulate::{steering, DataMatrix};
use crate::array::SensorArray;
use crate::coarray::{coarray_profile, weight_table};
use crate::error::{Error, Result};

// Floor on ||En^H a||^2 so the spectrum stays finite for exact subspaces.
const MIN_PROJECTION: f64 = 1e-14;

/// Covariance entries averaged per coarray lag.
#[derive(Debug, Clone, PartialEq)]
pub struct LagAverages {
    aperture: u32,
    // index lag + L; None for holes
    values: Vec<Option<Complex64>>,
    pub central_ula_bound: u32,
}

impl LagAverages {
    pub fn get(&self, lag: i64) -> Option<Complex64> {
        let idx = lag + self.aperture as i64;
        if idx < 0 {
            return None;
        }
        self.values.get(idx as usize).copied().flatten()
    }

    /// Lags with at least one contributing pair, ascending.
    pub fn lags(&self) -> Vec<i64> {
        let l = self.aperture as i64;
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .map(|(i, _)| i as i64 - l)
            .collect()
    }
}

/// Averages the sample covariance of `x` over the difference coarray of `arr`.
pub fn lag_averages(x: &DataMatrix, arr: &SensorArray) -> Result<LagAverages> {
    let p = arr.positions();
    if x.nrows() != p.len() || x.ncols() == 0 {
        return Err(Error::InvalidScenario(
            "data matrix rows must match the surviving sensors",
        ));
    }
    let t = Complex64::new(x.ncols() as f64, 0.0);
    let r = x * x.adjoint() / t;
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::DegenerateCovariance);
    }

    let l = arr.aperture() as i64;
    let mut sums = vec![Complex64::new(0.0, 0.0); 2 * l as usize + 1];
    let mut counts = vec![0u32; 2 * l as usize + 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &pj) in p.iter().enumerate() {
            let idx = (pi as i64 - pj as i64 + l) as usize;
            sums[idx] += r[(i, j)];
            counts[idx] += 1;
        }
    }
    let values = sums
        .into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s / c as f64))
        .collect();
    Ok(LagAverages {
        aperture: l as u32,
        values,
        central_ula_bound: coarray_profile(&weight_table(arr)).central_ula_bound,
    })
}

/// Spatially smoothed matrix over the central contiguous lags.
pub fn smoothed_coarray_matrix(z: &LagAverages) -> DMatrix<Complex64> {
    let m = z.central_ula_bound as usize + 1;
    let rv = DMatrix::from_fn(m, m, |u, v| {
        z.get(u as i64 - v as i64)
            .expect("central segment lags are present")
    });
    let rv_h = rv.adjoint();
    (&rv * rv_h) / Complex64::new(m as f64, 0.0)
}

/// Uniform grid `i * step` covering the open interval (-90, 90).
pub fn angle_grid(step_deg: f64) -> Result<Vec<f64>> {
    if !(step_deg.is_finite() && step_deg > 0.0 && step_deg <= 45.0) {
        return Err(Error::InvalidScenario(
            "grid step must be in (0, 45] degrees",
        ));
    }
    let half = libm::ceil(90.0 / step_deg - 1e-9) as i64 - 1;
    // Rounded to 1e-9 deg so grid values print cleanly.
    Ok((-half..=half)
        .map(|i| libm::round(i as f64 * step_deg * 1e9) / 1e9)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid_deg: Vec<f64>,
    pub pseudospectrum: Vec<f64>,
    /// Ascending angle.
    pub peaks_deg: Vec<f64>,
    /// `Lc` of the surviving array's coarray.
    pub central_ula_bound: u32,
    /// Eigenvalues of the smoothed matrix, descending.
    pub eigenvalues: Vec<f64>,
}

impl Spectrum {
    /// `10 log10(P / max P)`.
    pub fn normalized_db(&self) -> Vec<f64> {
        let max = self
            .pseudospectrum
            .iter()
            .copied()
            .fold(f64::MIN_POSITIVE, f64::max);
        self.pseudospectrum
            .iter()
            .map(|&v| 10.0 * libm::log10(v / max))
            .collect()
    }
}

/// Coarray MUSIC on snapshots `x` from the sensors of `surviving`.
///
/// Returns the `k_sources` largest strict local maxima of the
/// pseudospectrum (fewer if the spectrum has fewer). `k_sources` must not
/// exceed the central contiguous coarray bound `Lc` of `surviving`.
pub fn coarray_music(
    x: &DataMatrix,
    surviving: &SensorArray,
    k_sources: usize,
    grid_step_deg: f64,
) -> Result<Spectrum> {
    if k_sources == 0 {
        return Err(Error::InvalidScenario("at least one source is required"));
    }
    let grid_deg = angle_grid(grid_step_deg)?;
    let z = lag_averages(x, surviving)?;
    if k_sources > z.central_ula_bound as usize {
        return Err(Error::RankDeficient {
            sources: k_sources,
            bound: z.central_ula_bound,
        });
    }

    let rss = smoothed_coarray_matrix(&z);
    let m = rss.nrows();
    let eig = SymmetricEigen::new(rss);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if order.iter().any(|&i| !eig.eigenvalues[i].is_finite()) {
        return Err(Error::DegenerateCovariance);
    }
    let noise: Vec<Vec<Complex64>> = order[k_sources..]
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();

    let pseudospectrum: Vec<f64> = grid_deg
        .iter()
        .map(|&theta| {
            let a = steering((0..m).map(|u| u as f64), theta);
            let proj: f64 = noise
                .iter()
                .map(|e| {
                    e.iter()
                        .zip(&a)
                        .map(|(ei, ai)| ei.conj() * ai)
                        .sum::<Complex64>()
                        .norm_sqr()
                })
                .sum();
            1.0 / proj.max(MIN_PROJECTION)
        })
        .collect();

    let peaks_deg = pick_peaks(&grid_deg, &pseudospectrum, k_sources);
    Ok(Spectrum {
        grid_deg,
        pseudospectrum,
        peaks_deg,
        central_ula_bound: z.central_ula_bound,
        eigenvalues: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
    })
}

/// `k` largest strict interior local maxima, ties to the lower angle,
/// returned in ascending angle order.
fn pick_peaks(grid: &[f64], spectrum: &[f64], k: usize) -> Vec<f64> {
    let mut idx: Vec<usize> = (1..spectrum.len().saturating_sub(1))
        .filter(|&i| spectrum[i] > spectrum[i - 1] && spectrum[i] > spectrum[i + 1])
        .collect();
    idx.sort_by(|&a, &b| spectrum[b].total_cmp(&spectrum[a]).then(a.cmp(&b)));
    idx.truncate(k);
    idx.sort_unstable();
    idx.into_iter().map(|i| grid[i]).collect()
}
