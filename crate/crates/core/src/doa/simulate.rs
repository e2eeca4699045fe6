use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_angle, DoaScenario};
use crate::error::Result;

/// Sensors × snapshots.
pub type DataMatrix = DMatrix<Complex64>;

/// ChaCha8 stream used for source symbols.
pub const SOURCE_STREAM: u64 = 0;
/// ChaCha8 stream used for sensor noise.
pub const NOISE_STREAM: u64 = 1;

/// Unit-magnitude response with phase `pi * position * sin(theta)`.
pub fn steering_vector(positions: &[u32], theta_deg: f64) -> Result<Vec<Complex64>> {
    check_angle(theta_deg)?;
    Ok(steering(positions.iter().map(|&p| p as f64), theta_deg))
}

pub(crate) fn steering(positions: impl Iterator<Item = f64>, theta_deg: f64) -> Vec<Complex64> {
    let s = libm::sin(theta_deg.to_radians());
    positions
        .map(|p| Complex64::from_polar(1.0, PI * p * s))
        .collect()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn circular_gaussian(rng: &mut ChaCha8Rng, variance: f64) -> Complex64 {
    let scale = libm::sqrt(variance / 2.0);
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// `X = A S + W` for the surviving sensors.
///
/// The field is drawn for the full array and the failed rows are dropped, so
/// scenarios that differ only in their failure set see the same sources and
/// noise on the sensors they share. Sources are uncorrelated unit-power
/// circular Gaussians; noise variance is `10^(-snr_db / 10)`. Symbols come
/// from [`SOURCE_STREAM`] (snapshot-major, then source) and noise from
/// [`NOISE_STREAM`] (snapshot-major, then sensor).
pub fn simulate_snapshots(sc: &DoaScenario) -> Result<DataMatrix> {
    sc.validate()?;
    let rows = sc.surviving_indices()?;
    let positions = sc.array.positions();
    let k = sc.source_angles_deg.len();
    let n = positions.len();
    let t = sc.n_snapshots;

    let steer: Vec<Vec<Complex64>> = sc
        .source_angles_deg
        .iter()
        .map(|&theta| steering(positions.iter().map(|&p| p as f64), theta))
        .collect();

    let mut sources = rng_for(sc.rng_seed, SOURCE_STREAM);
    let mut symbols = DMatrix::zeros(k, t);
    for col in 0..t {
        for src in 0..k {
            symbols[(src, col)] = circular_gaussian(&mut sources, 1.0);
        }
    }

    let noise_var = libm::pow(10.0, -sc.snr_db / 10.0);
    let mut noise = rng_for(sc.rng_seed, NOISE_STREAM);

    let mut x = DMatrix::zeros(rows.len(), t);
    for col in 0..t {
        let w: Vec<Complex64> = if noise_var > 0.0 {
            (0..n)
                .map(|_| circular_gaussian(&mut noise, noise_var))
                .collect()
        } else {
            alloc::vec![Complex64::new(0.0, 0.0); n]
        };
        for (r, &sensor) in rows.iter().enumerate() {
            let mut acc = w[sensor];
            for src in 0..k {
                acc += steer[src][sensor] * symbols[(src, col)];
            }
            x[(r, col)] = acc;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::SensorArray;
    use crate::error::Error;
    use alloc::vec;

    #[test]
    fn steering_examples() {
        let v = steering_vector(&[0, 3, 11], 0.0).unwrap();
        assert!(v
            .iter()
            .all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));

        let v = steering_vector(&[0, 1], 89.999_999).unwrap();
        assert!((v[0].arg()).abs() < 1e-12);
        assert!((v[1].arg().abs() - PI).abs() < 1e-6);

        let v = steering_vector(&[2], 30.0).unwrap();
        assert!((v[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(v.iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));

        assert_eq!(
            steering_vector(&[0], 90.0),
            Err(Error::AngleOutOfRange(90.0))
        );
        assert_eq!(
            steering_vector(&[0], -95.0),
            Err(Error::AngleOutOfRange(-95.0))
        );
    }

    fn scenario() -> DoaScenario {
        let mut sc = DoaScenario::new(SensorArray::new(&[0, 1, 4, 6]).unwrap(), vec![-12.0, 25.0]);
        sc.n_snapshots = 40;
        sc.rng_seed = 9;
        sc
    }

    #[test]
    fn deterministic_for_seed() {
        let a = simulate_snapshots(&scenario()).unwrap();
        let b = simulate_snapshots(&scenario()).unwrap();
        assert_eq!(a, b);
        let mut other = scenario();
        other.rng_seed = 10;
        assert_ne!(a, simulate_snapshots(&other).unwrap());
    }

    #[test]
    fn failure_drops_rows_of_same_field() {
        let full = simulate_snapshots(&scenario()).unwrap();
        let failed = simulate_snapshots(&scenario().with_failed(&[4])).unwrap();
        assert_eq!(failed.nrows(), 3);
        assert_eq!(failed.row(0), full.row(0));
        assert_eq!(failed.row(1), full.row(1));
        assert_eq!(failed.row(2), full.row(3));
    }

    #[test]
    fn noise_free_broadside_columns_are_constant() {
        let mut sc = DoaScenario::new(SensorArray::new(&[0, 2, 3, 7]).unwrap(), vec![0.0]);
        sc.snr_db = f64::INFINITY;
        sc.n_snapshots = 16;
        let x = simulate_snapshots(&sc).unwrap();
        for col in x.column_iter() {
            assert!(col.iter().all(|z| (z - col[0]).norm() < 1e-12));
        }
    }

    #[test]
    fn sample_covariance_approaches_outer_product() {
        let mut sc = DoaScenario::new(SensorArray::new(&[0, 1, 3]).unwrap(), vec![17.0]);
        sc.snr_db = f64::INFINITY;
        sc.n_snapshots = 100_000;
        let x = simulate_snapshots(&sc).unwrap();
        let r = &x * x.adjoint() / Complex64::new(sc.n_snapshots as f64, 0.0);
        let a = steering_vector(&[0, 1, 3], 17.0).unwrap();
        let mut max_dev: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                max_dev = max_dev.max((r[(i, j)] - a[i] * a[j].conj()).norm());
            }
        }
        assert!(max_dev < 0.05, "{max_dev}");
        let eig = nalgebra::SymmetricEigen::new(r).eigenvalues;
        let mut ev: Vec<f64> = eig.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!(ev[0].abs() < 1e-9 && ev[1].abs() < 1e-9 && ev[2] > 2.5);
    }

    #[test]
    fn noise_power_matches_snr() {
        // Same seed with and without noise isolates the noise term.
        let mut sc = DoaScenario::new(SensorArray::new(&[0, 1]).unwrap(), vec![0.0]);
        sc.n_snapshots = 20_000;
        sc.snr_db = -10.0;
        let noisy = simulate_snapshots(&sc).unwrap();
        sc.snr_db = f64::INFINITY;
        let clean = simulate_snapshots(&sc).unwrap();
        let diff = noisy - clean;
        let power = diff.iter().map(|z| z.norm_sqr()).sum::<f64>() / diff.len() as f64;
        assert!((power - 10.0).abs() < 0.3, "{power}");
    }
}
