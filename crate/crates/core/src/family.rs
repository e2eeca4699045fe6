//! The closed-form two-fold redundant array family and its robustness audit.
//!
//! A member with N sensors is written in interelement-spacing (IES) form as
//! `{1, p, (1, p+2)^m, 1^p}` with `N = 2m + p + 3`. Of the admissible
//! `(m, p)` pairs the generator picks the one with the largest aperture
//! `L = 1 + 2p + m(p + 3)`, ties going to the larger `m`. That choice equals
//! `m = floor((N - 2) / 4)`, `p = N - 2(m + 2) + 1`.
//!
//! The frequently quoted `m = floor(N / 4)` does not reproduce the reference
//! configurations (it diverges at N = 9, 13, 17, ...), so it is not used.

use alloc::vec::Vec;

use crate::array::SensorArray;
use crate::error::{Error, Result};
use crate::robustness::{classify, Verdict};

pub const MIN_FAMILY_SENSORS: usize = 6;

/// Aperture of the member with parameters `(m, p)`.
pub fn family_aperture(m: usize, p: usize) -> usize {
    1 + 2 * p + m * (p + 3)
}

/// `(m*, p*)` maximizing the aperture for `n` sensors.
pub fn optimal_params(n: usize) -> Result<(usize, usize)> {
    if n < MIN_FAMILY_SENSORS {
        return Err(Error::NTooSmall(n));
    }
    let mut best = (0, 0, 0);
    for m in 1.. {
        let Some(p) = n.checked_sub(2 * m + 3).filter(|&p| p >= 1) else {
            break;
        };
        let l = family_aperture(m, p);
        if l >= best.0 {
            best = (l, m, p);
        }
    }
    Ok((best.1, best.2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyConfig2Fra {
    pub n_sensors: usize,
    pub m_star: usize,
    pub p_star: usize,
    /// Interelement spacings, `N - 1` entries.
    pub ies_word: Vec<u32>,
    pub positions: SensorArray,
}

/// Spacing word `{1, p, (1, p+2)^m, 1^p}`.
pub fn ies_word(m: usize, p: usize) -> Vec<u32> {
    let p32 = p as u32;
    let mut word = Vec::with_capacity(2 * m + p + 2);
    word.extend_from_slice(&[1, p32]);
    for _ in 0..m {
        word.extend_from_slice(&[1, p32 + 2]);
    }
    word.extend(core::iter::repeat_n(1, p));
    word
}

pub fn generate_2fra(n: usize) -> Result<FamilyConfig2Fra> {
    let (m_star, p_star) = optimal_params(n)?;
    let ies_word = ies_word(m_star, p_star);
    let positions: Vec<u32> = core::iter::once(0)
        .chain(ies_word.iter().scan(0u32, |acc, &s| {
            *acc += s;
            Some(*acc)
        }))
        .collect();
    Ok(FamilyConfig2Fra {
        n_sensors: n,
        m_star,
        p_star,
        ies_word,
        positions: SensorArray::from_normalized(positions),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub n_sensors: usize,
    pub positions: SensorArray,
    pub verdict: Verdict,
    pub hes_positions: Vec<u32>,
    pub aperture: u32,
}

impl ScanRow {
    pub fn has_hes(&self) -> bool {
        !self.hes_positions.is_empty()
    }
}

/// Generates and classifies the member with `n` sensors.
pub fn scan_row(n: usize) -> Result<ScanRow> {
    let cfg = generate_2fra(n)?;
    let report = classify(&cfg.positions)?;
    Ok(ScanRow {
        n_sensors: n,
        aperture: cfg.positions.aperture(),
        positions: cfg.positions,
        verdict: report.verdict,
        hes_positions: report.hes_positions,
    })
}

pub fn scan_family(n_from: usize, n_to: usize) -> Result<Vec<ScanRow>> {
    if n_from < MIN_FAMILY_SENSORS {
        return Err(Error::NTooSmall(n_from));
    }
    if n_from > n_to {
        return Err(Error::InvalidRange {
            from: n_from,
            to: n_to,
        });
    }
    (n_from..=n_to).map(scan_row).collect()
}

/// Rows with a hidden essential sensor out of all rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HesFraction {
    pub with_hes: usize,
    pub total: usize,
}

impl HesFraction {
    pub fn as_f64(self) -> f64 {
        self.with_hes as f64 / self.total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicitySummary {
    pub fraction_with_hes: HesFraction,
    /// Whether rows with `N >= 10` follow four-with-HES, four-without blocks.
    pub pattern_verified: bool,
    pub first_violation: Option<usize>,
    /// Rows with `N >= 10` that the pattern check covered.
    pub rows_checked: usize,
}

/// Expected HES status under the repeating four-on/four-off pattern.
pub fn pattern_predicts_hes(n: usize) -> bool {
    n >= 10 && ((n - 10) / 4).is_multiple_of(2)
}

/// Summarizes a contiguous run of scan rows.
///
/// The fraction covers every row; the periodicity check covers rows with
/// `N >= 10`, where the pattern starts.
pub fn periodicity_report(rows: &[ScanRow]) -> Result<PeriodicitySummary> {
    if rows.is_empty()
        || rows
            .windows(2)
            .any(|w| w[1].n_sensors != w[0].n_sensors + 1)
    {
        return Err(Error::RangeNotContiguous);
    }
    let with_hes = rows.iter().filter(|r| r.has_hes()).count();
    let checked: Vec<&ScanRow> = rows.iter().filter(|r| r.n_sensors >= 10).collect();
    let first_violation = checked
        .iter()
        .find(|r| r.has_hes() != pattern_predicts_hes(r.n_sensors))
        .map(|r| r.n_sensors);
    Ok(PeriodicitySummary {
        fraction_with_hes: HesFraction {
            with_hes,
            total: rows.len(),
        },
        pattern_verified: !checked.is_empty() && first_violation.is_none(),
        first_violation,
        rows_checked: checked.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn params_examples() {
        assert_eq!(optimal_params(9).unwrap(), (1, 4));
        assert_eq!(optimal_params(6).unwrap(), (1, 1));
        assert_eq!(optimal_params(18).unwrap(), (4, 7));
        assert_eq!(optimal_params(5), Err(Error::NTooSmall(5)));
    }

    #[test]
    fn params_match_closed_form() {
        for n in 6..=500 {
            let m = (n - 2) / 4;
            let p = n - 2 * (m + 2) + 1;
            assert_eq!(optimal_params(n).unwrap(), (m, p), "n = {n}");
        }
    }

    #[test]
    fn aperture_is_maximal() {
        for n in 6..=100usize {
            let (m, p) = optimal_params(n).unwrap();
            let brute = (1..n)
                .filter(|&m| n >= 2 * m + 4)
                .map(|m| family_aperture(m, n - 2 * m - 3))
                .max()
                .unwrap();
            assert_eq!(family_aperture(m, p), brute);
        }
    }

    #[test]
    fn generate_examples() {
        let nine = generate_2fra(9).unwrap();
        assert_eq!(nine.ies_word, vec![1, 4, 1, 6, 1, 1, 1, 1]);
        assert_eq!(
            nine.positions.positions(),
            &[0, 1, 5, 6, 12, 13, 14, 15, 16]
        );
        assert_eq!(
            generate_2fra(13).unwrap().positions.positions(),
            &[0, 1, 7, 8, 16, 17, 25, 26, 27, 28, 29, 30, 31]
        );
        let thirty = generate_2fra(30).unwrap();
        let mut expected = vec![
            0, 1, 14, 15, 30, 31, 46, 47, 62, 63, 78, 79, 94, 95, 110, 111,
        ];
        expected.extend(126..=139);
        assert_eq!(thirty.positions.positions(), expected.as_slice());
    }

    #[test]
    fn generated_shape() {
        for n in 6..=500 {
            let cfg = generate_2fra(n).unwrap();
            assert_eq!(cfg.positions.n_sensors(), n);
            assert_eq!(cfg.ies_word.len(), n - 1);
            assert_eq!(n, 2 * cfg.m_star + cfg.p_star + 3);
            assert_eq!(
                cfg.positions.aperture() as usize,
                family_aperture(cfg.m_star, cfg.p_star)
            );
        }
    }

    #[test]
    fn every_member_is_ddb() {
        for n in 6..=120 {
            assert!(crate::robustness::check_ddb(
                &generate_2fra(n).unwrap().positions
            ));
        }
    }

    #[test]
    fn scan_examples() {
        let rows = scan_family(10, 17).unwrap();
        let hes: Vec<Vec<u32>> = rows.iter().map(|r| r.hes_positions.clone()).collect();
        assert_eq!(
            hes,
            vec![
                vec![10],
                vec![12],
                vec![14],
                vec![16],
                vec![],
                vec![],
                vec![],
                vec![]
            ]
        );
        let six = scan_family(6, 6).unwrap();
        assert_eq!(six.len(), 1);
        assert_eq!(six[0].hes_positions, vec![3]);
        assert_eq!(six[0].verdict, Verdict::DdbWithHes);
        assert_eq!(scan_family(3, 5), Err(Error::NTooSmall(3)));
        assert_eq!(
            scan_family(12, 10),
            Err(Error::InvalidRange { from: 12, to: 10 })
        );
    }

    #[test]
    fn periodicity_examples() {
        let s = periodicity_report(&scan_family(10, 41).unwrap()).unwrap();
        assert!(s.pattern_verified);
        assert_eq!(s.first_violation, None);
        assert_eq!(s.rows_checked, 32);

        // Reference table: HES rows are N = 6..13, 18..21 and 26..29.
        let s = periodicity_report(&scan_family(6, 30).unwrap()).unwrap();
        assert_eq!(
            s.fraction_with_hes,
            HesFraction {
                with_hes: 16,
                total: 25
            }
        );
    }

    #[test]
    fn periodicity_rejects_gaps() {
        let mut rows = scan_family(10, 14).unwrap();
        rows.remove(2);
        assert_eq!(periodicity_report(&rows), Err(Error::RangeNotContiguous));
        assert_eq!(periodicity_report(&[]), Err(Error::RangeNotContiguous));
    }

    #[test]
    fn periodicity_reports_violation() {
        let mut rows = scan_family(10, 20).unwrap();
        rows[5].hes_positions.push(1);
        let s = periodicity_report(&rows).unwrap();
        assert!(!s.pattern_verified);
        assert_eq!(s.first_violation, Some(15));
    }
}
