//! Difference sets, weight functions and coarray continuity.

use alloc::vec;
use alloc::vec::Vec;

use crate::array::SensorArray;

/// All N² ordered differences `a_i - a_j`, including the N zeros.
///
/// Ordered row-major over `(i, j)`.
pub fn difference_set(arr: &SensorArray) -> Vec<i64> {
    let p = arr.positions();
    let mut out = Vec::with_capacity(p.len() * p.len());
    for &ai in p {
        for &aj in p {
            out.push(ai as i64 - aj as i64);
        }
    }
    out
}

/// Multiplicity `w(m)` of every lag `m` in `[-L, L]`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightTable {
    aperture: u32,
    // index m + L
    weights: Vec<u32>,
}

impl WeightTable {
    /// Builds a table from the non-negative half `w(0..=L)`.
    fn from_half(half: &[u32]) -> Self {
        let l = half.len() - 1;
        let mut weights = vec![0; 2 * l + 1];
        for (m, &w) in half.iter().enumerate() {
            weights[l + m] = w;
            weights[l - m] = w;
        }
        Self {
            aperture: l as u32,
            weights,
        }
    }

    pub fn aperture(&self) -> u32 {
        self.aperture
    }

    /// `w(m)`; zero outside `[-L, L]`.
    pub fn get(&self, lag: i64) -> u32 {
        let idx = lag + self.aperture as i64;
        if idx < 0 {
            return 0;
        }
        self.weights.get(idx as usize).copied().unwrap_or(0)
    }

    /// Weights for lags `-L..=L` in order.
    pub fn as_slice(&self) -> &[u32] {
        &self.weights
    }

    /// Weights for lags `0..=L`.
    pub fn non_negative(&self) -> &[u32] {
        &self.weights[self.aperture as usize..]
    }

    /// `(lag, weight)` pairs over `[-L, L]`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        let l = self.aperture as i64;
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (i as i64 - l, w))
    }

    /// `w(0)`, which equals the sensor count.
    pub fn n_sensors(&self) -> usize {
        self.non_negative()[0] as usize
    }

    /// Sum of all weights, N².
    pub fn total(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }
}

/// Direct pairwise counting.
pub fn weight_table(arr: &SensorArray) -> WeightTable {
    let p = arr.positions();
    let mut half = vec![0u32; arr.aperture() as usize + 1];
    half[0] = p.len() as u32;
    for (i, &hi) in p.iter().enumerate() {
        for &lo in &p[..i] {
            half[(hi - lo) as usize] += 1;
        }
    }
    WeightTable::from_half(&half)
}

/// Continuity summary derived from a [`WeightTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarrayProfile {
    /// Distinct lags present, ascending.
    pub dca: Vec<i64>,
    /// Positive lags in `[1, L]` with zero weight.
    pub holes: Vec<u32>,
    pub hole_free: bool,
    /// Largest `Lc` with every lag of `[-Lc, Lc]` present.
    pub central_ula_bound: u32,
}

impl CoarrayProfile {
    /// Number of lags in the central contiguous segment, `2 Lc + 1`.
    pub fn central_ula_len(&self) -> u32 {
        2 * self.central_ula_bound + 1
    }
}

pub fn coarray_profile(wt: &WeightTable) -> CoarrayProfile {
    let l = wt.aperture();
    let dca: Vec<i64> = wt.iter().filter(|&(_, w)| w > 0).map(|(m, _)| m).collect();
    let holes: Vec<u32> = wt
        .non_negative()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &w)| w == 0)
        .map(|(m, _)| m as u32)
        .collect();
    let central_ula_bound = holes.first().map_or(l, |&h| h - 1);
    CoarrayProfile {
        hole_free: dca.len() == 2 * l as usize + 1,
        dca,
        holes,
        central_ula_bound,
    }
}

/// Binary occupancy of grid points `0..=L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorSequence {
    bits: Vec<u8>,
}

impl IndicatorSequence {
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

pub fn indicator_sequence(arr: &SensorArray) -> IndicatorSequence {
    let mut bits = vec![0u8; arr.aperture() as usize + 1];
    for &p in arr.positions() {
        bits[p as usize] = 1;
    }
    IndicatorSequence { bits }
}

/// Weight function as the autocorrelation `w(m) = Σ_g b[g] b[g+m]`.
pub fn weight_table_via_autocorrelation(ind: &IndicatorSequence) -> WeightTable {
    let b = ind.bits();
    let half: Vec<u32> = (0..b.len())
        .map(|m| {
            b[..b.len() - m]
                .iter()
                .zip(&b[m..])
                .map(|(&x, &y)| (x & y) as u32)
                .sum()
        })
        .collect();
    WeightTable::from_half(&half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn arr(p: &[i64]) -> SensorArray {
        SensorArray::new(p).unwrap()
    }

    #[test]
    fn difference_set_small() {
        let mut d = difference_set(&arr(&[0, 1, 4]));
        d.sort_unstable();
        assert_eq!(d, vec![-4, -3, -1, 0, 0, 0, 1, 3, 4]);
        let mut two = difference_set(&arr(&[0, 9]));
        two.sort_unstable();
        assert_eq!(two, vec![-9, 0, 0, 9]);
    }

    #[test]
    fn lag_five_twice() {
        let d = difference_set(&arr(&[0, 5, 10]));
        assert_eq!(d.iter().filter(|&&m| m == 5).count(), 2);
    }

    #[test]
    fn misc_array_is_hole_free() {
        let wt = weight_table(&arr(&[0, 1, 2, 6, 10, 13]));
        assert_eq!(wt.get(0), 6);
        assert_eq!(wt.get(13), 1);
        assert!((-13..=13).all(|m| wt.get(m) >= 1));
        let prof = coarray_profile(&wt);
        assert!(prof.hole_free);
        assert_eq!(prof.central_ula_bound, 13);
        assert_eq!(prof.dca.len(), 27);
    }

    #[test]
    fn nine_element_2fra_is_doubly_redundant() {
        let wt = weight_table(&arr(&[0, 1, 5, 6, 12, 13, 14, 15, 16]));
        assert!((1..=15).all(|m| wt.get(m) >= 2));
        assert_eq!(wt.get(16), 1);
    }

    #[test]
    fn hole_at_two() {
        let wt = weight_table(&arr(&[0, 1, 4]));
        assert_eq!(wt.get(2), 0);
        let prof = coarray_profile(&wt);
        assert_eq!(prof.dca, vec![-4, -3, -1, 0, 1, 3, 4]);
        assert_eq!(prof.holes, vec![2]);
        assert!(!prof.hole_free);
        assert_eq!(prof.central_ula_bound, 1);
    }

    #[test]
    fn thirteen_element_2fra_without_16() {
        // Brute force over every pair of the surviving positions.
        let survivors = [0i64, 1, 7, 8, 17, 25, 26, 27, 28, 29, 30, 31];
        let mut present = [false; 32];
        for &a in &survivors {
            for &b in &survivors {
                present[(a - b).unsigned_abs() as usize] = true;
            }
        }
        let expected_holes: Vec<u32> = (1..=31).filter(|&m| !present[m as usize]).collect();
        assert_eq!(expected_holes, vec![15]);

        let prof = coarray_profile(&weight_table(&arr(&survivors)));
        assert_eq!(prof.holes, expected_holes);
        assert_eq!(prof.central_ula_bound, 14);
        assert_eq!(prof.central_ula_len(), 29);
    }

    #[test]
    fn indicator_examples() {
        assert_eq!(
            indicator_sequence(&arr(&[0, 2, 5, 6])).bits(),
            &[1, 0, 1, 0, 0, 1, 1]
        );
        assert_eq!(indicator_sequence(&arr(&[0, 1])).bits(), &[1, 1]);
        assert_eq!(indicator_sequence(&arr(&[0, 3])).bits(), &[1, 0, 0, 1]);
    }

    #[test]
    fn autocorrelation_example() {
        // Positive differences of [0 2 5 6] are 2, 5, 6, 3, 4, 1: each lag once.
        let wt = weight_table_via_autocorrelation(&indicator_sequence(&arr(&[0, 2, 5, 6])));
        assert_eq!(wt.non_negative(), &[4, 1, 1, 1, 1, 1, 1]);
        assert_eq!(wt.total(), 16);
        let wt = weight_table_via_autocorrelation(&indicator_sequence(&arr(&[0, 1])));
        assert_eq!(wt.as_slice(), &[1, 2, 1]);
    }

    #[test]
    fn ula_closed_form() {
        for n in 2..20i64 {
            let a: Vec<i64> = (0..n).collect();
            let wt = weight_table(&arr(&a));
            for m in -(n - 1)..n {
                assert_eq!(wt.get(m) as i64, n - m.abs());
            }
        }
    }

    #[test]
    fn single_sensor_table() {
        let wt = weight_table(&arr(&[3]));
        assert_eq!(wt.as_slice(), &[1]);
        assert!(coarray_profile(&wt).hole_free);
    }

    fn arb_array() -> impl Strategy<Value = SensorArray> {
        proptest::collection::btree_set(0i64..=40, 2..=12).prop_map(|s| {
            let v: Vec<i64> = s.into_iter().collect();
            SensorArray::new(&v).unwrap()
        })
    }

    proptest! {
        #[test]
        fn table_invariants(a in arb_array()) {
            let wt = weight_table(&a);
            let n = a.n_sensors() as u32;
            let l = a.aperture() as i64;
            prop_assert_eq!(wt.get(0), n);
            prop_assert_eq!(wt.get(l), 1);
            prop_assert_eq!(wt.get(-l), 1);
            prop_assert_eq!(wt.total(), (n as u64) * (n as u64));
            for m in 0..=l {
                prop_assert_eq!(wt.get(m), wt.get(-m));
            }
            let prof = coarray_profile(&wt);
            prop_assert_eq!(prof.hole_free, prof.holes.is_empty());
            prop_assert_eq!(prof.hole_free, prof.dca.len() as i64 == 2 * l + 1);
            prop_assert!(prof.dca.contains(&0) && prof.dca.contains(&l) && prof.dca.contains(&-l));
            if prof.hole_free {
                prop_assert_eq!(prof.central_ula_bound as i64, l);
            }
        }

        #[test]
        fn routes_agree(a in arb_array()) {
            prop_assert_eq!(
                weight_table(&a),
                weight_table_via_autocorrelation(&indicator_sequence(&a))
            );
        }

        #[test]
        fn shift_and_flip_invariant(a in arb_array(), c in 0i64..50) {
            let shifted: Vec<i64> = a.positions().iter().map(|&p| p as i64 + c).collect();
            let wt = weight_table(&a);
            prop_assert_eq!(&weight_table(&SensorArray::new(&shifted).unwrap()), &wt);
            prop_assert_eq!(&weight_table(&a.flipped()), &wt);
        }
    }
}
