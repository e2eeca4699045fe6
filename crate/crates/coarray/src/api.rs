//! Request and response shapes shared by the CLI and the HTTP service.
//!
//! Every operation here returns a serializable value; [`to_json`] is the only
//! place JSON text is produced, so both front ends emit identical bytes.

use coarray_core::array::parse_positions;
use coarray_core::doa::{
    angle_grid, run_scenario, DoaResult, DoaScenario, MusicOptions, DEFAULT_GRID_STEP_DEG,
    DEFAULT_MATCH_TOLERANCE_DEG, DEFAULT_SNAPSHOTS, DEFAULT_SNR_DB,
};
use coarray_core::family::{
    family_aperture, generate_2fra, optimal_params, periodicity_report, scan_row,
    PeriodicitySummary, ScanRow, MIN_FAMILY_SENSORS,
};
use coarray_core::{
    classify, coarray_profile, single_failure_sweep, weight_table, FailureOutcome,
    RobustnessReport, SensorArray, WeightTable, DEFAULT_MAX_APERTURE,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ApiResult, ErrorKind};

/// Server- or process-wide bounds on request size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_aperture: u64,
    /// Largest N accepted by scans.
    pub scan_ceiling: usize,
    /// Largest `to - from` per scan request.
    pub max_scan_span: usize,
    /// Grid points times failure sets per DOA request.
    pub max_doa_points: usize,
    pub max_snapshots: usize,
}

pub const DEFAULT_SCAN_CEILING: usize = 500;

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_aperture: DEFAULT_MAX_APERTURE,
            scan_ceiling: DEFAULT_SCAN_CEILING,
            max_scan_span: 1000,
            max_doa_points: 100_000,
            max_snapshots: 100_000,
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("response types serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisOptions {
    #[serde(default)]
    pub include_sweep_on_non_ddb: bool,
    /// Lowers (never raises) the configured aperture cap.
    #[serde(default)]
    pub max_aperture: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisRequest {
    pub positions: String,
    #[serde(default)]
    pub options: AnalysisOptions,
}

impl AnalysisRequest {
    pub fn new(positions: impl Into<String>) -> Self {
        Self {
            positions: positions.into(),
            options: AnalysisOptions::default(),
        }
    }

    fn array(&self, limits: &Limits) -> ApiResult<SensorArray> {
        let cap = self
            .options
            .max_aperture
            .map_or(limits.max_aperture, |c| c.min(limits.max_aperture));
        Ok(coarray_core::parse_and_normalize_with_cap(
            &self.positions,
            cap,
        )?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightsJson {
    pub positions: Vec<u32>,
    pub n_sensors: usize,
    pub aperture: u32,
    pub lags: Vec<i64>,
    pub weights: Vec<u32>,
    pub dca: Vec<i64>,
    pub holes: Vec<u32>,
    pub hole_free: bool,
    pub central_ula_bound: u32,
}

impl WeightsJson {
    pub fn build(arr: &SensorArray, wt: &WeightTable) -> Self {
        let prof = coarray_profile(wt);
        let (lags, weights) = wt.iter().unzip();
        Self {
            positions: arr.positions().to_vec(),
            n_sensors: arr.n_sensors(),
            aperture: arr.aperture(),
            lags,
            weights,
            dca: prof.dca,
            holes: prof.holes,
            hole_free: prof.hole_free,
            central_ula_bound: prof.central_ula_bound,
        }
    }
}

pub fn weights(req: &AnalysisRequest, limits: &Limits) -> ApiResult<WeightsJson> {
    let arr = req.array(limits)?;
    Ok(WeightsJson::build(&arr, &weight_table(&arr)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FailureJson {
    pub removed: u32,
    pub holes: Vec<u32>,
}

impl From<&FailureOutcome> for FailureJson {
    fn from(o: &FailureOutcome) -> Self {
        Self {
            removed: o.removed_position,
            holes: o.residual_holes.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioJson {
    pub num: usize,
    pub den: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportJson {
    pub verdict: &'static str,
    pub ddb: bool,
    pub hes: Vec<u32>,
    pub essential: Vec<u32>,
    pub fragility: RatioJson,
    pub failures: Vec<FailureJson>,
    /// Raw sweep of a non-DDB array, present only when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exploratory_failures: Option<Vec<FailureJson>>,
}

impl From<&RobustnessReport> for ReportJson {
    fn from(r: &RobustnessReport) -> Self {
        Self {
            verdict: r.verdict.as_str(),
            ddb: r.ddb_satisfied,
            hes: r.hes_positions.clone(),
            essential: r.essential_positions.clone(),
            fragility: RatioJson {
                num: r.fragility.essential,
                den: r.fragility.sensors,
            },
            failures: r.failure_outcomes.iter().map(FailureJson::from).collect(),
            exploratory_failures: None,
        }
    }
}

pub fn analyze(
    req: &AnalysisRequest,
    limits: &Limits,
) -> ApiResult<(SensorArray, RobustnessReport, ReportJson)> {
    let arr = req.array(limits)?;
    let report = classify(&arr)?;
    let mut json = ReportJson::from(&report);
    if req.options.include_sweep_on_non_ddb && !report.ddb_satisfied && arr.n_sensors() >= 3 {
        json.exploratory_failures = Some(
            single_failure_sweep(&arr)?
                .iter()
                .map(FailureJson::from)
                .collect(),
        );
    }
    Ok((arr, report, json))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub m_star: usize,
    pub p_star: usize,
    pub ies: Vec<u32>,
    pub positions: Vec<u32>,
    pub aperture: u32,
}

pub fn family(n: usize, limits: &Limits) -> ApiResult<FamilyJson> {
    let (m, p) = optimal_params(n)?;
    let aperture = family_aperture(m, p) as u64;
    if aperture > limits.max_aperture {
        return Err(coarray_core::Error::ApertureTooLarge {
            aperture,
            cap: limits.max_aperture,
        }
        .into());
    }
    let cfg = generate_2fra(n)?;
    Ok(FamilyJson {
        n,
        m_star: cfg.m_star,
        p_star: cfg.p_star,
        ies: cfg.ies_word,
        aperture: cfg.positions.aperture(),
        positions: cfg.positions.positions().to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRowJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub positions: Vec<u32>,
    pub verdict: &'static str,
    pub hes: Vec<u32>,
    pub aperture: u32,
}

impl From<&ScanRow> for ScanRowJson {
    fn from(r: &ScanRow) -> Self {
        Self {
            n: r.n_sensors,
            positions: r.positions.positions().to_vec(),
            verdict: r.verdict.as_str(),
            hes: r.hes_positions.clone(),
            aperture: r.aperture,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryJson {
    pub fraction_with_hes: RatioJson,
    pub fraction: f64,
    pub pattern_verified: bool,
    pub first_violation: Option<usize>,
    pub rows_checked: usize,
}

impl From<&PeriodicitySummary> for SummaryJson {
    fn from(s: &PeriodicitySummary) -> Self {
        Self {
            fraction_with_hes: RatioJson {
                num: s.fraction_with_hes.with_hes,
                den: s.fraction_with_hes.total,
            },
            fraction: s.fraction_with_hes.as_f64(),
            pattern_verified: s.pattern_verified,
            first_violation: s.first_violation,
            rows_checked: s.rows_checked,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanJson {
    pub rows: Vec<ScanRowJson>,
    pub summary: SummaryJson,
}

/// Generates and classifies every family member in `from..=to`, in parallel.
pub fn scan(from: usize, to: usize, limits: &Limits) -> ApiResult<(Vec<ScanRow>, ScanJson)> {
    if from < MIN_FAMILY_SENSORS {
        return Err(coarray_core::Error::NTooSmall(from).into());
    }
    if from > to {
        return Err(coarray_core::Error::InvalidRange { from, to }.into());
    }
    if to > limits.scan_ceiling || to - from > limits.max_scan_span {
        return Err(ApiError::new(
            ErrorKind::Domain,
            "SCAN_LIMIT_EXCEEDED",
            format!(
                "scan {from}..={to} exceeds the limits (N <= {}, span <= {})",
                limits.scan_ceiling, limits.max_scan_span
            ),
        ));
    }
    let rows: Vec<ScanRow> = (from..=to)
        .into_par_iter()
        .map(scan_row)
        .collect::<Result<_, _>>()?;
    let summary = periodicity_report(&rows)?;
    let json = ScanJson {
        rows: rows.iter().map(ScanRowJson::from).collect(),
        summary: SummaryJson::from(&summary),
    };
    Ok((rows, json))
}

fn default_fail_sets() -> Vec<Vec<i64>> {
    vec![Vec::new()]
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoaRequest {
    pub array: String,
    /// Failure sets in the coordinates of `array` as entered.
    #[serde(default = "default_fail_sets")]
    pub fail: Vec<Vec<i64>>,
    #[serde(default)]
    pub sources: Option<Vec<f64>>,
    #[serde(default)]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub snapshots: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub grid_step: Option<f64>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub allow_edge: bool,
}

impl DoaRequest {
    pub fn new(array: impl Into<String>) -> Self {
        Self {
            array: array.into(),
            fail: default_fail_sets(),
            sources: None,
            snr_db: None,
            snapshots: None,
            seed: None,
            grid_step: None,
            tolerance: None,
            allow_edge: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchJson {
    #[serde(rename = "true")]
    pub true_deg: f64,
    pub detected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoaResultJson {
    pub failed: Vec<u32>,
    pub central_ula_bound: u32,
    pub grid: Vec<f64>,
    pub spectrum_db: Vec<f64>,
    pub peaks: Vec<f64>,
    pub matched: Vec<MatchJson>,
    pub missed: Vec<f64>,
    pub ghosts: Vec<f64>,
    pub rmse: Option<f64>,
}

impl From<&DoaResult> for DoaResultJson {
    fn from(r: &DoaResult) -> Self {
        Self {
            failed: r.failed_positions.clone(),
            central_ula_bound: r.spectrum.central_ula_bound,
            grid: r.spectrum.grid_deg.clone(),
            spectrum_db: r.spectrum.normalized_db(),
            peaks: r.spectrum.peaks_deg.clone(),
            matched: r
                .matching
                .matched
                .iter()
                .map(|&(t, d)| MatchJson {
                    true_deg: t,
                    detected: d,
                })
                .collect(),
            missed: r.matching.missed.clone(),
            ghosts: r.matching.ghosts.clone(),
            rmse: r.matching.rmse_deg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioJson {
    pub positions: Vec<u32>,
    pub sources: Vec<f64>,
    /// `null` when noise is disabled.
    pub snr_db: Option<f64>,
    pub snapshots: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoaJson {
    pub scenario: ScenarioJson,
    pub results: Vec<DoaResultJson>,
}

/// Runs one scenario per failure set on the same field realization.
pub fn doa(req: &DoaRequest, limits: &Limits) -> ApiResult<(Vec<DoaResult>, DoaJson)> {
    let raw = parse_positions(&req.array)?;
    let array = SensorArray::with_max_aperture(&raw, limits.max_aperture)?;
    let offset = raw.iter().copied().min().unwrap_or(0);
    let l = array.aperture();

    let mut failure_sets = Vec::with_capacity(req.fail.len());
    for set in &req.fail {
        let mut shifted = Vec::with_capacity(set.len());
        for &p in set {
            let q = p - offset;
            if q < 0 || q > l as i64 || !array.contains(q as u32) {
                return Err(ApiError::new(
                    ErrorKind::Domain,
                    "POSITION_NOT_IN_ARRAY",
                    format!("position {p} is not a sensor of the array"),
                ));
            }
            let q = q as u32;
            if !req.allow_edge && (q == 0 || q == l) {
                return Err(ApiError::new(
                    ErrorKind::Domain,
                    "EDGE_SENSOR_FAILURE",
                    format!(
                        "sensor {p} is an edge sensor; failing it needs allow_edge (--allow-edge)"
                    ),
                ));
            }
            shifted.push(q);
        }
        shifted.sort_unstable();
        shifted.dedup();
        failure_sets.push(shifted);
    }
    if failure_sets.is_empty() {
        return Err(ApiError::bad_request(
            "at least one failure set is required",
        ));
    }

    let opts = MusicOptions {
        grid_step_deg: req.grid_step.unwrap_or(DEFAULT_GRID_STEP_DEG),
        match_tolerance_deg: req.tolerance.unwrap_or(DEFAULT_MATCH_TOLERANCE_DEG),
    };
    if !(opts.match_tolerance_deg.is_finite() && opts.match_tolerance_deg >= 0.0) {
        return Err(ApiError::bad_request(
            "tolerance must be a non-negative number",
        ));
    }
    let step = opts.grid_step_deg;
    if !(step.is_finite() && step > 0.0 && step <= 45.0) {
        // Reports the core's own validation error.
        angle_grid(step)?;
    }
    // Counted, not built: a tiny step must not allocate before being refused.
    let grid_len = 2.0 * ((90.0 / step - 1e-9).ceil() - 1.0) + 1.0;
    let points = (grid_len * failure_sets.len() as f64).min(usize::MAX as f64) as usize;
    let snapshots = req.snapshots.unwrap_or(DEFAULT_SNAPSHOTS);
    if points > limits.max_doa_points || snapshots > limits.max_snapshots {
        return Err(ApiError::new(
            ErrorKind::Domain,
            "RESPONSE_TOO_LARGE",
            format!(
                "request needs {points} spectrum points and {snapshots} snapshots; limits are {} and {}",
                limits.max_doa_points, limits.max_snapshots
            ),
        ));
    }

    let mut base = DoaScenario::new(
        array.clone(),
        req.sources
            .clone()
            .unwrap_or_else(coarray_core::doa::reference_source_angles),
    );
    base.snr_db = req.snr_db.unwrap_or(DEFAULT_SNR_DB);
    base.n_snapshots = snapshots;
    base.rng_seed = req.seed.unwrap_or(0);
    base.validate()?;
    // Reject before simulating: K x T source symbols can be large.
    let k = base.source_angles_deg.len();
    for failed in &failure_sets {
        let survivors = base.with_failed(failed).surviving()?;
        let bound = coarray_profile(&weight_table(&survivors)).central_ula_bound;
        if k > bound as usize {
            return Err(coarray_core::Error::RankDeficient { sources: k, bound }.into());
        }
    }

    let results: Vec<DoaResult> = failure_sets
        .par_iter()
        .map(|failed| run_scenario(&base.with_failed(failed), &opts))
        .collect::<Result<_, _>>()?;

    let json = DoaJson {
        scenario: ScenarioJson {
            positions: array.positions().to_vec(),
            sources: base.source_angles_deg.clone(),
            snr_db: base.snr_db.is_finite().then_some(base.snr_db),
            snapshots: base.n_snapshots,
            seed: base.rng_seed,
            grid_step: opts.grid_step_deg,
            tolerance: opts.match_tolerance_deg,
        },
        results: results.iter().map(DoaResultJson::from).collect(),
    };
    Ok((results, json))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_shape() {
        let w = weights(&AnalysisRequest::new("[0 1]"), &Limits::default()).unwrap();
        assert_eq!(w.lags, vec![-1, 0, 1]);
        assert_eq!(w.weights, vec![1, 2, 1]);
        let misc = weights(&AnalysisRequest::new("[0 1 2 6 10 13]"), &Limits::default()).unwrap();
        assert_eq!(misc.lags.len(), 27);
        assert!(misc.weights.iter().all(|&w| w > 0));
    }

    #[test]
    fn request_cap_only_lowers() {
        let mut req = AnalysisRequest::new("[0 50]");
        req.options.max_aperture = Some(10);
        assert_eq!(
            weights(&req, &Limits::default()).unwrap_err().code(),
            "APERTURE_TOO_LARGE"
        );
        req.options.max_aperture = Some(1_000_000);
        let limits = Limits {
            max_aperture: 40,
            ..Limits::default()
        };
        assert_eq!(
            weights(&req, &limits).unwrap_err().code(),
            "APERTURE_TOO_LARGE"
        );
    }

    #[test]
    fn exploratory_sweep_is_opt_in() {
        let mut req = AnalysisRequest::new("[0 1 2 6 10 13]");
        let (_, _, json) = analyze(&req, &Limits::default()).unwrap();
        assert!(json.exploratory_failures.is_none());
        assert!(json.failures.is_empty());
        req.options.include_sweep_on_non_ddb = true;
        let (_, _, json) = analyze(&req, &Limits::default()).unwrap();
        assert_eq!(json.verdict, "NOT_DDB");
        assert!(json.failures.is_empty());
        assert_eq!(json.exploratory_failures.unwrap().len(), 4);
    }

    #[test]
    fn scan_limits() {
        let limits = Limits::default();
        assert_eq!(scan(3, 5, &limits).unwrap_err().code(), "N_TOO_SMALL");
        assert_eq!(scan(10, 9, &limits).unwrap_err().code(), "INVALID_RANGE");
        assert_eq!(
            scan(6, 501, &limits).unwrap_err().code(),
            "SCAN_LIMIT_EXCEEDED"
        );
        let tight = Limits {
            max_scan_span: 3,
            ..limits
        };
        assert_eq!(
            scan(6, 10, &tight).unwrap_err().code(),
            "SCAN_LIMIT_EXCEEDED"
        );
        let (rows, json) = scan(6, 30, &limits).unwrap();
        assert_eq!(rows.len(), 25);
        assert_eq!(json.rows[3].hes, vec![6]);
        assert_eq!(json.summary.fraction_with_hes.num, 16);
    }

    #[test]
    fn family_rows() {
        let f = family(9, &Limits::default()).unwrap();
        assert_eq!(f.positions, vec![0, 1, 5, 6, 12, 13, 14, 15, 16]);
        assert_eq!((f.m_star, f.p_star), (1, 4));
        assert_eq!(
            family(4, &Limits::default()).unwrap_err().code(),
            "N_TOO_SMALL"
        );
        assert_eq!(
            family(5000, &Limits::default()).unwrap_err().code(),
            "APERTURE_TOO_LARGE"
        );
    }

    #[test]
    fn doa_failure_sets_use_input_coordinates() {
        let mut req = DoaRequest::new("[2 3 6 8 9]");
        req.sources = Some(vec![10.0]);
        req.snapshots = Some(50);
        req.grid_step = Some(1.0);
        req.fail = vec![vec![], vec![6]];
        let (results, json) = doa(&req, &Limits::default()).unwrap();
        assert_eq!(results[1].failed_positions, vec![4]);
        assert_eq!(json.results[1].failed, vec![4]);

        req.fail = vec![vec![2]];
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "EDGE_SENSOR_FAILURE"
        );
        req.allow_edge = true;
        assert!(doa(&req, &Limits::default()).is_ok());
        req.fail = vec![vec![5]];
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "POSITION_NOT_IN_ARRAY"
        );
        req.fail = vec![];
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "BAD_REQUEST"
        );
    }

    #[test]
    fn doa_size_cap() {
        let mut req = DoaRequest::new("[0 1 2 3]");
        req.sources = Some(vec![0.0]);
        req.grid_step = Some(0.001);
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "RESPONSE_TOO_LARGE"
        );
        req.grid_step = Some(1e-12);
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "RESPONSE_TOO_LARGE"
        );
        req.grid_step = Some(0.0);
        assert_eq!(
            doa(&req, &Limits::default()).unwrap_err().code(),
            "INVALID_SCENARIO"
        );
        req.grid_step = Some(0.1);
        assert_eq!(
            angle_grid(0.1).unwrap().len(),
            2 * ((90.0f64 / 0.1 - 1e-9).ceil() as usize - 1) + 1
        );
    }
}
