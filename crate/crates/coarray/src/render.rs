//! Human-readable text and CSV renderings of the API responses.

use std::fmt::Write as _;

use coarray_core::Verdict;

use crate::api::{DoaJson, FamilyJson, ReportJson, ScanJson, WeightsJson};

/// Scan rows above this N print without their position lists.
pub const HUMAN_POSITIONS_MAX_N: usize = 60;

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn list_or_nil(items: &[u32]) -> String {
    if items.is_empty() {
        "Nil".to_string()
    } else {
        join(items, ", ")
    }
}

fn verdict_of(s: &str) -> Verdict {
    match s {
        "NOT_DDB" => Verdict::NotDdb,
        "DDB_WITH_HES" => Verdict::DdbWithHes,
        _ => Verdict::True2fra,
    }
}

fn csv_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
}

pub fn weights_human(w: &WeightsJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "positions: [{}]", join(&w.positions, " "));
    let _ = writeln!(s, "sensors: {}  aperture: {}", w.n_sensors, w.aperture);
    let _ = writeln!(s, "lag  weight");
    for (lag, wt) in w.lags.iter().zip(&w.weights).filter(|(&l, _)| l >= 0) {
        let _ = writeln!(s, "{lag:>3}  {wt}");
    }
    let _ = writeln!(s, "holes: {}", list_or_nil(&w.holes));
    let _ = writeln!(
        s,
        "hole-free: {}  central segment: [-{b}, {b}]",
        if w.hole_free { "yes" } else { "no" },
        b = w.central_ula_bound
    );
    s
}

pub fn weights_csv(w: &WeightsJson) -> String {
    csv_string(|out| {
        out.write_record(["lag", "weight"])?;
        for (lag, wt) in w.lags.iter().zip(&w.weights) {
            out.write_record([lag.to_string(), wt.to_string()])?;
        }
        Ok(())
    })
}

pub fn report_human(positions: &[u32], r: &ReportJson) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "array: [{}]", join(positions, " "));
    let _ = writeln!(s, "verdict: {}", r.verdict);
    let _ = writeln!(s, "{}", verdict_of(r.verdict).description());
    let _ = writeln!(
        s,
        "double difference: {}",
        if r.ddb { "satisfied" } else { "not satisfied" }
    );
    let _ = writeln!(s, "hidden essential sensors: {}", list_or_nil(&r.hes));
    let _ = writeln!(s, "essential sensors: {}", list_or_nil(&r.essential));
    let _ = writeln!(
        s,
        "fragility: {}/{} = {:.4}",
        r.fragility.num,
        r.fragility.den,
        r.fragility.num as f64 / r.fragility.den as f64
    );
    let sweep = if r.failures.is_empty() {
        r.exploratory_failures.as_deref().unwrap_or(&[])
    } else {
        &r.failures
    };
    if !sweep.is_empty() {
        let _ = writeln!(s, "single failures:");
        for f in sweep {
            let _ = writeln!(
                s,
                "  remove {:>4}: holes {}",
                f.removed,
                list_or_nil(&f.holes)
            );
        }
    }
    s
}

pub fn report_csv(r: &ReportJson) -> String {
    let sweep = if r.failures.is_empty() {
        r.exploratory_failures.as_deref().unwrap_or(&[])
    } else {
        &r.failures
    };
    csv_string(|out| {
        out.write_record(["removed", "holes", "essential"])?;
        for f in sweep {
            out.write_record([
                f.removed.to_string(),
                join(&f.holes, ";"),
                (!f.holes.is_empty()).to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn family_human(f: &FamilyJson) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "N = {}  m* = {}  p* = {}  aperture = {}",
        f.n, f.m_star, f.p_star, f.aperture
    );
    let _ = writeln!(s, "spacings: {{{}}}", join(&f.ies, ", "));
    let _ = writeln!(s, "positions: [{}]", join(&f.positions, " "));
    s
}

pub fn family_csv(f: &FamilyJson) -> String {
    csv_string(|out| {
        out.write_record(["N", "m_star", "p_star", "ies", "positions", "aperture"])?;
        out.write_record([
            f.n.to_string(),
            f.m_star.to_string(),
            f.p_star.to_string(),
            join(&f.ies, ";"),
            join(&f.positions, ";"),
            f.aperture.to_string(),
        ])
    })
}

pub fn scan_csv(scan: &ScanJson) -> String {
    csv_string(|out| {
        out.write_record(["N", "positions", "verdict", "hes", "aperture"])?;
        for r in &scan.rows {
            out.write_record([
                r.n.to_string(),
                join(&r.positions, ";"),
                r.verdict.to_string(),
                join(&r.hes, ";"),
                r.aperture.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn scan_summary(scan: &ScanJson) -> String {
    let sm = &scan.summary;
    let mut s = format!(
        "rows with HES: {}/{} ({:.4})\n",
        sm.fraction_with_hes.num, sm.fraction_with_hes.den, sm.fraction
    );
    if sm.rows_checked == 0 {
        s.push_str("periodicity: no rows with N >= 10\n");
    } else if sm.pattern_verified {
        let _ = writeln!(s, "periodicity: verified over {} rows", sm.rows_checked);
    } else {
        let _ = writeln!(
            s,
            "periodicity: violated at N = {}",
            sm.first_violation.unwrap_or_default()
        );
    }
    s
}

pub fn scan_human(scan: &ScanJson) -> String {
    let mut s = String::new();
    for r in &scan.rows {
        let _ = write!(
            s,
            "N = {:>3}  L = {:>5}  {:<12}  HES: {}",
            r.n,
            r.aperture,
            r.verdict,
            list_or_nil(&r.hes)
        );
        if r.n <= HUMAN_POSITIONS_MAX_N {
            let _ = write!(s, "  [{}]", join(&r.positions, " "));
        }
        s.push('\n');
    }
    s.push_str(&scan_summary(scan));
    s
}

fn fmt_angles(v: &[f64]) -> String {
    if v.is_empty() {
        return "none".to_string();
    }
    v.iter()
        .map(|a| format!("{a:.1}"))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn doa_human(d: &DoaJson) -> String {
    let mut s = String::new();
    let sc = &d.scenario;
    let _ = writeln!(s, "array: [{}]", join(&sc.positions, " "));
    let _ = writeln!(s, "sources: {}", fmt_angles(&sc.sources));
    let snr = sc.snr_db.map_or("inf".to_string(), |v| format!("{v}"));
    let _ = writeln!(
        s,
        "snr: {snr} dB  snapshots: {}  seed: {}",
        sc.snapshots, sc.seed
    );
    for r in &d.results {
        let _ = writeln!(s);
        let failed = if r.failed.is_empty() {
            "none".to_string()
        } else {
            join(&r.failed, ", ")
        };
        let _ = writeln!(
            s,
            "failed: {failed}  (central segment Lc = {})",
            r.central_ula_bound
        );
        let _ = writeln!(s, "  peaks:   {}", fmt_angles(&r.peaks));
        let _ = writeln!(s, "  matched: {}/{}", r.matched.len(), sc.sources.len());
        let _ = writeln!(s, "  missed:  {}", fmt_angles(&r.missed));
        let _ = writeln!(s, "  ghosts:  {}", fmt_angles(&r.ghosts));
        match r.rmse {
            Some(e) => {
                let _ = writeln!(s, "  rmse:    {e:.3} deg");
            }
            None => {
                let _ = writeln!(s, "  rmse:    n/a");
            }
        }
    }
    s
}

/// One row per grid angle, one spectrum column per failure set.
pub fn doa_csv(d: &DoaJson) -> String {
    csv_string(|out| {
        let mut header = vec!["angle_deg".to_string()];
        for r in &d.results {
            header.push(if r.failed.is_empty() {
                "healthy_db".to_string()
            } else {
                format!("fail_{}_db", join(&r.failed, "_"))
            });
        }
        out.write_record(&header)?;
        let Some(first) = d.results.first() else {
            return Ok(());
        };
        for (i, angle) in first.grid.iter().enumerate() {
            let mut row = vec![angle.to_string()];
            row.extend(d.results.iter().map(|r| format!("{:.6}", r.spectrum_db[i])));
            out.write_record(&row)?;
        }
        Ok(())
    })
}
