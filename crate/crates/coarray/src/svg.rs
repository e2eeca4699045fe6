//! Minimal standalone SVG plots: weight-function stems and DOA spectra.

use std::fmt::Write as _;

use crate::api::{DoaJson, WeightsJson};

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 60.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn header(s: &mut String, title: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="18" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn axes(s: &mut String, f: &Frame, xticks: &[f64], yticks: &[f64], xlabel: &str, ylabel: &str) {
    for &x in xticks {
        let px = f.px(x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#ddd"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{x}</text>"##,
            MARGIN_T,
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 15.0
        );
    }
    for &y in yticks {
        let py = f.py(y);
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN_L}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{y}</text>"##,
            WIDTH - MARGIN_R,
            MARGIN_L - 5.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        WIDTH - MARGIN_L - MARGIN_R,
        HEIGHT - MARGIN_T - MARGIN_B
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{:.2}" text-anchor="middle" transform="rotate(-90 15 {:.2})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
}

/// Ticks at multiples of `step` covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn nice_step(span: f64, target: f64) -> f64 {
    let raw = (span / target).max(1.0);
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|k| k * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

/// Stem plot of `w(m)` over `[-L, L]`, x ticks every 10 lags.
pub fn weights_svg(w: &WeightsJson) -> String {
    let l = w.aperture.max(1) as f64;
    let ymax = w.weights.iter().copied().max().unwrap_or(1) as f64;
    let f = Frame {
        x0: -l - 0.5,
        x1: l + 0.5,
        y0: 0.0,
        y1: ymax * 1.08,
    };
    let mut s = String::new();
    header(
        &mut s,
        &format!("Weight function, N = {}, L = {}", w.n_sensors, w.aperture),
    );
    let xstep = if l > 200.0 {
        nice_step(2.0 * l, 20.0).max(10.0)
    } else {
        10.0
    };
    axes(
        &mut s,
        &f,
        &ticks(-l, l, xstep),
        &ticks(0.0, ymax, nice_step(ymax, 8.0)),
        "lag m",
        "w(m)",
    );
    let base = f.py(0.0);
    for (&m, &wt) in w.lags.iter().zip(&w.weights) {
        let x = f.px(m as f64);
        if wt == 0 {
            let _ = writeln!(
                s,
                r##"<circle cx="{x:.2}" cy="{base:.2}" r="2.5" fill="none" stroke="#d62728"/>"##
            );
            continue;
        }
        let y = f.py(wt as f64);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{base:.2}" x2="{x:.2}" y2="{y:.2}" stroke="#1f77b4"/><circle cx="{x:.2}" cy="{y:.2}" r="2" fill="#1f77b4"/>"##
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Normalized spectra of every result, with dashed markers at the true angles.
pub fn doa_svg(d: &DoaJson) -> String {
    let floor = d
        .results
        .iter()
        .flat_map(|r| r.spectrum_db.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::min)
        .max(-80.0);
    let ylo = (floor / 10.0).floor() * 10.0 - 5.0;
    let f = Frame {
        x0: -90.0,
        x1: 90.0,
        y0: ylo,
        y1: 5.0,
    };
    let mut s = String::new();
    header(&mut s, "Coarray MUSIC pseudospectrum");
    axes(
        &mut s,
        &f,
        &ticks(-90.0, 90.0, 15.0),
        &ticks(ylo, 0.0, nice_step(-ylo, 8.0)),
        "angle (deg)",
        "normalized spectrum (dB)",
    );
    for &a in &d.scenario.sources {
        let x = f.px(a);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{MARGIN_T}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-dasharray="3,3" stroke-opacity="0.6"/>"#,
            HEIGHT - MARGIN_B
        );
    }
    for (i, r) in d.results.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut path = String::new();
        for (k, (&a, &v)) in r.grid.iter().zip(&r.spectrum_db).enumerate() {
            let v = if v.is_finite() { v.max(ylo) } else { ylo };
            let _ = write!(
                path,
                "{}{:.2},{:.2}",
                if k == 0 { "M" } else { " L" },
                f.px(a),
                f.py(v)
            );
        }
        let _ = writeln!(
            s,
            r#"<path d="{path}" fill="none" stroke="{color}" stroke-width="1.2"/>"#
        );
        let label = if r.failed.is_empty() {
            "healthy".to_string()
        } else {
            format!(
                "failed {}",
                r.failed
                    .iter()
                    .map(u32::to_string)
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        let ly = MARGIN_T + 15.0 + 14.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - MARGIN_R - 150.0,
            WIDTH - MARGIN_R - 130.0,
            WIDTH - MARGIN_R - 125.0,
            ly + 4.0,
            escape(&label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::api::{self, AnalysisRequest, DoaRequest, Limits};

    #[test]
    fn weights_plot_has_a_stem_per_lag() {
        let w = api::weights(&AnalysisRequest::new("[0 1 4]"), &Limits::default()).unwrap();
        let svg = weights_svg(&w);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        // 7 present lags get stems, the two holes get open markers
        assert_eq!(svg.matches("r=\"2\"").count(), 7);
        assert_eq!(svg.matches("r=\"2.5\"").count(), 2);
    }

    #[test]
    fn doa_plot_has_one_path_per_result() {
        let mut req = DoaRequest::new("[0 1 2 3 4 5]");
        req.sources = Some(vec![-10.0, 20.0]);
        req.fail = vec![vec![], vec![2]];
        req.grid_step = Some(0.5);
        req.snapshots = Some(100);
        let (_, d) = api::doa(&req, &Limits::default()).unwrap();
        let svg = doa_svg(&d);
        assert_eq!(svg.matches("<path").count(), 2);
        assert_eq!(svg.matches("stroke-dasharray").count(), 2);
        assert!(svg.contains("failed 2"));
    }

    #[test]
    fn nice_steps() {
        assert_eq!(nice_step(10.0, 8.0), 2.0);
        assert_eq!(nice_step(3.0, 8.0), 1.0);
        assert_eq!(nice_step(400.0, 20.0), 20.0);
    }
}
