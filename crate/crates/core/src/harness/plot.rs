use std::fmt::Write as _;
use std::path::Path;

use super::{Outcome, SweepResult};
use crate::error::{Error, Result};
use crate::estimate::Method;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 300.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 28.0;
const MARGIN_B: f64 = 40.0;
const COLUMNS: usize = 2;

fn color(method: Method) -> &'static str {
    match method {
        Method::BatchMeans => "#1f77b4",
        Method::SpectrumFit => "#ff7f0e",
        Method::Ips => "#8c564b",
        Method::Ims => "#9467bd",
        Method::Ics => "#2ca02c",
        Method::ArProcess => "#d62728",
    }
}

struct LogAxis {
    lo: f64,
    hi: f64,
    start: f64,
    span: f64,
}

impl LogAxis {
    fn new(lo: f64, hi: f64, start: f64, span: f64) -> Self {
        let (mut lo, mut hi) = (lo.log10(), hi.log10());
        if hi - lo < 1e-9 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { lo, hi, start, span }
    }

    fn map(&self, v: f64) -> f64 {
        self.start + (v.log10() - self.lo) / (self.hi - self.lo) * self.span
    }

    fn decades(&self) -> impl Iterator<Item = i32> {
        (self.lo.ceil() as i32)..=(self.hi.floor() as i32)
    }
}

/// One panel per series: log-log length vs estimate, a trace per method and
/// seed broken at failed cells, interval bars when present, and a dashed
/// line at the reference value.
pub fn emit_plot(result: &SweepResult, path: impl AsRef<Path>) -> Result<()> {
    if result.rows.is_empty() {
        return Err(Error::InvalidArgument("nothing to plot".into()));
    }
    let series = result.series();
    let rows_n = series.len().div_ceil(COLUMNS);
    let cols = series.len().min(COLUMNS);
    let mut svg = String::new();
    let (w, h) = (cols as f64 * PANEL_W, rows_n as f64 * PANEL_H + 30.0);
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();

    let mut methods: Vec<Method> = Vec::new();
    for r in &result.rows {
        if !methods.contains(&r.method) {
            methods.push(r.method);
        }
    }
    for (i, m) in methods.iter().enumerate() {
        let x = 10.0 + 110.0 * i as f64;
        writeln!(
            svg,
            r#"<g class="legend"><rect x="{x}" y="{}" width="12" height="4" fill="{}"/><text x="{}" y="{}">{}</text></g>"#,
            h - 18.0,
            color(*m),
            x + 16.0,
            h - 13.0,
            m
        )
        .unwrap();
    }

    for (idx, kind) in series.iter().enumerate() {
        let ox = (idx % COLUMNS) as f64 * PANEL_W;
        let oy = (idx / COLUMNS) as f64 * PANEL_H;
        let rows: Vec<_> = result.rows.iter().filter(|r| r.series == *kind).collect();
        let truth = result.truth.get(kind).map(|t| t.tau_true);

        let (mut xmin, mut xmax) = (f64::INFINITY, 0.0f64);
        let (mut ymin, mut ymax) = (f64::INFINITY, 0.0f64);
        for r in &rows {
            xmin = xmin.min(r.length as f64);
            xmax = xmax.max(r.length as f64);
            if let Outcome::Ok { tau, interval, .. } = &r.outcome {
                let mut vals = vec![*tau];
                if let Some((lo, hi)) = interval {
                    vals.extend([*lo, *hi]);
                }
                for v in vals.into_iter().filter(|v| *v > 0.0 && v.is_finite()) {
                    ymin = ymin.min(v);
                    ymax = ymax.max(v);
                }
            }
        }
        if let Some(t) = truth {
            ymin = ymin.min(t);
            ymax = ymax.max(t);
        }
        if !ymin.is_finite() {
            ymin = 1.0;
            ymax = 1.0;
        }
        let x_axis = LogAxis::new(xmin, xmax, ox + MARGIN_L, PANEL_W - MARGIN_L - MARGIN_R);
        let y_axis = LogAxis::new(ymax * 1.5, ymin / 1.5, oy + MARGIN_T, PANEL_H - MARGIN_T - MARGIN_B);
        let (left, right) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
        let (top, bottom) = (oy + MARGIN_T, oy + PANEL_H - MARGIN_B);

        writeln!(svg, r#"<g class="panel" data-series="{kind}">"#).unwrap();
        writeln!(
            svg,
            r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            right - left,
            bottom - top
        )
        .unwrap();
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-weight="bold">{kind}</text>"#,
            (left + right) / 2.0,
            oy + 18.0
        )
        .unwrap();
        for d in x_axis.decades() {
            let x = x_axis.map(10f64.powi(d));
            writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
                bottom + 4.0,
                bottom + 16.0
            )
            .unwrap();
        }
        for d in y_axis.decades() {
            let y = y_axis.map(10f64.powi(d));
            writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{y:.2}" x2="{left:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
                left - 4.0,
                left - 6.0,
                y + 4.0
            )
            .unwrap();
        }
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">subsequence length</text>"#,
            (left + right) / 2.0,
            bottom + 32.0
        )
        .unwrap();
        if let Some(t) = truth {
            let y = y_axis.map(t);
            writeln!(
                svg,
                r##"<line class="truth" x1="{left:.2}" y1="{y:.2}" x2="{right:.2}" y2="{y:.2}" stroke="#444" stroke-dasharray="6,4"/>"##
            )
            .unwrap();
        }

        let mut seeds: Vec<u64> = Vec::new();
        for r in &rows {
            if !seeds.contains(&r.seed) {
                seeds.push(r.seed);
            }
        }
        for &m in &methods {
            for &seed in &seeds {
                let mut trace: Vec<_> = rows
                    .iter()
                    .filter(|r| r.method == m && r.seed == seed)
                    .collect();
                trace.sort_by_key(|r| r.length);
                let mut segment: Vec<(f64, f64)> = Vec::new();
                let mut segments = Vec::new();
                for r in &trace {
                    match r.outcome.tau() {
                        Some(tau) if tau > 0.0 && tau.is_finite() => {
                            segment.push((x_axis.map(r.length as f64), y_axis.map(tau)))
                        }
                        _ => segments.push(std::mem::take(&mut segment)),
                    }
                }
                segments.push(segment);
                for seg in segments.iter().filter(|s| s.len() >= 2) {
                    let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                    writeln!(
                        svg,
                        r#"<polyline class="trace" data-method="{m}" points="{}" fill="none" stroke="{}" stroke-opacity="0.8"/>"#,
                        pts.join(" "),
                        color(m)
                    )
                    .unwrap();
                }
                for r in &trace {
                    if let Outcome::Ok { tau, interval, .. } = &r.outcome {
                        if !(*tau > 0.0 && tau.is_finite()) {
                            continue;
                        }
                        let x = x_axis.map(r.length as f64);
                        if let Some((lo, hi)) = interval {
                            if *lo > 0.0 && hi.is_finite() {
                                writeln!(
                                    svg,
                                    r#"<line class="interval" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{}"/>"#,
                                    y_axis.map(*lo),
                                    y_axis.map(*hi),
                                    color(m)
                                )
                                .unwrap();
                            }
                        }
                        writeln!(
                            svg,
                            r#"<circle class="estimate" data-method="{m}" cx="{x:.2}" cy="{:.2}" r="2" fill="{}"/>"#,
                            y_axis.map(*tau),
                            color(m)
                        )
                        .unwrap();
                    }
                }
            }
        }
        writeln!(svg, "</g>").unwrap();
    }
    writeln!(svg, "</svg>").unwrap();
    std::fs::write(path.as_ref(), svg)?;
    Ok(())
}
