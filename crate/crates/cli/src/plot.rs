//! Deterministic SVG plots of report files. Fixed canvas, fixed palette,
//! sorted series, no timestamps: identical input gives identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use fastcur::Report;

use crate::args::PlotKind;
use crate::error::{CliError, CliResult};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 160.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

pub fn read_reports(path: &Path) -> CliResult<Vec<Report>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let bad = |e: String| CliError::Usage(format!("{}: {e}", path.display()));
    if path.extension().is_some_and(|e| e == "csv") {
        csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<Result<Vec<Report>, _>>()
            .map_err(|e| bad(e.to_string()))
    } else {
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    /// Log scale when the positive values span at least two decades.
    fn fit(values: impl Iterator<Item = f64> + Clone, allow_log: bool) -> Axis {
        let lo = values.clone().fold(f64::INFINITY, f64::min);
        let hi = values.clone().fold(f64::NEG_INFINITY, f64::max);
        let min_pos = values.filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
        if allow_log && min_pos.is_finite() && hi / min_pos >= 100.0 {
            return Axis {
                lo: 10f64.powf(min_pos.log10().floor()),
                hi: 10f64.powf(hi.log10().ceil()),
                log: true,
            };
        }
        let (lo, hi) = if lo == hi {
            let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
            (lo - pad, hi + pad)
        } else {
            let pad = (hi - lo) * 0.05;
            (lo - pad, hi + pad)
        };
        Axis { lo, hi, log: false }
    }

    /// Position in [0, 1]; non-positive values sit at the bottom of a log axis.
    fn unit(&self, v: f64) -> f64 {
        if self.log {
            let v = v.max(self.lo);
            (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let (a, b) = (
                self.lo.log10().round() as i32,
                self.hi.log10().round() as i32,
            );
            let stride = ((b - a) / 8 + 1).max(1);
            (a..=b)
                .step_by(stride as usize)
                .map(|e| 10f64.powi(e))
                .collect()
        } else {
            let raw = (self.hi - self.lo) / 5.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step + 1e-9).floor() as i64;
            (first..=last).map(|i| i as f64 * step).collect()
        }
    }
}

fn label(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.log10().round() as i32)
    } else if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Series {
    name: String,
    points: Vec<(f64, f64)>,
    /// Join the points with a line (sorted by x).
    line: bool,
    dashed: bool,
}

struct Figure {
    title: String,
    xlabel: String,
    ylabel: String,
    series: Vec<Series>,
    allow_log_y: bool,
}

fn render(fig: &Figure) -> String {
    let all = fig.series.iter().flat_map(|s| s.points.iter().copied());
    let xa = Axis::fit(all.clone().map(|p| p.0), true);
    let ya = Axis::fit(all.map(|p| p.1), fig.allow_log_y);
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + xa.unit(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.unit(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&fig.title)
    );
    for t in xa.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + ph
        );
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 16.0,
            label(t, xa.log)
        );
    }
    for t in ya.ticks() {
        let y = py(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            label(t, ya.log)
        );
    }
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 14.0,
        escape(&fig.xlabel)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&fig.ylabel)
    );

    for (i, ser) in fig.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if ser.line && ser.points.len() > 1 {
            let mut pts = ser.points.clone();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let path: Vec<String> = pts
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
                .collect();
            let dash = if ser.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in &ser.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}" fill-opacity="0.7"/>"#,
                px(x),
                py(y)
            );
        }
        let ly = TOP + 12.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#,
            ly - 9.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}">{}</text>"#,
            lx + 16.0,
            escape(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn rel_err(r: &Report) -> f64 {
    r.rel_err_exact.unwrap_or(r.rel_err_sampled)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.0 > 0.0 && p.1 > 0.0)
        .map(|p| (p.0.ln(), p.1.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn figure_svg(reports: &[Report], kind: PlotKind, threshold: f64) -> CliResult<String> {
    if reports.is_empty() {
        return Err(CliError::Usage("no reports to plot".into()));
    }
    let mut groups: BTreeMap<String, Vec<&Report>> = BTreeMap::new();
    for r in reports {
        groups.entry(r.algorithm.clone()).or_default().push(r);
    }
    let fig = match kind {
        PlotKind::ErrorVsK => Figure {
            title: "relative error vs k".into(),
            xlabel: "k (sampled rows)".into(),
            ylabel: "relative error".into(),
            series: groups
                .iter()
                .map(|(name, rs)| Series {
                    name: name.clone(),
                    points: rs.iter().map(|r| (r.k as f64, rel_err(r))).collect(),
                    line: false,
                    dashed: false,
                })
                .collect(),
            allow_log_y: true,
        },
        PlotKind::FlopsVsN => {
            let series: Vec<Series> = groups
                .iter()
                .map(|(name, rs)| {
                    let points: Vec<(f64, f64)> =
                        rs.iter().map(|r| (r.n as f64, r.flops as f64)).collect();
                    let name = match loglog_slope(&points) {
                        Some(k) => format!("{name} (slope {k:.2})"),
                        None => name.clone(),
                    };
                    Series {
                        name,
                        points,
                        line: true,
                        dashed: false,
                    }
                })
                .collect();
            Figure {
                title: "flops vs n".into(),
                xlabel: "n (columns)".into(),
                ylabel: "flops".into(),
                series,
                allow_log_y: true,
            }
        }
        PlotKind::SuccessVsB => {
            let mut series = Vec::new();
            let mut gaussian: Vec<bool> = Vec::new();
            for (name, rs) in &groups {
                let mut by_b: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
                for r in rs {
                    let ok = rel_err(r) <= threshold;
                    match r.b {
                        Some(b) => {
                            let e = by_b.entry(b).or_default();
                            e.0 += ok as usize;
                            e.1 += 1;
                        }
                        None => gaussian.push(ok),
                    }
                }
                if !by_b.is_empty() {
                    series.push(Series {
                        name: name.clone(),
                        points: by_b
                            .iter()
                            .map(|(&b, &(ok, n))| (b as f64, ok as f64 / n as f64))
                            .collect(),
                        line: true,
                        dashed: false,
                    });
                }
            }
            if !gaussian.is_empty() {
                let rate = gaussian.iter().filter(|&&o| o).count() as f64 / gaussian.len() as f64;
                let xs: Vec<f64> = series
                    .iter()
                    .flat_map(|s| s.points.iter().map(|p| p.0))
                    .collect();
                let lo = xs.iter().copied().fold(0.0, f64::min);
                let hi = xs.iter().copied().fold(1.0, f64::max);
                series.push(Series {
                    name: "gaussian".into(),
                    points: vec![(lo, rate), (hi, rate)],
                    line: true,
                    dashed: true,
                });
            }
            Figure {
                title: format!("success rate (error <= {threshold:e}) vs b"),
                xlabel: "b (bidiagonal factors)".into(),
                ylabel: "success rate".into(),
                series,
                allow_log_y: false,
            }
        }
    };
    Ok(render(&fig))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_scaling() {
        assert!(!Axis::fit([1.0, 50.0].into_iter(), true).log);
        let a = Axis::fit([1e-12, 1e-3].into_iter(), true);
        assert!(a.log);
        assert_eq!((a.lo, a.hi), (1e-12, 1e-3));
        assert!(!Axis::fit([1e-12, 1e-3].into_iter(), false).log);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [100.0, 200.0, 400.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n))
            .collect();
        assert!((loglog_slope(&pts).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_ticks_are_round() {
        let a = Axis {
            lo: 0.0,
            hi: 1.0,
            log: false,
        };
        let labels: Vec<String> = a.ticks().into_iter().map(|t| label(t, false)).collect();
        assert_eq!(labels, ["0", "0.2", "0.4", "0.6", "0.8", "1"]);
    }
}
