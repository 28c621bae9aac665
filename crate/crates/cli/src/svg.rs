//! Minimal deterministic SVG line plots: stacked panels sharing an x axis,
//! optional shaded x-intervals and vertical error bars.

use std::fmt::Write as _;

use chrono::NaiveDate;

const WIDTH: f64 = 900.0;
const PANEL_HEIGHT: f64 = 220.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 36.0;
const PANEL_GAP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 40.0;
const PALETTE: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XAxis {
    Number,
    /// x values are days since this date.
    Days(NaiveDate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mark {
    Line,
    Points,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Half-widths of vertical error bars, if any.
    pub errors: Option<Vec<f64>>,
    pub mark: Mark,
}

impl Series {
    pub fn line(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self { label: label.into(), xs, ys, errors: None, mark: Mark::Line }
    }

    pub fn points(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Self { mark: Mark::Points, ..Self::line(label, xs, ys) }
    }

    pub fn with_errors(mut self, errors: Vec<f64>) -> Self {
        self.errors = Some(errors);
        self
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub y_label: String,
    pub series: Vec<Series>,
    /// Horizontal reference lines (y value, label).
    pub hlines: Vec<(f64, String)>,
    /// Draw the figure's bands behind this panel.
    pub shaded: bool,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub title: String,
    pub x_axis: XAxis,
    pub x_label: String,
    pub panels: Vec<Panel>,
    /// x intervals shaded on the panels marked `shaded`, e.g. warning events.
    pub bands: Vec<(f64, f64)>,
}

pub fn days_since(origin: NaiveDate, d: NaiveDate) -> f64 {
    (d - origin).num_days() as f64
}

fn extent(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn padded((lo, hi): (f64, f64)) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.to_owned() }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Figure {
    pub fn render(&self) -> String {
        let n = self.panels.len().max(1) as f64;
        let height = MARGIN_TOP + n * PANEL_HEIGHT + (n - 1.0) * PANEL_GAP + MARGIN_BOTTOM;
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;

        let xs = self.panels.iter().flat_map(|p| p.series.iter().flat_map(|s| s.xs.iter().copied()));
        let (x0, x1) = extent(xs.chain(self.bands.iter().flat_map(|b| [b.0, b.1]))).unwrap_or((0.0, 1.0));
        let (x0, x1) = if x1 > x0 { (x0, x1) } else { padded((x0, x1)) };
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;

        let mut out = String::new();
        writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="11">"#
        )
        .unwrap();
        writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
        writeln!(out, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(&self.title))
            .unwrap();

        for (k, panel) in self.panels.iter().enumerate() {
            let top = MARGIN_TOP + k as f64 * (PANEL_HEIGHT + PANEL_GAP);
            let bottom = top + PANEL_HEIGHT;
            let ys = panel.series.iter().flat_map(|s| {
                s.ys.iter().enumerate().flat_map(move |(i, y)| {
                    let e = s.errors.as_ref().map_or(0.0, |e| e[i]);
                    [y - e, y + e]
                })
            });
            let (y0, y1) = padded(extent(ys.chain(panel.hlines.iter().map(|h| h.0))).unwrap_or((0.0, 1.0)));
            let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * PANEL_HEIGHT;

            for &(a, b) in self.bands.iter().filter(|_| panel.shaded) {
                let (a, b) = (sx(a.min(b)), sx(a.max(b)));
                writeln!(
                    out,
                    r##"<rect class="warning-band" x="{a:.2}" y="{top:.2}" width="{:.2}" height="{PANEL_HEIGHT:.2}" fill="#f4a261" fill-opacity="0.35"/>"##,
                    (b - a).max(1.0)
                )
                .unwrap();
            }
            writeln!(
                out,
                r#"<rect x="{MARGIN_LEFT}" y="{top:.2}" width="{plot_w:.2}" height="{PANEL_HEIGHT:.2}" fill="none" stroke="black"/>"#
            )
            .unwrap();

            for i in 0..=4 {
                let v = y0 + (y1 - y0) * i as f64 / 4.0;
                let y = sy(v);
                writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{y:.2}" x2="{MARGIN_LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                    MARGIN_LEFT - 4.0,
                    MARGIN_LEFT - 6.0,
                    y + 4.0,
                    fmt_num(v)
                )
                .unwrap();
            }
            writeln!(
                out,
                r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
                top + PANEL_HEIGHT / 2.0,
                top + PANEL_HEIGHT / 2.0,
                escape(&panel.y_label)
            )
            .unwrap();

            for (y, label) in &panel.hlines {
                let y = sy(*y);
                writeln!(
                    out,
                    r##"<line x1="{MARGIN_LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#555" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##,
                    WIDTH - MARGIN_RIGHT,
                    WIDTH - MARGIN_RIGHT - 4.0,
                    y - 3.0,
                    escape(label)
                )
                .unwrap();
            }

            for (j, s) in panel.series.iter().enumerate() {
                let color = PALETTE[j % PALETTE.len()];
                match s.mark {
                    Mark::Line => {
                        // Non-finite values break the line into segments.
                        let mut d = String::new();
                        let mut pen_down = false;
                        for (x, y) in s.xs.iter().zip(&s.ys) {
                            if !(x.is_finite() && y.is_finite()) {
                                pen_down = false;
                                continue;
                            }
                            write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, sx(*x), sy(*y)).unwrap();
                            pen_down = true;
                        }
                        writeln!(out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#, d.trim_end()).unwrap();
                    }
                    Mark::Points => {
                        for (x, y) in s.xs.iter().zip(&s.ys).filter(|(x, y)| x.is_finite() && y.is_finite()) {
                            writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, sx(*x), sy(*y)).unwrap();
                        }
                    }
                }
                if let Some(errors) = &s.errors {
                    for ((x, y), e) in s.xs.iter().zip(&s.ys).zip(errors) {
                        if x.is_finite() && y.is_finite() && e.is_finite() {
                            writeln!(
                                out,
                                r#"<line class="error-bar" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                                sx(*x),
                                sy(y - e),
                                sx(*x),
                                sy(y + e)
                            )
                            .unwrap();
                        }
                    }
                }
                writeln!(
                    out,
                    r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
                    MARGIN_LEFT + 8.0 + 140.0 * j as f64,
                    top + 14.0,
                    escape(&s.label)
                )
                .unwrap();
            }
        }

        let axis_y = MARGIN_TOP + n * PANEL_HEIGHT + (n - 1.0) * PANEL_GAP;
        for i in 0..=5 {
            let v = x0 + (x1 - x0) * i as f64 / 5.0;
            let label = match self.x_axis {
                XAxis::Number => fmt_num(v),
                XAxis::Days(origin) => (origin + chrono::Duration::days(v.round() as i64)).to_string(),
            };
            writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                sx(v),
                axis_y + 16.0
            )
            .unwrap();
        }
        writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + plot_w / 2.0,
            axis_y + 32.0,
            escape(&self.x_label)
        )
        .unwrap();
        out.push_str("</svg>\n");
        out
    }
}
