//! Minimal deterministic SVG charts.
//!
//! Coordinates are written with fixed precision so output is byte-stable.
//! Observation markers carry `class="obs"` and can be counted by tests.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub log: bool,
}

impl Axis {
    /// Padded range covering `values`; log axes need positive values.
    pub fn fit(values: impl IntoIterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = values
            .into_iter()
            .filter(|x| x.is_finite() && (!log || *x > 0.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
        if !lo.is_finite() {
            (lo, hi) = if log { (0.1, 1.0) } else { (0.0, 1.0) };
        }
        if log {
            let pad = ((hi / lo).ln() * 0.05).max(0.01).exp();
            Axis { min: lo / pad, max: hi * pad, log }
        } else {
            let pad = ((hi - lo) * 0.05).max(1e-9);
            Axis { min: lo - pad, max: hi + pad, log }
        }
    }

    pub fn exact(min: f64, max: f64) -> Self {
        Axis { min, max, log: false }
    }

    fn unit(&self, x: f64) -> f64 {
        if self.log {
            (x.ln() - self.min.ln()) / (self.max.ln() - self.min.ln())
        } else {
            (x - self.min) / (self.max - self.min)
        }
    }

    fn ticks(&self) -> Vec<f64> {
        if self.log {
            let mut out = Vec::new();
            let mut decade = 10f64.powf(self.min.log10().floor());
            while decade <= self.max {
                for m in [1.0, 2.0, 5.0] {
                    let t = decade * m;
                    if t >= self.min && t <= self.max {
                        out.push(t);
                    }
                }
                decade *= 10.0;
            }
            out
        } else {
            let raw = (self.max - self.min) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 2.5, 5.0, 10.0]
                .iter()
                .map(|m| m * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut t = (self.min / step).ceil() * step;
            let mut out = Vec::new();
            while t <= self.max + step * 1e-9 {
                out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
                t += step;
            }
            out
        }
    }
}

fn label(t: f64) -> String {
    let a = t.abs();
    if a == 0.0 {
        "0".into()
    } else if a >= 100.0 {
        format!("{t:.0}")
    } else if a >= 1.0 {
        format!("{}", (t * 100.0).round() / 100.0)
    } else {
        format!("{}", (t * 1e6).round() / 1e6)
    }
}

pub struct Chart {
    x: Axis,
    y: Axis,
    body: String,
    legend: Vec<(String, String, bool)>,
    title: String,
    x_label: String,
    y_label: String,
}

impl Chart {
    pub fn new(title: &str, x: Axis, x_label: &str, y: Axis, y_label: &str) -> Self {
        Chart {
            x,
            y,
            body: String::new(),
            legend: Vec::new(),
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + self.x.unit(x) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - self.y.unit(y) * (HEIGHT - TOP - BOTTOM)
    }

    /// Grey band between two x values, clipped to the plot area.
    pub fn shade(&mut self, x0: f64, x1: f64) {
        let a = self.px(x0.max(self.x.min));
        let b = self.px(x1.min(self.x.max));
        if b <= a {
            return;
        }
        let _ = writeln!(
            self.body,
            r##"<rect class="shade" x="{a:.2}" y="{TOP:.2}" width="{:.2}" height="{:.2}" fill="#dddddd"/>"##,
            b - a,
            HEIGHT - TOP - BOTTOM
        );
    }

    pub fn scatter(&mut self, points: &[(f64, f64)], color: &str, name: &str) {
        for &(x, y) in points {
            let _ = writeln!(
                self.body,
                r#"<circle class="obs" cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                self.px(x),
                self.py(y)
            );
        }
        self.legend.push((name.into(), color.into(), true));
    }

    pub fn line(&mut self, points: &[(f64, f64)], color: &str, name: &str) {
        let pts: Vec<String> = points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!self.y.log || *y > 0.0))
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline class="series" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
        self.legend.push((name.into(), color.into(), false));
    }

    /// Horizontal reference line.
    pub fn hline(&mut self, y: f64) {
        let _ = writeln!(
            self.body,
            r##"<line x1="{LEFT:.2}" x2="{:.2}" y1="{y:.2}" y2="{y:.2}" stroke="#888888" stroke-dasharray="4 3"/>"##,
            WIDTH - RIGHT,
            y = self.py(y)
        );
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{LEFT}" y="22" font-size="14">{}</text>"#,
            escape(&self.title)
        );
        s.push_str(&self.body);
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y0 - y1
        );
        for t in self.x.ticks() {
            let x = self.px(t);
            let _ = writeln!(
                s,
                r#"<line x1="{x:.2}" x2="{x:.2}" y1="{y0:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 4.0,
                y0 + 16.0,
                label(t)
            );
        }
        for t in self.y.ticks() {
            let y = self.py(t);
            let _ = writeln!(
                s,
                r#"<line x1="{:.2}" x2="{x0:.2}" y1="{y:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                x0 - 4.0,
                x0 - 6.0,
                y + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {:.2}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );
        for (i, (name, color, marker)) in self.legend.iter().enumerate() {
            let y = TOP + 12.0 + 16.0 * i as f64;
            let x = WIDTH - RIGHT + 12.0;
            if *marker {
                let _ = write!(s, r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="{color}"/>"#, x + 4.0, y - 6.0);
            } else {
                let _ = write!(
                    s,
                    r#"<line x1="{x:.2}" x2="{:.2}" y1="{:.2}" y2="{:.2}" stroke="{color}" stroke-width="2"/>"#,
                    x + 14.0,
                    y - 3.0,
                    y - 3.0
                );
            }
            let _ = writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 20.0, escape(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Number of observation markers in rendered SVG text.
pub fn count_markers(svg: &str) -> usize {
    svg.matches(r#"class="obs""#).count()
}
