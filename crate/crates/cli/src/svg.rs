//! Minimal self-contained SVG charts: line charts with reference lines and
//! shaded bands, and grouped bar charts. Output is deterministic text.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

pub const GREEN: &str = "#2e8b57";
pub const ORANGE: &str = "#e07b00";
pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#e07b00", "#2e8b57", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let f = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    f * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn tick_label(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

/// Padded data range; degenerate ranges are widened.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 0.0 { lo.abs() * 0.1 } else { 1.0 };
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - MARGIN_L - MARGIN_R)
    }
    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn open(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (WIDTH - MARGIN_R + MARGIN_L) / 2.0,
        esc(title)
    );
}

fn axes(out: &mut String, f: &Frame, x_label: &str, y_label: &str, x_ticks: Option<&[f64]>) {
    let (x0, x1) = (MARGIN_L, WIDTH - MARGIN_R);
    let (y0, y1) = (HEIGHT - MARGIN_B, MARGIN_T);
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    if let Some(xt) = x_ticks {
        for &t in xt {
            let px = f.px(t);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
                y0 + 5.0
            );
            let _ = writeln!(
                out,
                r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                y0 + 18.0,
                tick_label(t)
            );
        }
    }
    for t in ticks(f.y.0, f.y.1) {
        let py = f.py(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            py + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 12.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        esc(y_label)
    );
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    let x = WIDTH - MARGIN_R + 12.0;
    for (i, (name, color)) in entries.iter().enumerate() {
        let y = MARGIN_T + 10.0 + 18.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="12" height="12" fill="{color}"/>"#,
            y - 10.0
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, x + 18.0, esc(name));
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

/// Horizontal shaded band between two y values.
#[derive(Debug, Clone)]
pub struct Band {
    pub y0: f64,
    pub y1: f64,
    pub color: &'static str,
    pub label: String,
}

#[derive(Debug, Clone, Default)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    pub hlines: Vec<(f64, String)>,
    pub vlines: Vec<(f64, String)>,
    pub bands: Vec<Band>,
}

impl LineChart {
    fn frame(&self) -> Frame {
        let pts = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut xl, mut xh, mut yl, mut yh) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            xl = xl.min(x);
            xh = xh.max(x);
            yl = yl.min(y);
            yh = yh.max(y);
        }
        for (y, _) in &self.hlines {
            yl = yl.min(*y);
            yh = yh.max(*y);
        }
        for (x, _) in &self.vlines {
            xl = xl.min(*x);
            xh = xh.max(*x);
        }
        Frame {
            x: padded(xl, xh),
            y: padded(yl, yh),
        }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut out = String::new();
        open(&mut out, &self.title);
        for b in &self.bands {
            let lo = b.y0.max(f.y.0).min(f.y.1);
            let hi = b.y1.max(f.y.0).min(f.y.1);
            if hi <= lo {
                continue;
            }
            let (top, bottom) = (f.py(hi), f.py(lo));
            let _ = writeln!(
                out,
                r#"<rect x="{MARGIN_L:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.15"/>"#,
                WIDTH - MARGIN_L - MARGIN_R,
                bottom - top,
                b.color
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" fill="{}">{}</text>"#,
                MARGIN_L + 6.0,
                top + 14.0,
                b.color,
                esc(&b.label)
            );
        }
        let xt = ticks(f.x.0, f.x.1);
        axes(&mut out, &f, &self.x_label, &self.y_label, Some(&xt));
        for (y, label) in &self.hlines {
            let py = f.py(*y);
            let _ = writeln!(
                out,
                r#"<line x1="{MARGIN_L:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black" stroke-dasharray="6,4"/>"#,
                WIDTH - MARGIN_R
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                WIDTH - MARGIN_R - 4.0,
                py - 4.0,
                esc(label)
            );
        }
        for (x, label) in &self.vlines {
            let px = f.px(*x);
            let _ = writeln!(
                out,
                r#"<line x1="{px:.2}" y1="{MARGIN_T:.2}" x2="{px:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="3,3"/>"#,
                HEIGHT - MARGIN_B
            );
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                px + 4.0,
                MARGIN_T + 12.0,
                esc(label)
            );
        }
        for s in &self.series {
            // Break the polyline at missing points.
            let mut d = String::new();
            let mut pen_down = false;
            for &(x, y) in &s.points {
                if !(x.is_finite() && y.is_finite()) {
                    pen_down = false;
                    continue;
                }
                let _ = write!(d, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, f.px(x), f.py(y));
                pen_down = true;
            }
            if !d.is_empty() {
                let _ = writeln!(
                    out,
                    r#"<path d="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                    d.trim_end(),
                    s.color
                );
            }
            for &(x, y) in s.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                let _ = writeln!(
                    out,
                    r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{}"/>"#,
                    f.px(x),
                    f.py(y),
                    s.color
                );
            }
        }
        let entries: Vec<(&str, &str)> = self.series.iter().map(|s| (s.name.as_str(), s.color)).collect();
        legend(&mut out, &entries);
        out.push_str("</svg>\n");
        out
    }
}

#[derive(Debug, Clone)]
pub struct BarGroup {
    pub name: String,
    pub color: &'static str,
    /// One value per category; `None` draws nothing.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Default)]
pub struct BarChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub categories: Vec<String>,
    pub groups: Vec<BarGroup>,
}

impl BarChart {
    pub fn render(&self) -> String {
        let ymax = self
            .groups
            .iter()
            .flat_map(|g| g.values.iter().flatten())
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        let f = Frame {
            x: (0.0, self.categories.len().max(1) as f64),
            y: (0.0, if ymax > 0.0 { ymax * 1.1 } else { 1.0 }),
        };
        let mut out = String::new();
        open(&mut out, &self.title);
        axes(&mut out, &f, &self.x_label, &self.y_label, None);
        let n_groups = self.groups.len().max(1) as f64;
        let slot = 0.8 / n_groups;
        for (ci, cat) in self.categories.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
                f.px(ci as f64 + 0.5),
                HEIGHT - MARGIN_B + 18.0,
                esc(cat)
            );
            for (gi, g) in self.groups.iter().enumerate() {
                let Some(v) = g.values.get(ci).copied().flatten().filter(|v| v.is_finite()) else {
                    continue;
                };
                let x0 = f.px(ci as f64 + 0.1 + gi as f64 * slot);
                let x1 = f.px(ci as f64 + 0.1 + (gi as f64 + 1.0) * slot);
                let (top, bottom) = (f.py(v.max(0.0)), f.py(0.0));
                let _ = writeln!(
                    out,
                    r#"<rect x="{x0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                    x1 - x0,
                    bottom - top,
                    g.color
                );
            }
        }
        let entries: Vec<(&str, &str)> = self.groups.iter().map(|g| (g.name.as_str(), g.color)).collect();
        legend(&mut out, &entries);
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(nice_step(1.0), 0.2);
        assert_eq!(nice_step(22.0), 5.0);
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(tick_label(0.6000000000000001), "0.6");
    }

    #[test]
    fn line_chart_is_well_formed() {
        let c = LineChart {
            title: "R <vs> A".into(),
            x_label: "A".into(),
            y_label: "R".into(),
            series: vec![Series {
                name: "R".into(),
                color: PALETTE[0],
                points: vec![(1.0, 2.0), (2.0, f64::NAN), (3.0, 0.5), (4.0, 0.4)],
            }],
            hlines: vec![(1.0, "R = 1".into())],
            vlines: vec![],
            bands: vec![Band {
                y0: 1.0,
                y1: f64::INFINITY,
                color: GREEN,
                label: "idle".into(),
            }],
        };
        let svg = c.render();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("R &lt;vs&gt; A"));
        // NaN breaks the line into two pieces.
        assert_eq!(svg.matches("<path d=\"M").count(), 2);
        assert!(svg
            .lines()
            .any(|l| l.starts_with("<path") && l.matches(" M").count() == 1));
        assert_eq!(svg, c.render());
    }

    #[test]
    fn bar_chart_skips_missing() {
        let b = BarChart {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            categories: vec!["a".into(), "b".into()],
            groups: vec![BarGroup {
                name: "g".into(),
                color: GREEN,
                values: vec![Some(1.0), None],
            }],
        };
        let svg = b.render();
        // background, one bar, one legend swatch
        assert_eq!(svg.matches("<rect").count(), 3);
    }
}
