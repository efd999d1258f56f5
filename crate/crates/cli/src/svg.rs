//! Minimal static SVG line plots. Output depends only on the data, so equal
//! inputs give byte-identical files.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 48.0;

pub const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub color: String,
    pub dashed: bool,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>, color: &str) -> Self {
        Self {
            label: label.into(),
            points,
            color: color.to_string(),
            dashed: false,
        }
    }

    pub fn dashed(mut self) -> Self {
        self.dashed = true;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub label: String,
    pub at: (f64, f64),
    pub color: String,
}

#[derive(Debug, Clone, Default)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub equal_aspect: bool,
    pub series: Vec<Series>,
    /// Filled rectangles as `(min, max)` corners.
    pub rects: Vec<((f64, f64), (f64, f64))>,
    pub markers: Vec<Marker>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    let m = if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn tick_label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    if span <= 1e-12 {
        let w = lo.abs().max(1.0) * 0.05;
        return (lo - w, hi + w);
    }
    (lo - 0.05 * span, hi + 0.05 * span)
}

impl Figure {
    fn frame(&self) -> Frame {
        let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
        let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
        let mut add = |(x, y): (f64, f64)| {
            if x.is_finite() && y.is_finite() {
                xs = (xs.0.min(x), xs.1.max(x));
                ys = (ys.0.min(y), ys.1.max(y));
            }
        };
        self.series
            .iter()
            .flat_map(|s| s.points.iter().copied())
            .for_each(&mut add);
        for &(a, b) in &self.rects {
            add(a);
            add(b);
        }
        self.markers.iter().for_each(|m| add(m.at));
        let mut x = padded(xs.0, xs.1);
        let mut y = padded(ys.0, ys.1);
        if self.equal_aspect {
            let sx = (x.1 - x.0) / (WIDTH - LEFT - RIGHT);
            let sy = (y.1 - y.0) / (HEIGHT - TOP - BOTTOM);
            if sx > sy {
                let extra = (sx * (HEIGHT - TOP - BOTTOM) - (y.1 - y.0)) / 2.0;
                y = (y.0 - extra, y.1 + extra);
            } else {
                let extra = (sy * (WIDTH - LEFT - RIGHT) - (x.1 - x.0)) / 2.0;
                x = (x.0 - extra, x.1 + extra);
            }
        }
        Frame { x, y }
    }

    pub fn render(&self) -> String {
        let f = self.frame();
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(
            w,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(
            w,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let (x0, x1) = (LEFT, WIDTH - RIGHT);
        let (y0, y1) = (TOP, HEIGHT - BOTTOM);
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            (x0 + x1) / 2.0,
            escape(&self.title)
        );

        let _ = writeln!(w, r##"<g stroke="#dddddd" stroke-width="1">"##);
        let mut ticks = Vec::new();
        let xs = nice_step(f.x.1 - f.x.0);
        let mut v = (f.x.0 / xs).ceil() * xs;
        while v <= f.x.1 + 1e-9 * xs {
            let p = f.px(v);
            let _ = writeln!(
                w,
                r#"<line x1="{p:.2}" y1="{y0:.2}" x2="{p:.2}" y2="{y1:.2}"/>"#
            );
            ticks.push((true, p, tick_label(v, xs)));
            v += xs;
        }
        let ys = nice_step(f.y.1 - f.y.0);
        let mut v = (f.y.0 / ys).ceil() * ys;
        while v <= f.y.1 + 1e-9 * ys {
            let p = f.py(v);
            let _ = writeln!(
                w,
                r#"<line x1="{x0:.2}" y1="{p:.2}" x2="{x1:.2}" y2="{p:.2}"/>"#
            );
            ticks.push((false, p, tick_label(v, ys)));
            v += ys;
        }
        let _ = writeln!(w, "</g>");
        for (is_x, p, label) in ticks {
            if is_x {
                let _ = writeln!(
                    w,
                    r#"<text x="{p:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
                    y1 + 16.0
                );
            } else {
                let _ = writeln!(
                    w,
                    r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                    x0 - 6.0,
                    p + 4.0
                );
            }
        }

        for &((ax, ay), (bx, by)) in &self.rects {
            let (px, py) = (f.px(ax), f.py(by));
            let _ = writeln!(
                w,
                r##"<rect x="{px:.2}" y="{py:.2}" width="{:.2}" height="{:.2}" fill="#999999" fill-opacity="0.6" stroke="#333333"/>"##,
                f.px(bx) - px,
                f.py(ay) - py
            );
        }

        for series in &self.series {
            let mut pts = String::new();
            for &(x, y) in series
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
            {
                let _ = write!(pts, "{:.2},{:.2} ", f.px(x), f.py(y));
            }
            let dash = if series.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                w,
                r#"<polyline fill="none" stroke="{}" stroke-width="1.5"{dash} points="{}"/>"#,
                series.color,
                pts.trim_end()
            );
        }

        for m in &self.markers {
            let _ = writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{:.2}" r="5" fill="{}" stroke="black"/>"#,
                f.px(m.at.0),
                f.py(m.at.1),
                m.color
            );
        }

        let _ = writeln!(
            w,
            r#"<rect x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            x1 - x0,
            y1 - y0
        );
        let _ = writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            (x0 + x1) / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            w,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            (y0 + y1) / 2.0,
            (y0 + y1) / 2.0,
            escape(&self.y_label)
        );

        let lx = x1 + 12.0;
        let mut ly = y0 + 10.0;
        for series in &self.series {
            let dash = if series.dashed {
                r#" stroke-dasharray="6 4""#
            } else {
                ""
            };
            let _ = writeln!(
                w,
                r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-width="2"{dash}/>"#,
                lx + 22.0,
                series.color
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                escape(&series.label)
            );
            ly += 18.0;
        }
        for m in &self.markers {
            let _ = writeln!(
                w,
                r#"<circle cx="{:.2}" cy="{ly:.2}" r="5" fill="{}" stroke="black"/>"#,
                lx + 11.0,
                m.color
            );
            let _ = writeln!(
                w,
                r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
                lx + 28.0,
                ly + 4.0,
                escape(&m.label)
            );
            ly += 18.0;
        }
        let _ = writeln!(w, "</svg>");
        s
    }
}
