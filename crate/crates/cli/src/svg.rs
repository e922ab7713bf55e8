//! Minimal static SVG line plots. No external tooling, no scripting inside
//! the file; axes, ticks, series, and a legend are written as plain shapes.
//! Rendering is a pure function of the data, so plots are as deterministic
//! as the numeric output they accompany.

pub struct Axis {
    pub label: String,
    pub log: bool,
}

pub enum Mark {
    Line,
    Dots,
}

pub struct Series {
    pub label: String,
    pub mark: Mark,
    pub points: Vec<(f64, f64)>,
}

pub struct Figure {
    pub x: Axis,
    pub y: Axis,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 16.0;
const TOP: f64 = 16.0;
const BOTTOM: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

struct Scale {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Scale {
    // transformed coordinate: identity on linear axes, ln on log axes
    fn t(&self, v: f64) -> f64 {
        if self.log {
            v.ln()
        } else {
            v
        }
    }

    fn frac(&self, v: f64) -> f64 {
        (self.t(v) - self.lo) / (self.hi - self.lo)
    }

    fn usable(&self, v: f64) -> bool {
        v.is_finite() && (!self.log || v > 0.0)
    }
}

fn build_scale(axis: &Axis, values: impl Iterator<Item = f64>) -> Scale {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        if !v.is_finite() || (axis.log && v <= 0.0) {
            continue;
        }
        let t = if axis.log { v.ln() } else { v };
        lo = lo.min(t);
        hi = hi.max(t);
    }
    if !lo.is_finite() || !hi.is_finite() {
        // nothing plottable; pick an arbitrary window so the frame still renders
        lo = if axis.log { 0.0 } else { 0.0 };
        hi = lo + 1.0;
    }
    if hi - lo < 1e-300 {
        let pad = if axis.log { std::f64::consts::LN_10 } else { lo.abs().max(1.0) * 0.5 };
        lo -= pad;
        hi += pad;
    }
    let pad = 0.04 * (hi - lo);
    Scale { lo: lo - pad, hi: hi + pad, log: axis.log }
}

fn ticks(scale: &Scale) -> Vec<(f64, String)> {
    let mut out = Vec::new();
    if scale.log {
        let ln10 = std::f64::consts::LN_10;
        let k_lo = (scale.lo / ln10).ceil() as i64;
        let k_hi = (scale.hi / ln10).floor() as i64;
        if k_lo <= k_hi && (k_hi - k_lo) <= 40 {
            let step = 1 + (k_hi - k_lo) / 8;
            let mut k = k_lo;
            while k <= k_hi {
                out.push((k as f64 * ln10, format!("1e{k}")));
                k += step;
            }
        }
        if out.len() < 2 {
            out = vec![
                (scale.lo, format!("{:.2e}", scale.lo.exp())),
                (scale.hi, format!("{:.2e}", scale.hi.exp())),
            ];
        }
    } else {
        for i in 0..5 {
            let t = scale.lo + (scale.hi - scale.lo) * i as f64 / 4.0;
            out.push((t, lin_label(t)));
        }
    }
    out
}

fn lin_label(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (0.01..10000.0).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.2e}")
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Figure {
    pub fn render(&self) -> String {
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let xs = build_scale(
            &self.x,
            self.series.iter().flat_map(|s| s.points.iter().map(|p| p.0)),
        );
        let ys = build_scale(
            &self.y,
            self.series.iter().flat_map(|s| s.points.iter().map(|p| p.1)),
        );
        let px = |v: f64| LEFT + xs.frac(v) * plot_w;
        let py = |v: f64| TOP + plot_h - ys.frac(v) * plot_h;

        let mut svg = String::new();
        svg.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
             viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
        ));
        svg.push_str(&format!(
            "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
        ));
        svg.push_str(&format!(
            "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
             fill=\"none\" stroke=\"#333333\"/>\n"
        ));

        for (t, label) in ticks(&xs) {
            let x = LEFT + (t - xs.lo) / (xs.hi - xs.lo) * plot_w;
            let y0 = TOP + plot_h;
            svg.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y0:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>\n",
                y0 + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{x:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
                y0 + 18.0,
                esc(&label)
            ));
        }
        for (t, label) in ticks(&ys) {
            let y = TOP + plot_h - (t - ys.lo) / (ys.hi - ys.lo) * plot_h;
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT}\" y2=\"{y:.2}\" stroke=\"#333333\"/>\n",
                LEFT - 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
                LEFT - 8.0,
                y + 4.0,
                esc(&label)
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            LEFT + plot_w / 2.0,
            HEIGHT - 14.0,
            esc(&self.x.label)
        ));
        svg.push_str(&format!(
            "<text x=\"16\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
             transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
            TOP + plot_h / 2.0,
            TOP + plot_h / 2.0,
            esc(&self.y.label)
        ));

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let pts: Vec<(f64, f64)> = series
                .points
                .iter()
                .filter(|p| xs.usable(p.0) && ys.usable(p.1))
                .map(|p| (px(p.0), py(p.1)))
                .collect();
            match series.mark {
                Mark::Line => {
                    if pts.len() >= 2 {
                        let coords: Vec<String> =
                            pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                        svg.push_str(&format!(
                            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                             points=\"{}\"/>\n",
                            coords.join(" ")
                        ));
                    }
                }
                Mark::Dots => {
                    for (x, y) in &pts {
                        svg.push_str(&format!(
                            "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"3\" fill=\"{color}\"/>\n"
                        ));
                    }
                }
            }
        }

        for (i, series) in self.series.iter().enumerate() {
            let color = PALETTE[i % PALETTE.len()];
            let y = TOP + 14.0 + 16.0 * i as f64;
            let x = LEFT + plot_w - 150.0;
            match series.mark {
                Mark::Line => svg.push_str(&format!(
                    "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" \
                     stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                    y - 4.0,
                    x + 18.0,
                    y - 4.0
                )),
                Mark::Dots => svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{color}\"/>\n",
                    x + 9.0,
                    y - 4.0
                )),
            }
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{y:.2}\" font-size=\"11\">{}</text>\n",
                x + 24.0,
                esc(&series.label)
            ));
        }

        svg.push_str("</svg>\n");
        svg
    }
}
