//! Minimal SVG rendering of scatter plots, histograms and bar charts.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#c71585", "#ff7f0e", "#7f7f7f"];

pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    /// Join points with a polyline instead of drawing markers.
    pub line: bool,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for (x, y) in points.filter(|(x, y)| x.is_finite() && y.is_finite()) {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return Frame { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        }
        let pad = |a: f64, b: f64| if (b - a).abs() < 1e-12 { (a - 0.5, b + 0.5) } else { (a - 0.05 * (b - a), b + 0.05 * (b - a)) };
        let (x0, x1) = pad(x0, x1);
        let (y0, y1) = pad(y0, y1);
        Frame { x0, x1, y0, y1 }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn open(title: &str) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    )
}

fn axes(frame: &Frame, xlabel: &str, ylabel: &str) -> String {
    let mut s = format!(
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (x, y) = (frame.x0 + t * (frame.x1 - frame.x0), frame.y0 + t * (frame.y1 - frame.y0));
        s += &format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{x:.3}</text>\n",
            frame.px(x),
            HEIGHT - MARGIN + 16.0
        );
        s += &format!("<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{y:.3}</text>\n", MARGIN - 4.0, frame.py(y) + 4.0);
    }
    s += &format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(xlabel)
    );
    s += &format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(ylabel)
    );
    s
}

fn legend(names: &[&str]) -> String {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let y = MARGIN + 14.0 + 16.0 * i as f64;
            format!(
                "<rect x=\"{:.1}\" y=\"{:.1}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
                WIDTH - MARGIN - 150.0,
                y - 9.0,
                PALETTE[i % PALETTE.len()],
                WIDTH - MARGIN - 135.0,
                y,
                escape(n)
            )
        })
        .collect()
}

pub fn scatter(title: &str, xlabel: &str, ylabel: &str, series: &[Series]) -> String {
    let frame = Frame::fit(series.iter().flat_map(|s| s.points.iter().copied()));
    let mut s = open(title) + &axes(&frame, xlabel, ylabel);
    for (i, ser) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        if ser.line {
            let pts: Vec<String> = ser.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
            s += &format!("<polyline points=\"{}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\"/>\n", pts.join(" "));
        } else {
            for &(x, y) in &ser.points {
                s += &format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"{colour}\" fill-opacity=\"0.6\"/>\n", frame.px(x), frame.py(y));
            }
        }
    }
    let names: Vec<&str> = series.iter().map(|s| s.name.as_str()).collect();
    s + &legend(&names) + "</svg>\n"
}

/// Overlaid histograms; each group is a list of `(bin_lo, bin_hi, count)`.
pub fn histogram(title: &str, xlabel: &str, groups: &[(String, Vec<(f64, f64, usize)>)]) -> String {
    let frame = Frame::fit(groups.iter().flat_map(|(_, bins)| bins.iter().flat_map(|&(a, b, c)| [(a, 0.0), (b, c as f64)])));
    let mut s = open(title) + &axes(&frame, xlabel, "count");
    for (i, (_, bins)) in groups.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        for &(a, b, c) in bins.iter().filter(|b| b.2 > 0) {
            let (x, w) = (frame.px(a), frame.px(b) - frame.px(a));
            let (y, h) = (frame.py(c as f64), frame.py(0.0) - frame.py(c as f64));
            s += &format!(
                "<rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{colour}\" fill-opacity=\"0.5\"/>\n"
            );
        }
    }
    let names: Vec<&str> = groups.iter().map(|g| g.0.as_str()).collect();
    s + &legend(&names) + "</svg>\n"
}

/// Grouped bars: one group per entry, one bar per category.
pub fn bars(title: &str, categories: &[String], groups: &[(String, Vec<f64>)]) -> String {
    let n_cat = categories.len().max(1) as f64;
    let top = groups.iter().flat_map(|g| g.1.iter().copied()).fold(0.0f64, f64::max).max(1e-12);
    let frame = Frame { x0: 0.0, x1: n_cat, y0: 0.0, y1: top * 1.1 };
    let mut s = open(title) + &axes(&frame, "irrep", "p");
    let slot = 1.0 / (groups.len().max(1) as f64 + 1.0);
    for (gi, (_, values)) in groups.iter().enumerate() {
        let colour = PALETTE[gi % PALETTE.len()];
        for (ci, &v) in values.iter().enumerate() {
            let x = frame.px(ci as f64 + slot * (gi as f64 + 0.5));
            let w = frame.px(slot) - frame.px(0.0);
            s += &format!(
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{w:.2}\" height=\"{:.2}\" fill=\"{colour}\"/>\n",
                frame.py(v),
                frame.py(0.0) - frame.py(v)
            );
        }
    }
    for (ci, c) in categories.iter().enumerate() {
        s += &format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-size=\"10\">{}</text>\n",
            frame.px(ci as f64 + 0.5),
            HEIGHT - MARGIN + 30.0,
            escape(c)
        );
    }
    let names: Vec<&str> = groups.iter().map(|g| g.0.as_str()).collect();
    s + &legend(&names) + "</svg>\n"
}
