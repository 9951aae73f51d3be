use std::fmt::Write as _;

use fuzzfrac::solver::LevelTable;

const MARGIN: f64 = 50.0;

fn color(lambda: f64, k: usize) -> &'static str {
    const SPARE: [&str; 4] = ["#7b3294", "#e66101", "#008837", "#404040"];
    if lambda == 0.5 {
        "red"
    } else if lambda == 0.75 {
        "green"
    } else if lambda == 1.0 {
        "blue"
    } else {
        SPARE[k % SPARE.len()]
    }
}

struct Frame {
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(width: u32, height: u32, xs: &[f64], ys: impl Iterator<Item = f64>) -> Frame {
        let (lo, hi) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
        Frame {
            width: width as f64,
            height: height as f64,
            x: (xs[0], xs[xs.len() - 1]),
            y: (lo - pad, hi + pad),
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (self.width - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        self.height - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (self.height - 2.0 * MARGIN)
    }

    fn points(&self, xs: &[f64], ys: &[f64]) -> String {
        let pts: Vec<String> = xs
            .iter()
            .zip(ys)
            .map(|(&x, &y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        pts.join(" ")
    }

    fn open(&self, title: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="25" text-anchor="middle" font-family="sans-serif" font-size="14">{title}</text>"#,
            self.width / 2.0
        );
        let (l, r) = (MARGIN, self.width - MARGIN);
        let (t, b) = (MARGIN, self.height - MARGIN);
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        let label = |s: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
            let _ = writeln!(
                s,
                r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{v:.3}</text>"#
            );
        };
        label(&mut s, l, b + 15.0, "middle", self.x.0);
        label(&mut s, r, b + 15.0, "middle", self.x.1);
        label(&mut s, l - 4.0, b, "end", self.y.0);
        label(&mut s, l - 4.0, t + 4.0, "end", self.y.1);
        s
    }
}

/// Lower and upper curves for every exported λ.
pub fn level_plot(table: &LevelTable, width: u32, height: u32) -> String {
    let all = table.lower.iter().chain(&table.upper).flatten().copied();
    let frame = Frame::new(width, height, &table.xs, all);
    let mut s = frame.open("Level curves of f(x)");
    for (j, &lambda) in table.lambdas.iter().enumerate() {
        let c = color(lambda, j);
        for curve in [&table.lower[j], &table.upper[j]] {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{c}" stroke-width="1" points="{}"/>"#,
                frame.points(&table.xs, curve)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" fill="{c}">λ = {lambda}</text>"#,
            frame.width - MARGIN - 60.0,
            MARGIN + 15.0 * (j as f64 + 1.0)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Shaded region between the support curves with the core curves on top;
/// `support` and `core` are tables for λ = 0 and λ = 1.
pub fn fuzzy_graph_plot(
    support: &LevelTable,
    core: &LevelTable,
    width: u32,
    height: u32,
) -> String {
    let all = support.lower[0].iter().chain(&support.upper[0]).copied();
    let frame = Frame::new(width, height, &support.xs, all);
    let mut s = frame.open("Fuzzy graph of f");
    let mut outline = frame.points(&support.xs, &support.lower[0]);
    let back: Vec<f64> = support.xs.iter().rev().copied().collect();
    let upper: Vec<f64> = support.upper[0].iter().rev().copied().collect();
    outline.push(' ');
    outline.push_str(&frame.points(&back, &upper));
    let _ = writeln!(
        s,
        r##"<polygon fill="#9ecae1" fill-opacity="0.6" stroke="#3182bd" stroke-width="0.5" points="{outline}"/>"##
    );
    for curve in [&core.lower[0], &core.upper[0]] {
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="blue" stroke-width="1" points="{}"/>"#,
            frame.points(&core.xs, curve)
        );
    }
    s.push_str("</svg>\n");
    s
}
