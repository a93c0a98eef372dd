//! Standalone SVG figures: training curves, 1D solution overlays, 2D error heatmaps.

use std::fmt::Write as _;

use super::{SolutionTable, StrategyRun};
use crate::quadrature::Grid2D;

const COLOURS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];
const W: f64 = 640.0;
const H: f64 = 420.0;
const MARGIN: f64 = 60.0;

fn header(s: &mut String, w: f64, h: f64) {
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
}

struct Axes {
    x: (f64, f64),
    y: (f64, f64),
}

impl Axes {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / span(self.x) * (W - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        H - MARGIN - (y - self.y.0) / span(self.y) * (H - 2.0 * MARGIN)
    }

    fn frame(&self, s: &mut String, xlabel: &str, ylabel: &str, ytick: impl Fn(f64) -> String) {
        let (l, r, t, b) = (MARGIN, W - MARGIN, MARGIN, H - MARGIN);
        writeln!(s, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t).unwrap();
        for k in 0..=4 {
            let fx = self.x.0 + span(self.x) * k as f64 / 4.0;
            let fy = self.y.0 + span(self.y) * k as f64 / 4.0;
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, self.px(fx), b + 16.0, tick(fx)).unwrap();
            writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, l - 4.0, self.py(fy) + 4.0, ytick(fy)).unwrap();
        }
        writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#, W / 2.0, H - 16.0).unwrap();
        writeln!(
            s,
            r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">{ylabel}</text>"#,
            H / 2.0,
            H / 2.0
        )
        .unwrap();
    }
}

fn span((lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        hi - lo
    } else {
        1.0
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn polyline(s: &mut String, pts: impl Iterator<Item = (f64, f64)>, colour: &str, dashed: bool) {
    let coords: Vec<String> = pts.map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
    let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
    writeln!(
        s,
        r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

fn legend(s: &mut String, entries: &[(String, &str, bool)]) {
    for (i, (label, colour, dashed)) in entries.iter().enumerate() {
        let y = MARGIN + 14.0 + 16.0 * i as f64;
        let x = W - MARGIN - 150.0;
        polyline(s, [(x, y - 4.0), (x + 24.0, y - 4.0)].into_iter(), colour, *dashed);
        writeln!(s, r#"<text x="{:.2}" y="{y:.2}">{label}</text>"#, x + 30.0).unwrap();
    }
}

/// Total loss (solid) and metric (dashed) against epoch on a log scale.
pub fn training_curves(runs: &[StrategyRun]) -> String {
    let values = runs.iter().flat_map(|r| r.history.iter().flat_map(|h| [h.loss.total, h.metric]));
    let floor = values.clone().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    let floor = if floor.is_finite() { floor } else { 1.0 };
    let log = |v: f64| v.max(floor).log10();
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(log(v)), b.max(log(v))));
    let epochs = runs.iter().map(|r| r.history.len()).max().unwrap_or(1).saturating_sub(1).max(1);
    let ax = Axes { x: (0.0, epochs as f64), y: (lo.floor(), hi.ceil().max(lo.floor() + 1.0)) };

    let mut s = String::new();
    header(&mut s, W, H);
    ax.frame(&mut s, "epoch", "log10 value", |v| format!("1e{v:.1}"));
    let mut entries = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        let c = COLOURS[k % COLOURS.len()];
        polyline(&mut s, r.history.iter().map(|h| (ax.px(h.epoch as f64), ax.py(log(h.loss.total)))), c, false);
        polyline(&mut s, r.history.iter().map(|h| (ax.px(h.epoch as f64), ax.py(log(h.metric)))), c, true);
        entries.push((format!("{} loss", r.strategy), c, false));
        entries.push((format!("{} metric", r.strategy), c, true));
    }
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// 1D truth (solid) against each strategy's solution (dashed).
pub fn solution_overlay(table: &SolutionTable) -> String {
    let xs: Vec<f64> = table.points.iter().map(|p| p[0]).collect();
    let all = table.truth.iter().chain(table.values.iter().flatten()).copied().filter(|v| v.is_finite());
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = 0.05 * span((lo, hi));
    let ax = Axes {
        x: (xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        y: (lo - pad, hi + pad),
    };
    let mut s = String::new();
    header(&mut s, W, H);
    ax.frame(&mut s, "x", "f(x)", tick);
    polyline(&mut s, xs.iter().zip(&table.truth).map(|(&x, &y)| (ax.px(x), ax.py(y))), "black", false);
    let mut entries = vec![("truth".to_string(), "black", false)];
    for (k, (strategy, vals)) in table.strategies.iter().zip(&table.values).enumerate() {
        let c = COLOURS[k % COLOURS.len()];
        polyline(&mut s, xs.iter().zip(vals).map(|(&x, &y)| (ax.px(x), ax.py(y))), c, true);
        entries.push((strategy.to_string(), c, true));
    }
    legend(&mut s, &entries);
    s.push_str("</svg>\n");
    s
}

/// Interpolates a dark-blue → teal → yellow ramp at `t ∈ [0, 1]`.
fn colour(t: f64) -> String {
    const STOPS: [[f64; 3]; 3] = [[68.0, 1.0, 84.0], [33.0, 145.0, 140.0], [253.0, 231.0, 37.0]];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 1.0 };
    let (a, b, u) = if t < 0.5 { (STOPS[0], STOPS[1], 2.0 * t) } else { (STOPS[1], STOPS[2], 2.0 * t - 1.0) };
    let c: Vec<u8> = (0..3).map(|i| (a[i] + (b[i] - a[i]) * u).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn heatmap_panel(s: &mut String, grid: &Grid2D, values: &[f64], (lo, hi): (f64, f64), ox: f64, title: &str) {
    const SIZE: f64 = 200.0;
    let (nx, ny) = (grid.x.len(), grid.y.len());
    let (cw, ch) = (SIZE / nx as f64, SIZE / ny as f64);
    writeln!(s, r#"<g transform="translate({ox:.2},40)">"#).unwrap();
    writeln!(s, r#"<text x="{:.2}" y="-8" text-anchor="middle">{title}</text>"#, SIZE / 2.0).unwrap();
    for i in 0..nx {
        for j in 0..ny {
            let v = values[grid.index(i, j)];
            let t = (v - lo) / span((lo, hi));
            writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                i as f64 * cw,
                SIZE - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05,
                colour(t)
            )
            .unwrap();
        }
    }
    writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<text x="0" y="{:.2}">{} … {}</text>"#, SIZE + 16.0, tick(lo), tick(hi)).unwrap();
    s.push_str("</g>\n");
}

/// One `|f − truth|` panel per strategy on a shared scale, then the truth.
pub fn error_heatmaps(grid: &Grid2D, table: &SolutionTable) -> String {
    let errors: Vec<Vec<f64>> = table
        .values
        .iter()
        .map(|vals| vals.iter().zip(&table.truth).map(|(v, t)| (v - t).abs()).collect())
        .collect();
    let emax = errors.iter().flatten().copied().filter(|v| v.is_finite()).fold(0.0, f64::max);
    let tmin = table.truth.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = table.truth.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let panels = errors.len() + 1;
    let w = 20.0 + 230.0 * panels as f64;
    let mut s = String::new();
    header(&mut s, w, 280.0);
    for (k, (strategy, err)) in table.strategies.iter().zip(&errors).enumerate() {
        heatmap_panel(&mut s, grid, err, (0.0, emax), 20.0 + 230.0 * k as f64, &format!("|error| {strategy}"));
    }
    heatmap_panel(&mut s, grid, &table.truth, (tmin, tmax), 20.0 + 230.0 * errors.len() as f64, "truth");
    s.push_str("</svg>\n");
    s
}
