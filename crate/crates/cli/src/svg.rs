//! Minimal line plots of a trajectory, one SVG per variable.

use std::fmt::Write as _;

use bingham_dae::stepper::Trajectory;
use bingham_dae::system::State;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;
/// Polyline vertices kept per plot; longer series are strided.
const MAX_POINTS: usize = 4000;

type Getter = fn(&State) -> f64;

pub const VARIABLES: [(&str, Getter); 4] = [
    ("x", |s| s.x),
    ("v", |s| s.v),
    ("Fs", |s| s.fs),
    ("Fd", |s| s.fd),
];

/// Round tick positions covering `[lo, hi]`, about `target` of them.
pub fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e-3 && v.abs() < 1e4 {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// SVG document plotting `series` against time.
pub fn plot(title: &str, times: &[f64], series: &[f64]) -> String {
    let (t0, t1) = (times.first().copied().unwrap_or(0.0), times.last().copied().unwrap_or(1.0));
    let (mut lo, mut hi) = series
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    if !lo.is_finite() || !hi.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1e-300) {
        let pad = if hi == 0.0 { 1.0 } else { hi.abs() * 0.1 };
        lo -= pad;
        hi += pad;
    }
    let t_span = if t1 > t0 { t1 - t0 } else { 1.0 };
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |t: f64| MARGIN_LEFT + (t - t0) / t_span * plot_w;
    let py = |y: f64| MARGIN_TOP + (hi - y) / (hi - lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="14" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(t0, t0 + t_span, 8) {
        let x = px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{MARGIN_TOP}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"##,
            HEIGHT - MARGIN_BOTTOM,
            HEIGHT - MARGIN_BOTTOM + 16.0,
            label(t)
        );
    }
    for y in nice_ticks(lo, hi, 6) {
        let yy = py(y);
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"##,
            WIDTH - MARGIN_RIGHT,
            MARGIN_LEFT - 6.0,
            yy + 4.0,
            label(y)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">t</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );

    let stride = series.len().div_ceil(MAX_POINTS).max(1);
    let mut points = String::new();
    for (i, (t, y)) in times.iter().zip(series).enumerate() {
        if i % stride == 0 || i + 1 == series.len() {
            let _ = write!(points, "{:.2},{:.2} ", px(*t), py(*y));
        }
    }
    let _ = writeln!(
        svg,
        r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
        points.trim_end()
    );
    svg.push_str("</svg>\n");
    svg
}

/// One `(variable name, SVG text)` pair per plotted variable.
pub fn plot_trajectory(trajectory: &Trajectory, name: &str) -> Vec<(&'static str, String)> {
    let times: Vec<f64> = trajectory.states.iter().map(|s| s.t).collect();
    VARIABLES
        .iter()
        .map(|(var, get)| {
            let ys: Vec<f64> = trajectory.states.iter().map(get).collect();
            (*var, plot(&format!("{name}: {var}(t)"), &times, &ys))
        })
        .collect()
}
