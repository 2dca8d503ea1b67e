//! Static SVG line plots of controls, states and loss across seeds.
//!
//! Each series is drawn as its per-step mean over seeds, with a shaded
//! ±1σ (sample standard deviation) band when there are at least two seeds.
//! The plotted numbers are embedded as XML comments so files can be diffed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qimpc_core::control::StepRecord;

use crate::output::{write_atomic, OutputError};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 72.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 48.0;
const LOG_FLOOR: f64 = 1e-12;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Per-step mean and optional ±1σ of one quantity across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub mean: Vec<f64>,
    pub std: Option<Vec<f64>>,
}

/// Aggregates `extract` over runs of possibly different lengths. Step `k`
/// uses the runs that reached it.
pub fn aggregate(label: &str, runs: &[&[StepRecord]], extract: impl Fn(&StepRecord) -> f64) -> Series {
    let len = runs.iter().map(|r| r.len()).max().unwrap_or(0);
    let mut mean = Vec::with_capacity(len);
    let mut std = Vec::with_capacity(len);
    for k in 0..len {
        let vals: Vec<f64> = runs.iter().filter_map(|r| r.get(k)).map(&extract).collect();
        let n = vals.len() as f64;
        let m = vals.iter().sum::<f64>() / n;
        let var = if vals.len() > 1 {
            vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        mean.push(m);
        std.push(var.sqrt());
    }
    Series {
        label: label.to_string(),
        mean,
        std: (runs.len() > 1).then_some(std),
    }
}

fn fmt_tick(v: f64, log: bool) -> String {
    if log {
        format!("1e{}", v.round() as i64)
    } else if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

/// Renders one plot. Deterministic for fixed input.
pub fn render_svg(title: &str, y_label: &str, series: &[Series], log_y: bool) -> String {
    let ty = |v: f64| if log_y { v.max(LOG_FLOOR).log10() } else { v };
    let steps = series.iter().map(|s| s.mean.len()).max().unwrap_or(0);
    let x_max = steps.saturating_sub(1).max(1) as f64;

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in series {
        for (k, m) in s.mean.iter().enumerate() {
            let d = s.std.as_ref().map_or(0.0, |sd| sd[k]);
            for v in [ty(m - d), ty(m + d), ty(*m)] {
                if v.is_finite() {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
        }
    }
    if !lo.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    } else {
        let pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |k: f64| LEFT + k / x_max * plot_w;
    let py = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        escape(title)
    )
    .unwrap();

    // Axes and ticks.
    writeln!(
        svg,
        r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    )
    .unwrap();
    for i in 0..=5 {
        let v = lo + (hi - lo) * i as f64 / 5.0;
        let y = py(v);
        writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(v, log_y)
        )
        .unwrap();
        let k = x_max * i as f64 / 5.0;
        writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            px(k),
            TOP + plot_h + 18.0,
            k.round()
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">iteration</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&if log_y {
            format!("{y_label} (log10)")
        } else {
            y_label.to_string()
        })
    )
    .unwrap();

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if let Some(sd) = &s.std {
            let upper = s
                .mean
                .iter()
                .zip(sd)
                .enumerate()
                .map(|(k, (m, d))| (px(k as f64), py(ty(m + d))));
            let lower = s
                .mean
                .iter()
                .zip(sd)
                .enumerate()
                .rev()
                .map(|(k, (m, d))| (px(k as f64), py(ty(m - d))));
            let pts: Vec<String> = upper.chain(lower).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                pts.join(" ")
            )
            .unwrap();
        }
        let pts: Vec<String> = s
            .mean
            .iter()
            .enumerate()
            .map(|(k, m)| format!("{:.2},{:.2}", px(k as f64), py(ty(*m))))
            .collect();
        writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.6"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 14.0 + 18.0 * i as f64;
        writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            WIDTH - RIGHT + 12.0,
            WIDTH - RIGHT + 32.0,
            WIDTH - RIGHT + 38.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }

    for s in series {
        writeln!(svg, "<!-- data {}: step,mean,std", s.label).unwrap();
        for (k, m) in s.mean.iter().enumerate() {
            let d = s.std.as_ref().map_or(0.0, |sd| sd[k]);
            writeln!(svg, "{k},{m:.16e},{d:.16e}").unwrap();
        }
        writeln!(svg, "-->").unwrap();
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `<name>_controls.svg`, `<name>_states.svg` and `<name>_loss.svg`.
pub fn emit_plots(
    name: &str,
    runs: &[&[StepRecord]],
    out_dir: &Path,
    log_loss: bool,
) -> Result<Vec<PathBuf>, OutputError> {
    let first = runs.iter().find_map(|r| r.first());
    let state_dim = first.map_or(0, |r| r.state.len());
    let control_dim = first.map_or(0, |r| r.clipped_control.len());

    let controls: Vec<Series> = (0..control_dim)
        .map(|i| aggregate(&format!("u_{i}"), runs, |r| r.clipped_control[i]))
        .collect();
    let states: Vec<Series> = (0..state_dim)
        .map(|i| aggregate(&format!("x_{i}"), runs, |r| r.state[i]))
        .collect();
    let loss = vec![aggregate("loss", runs, |r| r.loss)];

    let plots = [
        ("controls", "control", controls, false),
        ("states", "state", states, false),
        ("loss", "loss", loss, log_loss),
    ];
    let mut paths = Vec::new();
    for (suffix, y_label, series, log_y) in plots {
        let path = out_dir.join(format!("{name}_{suffix}.svg"));
        let svg = render_svg(&format!("{name}: {suffix}"), y_label, &series, log_y);
        write_atomic(&path, svg.as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}
