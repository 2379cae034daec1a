//! Standalone SVG line chart of summary curves.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::summary::CurveSummary;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

struct Scale {
    g0: f64,
    g1: f64,
    y1: f64,
}

impl Scale {
    fn x(&self, generation: f64) -> f64 {
        let span = (self.g1 - self.g0).max(1.0);
        let frac = if self.g1 > self.g0 { (generation - self.g0) / span } else { 0.5 };
        LEFT + frac * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v.clamp(0.0, self.y1) / self.y1) * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Render the chart as SVG text. Each arm gets a polyline of its means and a
/// translucent polygon spanning mean ± standard error; an arm with a single
/// generation is drawn as a marker with an error bar instead.
pub fn render_svg(summaries: &[CurveSummary]) -> Result<String> {
    if summaries.is_empty() {
        return Err(Error::Contract("nothing to plot".into()));
    }
    let mut arms: Vec<&str> = Vec::new();
    for s in summaries {
        if !arms.contains(&s.arm.as_str()) {
            arms.push(&s.arm);
        }
    }
    let g0 = summaries.iter().map(|s| s.generation).min().unwrap_or(0) as f64;
    let g1 = summaries.iter().map(|s| s.generation).max().unwrap_or(0) as f64;
    let top = summaries.iter().map(|s| s.mean + s.stderr).fold(0.0, f64::max);
    let y1 = ((top / 250.0).ceil() * 250.0).max(250.0);
    let scale = Scale { g0, g1, y1 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);

    // Axes, ticks and labels.
    let (x0, x1, yb, yt) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{yb}" x2="{x1}" y2="{yb}" stroke="black"/>"#);
    let _ = writeln!(svg, r#"<line x1="{x0}" y1="{yb}" x2="{x0}" y2="{yt}" stroke="black"/>"#);
    let y_steps = 8;
    for i in 0..=y_steps {
        let v = y1 * i as f64 / y_steps as f64;
        let y = scale.y(v);
        let _ = writeln!(svg, r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#e0e0e0"/>"##);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.0}</text>"#, x0 - 6.0, y + 4.0);
    }
    let x_ticks: Vec<f64> = if g1 > g0 { (0..=5).map(|i| g0 + (g1 - g0) * i as f64 / 5.0).collect() } else { vec![g0] };
    for g in x_ticks {
        let x = scale.x(g);
        let _ = writeln!(svg, r#"<line x1="{x:.2}" y1="{yb}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, yb + 5.0);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{g:.0}</text>"#, yb + 20.0);
    }
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">generation</text>"#, (x0 + x1) / 2.0, HEIGHT - 10.0);
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">mean best fitness</text>"#,
        (yt + yb) / 2.0,
        (yt + yb) / 2.0
    );

    for (i, arm) in arms.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<&CurveSummary> = summaries.iter().filter(|s| s.arm == *arm).collect();
        if pts.len() == 1 {
            let p = pts[0];
            let x = scale.x(p.generation as f64);
            let _ = writeln!(
                svg,
                r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                scale.y(p.mean - p.stderr),
                scale.y(p.mean + p.stderr)
            );
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, scale.y(p.mean));
            continue;
        }
        let upper = pts.iter().map(|p| format!("{:.2},{:.2}", scale.x(p.generation as f64), scale.y(p.mean + p.stderr)));
        let lower = pts.iter().rev().map(|p| format!("{:.2},{:.2}", scale.x(p.generation as f64), scale.y(p.mean - p.stderr)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(svg, r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#, band.join(" "));
        let line: Vec<String> =
            pts.iter().map(|p| format!("{:.2},{:.2}", scale.x(p.generation as f64), scale.y(p.mean))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, line.join(" "));
    }

    for (i, arm) in arms.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = TOP + 15.0 + 18.0 * i as f64;
        let _ = writeln!(svg, r#"<rect x="{:.2}" y="{:.2}" width="14" height="4" fill="{color}"/>"#, LEFT + 15.0, y - 6.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}">{}</text>"#, LEFT + 35.0, escape(arm));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_plot(summaries: &[CurveSummary], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let svg = render_svg(summaries)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves(arms: usize, generations: usize) -> Vec<CurveSummary> {
        let mut out = Vec::new();
        for a in 0..arms {
            for g in 1..=generations {
                out.push(CurveSummary {
                    arm: format!("arm{a}"),
                    generation: g,
                    runs: 3,
                    mean: 600.0 + 10.0 * g as f64 + a as f64,
                    stderr: 25.0,
                });
            }
        }
        out
    }

    #[test]
    fn one_line_and_band_per_arm() {
        let svg = render_svg(&curves(5, 100)).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 5);
        assert_eq!(svg.matches("<polygon").count(), 5);
        assert!(svg.contains(">generation<") && svg.contains(">mean best fitness<"));
        assert!(svg.contains(">arm4<"));
    }

    #[test]
    fn single_generation_draws_markers() {
        let svg = render_svg(&curves(2, 1)).unwrap();
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn output_is_deterministic() {
        assert_eq!(render_svg(&curves(3, 20)).unwrap(), render_svg(&curves(3, 20)).unwrap());
    }

    #[test]
    fn empty_input_and_bad_path_fail() {
        assert!(matches!(render_svg(&[]), Err(Error::Contract(_))));
        assert!(matches!(render_plot(&curves(1, 2), "/nonexistent-dir/x.svg"), Err(Error::Io { .. })));
    }

    #[test]
    fn arm_names_are_escaped() {
        let mut c = curves(1, 2);
        c.iter_mut().for_each(|p| p.arm = "a<b&c".into());
        assert!(render_svg(&c).unwrap().contains("a&lt;b&amp;c"));
    }
}
