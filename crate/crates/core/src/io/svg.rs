//! Scatter plot of a spectrum table.

use std::fmt::Write as _;

use thiserror::Error;

use super::format::format_sig;
use crate::spectra::SpectrumTable;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Colours cycled by excited-state index.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub point_radius: f64,
    pub title: Option<String>,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            point_radius: 2.5,
            title: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SvgError {
    #[error("cannot plot an empty spectrum")]
    Empty,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round tick spacing giving roughly `target` intervals across `span`.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, 6.0);
    let first = (lo / step - 1e-9).ceil() as i64;
    let last = (hi / step + 1e-9).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

/// Frequency versus gate charge. Each point's opacity is its visibility
/// divided by the largest visibility in the table; colour follows
/// `state_index`.
pub fn emit_spectrum_svg(table: &SpectrumTable, style: &SvgStyle) -> Result<String, SvgError> {
    if table.lines.is_empty() {
        return Err(SvgError::Empty);
    }
    let (mut x_lo, mut x_hi) = table
        .lines
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l.n_g), b.max(l.n_g)));
    if x_hi - x_lo < 1e-9 {
        x_lo -= 0.05;
        x_hi += 0.05;
    }
    let (f_lo, f_hi) = table
        .lines
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), l| (a.min(l.freq), b.max(l.freq)));
    let pad = ((f_hi - f_lo) * 0.05).max(0.1);
    let (y_lo, y_hi) = ((f_lo - pad).max(0.0), f_hi + pad);
    let vis_max = table.lines.iter().map(|l| l.visibility).fold(0.0, f64::max);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;
    let c = |v: f64| format_sig(v, 6);

    let mut s = String::new();
    let w = |s: &mut String, line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    w(&mut s, format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#,
        W = WIDTH,
        H = HEIGHT
    ));
    w(&mut s, format!(r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#));
    if let Some(title) = &style.title {
        w(&mut s, format!(
            r#"<text x="{}" y="20" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
            c(WIDTH / 2.0),
            escape(title)
        ));
    }
    w(&mut s, format!(
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        c(MARGIN_LEFT),
        c(MARGIN_TOP),
        c(plot_w),
        c(plot_h)
    ));

    let mut axes = String::new();
    for t in ticks(x_lo, x_hi) {
        let x = px(t);
        let y0 = MARGIN_TOP + plot_h;
        writeln!(
            axes,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{y1}" stroke="black"/><text x="{x}" y="{yt}" text-anchor="middle" font-family="sans-serif" font-size="11">{label}</text>"#,
            x = c(x),
            y0 = c(y0),
            y1 = c(y0 - 5.0),
            yt = c(y0 + 16.0),
            label = format_sig(t, 4)
        )
        .expect("writing to a String cannot fail");
    }
    for t in ticks(y_lo, y_hi) {
        let y = py(t);
        writeln!(
            axes,
            r#"<line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="black"/><text x="{xt}" y="{yt}" text-anchor="end" font-family="sans-serif" font-size="11">{label}</text>"#,
            x0 = c(MARGIN_LEFT),
            x1 = c(MARGIN_LEFT + 5.0),
            xt = c(MARGIN_LEFT - 6.0),
            y = c(y),
            yt = c(y + 4.0),
            label = format_sig(t, 4)
        )
        .expect("writing to a String cannot fail");
    }
    s.push_str(&axes);
    w(&mut s, format!(
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">n_g (e)</text>"#,
        c(MARGIN_LEFT + plot_w / 2.0),
        c(HEIGHT - 15.0)
    ));
    w(&mut s, format!(
        r#"<text x="18" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {y})">frequency (GHz)</text>"#,
        y = c(MARGIN_TOP + plot_h / 2.0)
    ));

    w(&mut s, r#"<g stroke="none">"#.into());
    for l in &table.lines {
        let opacity = if vis_max > 0.0 {
            l.visibility / vis_max
        } else {
            0.0
        };
        w(&mut s, format!(
            r#"<circle class="s{k}" cx="{x}" cy="{y}" r="{r}" fill="{fill}" fill-opacity="{o}"/>"#,
            k = l.state_index,
            x = c(px(l.n_g)),
            y = c(py(l.freq)),
            r = c(style.point_radius),
            fill = PALETTE[(l.state_index - 1) % PALETTE.len()],
            o = format_sig(opacity, 4)
        ));
    }
    w(&mut s, "</g>".into());
    w(&mut s, "</svg>".into());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{CpbParams, ModelConfig};
    use crate::spectra::spectrum;

    #[test]
    fn empty_table_is_an_error() {
        let t = SpectrumTable {
            grid: vec![],
            lines: vec![],
        };
        assert_eq!(emit_spectrum_svg(&t, &SvgStyle::default()), Err(SvgError::Empty));
    }

    #[test]
    fn bare_cpb_is_one_track() {
        let bare = ModelConfig::bare(CpbParams::new(4.5, 6.33, 2).unwrap());
        let grid: Vec<f64> = (0..41).map(|i| 0.8 + 0.01 * i as f64).collect();
        let table = spectrum(&bare, &grid, 1).unwrap();
        let svg = emit_spectrum_svg(&table, &SvgStyle::default()).unwrap();
        assert!(svg.starts_with("<svg "));
        assert!(svg.contains(r#"width="800" height="600""#));
        assert_eq!(svg.matches("<circle").count(), 41);
        assert_eq!(svg.matches(r#"class="s1""#).count(), 41);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn deterministic_and_escaped() {
        let bare = ModelConfig::bare(CpbParams::new(4.5, 6.33, 4).unwrap());
        let table = spectrum(&bare, &[0.9, 1.0, 1.1], 2).unwrap();
        let style = SvgStyle {
            title: Some("E_J < 7 & flux".into()),
            ..Default::default()
        };
        let a = emit_spectrum_svg(&table, &style).unwrap();
        assert_eq!(a, emit_spectrum_svg(&table, &style).unwrap());
        assert!(a.contains("E_J &lt; 7 &amp; flux"));
    }

    #[test]
    fn tick_steps_are_round() {
        assert_eq!(tick_step(0.4, 6.0), 0.05);
        assert_eq!(tick_step(10.0, 6.0), 2.0);
        assert_eq!(ticks(0.8, 1.2).len(), 9);
    }
}
