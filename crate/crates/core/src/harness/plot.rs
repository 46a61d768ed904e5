//! Standalone SVG line charts with a log-scale y axis, one polyline per
//! series, axis labels and a legend. No dependencies, deterministic output.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// One labeled curve.
#[derive(Clone, Debug)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const DASHES: [&str; 3] = ["none", "8 4", "2 3"];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Emit a log-y line chart of the series to `path`. Points with
/// non-positive y are skipped (they have no place on a log axis); a series
/// reduced to a single point is drawn as a marker.
pub fn emit_plot(series: &[PlotSeries], title: &str, path: &Path) -> Result<()> {
    if series.is_empty() || series.iter().all(|s| s.points.is_empty()) {
        return Err(Error::Config("nothing to plot".into()));
    }
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if y > 0.0 && y.is_finite() && x.is_finite() {
                x_min = x_min.min(x);
                x_max = x_max.max(x);
                y_min = y_min.min(y);
                y_max = y_max.max(y);
            }
        }
    }
    if !x_min.is_finite() {
        return Err(Error::Config("no positive data to plot".into()));
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    let (ly_min, ly_max) = {
        let a = y_min.log10().floor();
        let b = y_max.log10().ceil();
        if a == b {
            (a - 1.0, b + 1.0)
        } else {
            (a, b)
        }
    };

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let to_x = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let to_y = |y: f64| MARGIN_T + (ly_max - y.log10()) / (ly_max - ly_min) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        xml_escape(title)
    ));

    // frame
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_L}\" y=\"{MARGIN_T}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"black\"/>\n"
    ));

    // y decade gridlines and labels
    let mut dec = ly_min;
    while dec <= ly_max + 1e-9 {
        let y = MARGIN_T + (ly_max - dec) / (ly_max - ly_min) * plot_h;
        svg.push_str(&format!(
            "<line x1=\"{MARGIN_L}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#dddddd\"/>\n",
            MARGIN_L + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">1e{}</text>\n",
            MARGIN_L - 6.0,
            y + 4.0,
            dec as i64
        ));
        dec += 1.0;
    }

    // x ticks
    for k in 0..=5 {
        let x = x_min + (x_max - x_min) * k as f64 / 5.0;
        let px = to_x(x);
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            MARGIN_T + plot_h,
            MARGIN_T + plot_h + 5.0
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x:.3}</text>\n",
            MARGIN_T + plot_h + 20.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">t</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 {:.2})\">relative error</text>\n",
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    ));

    // curves
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = DASHES[(k / PALETTE.len()) % DASHES.len()];
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .filter(|(x, y)| *y > 0.0 && y.is_finite() && x.is_finite())
            .map(|&(x, y)| (to_x(x), to_y(y)))
            .collect();
        if pts.len() >= 2 {
            let path_data: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" stroke-dasharray=\"{dash}\"/>\n",
                path_data.join(" ")
            ));
        }
        if pts.len() <= 24 {
            for (x, y) in &pts {
                svg.push_str(&format!(
                    "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"2.5\" fill=\"{color}\"/>\n"
                ));
            }
        }
        // legend entry
        let ly = MARGIN_T + 16.0 + 20.0 * k as f64;
        let lx = WIDTH - MARGIN_R + 10.0;
        svg.push_str(&format!(
            "<line x1=\"{lx}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"1.5\" stroke-dasharray=\"{dash}\"/>\n",
            lx + 24.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            lx + 30.0,
            ly + 4.0,
            xml_escape(&s.label)
        ));
    }
    svg.push_str("</svg>\n");

    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(svg.as_bytes()).map_err(|e| Error::io(path, e))
}
