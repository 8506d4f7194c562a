//! Minimal SVG renderings of a benchmark summary: one line chart of mean
//! ARI per factor, plus a bar chart of overall method means. The files are
//! self-contained and viewable in any browser; no plotting backend is
//! required.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::{FactorBlock, SummaryTable};
use crate::error::Result;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;

/// One line color per method, in summary order.
const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn new(y_min: f64, y_max: f64) -> Self {
        Frame {
            x0: MARGIN_LEFT,
            y0: MARGIN_TOP,
            w: WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
            h: HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
            y_min,
            y_max,
        }
    }

    fn x_at(&self, index: usize, count: usize) -> f64 {
        if count <= 1 {
            self.x0 + self.w / 2.0
        } else {
            self.x0 + self.w * index as f64 / (count - 1) as f64
        }
    }

    fn y_at(&self, value: f64) -> f64 {
        let t = (value - self.y_min) / (self.y_max - self.y_min);
        self.y0 + self.h * (1.0 - t)
    }
}

fn open_svg(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-size="16" text-anchor="middle">{title}</text>"#,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0
    );
    s
}

fn draw_axes(s: &mut String, frame: &Frame, x_labels: &[String], x_title: &str) {
    // y gridlines and tick labels.
    let ticks = 5usize;
    for i in 0..=ticks {
        let v = frame.y_min + (frame.y_max - frame.y_min) * i as f64 / ticks as f64;
        let y = frame.y_at(v);
        let _ = writeln!(
            s,
            r##"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
            frame.x0,
            frame.x0 + frame.w
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{v:.2}</text>"#,
            frame.x0 - 8.0,
            y + 4.0
        );
    }
    // frame
    let _ = writeln!(
        s,
        r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333333"/>"##,
        frame.x0, frame.y0, frame.w, frame.h
    );
    // x tick labels
    for (i, label) in x_labels.iter().enumerate() {
        let x = frame.x_at(i, x_labels.len());
        let _ = writeln!(
            s,
            r#"<text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{label}</text>"#,
            frame.y0 + frame.h + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{x_title}</text>"#,
        frame.x0 + frame.w / 2.0,
        frame.y0 + frame.h + 40.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">mean ARI</text>"#,
        frame.y0 + frame.h / 2.0,
        frame.y0 + frame.h / 2.0
    );
}

fn draw_legend(s: &mut String, methods: &[String]) {
    let x = WIDTH - MARGIN_RIGHT + 12.0;
    for (i, m) in methods.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 + i as f64 * 18.0;
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="12" fill="{}"/>"#,
            y - 10.0,
            color(i)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{y:.1}" font-size="11">{m}</text>"#,
            x + 17.0
        );
    }
}

fn y_floor(values: impl Iterator<Item = f64>) -> f64 {
    let min = values.fold(0.0_f64, f64::min);
    if min < 0.0 {
        (min * 10.0).floor() / 10.0
    } else {
        0.0
    }
}

fn factor_chart(block: &FactorBlock) -> String {
    let frame = Frame::new(
        y_floor(
            block
                .rows
                .iter()
                .flat_map(|(_, cells)| cells.iter().flatten().copied()),
        ),
        1.0,
    );
    let mut s = open_svg(&format!("Mean ARI by {}", block.factor));
    draw_axes(&mut s, &frame, &block.levels, &block.factor);
    for (i, (_, cells)) in block.rows.iter().enumerate() {
        let points: Vec<(f64, f64)> = cells
            .iter()
            .enumerate()
            .filter_map(|(j, cell)| {
                cell.map(|v| (frame.x_at(j, block.levels.len()), frame.y_at(v)))
            })
            .collect();
        if points.len() > 1 {
            let path: Vec<String> = points
                .iter()
                .map(|(x, y)| format!("{x:.1},{y:.1}"))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="2"/>"#,
                path.join(" "),
                color(i)
            );
        }
        for (x, y) in points {
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="{}"/>"#,
                color(i)
            );
        }
    }
    draw_legend(
        &mut s,
        &block
            .rows
            .iter()
            .map(|(m, _)| m.clone())
            .collect::<Vec<_>>(),
    );
    s.push_str("</svg>\n");
    s
}

fn method_means_chart(summary: &SummaryTable) -> String {
    let frame = Frame::new(
        y_floor(summary.method_means.iter().map(|m| m.mean_ari)),
        1.0,
    );
    let mut s = open_svg("Mean ARI by method");
    let labels: Vec<String> = summary
        .method_means
        .iter()
        .map(|m| m.method.clone())
        .collect();
    // Bars use their own x layout; pass empty tick labels and annotate below.
    draw_axes(&mut s, &frame, &[], "method");
    let count = labels.len().max(1);
    let slot = frame.w / count as f64;
    let bar_w = slot * 0.6;
    for (i, m) in summary.method_means.iter().enumerate() {
        let x = frame.x0 + slot * i as f64 + (slot - bar_w) / 2.0;
        let y = frame.y_at(m.mean_ari.max(frame.y_min));
        let base = frame.y_at(0.0);
        let (top, height) = if y <= base {
            (y, base - y)
        } else {
            (base, y - base)
        };
        let _ = writeln!(
            s,
            r#"<rect x="{x:.1}" y="{top:.1}" width="{bar_w:.1}" height="{height:.1}" fill="{}"/>"#,
            color(i)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{:.3}</text>"#,
            x + bar_w / 2.0,
            top - 4.0,
            m.mean_ari
        );
        let cx = x + bar_w / 2.0;
        let ty = frame.y0 + frame.h + 16.0;
        let _ = writeln!(
            s,
            r#"<text x="{cx:.1}" y="{ty:.1}" font-size="10" text-anchor="end" transform="rotate(-30 {cx:.1} {ty:.1})">{}</text>"#,
            m.method
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes one SVG per varying factor plus the method-means bar chart into
/// `out_dir`, returning the paths written.
///
/// # Errors
///
/// I/O errors from the filesystem.
pub fn emit_plots(summary: &SummaryTable, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for block in &summary.factor_blocks {
        let path = out_dir.join(format!("ari_by_{}.svg", block.factor));
        fs::write(&path, factor_chart(block))?;
        written.push(path);
    }
    let path = out_dir.join("method_means.svg");
    fs::write(&path, method_means_chart(summary))?;
    written.push(path);
    Ok(written)
}
