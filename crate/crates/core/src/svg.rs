//! Static SVG renderings of barcodes and level sweeps.
//!
//! Output is a pure function of the input: fixed canvas, fixed element order,
//! coordinates printed with two decimals.

use std::fmt::Write as _;

use crate::persistence::Barcode;
use crate::sweep::SweepRow;

const WIDTH: f64 = 640.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 40.0;

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#555555"];

fn header(s: &mut String, height: f64, title: &str) {
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {WIDTH:.0} {height:.0}\">"
    );
    let _ = writeln!(
        s,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH:.0}\" height=\"{height:.0}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"18.00\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        escape(title)
    );
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One horizontal segment per interval; the x axis carries the levels in
/// schedule order, with a final slot for classes alive at the last level.
pub fn barcode_svg(bc: &Barcode, title: &str) -> String {
    let n = bc.levels().len();
    let rows = bc.len().max(1);
    let pitch = 8.0;
    let height = TOP + BOTTOM + pitch * rows as f64 + 10.0;
    let slots = (n + 1).max(2) as f64;
    let x = |i: usize| LEFT + (WIDTH - LEFT - RIGHT) * (i as f64 - 1.0) / (slots - 1.0);
    let axis_y = height - BOTTOM + 5.0;
    let mut s = String::new();
    header(&mut s, height, title);
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{axis_y:.2}\" x2=\"{:.2}\" y2=\"{axis_y:.2}\" stroke=\"black\"/>",
        x(1),
        x(n + 1)
    );
    for (i, level) in bc.levels().iter().enumerate() {
        let xi = x(i + 1);
        let _ = writeln!(
            s,
            "<line x1=\"{xi:.2}\" y1=\"{axis_y:.2}\" x2=\"{xi:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            axis_y + 4.0
        );
        let _ = writeln!(
            s,
            "<text x=\"{xi:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{level}</text>",
            axis_y + 16.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">open</text>",
        x(n + 1),
        axis_y + 16.0
    );
    for (row, iv) in bc.intervals().iter().enumerate() {
        let y = TOP + pitch * (row as f64 + 0.5);
        let color = COLORS[iv.q as usize % COLORS.len()];
        let _ = writeln!(
            s,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"4\"/>",
            x(iv.birth),
            x(iv.death_index(n))
        );
    }
    s += "</svg>\n";
    s
}

/// Curves of b0, b1, b2 and χ against the level, one circle per data point.
pub fn sweep_svg(rows: &[SweepRow], title: &str) -> String {
    let height = 400.0;
    let (mut lo_x, mut hi_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut lo_y, mut hi_y) = (0.0f64, 1.0f64);
    for r in rows {
        lo_x = lo_x.min(r.level);
        hi_x = hi_x.max(r.level);
        for v in [r.b0 as f64, r.b1 as f64, r.b2 as f64, r.chi as f64] {
            lo_y = lo_y.min(v);
            hi_y = hi_y.max(v);
        }
    }
    if !(hi_x > lo_x) {
        lo_x -= 0.5;
        hi_x += 0.5;
    }
    let px = |v: f64| LEFT + (WIDTH - LEFT - RIGHT) * (v - lo_x) / (hi_x - lo_x);
    let py = |v: f64| TOP + (height - TOP - BOTTOM) * (hi_y - v) / (hi_y - lo_y);
    let mut s = String::new();
    header(&mut s, height, title);
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        px(lo_x),
        py(0.0),
        px(hi_x),
        py(0.0)
    );
    let _ = writeln!(
        s,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
        LEFT,
        py(hi_y),
        LEFT,
        py(lo_y)
    );
    for (v, anchor) in [(lo_y, "end"), (hi_y, "end")] {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"{anchor}\">{v}</text>",
            LEFT - 4.0,
            py(v) + 3.0
        );
    }
    for r in rows {
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            px(r.level),
            height - BOTTOM + 16.0,
            r.level
        );
    }
    let series: [(&str, fn(&SweepRow) -> f64); 4] = [
        ("b0", |r| r.b0 as f64),
        ("b1", |r| r.b1 as f64),
        ("b2", |r| r.b2 as f64),
        ("chi", |r| r.chi as f64),
    ];
    for (k, (name, get)) in series.iter().enumerate() {
        let color = COLORS[k];
        let pts: Vec<String> = rows
            .iter()
            .map(|r| format!("{:.2},{:.2}", px(r.level), py(get(r))))
            .collect();
        let _ = writeln!(
            s,
            "<polyline class=\"{name}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>",
            pts.join(" ")
        );
        for r in rows {
            let _ = writeln!(
                s,
                "<circle class=\"{name}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>",
                px(r.level),
                py(get(r))
            );
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" fill=\"{color}\">{name}</text>",
            WIDTH - RIGHT - 120.0 + 30.0 * k as f64,
            TOP + 10.0
        );
    }
    s += "</svg>\n";
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_segment_per_interval() {
        let bc = Barcode::from_indices(&[0.2, 0.4, 0.6], [(0, 1, 4), (0, 2, 3), (1, 1, 2)]);
        let svg = barcode_svg(&bc, "q=0");
        assert_eq!(svg.matches("stroke-width=\"4\"").count(), 3);
        assert_eq!(svg, barcode_svg(&bc, "q=0"));
    }

    #[test]
    fn two_points_per_series() {
        let rows = [
            SweepRow {
                level: 0.2,
                b0: 3,
                b1: 1,
                b2: 0,
                chi: 2,
                wall_seconds: 0.0,
            },
            SweepRow {
                level: 0.4,
                b0: 1,
                b1: 2,
                b2: 1,
                chi: 0,
                wall_seconds: 0.0,
            },
        ];
        let svg = sweep_svg(&rows, "sweep");
        for name in ["b0", "b1", "b2", "chi"] {
            assert_eq!(svg.matches(&format!("<circle class=\"{name}\"")).count(), 2);
        }
    }
}
