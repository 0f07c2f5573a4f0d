use std::fmt::Write;

use serde_json::{json, Map, Value};

use super::LevelGrid;

/// Fill colors for orientations 0..3.
pub const COLORS: [&str; 4] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a"];

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    /// Pixels per lattice unit.
    pub unit_px: u32,
    pub arrows: bool,
    pub stroke: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { unit_px: 20, arrows: true, stroke: "#ffffff".into() }
    }
}

/// Corner the arrow of orientation `k` points to: `(1/2, 1/2)` rotated by `kπ/2`.
fn corner(k: usize) -> (f64, f64) {
    [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)][k % 4]
}

/// One unit square per point, colored and arrowed by orientation.
pub fn chair_svg(points: &[((i64, i64), usize)], style: &SvgStyle) -> String {
    let mut pts = points.to_vec();
    pts.sort();
    let u = style.unit_px as i64;
    let mut out = String::new();
    if pts.is_empty() {
        out.push_str(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\" viewBox=\"0 0 0 0\">\n</svg>\n",
        );
        return out;
    }
    let x0 = pts.iter().map(|p| p.0 .0).min().unwrap();
    let x1 = pts.iter().map(|p| p.0 .0).max().unwrap();
    let y0 = pts.iter().map(|p| p.0 .1).min().unwrap();
    let y1 = pts.iter().map(|p| p.0 .1).max().unwrap();
    let (w, h) = ((x1 - x0 + 1) * u, (y1 - y0 + 1) * u);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    if style.arrows {
        out.push_str(
            "<defs><marker id=\"head\" viewBox=\"0 0 10 10\" refX=\"8\" refY=\"5\" markerWidth=\"4\" markerHeight=\"4\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#000000\"/></marker></defs>\n",
        );
    }
    for &((x, y), k) in &pts {
        let px = (x - x0) * u;
        let py = (y1 - y) * u;
        let _ = writeln!(
            out,
            "<rect x=\"{px}\" y=\"{py}\" width=\"{u}\" height=\"{u}\" fill=\"{}\" stroke=\"{}\" data-k=\"{k}\"/>",
            COLORS[k % 4],
            style.stroke
        );
        if style.arrows {
            let (cx, cy) = (px as f64 + u as f64 / 2.0, py as f64 + u as f64 / 2.0);
            let (dx, dy) = corner(k);
            let s = 0.7 * u as f64;
            let _ = writeln!(
                out,
                "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\" stroke-width=\"1\" marker-end=\"url(#head)\"/>",
                cx - dx * s * 0.5,
                cy + dy * s * 0.5,
                cx + dx * s,
                cy - dy * s
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// `{"level": i, "sets": {"0": [[x, y], …], …}}` with sorted points.
pub fn chair_json(grid: &LevelGrid) -> Value {
    let mut sets = Map::new();
    for k in 0..4 {
        let pts: Vec<Value> = grid.points(k).into_iter().map(|(x, y)| json!([x, y])).collect();
        sets.insert(k.to_string(), Value::Array(pts));
    }
    json!({ "level": grid.level, "sets": sets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chair::chair_recursion;

    #[test]
    fn square_counts_and_determinism() {
        let s = chair_recursion(3).unwrap();
        let one: Vec<_> = s.level(1).iter().collect();
        let svg1 = chair_svg(&one, &SvgStyle::default());
        assert_eq!(svg1.matches("<rect").count(), 4);
        let three: Vec<_> = s.level(3).iter().collect();
        let a = chair_svg(&three, &SvgStyle::default());
        let mut rev = three.clone();
        rev.reverse();
        assert_eq!(a, chair_svg(&rev, &SvgStyle::default()));
        assert_eq!(a.matches("<rect").count(), 64);
        assert!(a.contains("#e7298a") || s.level(3).counts()[3] == 0);
    }

    #[test]
    fn empty_document() {
        let svg = chair_svg(&[], &SvgStyle::default());
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 0);
    }

    #[test]
    fn json_layout() {
        let s = chair_recursion(1).unwrap();
        let v = chair_json(s.level(1));
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"level":1,"sets":{"0":[[0,0]],"1":[[0,1],[1,0]],"2":[[1,1]],"3":[]}}"#
        );
    }
}
