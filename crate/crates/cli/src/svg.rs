//! Minimal deterministic SVG heatmaps.

use landau_core::RealField;
use std::path::Path;

const STOPS: [(f64, [u8; 3]); 5] = [
    (0.00, [68, 1, 84]),
    (0.25, [59, 82, 139]),
    (0.50, [33, 145, 140]),
    (0.75, [94, 201, 98]),
    (1.00, [253, 231, 37]),
];

fn color(t: f64) -> [u8; 3] {
    let t = t.clamp(0.0, 1.0);
    for pair in STOPS.windows(2) {
        let (t0, c0) = pair[0];
        let (t1, c1) = pair[1];
        if t <= t1 {
            let s = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
            return [
                (c0[0] as f64 + s * (c1[0] as f64 - c0[0] as f64)).round() as u8,
                (c0[1] as f64 + s * (c1[1] as f64 - c0[1] as f64)).round() as u8,
                (c0[2] as f64 + s * (c1[2] as f64 - c0[2] as f64)).round() as u8,
            ];
        }
    }
    STOPS[4].1
}

/// Writes a square heatmap; grids above 128 cells per axis are block-
/// averaged down so files stay small. The image side in pixels matches the
/// (square) grid aspect.
pub fn write_heatmap(field: &RealField, path: &Path) -> std::io::Result<()> {
    let n = field.grid.size();
    let stride = n.div_ceil(128);
    let cells = n / stride;
    let cell_px = 4usize;
    let side = cells * cell_px;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut blocks = vec![0.0f64; cells * cells];
    for bi in 0..cells {
        for bj in 0..cells {
            let mut acc = 0.0;
            for di in 0..stride {
                for dj in 0..stride {
                    acc += field.values[(bi * stride + di, bj * stride + dj)];
                }
            }
            let v = acc / (stride * stride) as f64;
            blocks[bi * cells + bj] = v;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{side}\" height=\"{side}\" \
         viewBox=\"0 0 {side} {side}\">\n"
    ));
    for bi in 0..cells {
        for bj in 0..cells {
            let v = (blocks[bi * cells + bj] - lo) / span;
            let [r, g, b] = color(v);
            // Axis 0 is x (horizontal), axis 1 is y (vertical, upward).
            let px = bi * cell_px;
            let py = (cells - 1 - bj) * cell_px;
            out.push_str(&format!(
                "<rect x=\"{px}\" y=\"{py}\" width=\"{cell_px}\" height=\"{cell_px}\" \
                 fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n"
            ));
        }
    }
    out.push_str("</svg>\n");
    std::fs::write(path, out)
}
