//! Stack, grid and squarified packing layouts.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::BBox;
use crate::grec::Gravity;

/// Places children contiguously from the frame origin along the flow; each
/// child spans the frame's cross extent.
pub fn layout_stack(frame: BBox, sizes: &[f64], horizontal: bool, gap: f64) -> Vec<BBox> {
    let mut at = if horizontal { frame.x } else { frame.y };
    sizes
        .iter()
        .map(|&s| {
            let b = if horizontal {
                BBox::new(at, frame.y, s, frame.height)
            } else {
                BBox::new(frame.x, at, frame.width, s)
            };
            at += s + gap;
            b
        })
        .collect()
}

/// Row-major placement into `cols` columns. Column widths and row heights
/// fit their largest child; `gravity` anchors each child in its cell.
pub fn layout_grid(
    origin: (f64, f64),
    sizes: &[(f64, f64)],
    cols: usize,
    gap_x: f64,
    gap_y: f64,
    gravity: Gravity,
) -> Vec<BBox> {
    let cols = cols.max(1);
    let rows = sizes.len().div_ceil(cols);
    let mut col_w = vec![0.0f64; cols];
    let mut row_h = vec![0.0f64; rows];
    for (i, &(w, h)) in sizes.iter().enumerate() {
        col_w[i % cols] = col_w[i % cols].max(w);
        row_h[i / cols] = row_h[i / cols].max(h);
    }
    let offsets = |v: &[f64], gap: f64, start: f64| {
        let mut at = start;
        v.iter()
            .map(|s| {
                let o = at;
                at += s + gap;
                o
            })
            .collect::<Vec<f64>>()
    };
    let xs = offsets(&col_w, gap_x, origin.0);
    let ys = offsets(&row_h, gap_y, origin.1);
    sizes
        .iter()
        .enumerate()
        .map(|(i, &(w, h))| {
            let (c, r) = (i % cols, i / cols);
            let x = match gravity {
                Gravity::Right => xs[c] + col_w[c] - w,
                Gravity::CenterH => xs[c] + (col_w[c] - w) / 2.0,
                _ => xs[c],
            };
            let y = match gravity {
                Gravity::Bottom => ys[r] + row_h[r] - h,
                Gravity::CenterV => ys[r] + (row_h[r] - h) / 2.0,
                _ => ys[r],
            };
            BBox::new(x, y, w, h)
        })
        .collect()
}

fn worst(row: &[f64], side: f64) -> f64 {
    let sum: f64 = row.iter().sum();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &a in row {
        lo = lo.min(a);
        hi = hi.max(a);
    }
    let s2 = sum * sum;
    let w2 = side * side;
    (w2 * hi / s2).max(s2 / (w2 * lo))
}

/// Squarified treemap of `areas` (any positive scale) inside `frame`, each
/// cell then inset by half the gap so neighbours sit `gap` apart. Output
/// order matches `areas`.
pub fn layout_pack(frame: BBox, areas: &[f64], gap: f64) -> Vec<BBox> {
    let n = areas.len();
    let mut out = vec![BBox::default(); n];
    let total: f64 = areas.iter().sum();
    if n == 0 || total <= 0.0 || frame.area() <= 0.0 {
        return out;
    }
    let k = frame.area() / total;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| areas[b].total_cmp(&areas[a]).then(a.cmp(&b)));
    let scaled: Vec<f64> = order.iter().map(|&i| areas[i] * k).collect();
    let mut rest = frame;
    let mut start = 0;
    while start < n {
        let side = rest.width.min(rest.height);
        let mut end = start + 1;
        while end < n && worst(&scaled[start..=end], side) <= worst(&scaled[start..end], side) {
            end += 1;
        }
        let row = &scaled[start..end];
        let sum: f64 = row.iter().sum();
        if rest.width >= rest.height {
            // column along the left edge
            let w = if end == n {
                rest.width
            } else {
                sum / rest.height
            };
            let mut y = rest.y;
            for (j, a) in row.iter().enumerate() {
                let h = if j + 1 == row.len() {
                    rest.bottom() - y
                } else {
                    a / w
                };
                out[order[start + j]] = BBox::new(rest.x, y, w, h);
                y += h;
            }
            rest = BBox::new(rest.x + w, rest.y, (rest.width - w).max(0.0), rest.height);
        } else {
            let h = if end == n {
                rest.height
            } else {
                sum / rest.width
            };
            let mut x = rest.x;
            for (j, a) in row.iter().enumerate() {
                let w = if j + 1 == row.len() {
                    rest.right() - x
                } else {
                    a / h
                };
                out[order[start + j]] = BBox::new(x, rest.y, w, h);
                x += w;
            }
            rest = BBox::new(rest.x, rest.y + h, rest.width, (rest.height - h).max(0.0));
        }
        start = end;
    }
    for b in &mut out {
        *b = b.inset(gap / 2.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stack_prefix_sums() {
        let v = layout_stack(
            BBox::new(0.0, 0.0, 20.0, 60.0),
            &[30.0, 20.0, 10.0],
            false,
            0.0,
        );
        assert_eq!(v.iter().map(|b| b.y).collect::<Vec<_>>(), [0.0, 30.0, 50.0]);
        let h = layout_stack(BBox::new(0.0, 0.0, 22.0, 5.0), &[10.0, 10.0], true, 2.0);
        assert_eq!(h.iter().map(|b| b.x).collect::<Vec<_>>(), [0.0, 12.0]);
        assert!(h.iter().all(|b| b.height == 5.0));
    }

    #[test]
    fn grid_bottom_gravity() {
        let sizes = [(10.0, 30.0), (10.0, 50.0), (10.0, 20.0), (10.0, 40.0)];
        let v = layout_grid((0.0, 0.0), &sizes, 4, 2.0, 0.0, Gravity::Bottom);
        assert!(v.iter().all(|b| b.bottom() == 50.0));
        assert_eq!(v[1].y, 0.0);
        assert_eq!(v[3].x, 36.0);
    }

    #[test]
    fn grid_lattice() {
        let v = layout_grid((0.0, 0.0), &[(5.0, 5.0); 6], 3, 1.0, 1.0, Gravity::None);
        assert_eq!((v[4].x, v[4].y), (6.0, 6.0));
        assert_eq!((v[2].x, v[2].y), (12.0, 0.0));
    }

    #[test]
    fn pack_single_and_pair() {
        let f = BBox::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(layout_pack(f, &[3.0], 2.0), [BBox::new(1.0, 1.0, 8.0, 8.0)]);
        let v = layout_pack(f, &[1.0, 1.0], 0.0);
        assert!(v.iter().all(|b| (b.area() - 50.0).abs() < 1e-9));
        assert!(!v[0].overlaps(&v[1], 0.0));
    }
}
