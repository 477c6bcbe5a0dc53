//! Relationship parameters of a completed collection.

use alloc::vec::Vec;

use super::relation::{cross_tol, FlowOrder, Gravity, RelationCategory, RelationshipDescriptor};
use super::tree::Alignment;
use crate::config::Config;
use crate::geom::BBox;

/// Merged intervals (touching within `tol` joins), sorted.
pub(crate) fn bands(intervals: impl Iterator<Item = (f64, f64)>, tol: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = intervals.collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in v {
        match out.last_mut() {
            Some(last) if lo - last.1 <= tol => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn band_of(bands: &[(f64, f64)], lo: f64, hi: f64) -> usize {
    bands
        .iter()
        .position(|b| lo < b.1 && hi > b.0)
        .or_else(|| bands.iter().position(|b| lo <= b.1 && hi >= b.0))
        .unwrap_or(0)
}

fn mean_gap(bands: &[(f64, f64)]) -> f64 {
    if bands.len() < 2 {
        return 0.0;
    }
    bands
        .windows(2)
        .map(|w| (w[1].0 - w[0].1).max(0.0))
        .sum::<f64>()
        / (bands.len() - 1) as f64
}

/// Whether all boxes agree on one coordinate within `eps`.
pub fn aligned(boxes: &[BBox], a: Alignment, eps: f64) -> bool {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for b in boxes {
        let v = a.coordinate(b);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi - lo <= eps
}

/// Shared anchoring across the flow. Boxes that agree on both edges and
/// the center are uniform and report no gravity.
pub fn gravity(boxes: &[BBox], horizontal_flow: bool, eps: f64) -> Gravity {
    let (lo, hi, mid) = if horizontal_flow {
        (Alignment::Top, Alignment::Bottom, Alignment::CenterV)
    } else {
        (Alignment::Left, Alignment::Right, Alignment::CenterH)
    };
    let (l, h, m) = (
        aligned(boxes, lo, eps),
        aligned(boxes, hi, eps),
        aligned(boxes, mid, eps),
    );
    match (l, h, m) {
        (true, true, _) => Gravity::None,
        (_, true, _) => {
            if horizontal_flow {
                Gravity::Bottom
            } else {
                Gravity::Right
            }
        }
        (true, _, _) => {
            if horizontal_flow {
                Gravity::Top
            } else {
                Gravity::Left
            }
        }
        (_, _, true) => {
            if horizontal_flow {
                Gravity::CenterV
            } else {
                Gravity::CenterH
            }
        }
        _ => Gravity::None,
    }
}

/// Computes the descriptor for children `boxes` grouped under `category`
/// (`HGrid` stands for the grid class) and the child order.
pub fn refine_relationship(
    boxes: &[BBox],
    category: RelationCategory,
    packing_gap: Option<f64>,
    cfg: &Config,
) -> (RelationshipDescriptor, Vec<usize>) {
    let n = boxes.len();
    let mut order: Vec<usize> = (0..n).collect();
    let along = |horizontal: bool| {
        let v: Vec<(f64, f64)> = if horizontal {
            boxes.iter().map(|b| (b.x, b.right())).collect()
        } else {
            boxes.iter().map(|b| (b.y, b.bottom())).collect()
        };
        v
    };
    match category {
        RelationCategory::HStack | RelationCategory::VStack => {
            let horizontal = category == RelationCategory::HStack;
            let spans = along(horizontal);
            order.sort_by(|&a, &b| spans[a].0.total_cmp(&spans[b].0));
            let gap = if n > 1 {
                order
                    .windows(2)
                    .map(|w| (spans[w[1]].0 - spans[w[0]].1).max(0.0))
                    .sum::<f64>()
                    / (n - 1) as f64
            } else {
                0.0
            };
            let d = RelationshipDescriptor {
                category,
                gap,
                gap_x: if horizontal { gap } else { 0.0 },
                gap_y: if horizontal { 0.0 } else { gap },
                rows: if horizontal { 1 } else { n },
                cols: if horizontal { n } else { 1 },
                gravity: Gravity::None,
                order: if horizontal {
                    FlowOrder::LeftToRight
                } else {
                    FlowOrder::TopToBottom
                },
            };
            (d, order)
        }
        RelationCategory::Packing => {
            order.sort_by(|&a, &b| {
                boxes[b]
                    .area()
                    .total_cmp(&boxes[a].area())
                    .then(boxes[a].y.total_cmp(&boxes[b].y))
                    .then(boxes[a].x.total_cmp(&boxes[b].x))
            });
            let gap = packing_gap.unwrap_or(0.0);
            let d = RelationshipDescriptor {
                category,
                gap,
                gap_x: gap,
                gap_y: gap,
                rows: 0,
                cols: 0,
                gravity: Gravity::None,
                order: FlowOrder::BySize,
            };
            (d, order)
        }
        _ => {
            let tol = cross_tol(cfg);
            let rows = bands(boxes.iter().map(|b| (b.y, b.bottom())), tol);
            let cols = bands(boxes.iter().map(|b| (b.x, b.right())), tol);
            let cell: Vec<(usize, usize)> = boxes
                .iter()
                .map(|b| {
                    (
                        band_of(&rows, b.y, b.bottom()),
                        band_of(&cols, b.x, b.right()),
                    )
                })
                .collect();
            order.sort_by_key(|&i| cell[i]);
            let (category, gravity, flow) = if rows.len() == 1 {
                (
                    RelationCategory::HGrid,
                    gravity(boxes, true, cfg.eps_align),
                    FlowOrder::LeftToRight,
                )
            } else if cols.len() == 1 {
                (
                    RelationCategory::VGrid,
                    gravity(boxes, false, cfg.eps_align),
                    FlowOrder::TopToBottom,
                )
            } else {
                (RelationCategory::HGrid, Gravity::None, FlowOrder::RowMajor)
            };
            let (gap_x, gap_y) = (mean_gap(&cols), mean_gap(&rows));
            let d = RelationshipDescriptor {
                category,
                gap: if category == RelationCategory::VGrid {
                    gap_y
                } else {
                    gap_x
                },
                gap_x,
                gap_y,
                rows: rows.len(),
                cols: cols.len(),
                gravity,
                order: flow,
            };
            (d, order)
        }
    }
}
