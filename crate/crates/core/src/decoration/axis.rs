use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{AxisLabel, AxisModel, AxisTick, AxisTier, Orientation};
use crate::config::Config;
use crate::geom::BBox;
use crate::scene::{NormalizedScene, SceneElement};

/// Finds the x and y axes, skipping elements claimed by a detected legend.
pub fn detect_axes(
    scene: &NormalizedScene,
    config: &Config,
) -> (Option<AxisModel>, Option<AxisModel>) {
    let legend = super::detect_legend(scene, config);
    let excluded: BTreeSet<usize> = legend.element_ids().collect();
    detect_axes_excluding(scene, config, &excluded)
}

pub fn detect_axes_excluding(
    scene: &NormalizedScene,
    config: &Config,
    excluded: &BTreeSet<usize>,
) -> (Option<AxisModel>, Option<AxisModel>) {
    let Some(plot) = plot_region(scene, excluded) else {
        return (None, None);
    };
    let x = detect_axis(scene, config, Orientation::X, excluded, Some(plot), None);
    let mut excluded = excluded.clone();
    if let Some(x) = &x {
        excluded.extend(x.element_ids());
    }
    let y = detect_axis(scene, config, Orientation::Y, &excluded, Some(plot), None);
    (x, y)
}

/// Bounding box of the unclaimed non-text content, preferring rects.
pub(crate) fn plot_region(scene: &NormalizedScene, excluded: &BTreeSet<usize>) -> Option<BBox> {
    let rects: Vec<BBox> = scene
        .rects()
        .filter(|e| !excluded.contains(&e.id))
        .map(|e| e.bbox())
        .collect();
    if !rects.is_empty() {
        return BBox::enclosing(rects.iter());
    }
    let rest: Vec<BBox> = scene
        .elements
        .iter()
        .filter(|e| !e.is_text() && !excluded.contains(&e.id))
        .map(|e| e.bbox())
        .collect();
    BBox::enclosing(rest.iter())
}

struct Candidate {
    id: usize,
    text: String,
    anchor: f64,
    cross: f64,
    font_size: f64,
    bbox: BBox,
}

fn along(o: Orientation, b: &BBox) -> f64 {
    match o {
        Orientation::X => b.center_x(),
        Orientation::Y => b.center_y(),
    }
}

fn candidate(e: &SceneElement, o: Orientation) -> Candidate {
    let bbox = e.bbox();
    Candidate {
        id: e.id,
        text: String::from(e.text_content()),
        anchor: along(o, &bbox),
        cross: match o {
            Orientation::X => e.y,
            Orientation::Y => e.x,
        },
        font_size: e.style.font_size,
        bbox,
    }
}

/// Signed distance from the plot edge facing the row; positive outside.
fn distance_from_plot(o: Orientation, plot: Option<BBox>, cross: f64) -> f64 {
    let Some(p) = plot else { return cross };
    match o {
        Orientation::X if cross >= p.center_y() => cross - p.bottom(),
        Orientation::X => p.y - cross,
        Orientation::Y if cross <= p.center_x() => p.x - cross,
        Orientation::Y => cross - p.right(),
    }
}

fn same_side(o: Orientation, plot: Option<BBox>, a: f64, b: f64) -> bool {
    let Some(p) = plot else { return true };
    let mid = match o {
        Orientation::X => p.center_y(),
        Orientation::Y => p.center_x(),
    };
    (a >= mid) == (b >= mid)
}

/// Groups candidates into rows whose cross coordinates stay within `tol`
/// of the row's first member.
fn rows(mut cands: Vec<Candidate>, tol: f64) -> Vec<Vec<Candidate>> {
    cands.sort_by(|a, b| a.cross.total_cmp(&b.cross).then(a.id.cmp(&b.id)));
    let mut out: Vec<Vec<Candidate>> = Vec::new();
    for c in cands {
        match out.last_mut() {
            Some(row) if c.cross - row[0].cross <= tol => row.push(c),
            _ => out.push(alloc::vec![c]),
        }
    }
    out
}

/// Detects one axis. With `region` set, only elements inside it are
/// considered and the plot-side requirement is waived.
pub(crate) fn detect_axis(
    scene: &NormalizedScene,
    config: &Config,
    o: Orientation,
    excluded: &BTreeSet<usize>,
    plot: Option<BBox>,
    region: Option<BBox>,
) -> Option<AxisModel> {
    let tol = config.collinear_tol_px;
    let inside = |b: &BBox| region.is_none_or(|r| r.contains_point(b.center_x(), b.center_y()));
    let cands: Vec<Candidate> = scene
        .texts()
        .filter(|e| !excluded.contains(&e.id))
        .filter(|e| {
            let n = e.text_content().trim().chars().count();
            n > 0 && (n as f64) <= config.axis_label_max_chars
        })
        .map(|e| candidate(e, o))
        .filter(|c| inside(&c.bbox))
        .filter(|c| region.is_some() || plot.is_some_and(|p| outside_plot(o, &p, &c.bbox, tol)))
        .collect();
    let min_count = if region.is_some() { 1 } else { 2 };
    let rows = rows(cands, tol);
    let dist = |row: &[Candidate]| distance_from_plot(o, plot, row[0].cross);

    let t0 = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| r.len() >= min_count)
        .min_by(|(_, a), (_, b)| b.len().cmp(&a.len()).then(dist(a).total_cmp(&dist(b))))
        .map(|(i, _)| i)?;
    let n0 = rows[t0].len();
    let d0 = dist(&rows[t0]);
    let fs = rows[t0][0].font_size;
    let reach = (3.0 * fs).max(40.0);
    let t1 = rows
        .iter()
        .enumerate()
        .filter(|&(i, r)| {
            let d = dist(r);
            i != t0
                && r.len() >= min_count.max(2)
                && r.len() < n0
                && n0 % r.len() == 0
                && same_side(o, plot, r[0].cross, rows[t0][0].cross)
                && d > d0
                && d - d0 <= reach
        })
        .min_by(|(_, a), (_, b)| dist(a).total_cmp(&dist(b)))
        .map(|(i, _)| i);

    let tier = |row: &Vec<Candidate>| AxisTier {
        labels: row
            .iter()
            .map(|c| AxisLabel {
                id: c.id,
                text: String::from(c.text.trim()),
                anchor: c.anchor,
                cross: c.cross,
            })
            .collect(),
        ..AxisTier::empty()
    };
    let mut model = AxisModel::new(o);
    model.tiers = core::iter::once(t0)
        .chain(t1)
        .map(|i| tier(&rows[i]))
        .collect();

    let label_boxes: Vec<(f64, BBox)> = rows[t0].iter().map(|c| (c.anchor, c.bbox)).collect();
    let in_region =
        |e: &SceneElement| region.is_none_or(|r| r.inset(-tol).contains(&e.bbox(), 0.0));
    let usable = |e: &&SceneElement| !excluded.contains(&e.id) && in_region(e);
    model.ticks = scene
        .lines()
        .filter(usable)
        .filter(|e| e.line_length() <= config.tick_max_len_px)
        .filter_map(|e| {
            let ((x1, y1), (x2, y2)) = e.endpoints()?;
            let (perp, anchor, lo, hi) = match o {
                Orientation::X => (
                    (x1 - x2).abs() <= 0.5,
                    (x1 + x2) / 2.0,
                    y1.min(y2),
                    y1.max(y2),
                ),
                Orientation::Y => (
                    (y1 - y2).abs() <= 0.5,
                    (y1 + y2) / 2.0,
                    x1.min(x2),
                    x1.max(x2),
                ),
            };
            let near = label_boxes.iter().any(|(a, b)| {
                let (blo, bhi) = match o {
                    Orientation::X => (b.y, b.bottom()),
                    Orientation::Y => (b.x, b.right()),
                };
                let gap = (blo - hi).max(lo - bhi).max(0.0);
                (a - anchor).abs() <= config.tick_label_radius_px
                    && gap <= config.tick_label_radius_px
            });
            (perp && near).then_some(AxisTick { id: e.id, anchor })
        })
        .collect();

    let (amin, amax) = super::min_max(label_boxes.iter().map(|(a, _)| *a))?;
    let extent = amax - amin;
    let row_cross = rows[t0][0].cross;
    let plot_cross = plot.map(|p| match o {
        Orientation::X => p.center_y(),
        Orientation::Y => p.center_x(),
    });
    model.axis_line = scene
        .lines()
        .filter(usable)
        .filter(|e| !model.ticks.iter().any(|t| t.id == e.id))
        .filter_map(|e| {
            let ((x1, y1), (x2, y2)) = e.endpoints()?;
            let (parallel, cross, lo, hi) = match o {
                Orientation::X => ((y1 - y2).abs() <= 0.5, y1, x1.min(x2), x1.max(x2)),
                Orientation::Y => ((x1 - x2).abs() <= 0.5, x1, y1.min(y2), y1.max(y2)),
            };
            let covered = hi.min(amax) - lo.max(amin);
            let spans = extent > 0.0 && covered >= config.axis_line_span * extent;
            // must sit between the labels and the plot, within reach of the labels
            let between = plot_cross.is_none_or(|pc| (cross - row_cross) * (pc - row_cross) > 0.0);
            let close = (cross - row_cross).abs() <= reach;
            (parallel && spans && between && close).then_some((e.id, (cross - row_cross).abs()))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
        .map(|(id, _)| id);

    model.refresh();
    Some(model)
}

fn outside_plot(o: Orientation, p: &BBox, b: &BBox, tol: f64) -> bool {
    match o {
        Orientation::X => {
            let margin = 0.1 * p.width;
            let beside = b.center_x() >= p.x - margin && b.center_x() <= p.right() + margin;
            beside && (b.y >= p.bottom() - tol || b.bottom() <= p.y + tol)
        }
        Orientation::Y => {
            let margin = 0.1 * p.height + b.height;
            let beside = b.center_y() >= p.y - margin && b.center_y() <= p.bottom() + margin;
            beside && (b.right() <= p.x + tol || b.x >= p.right() - tol)
        }
    }
}
