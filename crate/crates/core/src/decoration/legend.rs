use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::{LegendEntry, LegendKind, LegendModel, LegendTick};
use crate::config::Config;
use crate::fieldtype::parse_number;
use crate::scene::{NormalizedScene, SceneElement};

/// Looks for a gradient bar with numeric labels, then for a run of small
/// swatches each followed by a text.
pub fn detect_legend(scene: &NormalizedScene, config: &Config) -> LegendModel {
    detect_legend_excluding(scene, config, &BTreeSet::new())
}

pub(crate) fn detect_legend_excluding(
    scene: &NormalizedScene,
    config: &Config,
    excluded: &BTreeSet<usize>,
) -> LegendModel {
    let mut model = continuous(scene, excluded)
        .or_else(|| discrete(scene, config, excluded))
        .unwrap_or_else(LegendModel::none);
    model.refresh(scene);
    model
}

fn gradient_id(fill: &str) -> Option<&str> {
    fill.strip_prefix("url(#")?.strip_suffix(')')
}

fn continuous(scene: &NormalizedScene, excluded: &BTreeSet<usize>) -> Option<LegendModel> {
    for bar in scene.rects().filter(|e| !excluded.contains(&e.id)) {
        let Some(stops) = gradient_id(&bar.style.fill).and_then(|id| scene.gradients.get(id))
        else {
            continue;
        };
        if stops.len() < 2 {
            continue;
        }
        let b = bar.bbox();
        let horizontal = b.width >= b.height;
        let reach = 24.0;
        let mut ticks: Vec<LegendTick> = scene
            .texts()
            .filter(|t| !excluded.contains(&t.id))
            .filter_map(|t| {
                let value = parse_number(t.text_content())?;
                let tb = t.bbox();
                let adjacent = if horizontal {
                    let below = tb.y >= b.bottom() - 2.0 && tb.y - b.bottom() <= reach;
                    let above = tb.bottom() <= b.y + 2.0 && b.y - tb.bottom() <= reach;
                    (below || above)
                        && tb.center_x() >= b.x - 5.0
                        && tb.center_x() <= b.right() + 5.0
                } else {
                    let right = tb.x >= b.right() - 2.0 && tb.x - b.right() <= reach;
                    let left = tb.right() <= b.x + 2.0 && b.x - tb.right() <= reach;
                    (right || left)
                        && tb.center_y() >= b.y - 5.0
                        && tb.center_y() <= b.bottom() + 5.0
                };
                let px = if horizontal {
                    tb.center_x()
                } else {
                    tb.center_y()
                };
                adjacent.then_some(LegendTick {
                    label_id: t.id,
                    value,
                    px,
                })
            })
            .collect();
        if ticks.len() < 2 {
            continue;
        }
        ticks.sort_by(|a, b| a.px.total_cmp(&b.px));
        return Some(LegendModel {
            kind: LegendKind::Continuous,
            gradient_bar: Some(bar.id),
            gradient_stops: stops.clone(),
            ticks,
            ..LegendModel::none()
        });
    }
    None
}

struct Pair<'a> {
    mark: &'a SceneElement,
    label: &'a SceneElement,
    dx: f64,
    dy: f64,
}

fn discrete(
    scene: &NormalizedScene,
    config: &Config,
    excluded: &BTreeSet<usize>,
) -> Option<LegendModel> {
    let max_area = config.legend_mark_max_area * scene.view_box.area();
    let tol = config.collinear_tol_px;
    let texts: Vec<&SceneElement> = scene
        .texts()
        .filter(|t| !excluded.contains(&t.id) && !t.text_content().trim().is_empty())
        .collect();
    let mut used = BTreeSet::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut marks: Vec<&SceneElement> = scene
        .rects()
        .filter(|e| !excluded.contains(&e.id) && gradient_id(&e.style.fill).is_none())
        .filter(|e| e.bbox().area() <= max_area && e.style.has_visible_fill())
        .collect();
    marks.sort_by(|a, b| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)));
    for mark in marks {
        let mb = mark.bbox();
        let max_dx = 3.0 * mb.width.max(mb.height) + 4.0;
        let best = texts
            .iter()
            .filter(|t| !used.contains(&t.id))
            .filter_map(|t| {
                let tb = t.bbox();
                let dx = tb.x - mb.right();
                let dy = tb.center_y() - mb.center_y();
                (dx >= -1.0 && dx <= max_dx && dy.abs() <= (mb.height / 2.0).max(4.0))
                    .then_some((*t, dx, dy))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.id.cmp(&b.0.id)));
        if let Some((label, dx, dy)) = best {
            // a swatch that sits inside a larger mark run is part of the chart
            let covered = scene
                .rects()
                .any(|r| r.id != mark.id && r.bbox().overlaps(&mb, 0.5));
            if !covered {
                used.insert(label.id);
                pairs.push(Pair {
                    mark,
                    label,
                    dx,
                    dy,
                });
            }
        }
    }

    let mut best: Option<Vec<usize>> = None;
    for (i, seed) in pairs.iter().enumerate() {
        let sb = seed.mark.bbox();
        let compatible = |p: &Pair| {
            let b = p.mark.bbox();
            (p.dx - seed.dx).abs() <= tol
                && (p.dy - seed.dy).abs() <= tol
                && (b.width - sb.width).abs() <= 1.0
                && (b.height - sb.height).abs() <= 1.0
        };
        let vertical: Vec<usize> = (0..pairs.len())
            .filter(|&j| compatible(&pairs[j]) && (pairs[j].mark.x - seed.mark.x).abs() <= tol)
            .collect();
        let horizontal: Vec<usize> = (0..pairs.len())
            .filter(|&j| {
                compatible(&pairs[j])
                    && (pairs[j].mark.bbox().center_y() - sb.center_y()).abs() <= tol
            })
            .collect();
        for run in [vertical, horizontal] {
            if run.len() >= 2
                && run.contains(&i)
                && best.as_ref().is_none_or(|b| run.len() > b.len())
            {
                best = Some(run);
            }
        }
    }
    let run = best?;
    let mut entries: Vec<LegendEntry> = run
        .iter()
        .map(|&j| LegendEntry {
            label: String::from(pairs[j].label.text_content().trim()),
            color: pairs[j].mark.style.fill.clone(),
            mark_id: pairs[j].mark.id,
            label_id: pairs[j].label.id,
        })
        .collect();
    let pos = |id: usize| scene.get(id).map_or((0.0, 0.0), |e| (e.y, e.x));
    entries.sort_by(|a, b| {
        let (pa, pb) = (pos(a.mark_id), pos(b.mark_id));
        pa.0.total_cmp(&pb.0).then(pa.1.total_cmp(&pb.1))
    });
    let mut labels = BTreeSet::new();
    if !entries.iter().all(|e| labels.insert(e.label.clone())) {
        return None;
    }
    Some(LegendModel {
        kind: LegendKind::Discrete,
        entries,
        ..LegendModel::none()
    })
}
