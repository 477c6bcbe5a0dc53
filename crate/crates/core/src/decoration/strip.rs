use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::DecorationModel;
use crate::config::Config;
use crate::error::DecorationError;
use crate::geom::BBox;
use crate::scene::NormalizedScene;

/// Removes claimed decorations, grid lines aligned with tick anchors, and
/// every text. Ids keep referring to the input scene.
pub fn strip_decorations(
    scene: &NormalizedScene,
    model: &DecorationModel,
    config: &Config,
) -> Result<NormalizedScene, DecorationError> {
    let claimed = model.claimed_ids();
    let rects: Vec<BBox> = scene
        .rects()
        .filter(|e| !claimed.contains(&e.id))
        .map(|e| e.bbox())
        .collect();
    let Some(plot) = BBox::enclosing(rects.iter()) else {
        return Err(DecorationError::EmptyScene);
    };
    let tol = config.collinear_tol_px;
    let anchors = |axis: &Option<super::AxisModel>| -> Vec<f64> {
        axis.iter()
            .flat_map(|a| {
                a.ticks.iter().map(|t| t.anchor).chain(
                    a.tiers
                        .first()
                        .into_iter()
                        .flat_map(|t| t.labels.iter().map(|l| l.anchor)),
                )
            })
            .collect()
    };
    let x_anchors = anchors(&model.x_axis);
    let y_anchors = anchors(&model.y_axis);
    let grid: BTreeSet<usize> = scene
        .lines()
        .filter(|e| !claimed.contains(&e.id))
        .filter(|e| {
            let Some(((x1, y1), (x2, y2))) = e.endpoints() else {
                return false;
            };
            let horizontal = (y1 - y2).abs() <= 0.5;
            let vertical = (x1 - x2).abs() <= 0.5;
            if horizontal {
                (x1 - x2).abs() >= config.grid_line_span * plot.width
                    && y_anchors.iter().any(|a| (a - y1).abs() <= tol)
            } else if vertical {
                (y1 - y2).abs() >= config.grid_line_span * plot.height
                    && x_anchors.iter().any(|a| (a - x1).abs() <= tol)
            } else {
                false
            }
        })
        .map(|e| e.id)
        .collect();
    Ok(scene.retain(|e| !e.is_text() && !claimed.contains(&e.id) && !grid.contains(&e.id)))
}
