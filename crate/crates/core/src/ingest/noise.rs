use crate::config::Config;
use crate::error::IngestError;
use crate::scene::{ElementKind, NormalizedScene, SceneElement};

/// Removes dummy marks: invisible or zero-sized rects, full-bleed
/// backgrounds, fully transparent elements and anything lying entirely
/// outside the enlarged viewBox (parked tooltips). Ids are renumbered densely.
pub fn filter_noise(
    scene: &NormalizedScene,
    config: &Config,
) -> Result<NormalizedScene, IngestError> {
    let vb = scene.view_box;
    let vb_area = vb.area();
    let frame = vb.scaled_about_center(config.offscreen_factor);
    let keep = |e: &SceneElement| {
        if e.style.opacity <= 0.0 {
            return false;
        }
        let b = e.bbox();
        let outside = b.right() < frame.x
            || b.x > frame.right()
            || b.bottom() < frame.y
            || b.y > frame.bottom();
        if outside && vb_area > 0.0 {
            return false;
        }
        if e.kind == ElementKind::Rect {
            if e.width <= 0.0 || e.height <= 0.0 {
                return false;
            }
            if !e.style.has_visible_fill() && !e.style.has_visible_stroke() {
                return false;
            }
            if vb_area > 0.0 && e.bbox().area() >= config.background_area_fraction * vb_area {
                return false;
            }
        }
        true
    };
    let out = scene.retain_renumbered(keep);
    if out.elements.is_empty() {
        return Err(IngestError::EmptyScene);
    }
    Ok(out)
}
