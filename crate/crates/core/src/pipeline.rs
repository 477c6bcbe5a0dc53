//! SVG text to template in one call.

use crate::config::Config;
use crate::decoration::{apply_correction, detect, strip_decorations, Correction, DecorationModel};
use crate::error::PipelineError;
use crate::grec::{deconstruct, GrecTemplate};
use crate::ingest::ingest;
use crate::scene::NormalizedScene;

/// Ingests `svg` and runs decoration detection, leaving corrections and
/// deconstruction to the caller.
pub fn detect_svg(
    svg: &str,
    cfg: &Config,
) -> Result<(NormalizedScene, DecorationModel), PipelineError> {
    cfg.validate()?;
    let scene = ingest(svg, cfg)?;
    let model = detect(&scene, cfg);
    Ok((scene, model))
}

pub fn apply_corrections(
    scene: &NormalizedScene,
    model: DecorationModel,
    corrections: &[Correction],
    cfg: &Config,
) -> Result<DecorationModel, PipelineError> {
    let mut model = model;
    for c in corrections {
        model = apply_correction(&model, scene, cfg, c)?;
    }
    Ok(model)
}

pub fn deconstruct_scene(
    scene: &NormalizedScene,
    model: DecorationModel,
    cfg: &Config,
) -> Result<GrecTemplate, PipelineError> {
    let stripped = strip_decorations(scene, &model, cfg)?;
    Ok(deconstruct(&stripped, model, cfg)?)
}

/// Detection, corrections in order, stripping and deconstruction.
pub fn deconstruct_svg(
    svg: &str,
    corrections: &[Correction],
    cfg: &Config,
) -> Result<GrecTemplate, PipelineError> {
    let (scene, model) = detect_svg(svg, cfg)?;
    let model = apply_corrections(&scene, model, corrections, cfg)?;
    deconstruct_scene(&scene, model, cfg)
}
