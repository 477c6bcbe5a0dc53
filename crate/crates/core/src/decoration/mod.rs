//! Axis and legend detection, user corrections, and decoration stripping.

mod axis;
mod correction;
mod legend;
mod strip;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::DecorationError;
use crate::fieldtype::{infer_field_type, parse_number, FieldType};
use crate::geom::BBox;
use crate::scene::{GradientStop, NormalizedScene};

pub use axis::{detect_axes, detect_axes_excluding};
pub use correction::{apply_correction, Correction, CorrectionKind, CorrectionPayload, Target};
pub use legend::detect_legend;
pub use strip::strip_decorations;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisLabel {
    pub id: usize,
    pub text: String,
    /// Position along the axis (label center).
    pub anchor: f64,
    /// Position across the axis, used for the collinearity check.
    pub cross: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisTier {
    pub labels: Vec<AxisLabel>,
    pub field_type: FieldType,
    /// Set by an explicit field type override; inference no longer applies.
    #[serde(default)]
    pub field_type_locked: bool,
}

impl AxisTier {
    pub fn empty() -> Self {
        Self {
            labels: Vec::new(),
            field_type: FieldType::Categorical,
            field_type_locked: false,
        }
    }

    pub fn texts(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.text.as_str()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisTick {
    pub id: usize,
    pub anchor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisModel {
    pub orientation: Orientation,
    /// Tier 0 is nearest the plot.
    pub tiers: Vec<AxisTier>,
    pub axis_line: Option<usize>,
    pub ticks: Vec<AxisTick>,
    pub pixel_range: (f64, f64),
    pub numeric_domain: Option<(f64, f64)>,
}

impl AxisModel {
    pub fn new(orientation: Orientation) -> Self {
        Self {
            orientation,
            tiers: alloc::vec![AxisTier::empty()],
            axis_line: None,
            ticks: Vec::new(),
            pixel_range: (0.0, 0.0),
            numeric_domain: None,
        }
    }

    pub fn field_type(&self) -> FieldType {
        self.tiers
            .first()
            .map_or(FieldType::Categorical, |t| t.field_type)
    }

    pub fn element_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.tiers
            .iter()
            .flat_map(|t| t.labels.iter().map(|l| l.id))
            .chain(self.ticks.iter().map(|t| t.id))
            .chain(self.axis_line)
    }

    /// Recomputes label order, field types, pixel range and numeric domain.
    pub fn refresh(&mut self) {
        for tier in &mut self.tiers {
            tier.labels
                .sort_by(|a, b| a.anchor.total_cmp(&b.anchor).then(a.id.cmp(&b.id)));
            if !tier.field_type_locked && !tier.labels.is_empty() {
                tier.field_type = infer_field_type(&tier.texts());
            }
        }
        self.ticks
            .sort_by(|a, b| a.anchor.total_cmp(&b.anchor).then(a.id.cmp(&b.id)));
        let anchors = self
            .tiers
            .iter()
            .flat_map(|t| t.labels.iter().map(|l| l.anchor))
            .chain(self.ticks.iter().map(|t| t.anchor));
        self.pixel_range = min_max(anchors).unwrap_or((0.0, 0.0));
        self.numeric_domain = None;
        if let Some(t0) = self.tiers.first() {
            if t0.field_type == FieldType::Quantitative {
                let values: Vec<f64> = t0
                    .labels
                    .iter()
                    .filter_map(|l| parse_number(&l.text))
                    .collect();
                if values.len() >= 2 {
                    self.numeric_domain = min_max(values.into_iter());
                }
            }
        }
    }

    /// Checks tier collinearity and that the pixel range covers every tick.
    pub fn validate(&self, tol: f64) -> Result<(), DecorationError> {
        for tier in &self.tiers {
            if let Some((lo, _)) = min_max(tier.labels.iter().map(|l| l.cross)) {
                if let Some(bad) = tier.labels.iter().find(|l| l.cross - lo > tol + 1e-9) {
                    return Err(DecorationError::NotCollinear(bad.id));
                }
            }
        }
        Ok(())
    }

    /// Linear pixel-to-value mapping from the numeric tier-0 labels.
    pub fn value_at(&self, px: f64) -> Option<f64> {
        let t0 = self.tiers.first()?;
        let pts: Vec<(f64, f64)> = t0
            .labels
            .iter()
            .filter_map(|l| parse_number(&l.text).map(|v| (l.anchor, v)))
            .collect();
        let (&(p0, v0), &(p1, v1)) = (pts.first()?, pts.last()?);
        if (p1 - p0).abs() < 1e-9 {
            return None;
        }
        Some(v0 + (px - p0) * (v1 - v0) / (p1 - p0))
    }
}

fn min_max(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LegendKind {
    Discrete,
    Continuous,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendEntry {
    pub label: String,
    pub color: String,
    pub mark_id: usize,
    pub label_id: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendTick {
    pub label_id: usize,
    pub value: f64,
    pub px: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LegendModel {
    pub kind: LegendKind,
    pub entries: Vec<LegendEntry>,
    /// The gradient-filled bar of a continuous legend.
    pub gradient_bar: Option<usize>,
    pub gradient_stops: Vec<GradientStop>,
    pub ticks: Vec<LegendTick>,
    pub region: Option<BBox>,
}

impl LegendModel {
    pub fn none() -> Self {
        Self {
            kind: LegendKind::None,
            entries: Vec::new(),
            gradient_bar: None,
            gradient_stops: Vec::new(),
            ticks: Vec::new(),
            region: None,
        }
    }

    pub fn element_ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries
            .iter()
            .flat_map(|e| [e.mark_id, e.label_id])
            .chain(self.gradient_bar)
            .chain(self.ticks.iter().map(|t| t.label_id))
    }

    /// Recomputes kind and region from the remaining parts.
    pub(crate) fn refresh(&mut self, scene: &NormalizedScene) {
        self.kind = if self.gradient_bar.is_some() {
            LegendKind::Continuous
        } else if !self.entries.is_empty() {
            LegendKind::Discrete
        } else {
            LegendKind::None
        };
        let boxes: Vec<BBox> = self
            .element_ids()
            .filter_map(|id| scene.get(id))
            .map(|e| e.bbox())
            .collect();
        self.region = BBox::enclosing(boxes.iter());
    }

    /// Color for a category label of a discrete legend.
    pub fn color_for(&self, label: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.color.as_str())
    }

    /// Value range covered by a continuous legend's numeric labels.
    pub fn value_range(&self) -> Option<(f64, f64)> {
        min_max(self.ticks.iter().map(|t| t.value))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecorationModel {
    pub x_axis: Option<AxisModel>,
    pub y_axis: Option<AxisModel>,
    pub legend: LegendModel,
}

impl DecorationModel {
    pub fn empty() -> Self {
        Self {
            x_axis: None,
            y_axis: None,
            legend: LegendModel::none(),
        }
    }

    pub fn axis(&self, o: Orientation) -> Option<&AxisModel> {
        match o {
            Orientation::X => self.x_axis.as_ref(),
            Orientation::Y => self.y_axis.as_ref(),
        }
    }

    pub fn axis_mut(&mut self, o: Orientation) -> &mut Option<AxisModel> {
        match o {
            Orientation::X => &mut self.x_axis,
            Orientation::Y => &mut self.y_axis,
        }
    }

    /// Every element id claimed by an axis or the legend.
    pub fn claimed_ids(&self) -> BTreeSet<usize> {
        self.x_axis
            .iter()
            .flat_map(|a| a.element_ids())
            .chain(self.y_axis.iter().flat_map(|a| a.element_ids()))
            .chain(self.legend.element_ids())
            .collect()
    }

    /// Checks axis invariants and that no element is claimed twice.
    pub fn validate(&self, config: &Config) -> Result<(), DecorationError> {
        for axis in self.x_axis.iter().chain(self.y_axis.iter()) {
            axis.validate(config.collinear_tol_px)?;
        }
        let mut seen = BTreeSet::new();
        let all = self
            .x_axis
            .iter()
            .flat_map(|a| a.element_ids())
            .chain(self.y_axis.iter().flat_map(|a| a.element_ids()))
            .chain(self.legend.element_ids());
        for id in all {
            if !seen.insert(id) {
                return Err(DecorationError::DoubleClaim(id));
            }
        }
        Ok(())
    }

    /// Id-free view used to compare detections against expected output.
    pub fn summary(&self) -> DecorationSummary {
        let axis = |a: &Option<AxisModel>| {
            a.as_ref().map(|a| AxisSummary {
                tiers: a
                    .tiers
                    .iter()
                    .map(|t| t.labels.iter().map(|l| l.text.clone()).collect())
                    .collect(),
                field_types: a.tiers.iter().map(|t| t.field_type).collect(),
            })
        };
        DecorationSummary {
            x_axis: axis(&self.x_axis),
            y_axis: axis(&self.y_axis),
            legend_kind: self.legend.kind,
            legend_entries: self
                .legend
                .entries
                .iter()
                .map(|e| (e.label.clone(), e.color.clone()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AxisSummary {
    pub tiers: Vec<Vec<String>>,
    pub field_types: Vec<FieldType>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecorationSummary {
    pub x_axis: Option<AxisSummary>,
    pub y_axis: Option<AxisSummary>,
    pub legend_kind: LegendKind,
    pub legend_entries: Vec<(String, String)>,
}

/// Detects the legend first, then both axes from the unclaimed elements.
pub fn detect(scene: &NormalizedScene, config: &Config) -> DecorationModel {
    let legend = detect_legend(scene, config);
    let claimed: BTreeSet<usize> = legend.element_ids().collect();
    let (x_axis, y_axis) = detect_axes_excluding(scene, config, &claimed);
    DecorationModel {
        x_axis,
        y_axis,
        legend,
    }
}

#[cfg(test)]
mod tests;
