use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::axis::{detect_axis, plot_region};
use super::legend::detect_legend_excluding;
use super::{
    AxisLabel, AxisModel, DecorationModel, LegendEntry, LegendKind, LegendModel, LegendTick,
    Orientation,
};
use crate::config::Config;
use crate::error::DecorationError;
use crate::fieldtype::{parse_number, FieldType};
use crate::geom::BBox;
use crate::scene::NormalizedScene;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrectionKind {
    AddLabel,
    RemoveLabel,
    AddTier,
    DesignateRegion,
    RemoveDecoration,
    SetFieldType,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    XAxis,
    YAxis,
    Legend,
}

impl Target {
    fn orientation(self) -> Option<Orientation> {
        match self {
            Target::XAxis => Some(Orientation::X),
            Target::YAxis => Some(Orientation::Y),
            Target::Legend => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CorrectionPayload {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub element_ids: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<BBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_type: Option<FieldType>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub kind: CorrectionKind,
    pub target: Target,
    #[serde(default)]
    pub payload: CorrectionPayload,
}

impl Correction {
    pub fn add_label(target: Target, tier: usize, ids: &[usize]) -> Self {
        let payload = CorrectionPayload {
            element_ids: ids.to_vec(),
            tier: Some(tier),
            ..Default::default()
        };
        Self {
            kind: CorrectionKind::AddLabel,
            target,
            payload,
        }
    }

    pub fn remove_label(target: Target, ids: &[usize]) -> Self {
        let payload = CorrectionPayload {
            element_ids: ids.to_vec(),
            ..Default::default()
        };
        Self {
            kind: CorrectionKind::RemoveLabel,
            target,
            payload,
        }
    }

    pub fn add_tier(target: Target) -> Self {
        Self {
            kind: CorrectionKind::AddTier,
            target,
            payload: CorrectionPayload::default(),
        }
    }

    pub fn designate_region(target: Target, region: BBox) -> Self {
        let payload = CorrectionPayload {
            region: Some(region),
            ..Default::default()
        };
        Self {
            kind: CorrectionKind::DesignateRegion,
            target,
            payload,
        }
    }

    pub fn remove_decoration(target: Target) -> Self {
        Self {
            kind: CorrectionKind::RemoveDecoration,
            target,
            payload: CorrectionPayload::default(),
        }
    }

    pub fn set_field_type(target: Target, tier: usize, field_type: FieldType) -> Self {
        let payload = CorrectionPayload {
            tier: Some(tier),
            field_type: Some(field_type),
            ..Default::default()
        };
        Self {
            kind: CorrectionKind::SetFieldType,
            target,
            payload,
        }
    }

    fn check_shape(&self) -> Result<(), DecorationError> {
        let p = &self.payload;
        let ok = match self.kind {
            CorrectionKind::AddLabel | CorrectionKind::RemoveLabel => {
                !p.element_ids.is_empty() && p.region.is_none() && p.field_type.is_none()
            }
            CorrectionKind::AddTier => {
                self.target != Target::Legend && p.element_ids.is_empty() && p.region.is_none()
            }
            CorrectionKind::DesignateRegion => p.region.is_some() && p.element_ids.is_empty(),
            CorrectionKind::RemoveDecoration => p.element_ids.is_empty() && p.region.is_none(),
            CorrectionKind::SetFieldType => self.target != Target::Legend && p.field_type.is_some(),
        };
        if ok {
            Ok(())
        } else {
            Err(DecorationError::PayloadMismatch)
        }
    }
}

/// Applies one correction and returns the re-validated model. The input is
/// left untouched.
pub fn apply_correction(
    model: &DecorationModel,
    scene: &NormalizedScene,
    config: &Config,
    c: &Correction,
) -> Result<DecorationModel, DecorationError> {
    c.check_shape()?;
    for &id in &c.payload.element_ids {
        scene.get(id).ok_or(DecorationError::UnknownElement(id))?;
    }
    let mut m = model.clone();
    match (c.kind, c.target.orientation()) {
        (CorrectionKind::AddLabel, Some(o)) => {
            let tier = c.payload.tier.unwrap_or(0);
            for &id in &c.payload.element_ids {
                let e = scene.get(id).ok_or(DecorationError::UnknownElement(id))?;
                if !e.is_text() {
                    return Err(DecorationError::WrongKind(id));
                }
                release(&mut m, scene, id);
                let axis = m.axis_mut(o).get_or_insert_with(|| AxisModel::new(o));
                let tiers = axis.tiers.len();
                let t = axis
                    .tiers
                    .get_mut(tier)
                    .ok_or(DecorationError::TierOutOfRange { tier, tiers })?;
                let b = e.bbox();
                let (anchor, cross) = match o {
                    Orientation::X => (b.center_x(), e.y),
                    Orientation::Y => (b.center_y(), e.x),
                };
                t.labels.push(AxisLabel {
                    id,
                    text: String::from(e.text_content().trim()),
                    anchor,
                    cross,
                });
            }
        }
        (CorrectionKind::AddLabel, None) => {
            add_legend_parts(&mut m, scene, &c.payload.element_ids)?
        }
        (CorrectionKind::RemoveLabel, Some(o)) => {
            let axis = m
                .axis_mut(o)
                .as_mut()
                .ok_or(DecorationError::UnknownElement(c.payload.element_ids[0]))?;
            for &id in &c.payload.element_ids {
                let before: usize = axis.tiers.iter().map(|t| t.labels.len()).sum();
                for t in &mut axis.tiers {
                    t.labels.retain(|l| l.id != id);
                }
                let after: usize = axis.tiers.iter().map(|t| t.labels.len()).sum();
                if before == after {
                    return Err(DecorationError::UnknownElement(id));
                }
            }
        }
        (CorrectionKind::RemoveLabel, None) => {
            for &id in &c.payload.element_ids {
                if !m.legend.element_ids().any(|x| x == id) {
                    return Err(DecorationError::UnknownElement(id));
                }
                release_legend(&mut m.legend, id);
            }
        }
        (CorrectionKind::AddTier, Some(o)) => {
            m.axis_mut(o)
                .get_or_insert_with(|| AxisModel::new(o))
                .tiers
                .push(super::AxisTier::empty());
        }
        (CorrectionKind::DesignateRegion, target) => {
            let r = c.payload.region.ok_or(DecorationError::PayloadMismatch)?;
            if !(r.width > 0.0 && r.height > 0.0 && r.x.is_finite() && r.y.is_finite()) {
                return Err(DecorationError::InvalidRegion);
            }
            match target {
                Some(o) => {
                    *m.axis_mut(o) = None;
                    let excluded: BTreeSet<usize> = m.claimed_ids();
                    let plot = plot_region(scene, &excluded);
                    *m.axis_mut(o) = detect_axis(scene, config, o, &excluded, plot, Some(r));
                }
                None => {
                    m.legend = LegendModel::none();
                    let excluded: BTreeSet<usize> = m.claimed_ids();
                    let sub = scene.retain(|e| {
                        let b = e.bbox();
                        r.contains_point(b.center_x(), b.center_y())
                    });
                    m.legend = detect_legend_excluding(&sub, config, &excluded);
                    m.legend.refresh(scene);
                }
            }
        }
        (CorrectionKind::RemoveDecoration, Some(o)) => *m.axis_mut(o) = None,
        (CorrectionKind::RemoveDecoration, None) => m.legend = LegendModel::none(),
        (CorrectionKind::SetFieldType, Some(o)) => {
            let tier = c.payload.tier.unwrap_or(0);
            let axis = m
                .axis_mut(o)
                .as_mut()
                .ok_or(DecorationError::TierOutOfRange { tier, tiers: 0 })?;
            let tiers = axis.tiers.len();
            let t = axis
                .tiers
                .get_mut(tier)
                .ok_or(DecorationError::TierOutOfRange { tier, tiers })?;
            t.field_type = c
                .payload
                .field_type
                .ok_or(DecorationError::PayloadMismatch)?;
            t.field_type_locked = true;
        }
        (CorrectionKind::AddTier | CorrectionKind::SetFieldType, None) => {
            return Err(DecorationError::PayloadMismatch)
        }
    }
    for axis in [&mut m.x_axis, &mut m.y_axis].into_iter().flatten() {
        axis.refresh();
    }
    m.legend.refresh(scene);
    m.validate(config)?;
    Ok(m)
}

/// Drops `id` from wherever it is claimed so it can move elsewhere.
fn release(m: &mut DecorationModel, scene: &NormalizedScene, id: usize) {
    for axis in [&mut m.x_axis, &mut m.y_axis].into_iter().flatten() {
        for t in &mut axis.tiers {
            t.labels.retain(|l| l.id != id);
        }
        axis.ticks.retain(|t| t.id != id);
        if axis.axis_line == Some(id) {
            axis.axis_line = None;
        }
    }
    release_legend(&mut m.legend, id);
    m.legend.refresh(scene);
}

fn release_legend(legend: &mut LegendModel, id: usize) {
    legend
        .entries
        .retain(|e| e.mark_id != id && e.label_id != id);
    legend.ticks.retain(|t| t.label_id != id);
    if legend.gradient_bar == Some(id) {
        legend.gradient_bar = None;
        legend.gradient_stops.clear();
        legend.ticks.clear();
    }
}

/// Legend additions: a `[swatch, text]` pair becomes a discrete entry, a
/// lone numeric text becomes a continuous-legend tick.
fn add_legend_parts(
    m: &mut DecorationModel,
    scene: &NormalizedScene,
    ids: &[usize],
) -> Result<(), DecorationError> {
    match ids {
        [mark, label] => {
            let (me, le) = (scene.get(*mark).unwrap(), scene.get(*label).unwrap());
            if !me.is_rect() {
                return Err(DecorationError::WrongKind(*mark));
            }
            if !le.is_text() {
                return Err(DecorationError::WrongKind(*label));
            }
            release(m, scene, *mark);
            release(m, scene, *label);
            if m.legend.kind == LegendKind::Continuous {
                return Err(DecorationError::PayloadMismatch);
            }
            let text = String::from(le.text_content().trim());
            if m.legend.entries.iter().any(|e| e.label == text) {
                return Err(DecorationError::PayloadMismatch);
            }
            m.legend.entries.push(LegendEntry {
                label: text,
                color: me.style.fill.clone(),
                mark_id: *mark,
                label_id: *label,
            });
            Ok(())
        }
        [label] if m.legend.kind == LegendKind::Continuous => {
            let le = scene.get(*label).unwrap();
            let value =
                parse_number(le.text_content()).ok_or(DecorationError::WrongKind(*label))?;
            release(m, scene, *label);
            let bar = m
                .legend
                .gradient_bar
                .and_then(|id| scene.get(id))
                .map(|e| e.bbox());
            let b = le.bbox();
            let px = match bar {
                Some(bar) if bar.width < bar.height => b.center_y(),
                _ => b.center_x(),
            };
            m.legend.ticks.push(LegendTick {
                label_id: *label,
                value,
                px,
            });
            m.legend.ticks.sort_by(|a, b| a.px.total_cmp(&b.px));
            Ok(())
        }
        _ => Err(DecorationError::PayloadMismatch),
    }
}
