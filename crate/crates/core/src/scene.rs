//! The normalized scene: a flat list of typed graphical elements with
//! absolute coordinates and resolved styles. This is the wire format consumed
//! by detection, deconstruction and the wizard.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::color::NONE;
use crate::geom::BBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Rect,
    Line,
    Text,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct Style {
    pub fill: String,
    pub stroke: String,
    pub stroke_width: f64,
    /// Product of `opacity` along the ancestor chain.
    pub opacity: f64,
    pub fill_opacity: f64,
    pub font_size: f64,
    pub text_anchor: String,
}

impl Default for Style {
    fn default() -> Self {
        Self {
            fill: String::from("#000000"),
            stroke: String::from(NONE),
            stroke_width: 1.0,
            opacity: 1.0,
            fill_opacity: 1.0,
            font_size: 16.0,
            text_anchor: String::from("start"),
        }
    }
}

impl Style {
    pub fn has_visible_fill(&self) -> bool {
        self.fill != NONE && self.opacity * self.fill_opacity > 0.0
    }

    pub fn has_visible_stroke(&self) -> bool {
        self.stroke != NONE && self.stroke_width > 0.0 && self.opacity > 0.0
    }
}

/// One drawable element in absolute pixel coordinates.
///
/// For `Rect` and `Other` the box fields are the element's extent. For
/// `Line` they hold the bounding box of the endpoints `x1,y1,x2,y2`. For
/// `Text`, `x`/`y` is the anchor point (baseline) and `width`/`height` an
/// estimated advance and the font size; use [`SceneElement::bbox`] for an
/// extent that honors `text-anchor`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SceneElement {
    pub id: usize,
    pub kind: ElementKind,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
    pub style: Style,
    pub source_path: Vec<usize>,
}

impl SceneElement {
    pub fn rect(id: usize, b: BBox, style: Style) -> Self {
        Self {
            id,
            kind: ElementKind::Rect,
            x: b.x,
            y: b.y,
            width: b.width,
            height: b.height,
            x1: None,
            y1: None,
            x2: None,
            y2: None,
            content: None,
            style,
            source_path: Vec::new(),
        }
    }

    pub fn line(id: usize, p1: (f64, f64), p2: (f64, f64), style: Style) -> Self {
        let b = BBox::from_corners(p1.0, p1.1, p2.0, p2.1);
        Self {
            kind: ElementKind::Line,
            x1: Some(p1.0),
            y1: Some(p1.1),
            x2: Some(p2.0),
            y2: Some(p2.1),
            ..Self::rect(id, b, style)
        }
    }

    pub fn text(id: usize, anchor: (f64, f64), content: String, style: Style) -> Self {
        let fs = style.font_size;
        let w = estimate_text_width(&content, fs);
        Self {
            kind: ElementKind::Text,
            content: Some(content),
            ..Self::rect(id, BBox::new(anchor.0, anchor.1, w, fs), style)
        }
    }

    pub fn is_rect(&self) -> bool {
        self.kind == ElementKind::Rect
    }

    pub fn is_text(&self) -> bool {
        self.kind == ElementKind::Text
    }

    pub fn is_line(&self) -> bool {
        self.kind == ElementKind::Line
    }

    pub fn text_content(&self) -> &str {
        self.content.as_deref().unwrap_or("")
    }

    pub fn endpoints(&self) -> Option<((f64, f64), (f64, f64))> {
        Some(((self.x1?, self.y1?), (self.x2?, self.y2?)))
    }

    pub fn line_length(&self) -> f64 {
        self.endpoints()
            .map(|((a, b), (c, d))| libm::hypot(c - a, d - b))
            .unwrap_or(0.0)
    }

    /// Anchor point of a text element.
    pub fn anchor(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn bbox(&self) -> BBox {
        match self.kind {
            ElementKind::Text => {
                let w = self.width;
                let left = match self.style.text_anchor.as_str() {
                    "middle" => self.x - w / 2.0,
                    "end" => self.x - w,
                    _ => self.x,
                };
                BBox::new(left, self.y - 0.8 * self.height, w, self.height)
            }
            _ => BBox::new(self.x, self.y, self.width, self.height),
        }
    }
}

/// Rough advance width for text with no font metrics available.
pub fn estimate_text_width(content: &str, font_size: f64) -> f64 {
    content.chars().count() as f64 * font_size * 0.6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientStop {
    pub offset: f64,
    pub color: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NormalizedScene {
    pub elements: Vec<SceneElement>,
    pub view_box: BBox,
    /// Gradient definitions by id, referenced from fills as `url(#id)`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gradients: BTreeMap<String, Vec<GradientStop>>,
}

impl NormalizedScene {
    pub fn get(&self, id: usize) -> Option<&SceneElement> {
        // ids are dense after filtering, but stay robust to sparse ids
        match self.elements.get(id) {
            Some(e) if e.id == id => Some(e),
            _ => self.elements.iter().find(|e| e.id == id),
        }
    }

    pub fn rects(&self) -> impl Iterator<Item = &SceneElement> {
        self.elements.iter().filter(|e| e.is_rect())
    }

    pub fn texts(&self) -> impl Iterator<Item = &SceneElement> {
        self.elements.iter().filter(|e| e.is_text())
    }

    pub fn lines(&self) -> impl Iterator<Item = &SceneElement> {
        self.elements.iter().filter(|e| e.is_line())
    }

    /// Keeps the elements matching `keep` and renumbers ids densely.
    pub fn retain_renumbered(
        &self,
        mut keep: impl FnMut(&SceneElement) -> bool,
    ) -> NormalizedScene {
        let elements = self
            .elements
            .iter()
            .filter(|e| keep(e))
            .cloned()
            .enumerate()
            .map(|(i, mut e)| {
                e.id = i;
                e
            })
            .collect();
        NormalizedScene {
            elements,
            view_box: self.view_box,
            gradients: self.gradients.clone(),
        }
    }

    /// Keeps the elements matching `keep` without renumbering, so ids still
    /// refer to the source scene.
    pub fn retain(&self, mut keep: impl FnMut(&SceneElement) -> bool) -> NormalizedScene {
        NormalizedScene {
            elements: self.elements.iter().filter(|e| keep(e)).cloned().collect(),
            view_box: self.view_box,
            gradients: self.gradients.clone(),
        }
    }
}
