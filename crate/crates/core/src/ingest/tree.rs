//! XML to an arena of attribute-bearing nodes.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::transform::parse_transform;
use crate::error::IngestError;
use crate::geom::AffineMatrix;

/// Style properties that flow from a group to its descendants.
pub const INHERITED: &[&str] = &[
    "fill",
    "fill-opacity",
    "stroke",
    "stroke-width",
    "stroke-opacity",
    "font-size",
    "font-family",
    "text-anchor",
    "visibility",
];

/// Presentation attributes captured into a node's style map.
const PRESENTATION: &[&str] = &[
    "fill",
    "fill-opacity",
    "stroke",
    "stroke-width",
    "stroke-opacity",
    "opacity",
    "font-size",
    "font-family",
    "text-anchor",
    "visibility",
    "display",
];

#[derive(Clone, Debug, PartialEq)]
pub struct RawNode {
    pub tag: String,
    pub attrs: BTreeMap<String, String>,
    /// Presentation attributes overlaid with the inline `style` declarations.
    pub styles: BTreeMap<String, String>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Parsed `transform` attribute. An unsupported function is kept as the
    /// error so it surfaces when positions are resolved.
    pub local_transform: Option<Result<AffineMatrix, String>>,
    /// Character data of the element and its descendants, in document order.
    pub text: String,
}

impl RawNode {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attrs.get(name).map(String::as_str)
    }

    pub fn style(&self, name: &str) -> Option<&str> {
        self.styles.get(name).map(String::as_str)
    }
}

/// Document-ordered node arena; index 0 is the `<svg>` root.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgTree {
    pub nodes: Vec<RawNode>,
}

impl SvgTree {
    pub fn root(&self) -> &RawNode {
        &self.nodes[0]
    }

    pub fn node(&self, idx: usize) -> &RawNode {
        &self.nodes[idx]
    }

    /// Indices from the root down to `idx`, inclusive.
    pub fn ancestry(&self, idx: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            path.push(i);
            cur = self.nodes[i].parent;
        }
        path.reverse();
        path
    }

    /// Concatenated character data of a node and its descendants.
    pub fn text_content(&self, idx: usize) -> &str {
        &self.nodes[idx].text
    }
}

/// Parses SVG text into a node arena, keeping every element in document order.
pub fn parse_svg(svg_text: &str) -> Result<SvgTree, IngestError> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: false,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(svg_text, opts)
        .map_err(|e| IngestError::MalformedSvg(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(IngestError::NoSvgRoot(root.tag_name().name().to_string()));
    }
    let mut tree = SvgTree { nodes: Vec::new() };
    push_node(&mut tree, root, None);
    Ok(tree)
}

fn push_node(tree: &mut SvgTree, node: roxmltree::Node<'_, '_>, parent: Option<usize>) -> usize {
    let mut attrs = BTreeMap::new();
    for a in node.attributes() {
        attrs.insert(a.name().to_string(), a.value().to_string());
    }
    let mut styles = BTreeMap::new();
    for &p in PRESENTATION {
        if let Some(v) = attrs.get(p) {
            styles.insert(p.to_string(), v.trim().to_string());
        }
    }
    if let Some(inline) = attrs.get("style") {
        for decl in inline.split(';') {
            if let Some((k, v)) = decl.split_once(':') {
                styles.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
            }
        }
    }
    let local_transform = attrs.get("transform").map(|t| parse_transform(t));
    let text = node
        .descendants()
        .filter(|c| c.is_text())
        .filter_map(|c| c.text())
        .collect::<String>();
    let idx = tree.nodes.len();
    tree.nodes.push(RawNode {
        tag: node.tag_name().name().to_string(),
        attrs,
        styles,
        parent,
        children: Vec::new(),
        local_transform,
        text,
    });
    for child in node.children().filter(|c| c.is_element()) {
        let c = push_node(tree, child, Some(idx));
        tree.nodes[idx].children.push(c);
    }
    idx
}
