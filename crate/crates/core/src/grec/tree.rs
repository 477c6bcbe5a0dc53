//! The GREC template: group tree, encodings and graphical constraints.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::relation::{Gravity, RelationCategory, RelationshipDescriptor};
use crate::decoration::DecorationModel;
use crate::fieldtype::FieldType;
use crate::geom::BBox;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeKind {
    Collection,
    Glyph,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GroupNode {
    pub kind: NodeKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<GroupNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_element: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relationship: Option<RelationshipDescriptor>,
    pub bbox: BBox,
    /// The node's own position is data-driven rather than produced by its
    /// parent's arrangement.
    #[serde(default)]
    pub position_encoded: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<String>,
}

impl GroupNode {
    pub fn leaf(id: usize, bbox: BBox, fill: String) -> Self {
        Self {
            kind: NodeKind::Leaf,
            children: Vec::new(),
            leaf_element: Some(id),
            relationship: None,
            bbox,
            position_encoded: false,
            fill: Some(fill),
        }
    }

    pub fn group(
        kind: NodeKind,
        children: Vec<GroupNode>,
        relationship: Option<RelationshipDescriptor>,
    ) -> Self {
        let bbox = BBox::enclosing(children.iter().map(|c| &c.bbox)).unwrap_or_default();
        Self {
            kind,
            children,
            leaf_element: None,
            relationship,
            bbox,
            position_encoded: false,
            fill: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.kind == NodeKind::Leaf
    }

    pub fn category(&self) -> Option<RelationCategory> {
        self.relationship.as_ref().map(|r| r.category)
    }

    pub fn gravity(&self) -> Gravity {
        self.relationship
            .as_ref()
            .map_or(Gravity::None, |r| r.gravity)
    }

    /// Leaf element ids in tree order.
    pub fn leaf_ids(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |n, _| {
            if let Some(id) = n.leaf_element {
                out.push(id);
            }
        });
        out
    }

    pub fn leaves(&self) -> Vec<&GroupNode> {
        let mut out = Vec::new();
        collect_leaves(self, &mut out);
        out
    }

    /// Number of levels including the leaves.
    pub fn depth(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(GroupNode::depth)
            .max()
            .unwrap_or(0)
    }

    /// Nodes at `depth` (root is 0), left to right.
    pub fn nodes_at(&self, depth: usize) -> Vec<&GroupNode> {
        let mut out = Vec::new();
        collect_at(self, depth, &mut out);
        out
    }

    /// Pre-order walk with the path of child indices from this node.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a GroupNode, &[usize])) {
        let mut path = Vec::new();
        visit_inner(self, &mut path, f);
    }

    pub fn at_path(&self, path: &[usize]) -> Option<&GroupNode> {
        path.iter().try_fold(self, |n, &i| n.children.get(i))
    }
}

fn collect_leaves<'a>(n: &'a GroupNode, out: &mut Vec<&'a GroupNode>) {
    if n.is_leaf() {
        out.push(n);
    }
    for c in &n.children {
        collect_leaves(c, out);
    }
}

fn collect_at<'a>(n: &'a GroupNode, depth: usize, out: &mut Vec<&'a GroupNode>) {
    if depth == 0 {
        out.push(n);
    } else {
        for c in &n.children {
            collect_at(c, depth - 1, out);
        }
    }
}

fn visit_inner<'a>(
    n: &'a GroupNode,
    path: &mut Vec<usize>,
    f: &mut impl FnMut(&'a GroupNode, &[usize]),
) {
    f(n, path);
    for (i, c) in n.children.iter().enumerate() {
        path.push(i);
        visit_inner(c, path, f);
        path.pop();
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Channel {
    X,
    Y,
    Width,
    Height,
    Fill,
    Area,
    TopSide,
    BottomSide,
    LeftSide,
    RightSide,
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Width => "width",
            Channel::Height => "height",
            Channel::Fill => "fill",
            Channel::Area => "area",
            Channel::TopSide => "topSide",
            Channel::BottomSide => "bottomSide",
            Channel::LeftSide => "leftSide",
            Channel::RightSide => "rightSide",
        }
    }

    pub fn parse(s: &str) -> Option<Channel> {
        const ALL: [Channel; 10] = [
            Channel::X,
            Channel::Y,
            Channel::Width,
            Channel::Height,
            Channel::Fill,
            Channel::Area,
            Channel::TopSide,
            Channel::BottomSide,
            Channel::LeftSide,
            Channel::RightSide,
        ];
        ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Where an encoding applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum EncodingTarget {
    /// Every leaf rectangle.
    Mark,
    /// Nodes at this depth (root is 0).
    Level(usize),
    /// One corresponding-member set across glyphs.
    GlyphMember(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Encoding {
    pub target: EncodingTarget,
    pub channel: Channel,
    pub field_type: FieldType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field_name: Option<String>,
    /// Aggregated from the leaves below rather than bound directly.
    #[serde(default)]
    pub derived: bool,
    /// Interchangeable channels offered when position and size are
    /// ambiguous.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<Channel>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Alignment {
    Left,
    Right,
    CenterH,
    Top,
    Bottom,
    CenterV,
}

impl Alignment {
    pub fn coordinate(self, b: &BBox) -> f64 {
        match self {
            Alignment::Left => b.x,
            Alignment::Right => b.right(),
            Alignment::CenterH => b.center_x(),
            Alignment::Top => b.y,
            Alignment::Bottom => b.bottom(),
            Alignment::CenterV => b.center_y(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    GlyphAlign,
    CrossGroupAlign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphicalConstraint {
    pub kind: ConstraintKind,
    pub axes: Vec<Alignment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_color: Option<String>,
    /// Paths of child indices from the root.
    pub members: Vec<Vec<usize>>,
}

/// Fill and size rank identifying one corresponding-member set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GlyphSet {
    pub fill: String,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GrecTemplate {
    pub root: GroupNode,
    /// The root is a virtual collection over data-positioned groups.
    #[serde(default)]
    pub forest: bool,
    pub encodings: Vec<Encoding>,
    pub constraints: Vec<GraphicalConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glyph_sets: Vec<GlyphSet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub decoration: DecorationModel,
}

/// Structure of one tree level as compared in round trips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LevelSummary {
    pub kind: NodeKind,
    pub category: Option<RelationCategory>,
    pub gravity: Gravity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TemplateSummary {
    pub levels: Vec<LevelSummary>,
    pub channels: Vec<Channel>,
    pub forest: bool,
}

impl GrecTemplate {
    /// Level-by-level structure (first node per depth) and the sorted set
    /// of encoded channels.
    pub fn summary(&self) -> TemplateSummary {
        let levels = (0..self.root.depth())
            .map(|d| {
                let n = self.root.nodes_at(d)[0];
                LevelSummary {
                    kind: n.kind,
                    category: n.category(),
                    gravity: n.gravity(),
                }
            })
            .collect();
        let mut channels: Vec<Channel> = self.encodings.iter().map(|e| e.channel).collect();
        channels.sort();
        channels.dedup();
        TemplateSummary {
            levels,
            channels,
            forest: self.forest,
        }
    }

    /// Collection levels, excluding glyph levels; a forest's virtual root
    /// counts.
    pub fn collection_levels(&self) -> Vec<usize> {
        (0..self.root.depth())
            .filter(|&d| {
                self.root
                    .nodes_at(d)
                    .first()
                    .is_some_and(|n| n.kind == NodeKind::Collection)
            })
            .collect()
    }

    pub fn c_group(&self) -> usize {
        self.collection_levels().len()
    }

    /// Depth of the leaves.
    pub fn leaf_depth(&self) -> usize {
        self.root.depth() - 1
    }

    /// Depth of glyph nodes, when the lowest groups are glyphs.
    pub fn glyph_depth(&self) -> Option<usize> {
        let d = self.leaf_depth().checked_sub(1)?;
        (self.root.nodes_at(d).first()?.kind == NodeKind::Glyph).then_some(d)
    }
}
