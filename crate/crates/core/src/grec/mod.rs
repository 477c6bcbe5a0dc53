//! Hierarchical grouping of chart marks into a reusable template.

mod cluster;
mod constraint;
mod encode;
mod matrix;
mod refine;
mod relation;
mod tree;

pub use cluster::{
    cluster_level, greedy_partition, overlap_components, partition_is_valid, Partition,
};
pub use constraint::detect_constraints;
pub use encode::{glyph_sets, infer_encodings};
pub use matrix::{
    build_distance_matrix, common_from_sets, common_relationships, extract_common_relationship,
    DistanceMatrix,
};
pub use refine::{aligned, gravity, refine_relationship};
pub use relation::{
    candidate_packing_gap, pair_distance, FlowOrder, Gravity, RelationCategory, RelationSet,
    RelationshipDescriptor,
};
pub use tree::{
    Alignment, Channel, ConstraintKind, Encoding, EncodingTarget, GlyphSet, GraphicalConstraint,
    GrecTemplate, GroupNode, LevelSummary, NodeKind, TemplateSummary,
};

use alloc::string::String;
use alloc::vec::Vec;

use crate::config::Config;
use crate::decoration::DecorationModel;
use crate::error::GrecError;
use crate::geom::BBox;
use crate::scene::NormalizedScene;

fn by_position(a: &GroupNode, b: &GroupNode) -> core::cmp::Ordering {
    a.bbox
        .y
        .total_cmp(&b.bbox.y)
        .then(a.bbox.x.total_cmp(&b.bbox.x))
}

fn collection(
    children: Vec<GroupNode>,
    category: RelationCategory,
    packing_gap: Option<f64>,
    cfg: &Config,
) -> GroupNode {
    let boxes: Vec<BBox> = children.iter().map(|c| c.bbox).collect();
    let (desc, order) = refine_relationship(&boxes, category, packing_gap, cfg);
    let mut slots: Vec<Option<GroupNode>> = children.into_iter().map(Some).collect();
    let ordered = order.into_iter().filter_map(|i| slots[i].take()).collect();
    GroupNode::group(NodeKind::Collection, ordered, Some(desc))
}

fn glyph(mut members: Vec<GroupNode>) -> GroupNode {
    members.sort_by(|a, b| {
        b.bbox
            .area()
            .total_cmp(&a.bbox.area())
            .then_with(|| by_position(a, b))
    });
    GroupNode::group(NodeKind::Glyph, members, None)
}

fn take_groups(nodes: Vec<GroupNode>, groups: &[Vec<usize>]) -> Vec<Vec<GroupNode>> {
    let mut slots: Vec<Option<GroupNode>> = nodes.into_iter().map(Some).collect();
    groups
        .iter()
        .map(|g| g.iter().filter_map(|&i| slots[i].take()).collect())
        .collect()
}

/// Recovers the grouping hierarchy of the rectangles in a stripped scene
/// and infers encodings and constraints on it.
pub fn deconstruct(
    scene: &NormalizedScene,
    decoration: DecorationModel,
    cfg: &Config,
) -> Result<GrecTemplate, GrecError> {
    let mut nodes: Vec<GroupNode> = scene
        .rects()
        .map(|e| GroupNode::leaf(e.id, e.bbox(), e.style.fill.clone()))
        .collect();
    if nodes.is_empty() {
        return Err(GrecError::EmptyScene);
    }
    nodes.sort_by(|a, b| {
        by_position(a, b)
            .then(a.bbox.width.total_cmp(&b.bbox.width))
            .then(a.bbox.height.total_cmp(&b.bbox.height))
            .then_with(|| a.fill.cmp(&b.fill))
    });
    let mut warnings: Vec<String> = Vec::new();
    let mut forest = false;
    let mut first = true;
    let root = loop {
        if nodes.len() == 1 {
            let only = nodes.pop().unwrap_or_else(|| unreachable!());
            break if only.is_leaf() {
                GroupNode::group(NodeKind::Collection, alloc::vec![only], None)
            } else {
                only
            };
        }
        let boxes: Vec<BBox> = nodes.iter().map(|n| n.bbox).collect();
        let m = build_distance_matrix(&boxes, cfg);
        match cluster_level(&boxes, &m, first, cfg) {
            Partition::Collections { category, groups } => {
                nodes = take_groups(nodes, &groups)
                    .into_iter()
                    .map(|g| collection(g, category, m.packing_gap, cfg))
                    .collect();
            }
            Partition::Glyphs(groups) => {
                nodes = take_groups(nodes, &groups).into_iter().map(glyph).collect();
            }
            Partition::Unresolved { overlapping } => {
                if overlapping {
                    warnings.push(String::from(
                        "overlapping marks could not be grouped; treating positions as data",
                    ));
                }
                forest = !first;
                for n in &mut nodes {
                    n.position_encoded = true;
                }
                let mut root = GroupNode::group(NodeKind::Collection, nodes, None);
                root.children.sort_by(by_position);
                break root;
            }
        }
        nodes.sort_by(by_position);
        first = false;
    };
    let (encodings, glyph_sets) = infer_encodings(&root, forest, &decoration, cfg);
    let constraints = detect_constraints(&root, cfg);
    Ok(GrecTemplate {
        root,
        forest,
        encodings,
        constraints,
        glyph_sets,
        warnings,
        decoration,
    })
}

#[cfg(test)]
mod tests;
