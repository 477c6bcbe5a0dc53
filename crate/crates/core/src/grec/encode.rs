//! Encoding inference from the recovered hierarchy.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::refine::gravity;
use super::relation::{Gravity, RelationCategory, RelationshipDescriptor};
use super::tree::{Channel, Encoding, EncodingTarget, GlyphSet, GroupNode, NodeKind};
use crate::config::Config;
use crate::decoration::{DecorationModel, LegendKind};
use crate::fieldtype::FieldType;
use crate::geom::BBox;

fn varies(values: impl Iterator<Item = f64>, eps: f64) -> bool {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    hi - lo > eps
}

fn quant(target: EncodingTarget, channel: Channel) -> Encoding {
    Encoding {
        target,
        channel,
        field_type: FieldType::Quantitative,
        field_name: None,
        derived: false,
        options: Vec::new(),
    }
}

/// Width/height, area and position rules for one set of rectangles
/// arranged by `rel`. `gravity` is the set's anchoring across the flow.
fn rect_rules(
    boxes: &[BBox],
    rel: &RelationshipDescriptor,
    gravity: Gravity,
    target: EncodingTarget,
    cfg: &Config,
) -> Vec<Encoding> {
    let eps = cfg.eps_align;
    let mut out = Vec::new();
    let cat = rel.category;
    if cat == RelationCategory::Packing {
        out.push(quant(target, Channel::Area));
        return out;
    }
    let width = varies(boxes.iter().map(|b| b.width), eps);
    let height = varies(boxes.iter().map(|b| b.height), eps);
    let one_row = cat == RelationCategory::HGrid && rel.rows == 1;
    let one_col = cat == RelationCategory::VGrid && rel.cols == 1;
    let y = one_row && gravity == Gravity::None && varies(boxes.iter().map(|b| b.y), eps);
    let x = one_col && gravity == Gravity::None && varies(boxes.iter().map(|b| b.x), eps);
    let side = |a: Channel, b: Channel, size: Channel| {
        let options = alloc::vec![a, b, size];
        [
            Encoding {
                options: options.clone(),
                ..quant(target, a)
            },
            Encoding {
                options,
                ..quant(target, b)
            },
        ]
    };
    if y && height {
        out.extend(side(Channel::TopSide, Channel::BottomSide, Channel::Height));
    } else {
        if y {
            out.push(quant(target, Channel::Y));
        }
        if height {
            out.push(quant(target, Channel::Height));
        }
    }
    if x && width {
        out.extend(side(Channel::LeftSide, Channel::RightSide, Channel::Width));
    } else {
        if x {
            out.push(quant(target, Channel::X));
        }
        if width {
            out.push(quant(target, Channel::Width));
        }
    }
    out
}

/// Groups glyph members into corresponding sets keyed by fill, then by
/// size rank within that fill.
pub fn glyph_sets(glyphs: &[&GroupNode]) -> (Vec<GlyphSet>, Vec<Vec<BBox>>) {
    let mut sets: Vec<GlyphSet> = Vec::new();
    let mut boxes: Vec<Vec<BBox>> = Vec::new();
    for g in glyphs {
        let mut rank_of: Vec<(String, usize)> = Vec::new();
        for child in &g.children {
            let fill = child.fill.clone().unwrap_or_default();
            let rank = match rank_of.iter_mut().find(|(f, _)| *f == fill) {
                Some((_, r)) => {
                    *r += 1;
                    *r
                }
                None => {
                    rank_of.push((fill.clone(), 0));
                    0
                }
            };
            let key = GlyphSet { fill, rank };
            let k = match sets.iter().position(|s| *s == key) {
                Some(k) => k,
                None => {
                    sets.push(key);
                    boxes.push(Vec::new());
                    sets.len() - 1
                }
            };
            boxes[k].push(child.bbox);
        }
    }
    (sets, boxes)
}

/// Applies the channel rules to a deconstructed tree.
pub fn infer_encodings(
    root: &GroupNode,
    forest: bool,
    decoration: &DecorationModel,
    cfg: &Config,
) -> (Vec<Encoding>, Vec<GlyphSet>) {
    let mut out = Vec::new();
    let mut sets_out = Vec::new();
    let leaves = root.leaves();
    let fills: BTreeSet<&str> = leaves.iter().filter_map(|l| l.fill.as_deref()).collect();
    if fills.len() >= 2 {
        let field_type = match decoration.legend.kind {
            LegendKind::Continuous => FieldType::Quantitative,
            _ => FieldType::Categorical,
        };
        out.push(Encoding {
            field_type,
            ..quant(EncodingTarget::Mark, Channel::Fill)
        });
    }
    let leaf_depth = root.depth() - 1;
    if forest {
        out.push(quant(EncodingTarget::Level(1), Channel::X));
        out.push(quant(EncodingTarget::Level(1), Channel::Y));
    }
    if leaf_depth == 0 {
        return (out, sets_out);
    }
    let parents = root.nodes_at(leaf_depth - 1);
    let leaf_boxes: Vec<BBox> = leaves.iter().map(|l| l.bbox).collect();
    if parents[0].kind == NodeKind::Glyph {
        let (sets, boxes) = glyph_sets(&parents);
        let rel = leaf_depth
            .checked_sub(2)
            .and_then(|d| root.nodes_at(d)[0].relationship.clone());
        if let Some(rel) = rel {
            for (k, set) in boxes.iter().enumerate() {
                let horizontal = rel.category == RelationCategory::HGrid;
                let g = gravity(set, horizontal, cfg.eps_align);
                out.extend(rect_rules(
                    set,
                    &rel,
                    g,
                    EncodingTarget::GlyphMember(k),
                    cfg,
                ));
            }
        }
        sets_out = sets;
    } else if leaves.iter().all(|l| l.position_encoded) {
        out.push(quant(EncodingTarget::Mark, Channel::X));
        out.push(quant(EncodingTarget::Mark, Channel::Y));
    } else if let Some(rel) = parents[0].relationship.clone() {
        let g = rel.gravity;
        out.extend(rect_rules(&leaf_boxes, &rel, g, EncodingTarget::Mark, cfg));
    }
    for d in 1..leaf_depth.saturating_sub(1) {
        let nodes = root.nodes_at(d);
        let parent = root.nodes_at(d - 1)[0];
        let packing = nodes[0].category() == Some(RelationCategory::Packing);
        let arranged = parent
            .category()
            .is_some_and(|c| c.is_grid() || c.is_stack());
        if packing && arranged {
            let derived = |c: Channel| Encoding {
                derived: true,
                ..quant(EncodingTarget::Level(d), c)
            };
            if varies(nodes.iter().map(|n| n.bbox.width), cfg.eps_align) {
                out.push(derived(Channel::Width));
            }
            if varies(nodes.iter().map(|n| n.bbox.height), cfg.eps_align) {
                out.push(derived(Channel::Height));
            }
        }
    }
    (out, sets_out)
}
