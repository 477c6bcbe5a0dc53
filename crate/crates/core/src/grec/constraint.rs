//! Alignment constraints inside glyphs and across stacked collections.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use super::refine::aligned;
use super::relation::RelationCategory;
use super::tree::{Alignment, ConstraintKind, GraphicalConstraint, GroupNode, NodeKind};
use crate::config::Config;
use crate::geom::BBox;

const ALL: [Alignment; 6] = [
    Alignment::Left,
    Alignment::Right,
    Alignment::CenterH,
    Alignment::Top,
    Alignment::Bottom,
    Alignment::CenterV,
];

/// Largest set of members (≥ 2) agreeing on the coordinate.
fn shared(boxes: &[BBox], a: Alignment, eps: f64) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    for i in 0..boxes.len() {
        let v = a.coordinate(&boxes[i]);
        let set: Vec<usize> = (0..boxes.len())
            .filter(|&j| (a.coordinate(&boxes[j]) - v).abs() <= eps)
            .collect();
        if set.len() > best.len() {
            best = set;
        }
    }
    if best.len() >= 2 {
        best
    } else {
        Vec::new()
    }
}

pub fn detect_constraints(root: &GroupNode, cfg: &Config) -> Vec<GraphicalConstraint> {
    let mut out = Vec::new();
    root.visit(&mut |node, path| {
        if node.kind == NodeKind::Glyph {
            glyph_align(node, path, cfg, &mut out);
        }
        if node.category().is_some_and(|c| c.is_grid()) {
            cross_group_align(node, path, cfg, &mut out);
        }
    });
    out
}

fn glyph_align(node: &GroupNode, path: &[usize], cfg: &Config, out: &mut Vec<GraphicalConstraint>) {
    let boxes: Vec<BBox> = node.children.iter().map(|c| c.bbox).collect();
    let mut by_members: BTreeMap<Vec<usize>, Vec<Alignment>> = BTreeMap::new();
    for a in ALL {
        let members = shared(&boxes, a, cfg.eps_align);
        if !members.is_empty() {
            by_members.entry(members).or_default().push(a);
        }
    }
    let mut found: Vec<(Vec<usize>, Vec<Alignment>)> = by_members.into_iter().collect();
    found.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.1.cmp(&b.1)));
    for (members, axes) in found {
        let members = members
            .into_iter()
            .map(|i| {
                let mut p = path.to_vec();
                p.push(i);
                p
            })
            .collect();
        out.push(GraphicalConstraint {
            kind: ConstraintKind::GlyphAlign,
            axes,
            anchor_color: None,
            members,
        });
    }
}

fn cross_group_align(
    node: &GroupNode,
    path: &[usize],
    cfg: &Config,
    out: &mut Vec<GraphicalConstraint>,
) {
    let stacks: Vec<&GroupNode> = node.children.iter().collect();
    if stacks.len() < 2 {
        return;
    }
    let Some(cat) = stacks[0].category().filter(|c| c.is_stack()) else {
        return;
    };
    if stacks.iter().any(|s| s.category() != Some(cat)) {
        return;
    }
    let axes = if cat == RelationCategory::HStack {
        [Alignment::CenterH, Alignment::Left, Alignment::Right]
    } else {
        [Alignment::CenterV, Alignment::Top, Alignment::Bottom]
    };
    let outer: Vec<BBox> = stacks.iter().map(|s| s.bbox).collect();
    let mut colors: Vec<String> = Vec::new();
    for s in &stacks {
        for c in &s.children {
            if let Some(f) = &c.fill {
                if !colors.contains(f) {
                    colors.push(f.clone());
                }
            }
        }
    }
    for color in colors {
        let mut members = Vec::new();
        let mut boxes = Vec::new();
        for (si, s) in stacks.iter().enumerate() {
            let hits: Vec<usize> = (0..s.children.len())
                .filter(|&k| s.children[k].fill.as_ref() == Some(&color))
                .collect();
            if let [k] = hits.as_slice() {
                let mut p = path.to_vec();
                p.extend([si, *k]);
                members.push(p);
                boxes.push(s.children[*k].bbox);
            }
        }
        if members.len() != stacks.len() {
            continue;
        }
        // alignment the collections share themselves is gravity, not a constraint
        if let Some(a) = axes
            .iter()
            .copied()
            .find(|&a| aligned(&boxes, a, cfg.eps_align) && !aligned(&outer, a, cfg.eps_align))
        {
            out.push(GraphicalConstraint {
                kind: ConstraintKind::CrossGroupAlign,
                axes: alloc::vec![a],
                anchor_color: Some(color),
                members,
            });
        }
    }
}
