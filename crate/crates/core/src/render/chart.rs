//! Instantiates a template from a bound table and writes SVG.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::layout::{layout_grid, layout_pack, layout_stack};
use super::scale::Scale;
use crate::color::{hex_to_rgb, lerp_hex};
use crate::config::{Aggregation, Config};
use crate::error::RenderError;
use crate::fieldtype::FieldType;
use crate::geom::BBox;
use crate::grec::{
    Channel, ConstraintKind, Encoding, EncodingTarget, GlyphSet, GrecTemplate, GroupNode, NodeKind,
    RelationCategory,
};
use crate::reuse::{Choice, DataTable, ReuseStep, StepKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderMode {
    /// Unbound parts keep example geometry and all marks fade until every
    /// step is answered; the groups asked about at `current` are outlined.
    Partial {
        current: usize,
    },
    Final,
}

const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

const LABEL_ROW: f64 = 14.0;
const LABEL_COL: f64 = 60.0;

struct Inst<'t> {
    depth: usize,
    proto: &'t GroupNode,
    rows: Vec<usize>,
    label: Option<String>,
    set: Option<usize>,
    children: Vec<Inst<'t>>,
    fill: String,
    fill_value: Option<String>,
    bbox: BBox,
}

impl Inst<'_> {
    fn translate(&mut self, dx: f64, dy: f64) {
        self.bbox = self.bbox.translate(dx, dy);
        for c in &mut self.children {
            c.translate(dx, dy);
        }
    }

    fn leaves(&self) -> Vec<&Self> {
        if self.children.is_empty() {
            return alloc::vec![self];
        }
        self.children.iter().flat_map(|c| c.leaves()).collect()
    }
}

struct Bound<'a> {
    enc: &'a Encoding,
    channel: Channel,
    field: &'a str,
    scale: Option<Scale>,
}

struct Ctx<'a> {
    t: &'a GrecTemplate,
    table: &'a DataTable,
    cfg: &'a Config,
    levels: BTreeMap<usize, &'a str>,
    bound: Vec<Bound<'a>>,
    fill_colors: BTreeMap<String, String>,
    fill_ramp: Option<(String, String, Scale)>,
}

fn member_set(sets: &[GlyphSet], glyph: &GroupNode, k: usize) -> Option<usize> {
    let fill = glyph.children[k].fill.clone().unwrap_or_default();
    let rank = glyph.children[..k]
        .iter()
        .filter(|c| c.fill.as_deref() == Some(fill.as_str()))
        .count();
    sets.iter().position(|s| s.fill == fill && s.rank == rank)
}

impl<'a> Ctx<'a> {
    fn aggregate(&self, field: &str, rows: &[usize]) -> f64 {
        let vals = rows.iter().filter_map(|&r| self.table.number(field, r));
        match self.cfg.aggregation {
            Aggregation::Sum => vals.sum(),
            Aggregation::Max => vals.fold(0.0, f64::max),
            Aggregation::Mean => {
                let v: Vec<f64> = vals.collect();
                if v.is_empty() {
                    0.0
                } else {
                    v.iter().sum::<f64>() / v.len() as f64
                }
            }
        }
    }

    fn matches(&self, b: &Bound, inst: &Inst) -> bool {
        match b.enc.target {
            EncodingTarget::Mark => inst.children.is_empty() && inst.set.is_none(),
            EncodingTarget::GlyphMember(k) => inst.set == Some(k),
            EncodingTarget::Level(d) => inst.depth == d,
        }
    }

    /// Pixel value of `channel` for `inst`, when bound.
    fn px(&self, inst: &Inst, channel: Channel) -> Option<f64> {
        let b = self
            .bound
            .iter()
            .find(|b| b.channel == channel && self.matches(b, inst))?;
        let v = self.aggregate(b.field, &inst.rows);
        Some(b.scale.as_ref()?.map(v))
    }

    fn area(&self, inst: &Inst) -> Option<f64> {
        let b = self.bound.iter().find(|b| b.channel == Channel::Area)?;
        let leaves: Vec<&Inst> = inst
            .leaves()
            .into_iter()
            .filter(|l| self.matches(b, l))
            .collect();
        let rows: Vec<usize> = leaves.iter().flat_map(|l| l.rows.iter().copied()).collect();
        if rows.is_empty() {
            return None;
        }
        Some(self.aggregate(b.field, &rows).max(1e-9))
    }

    fn build(
        &self,
        proto: &'a GroupNode,
        depth: usize,
        rows: Vec<usize>,
        label: Option<String>,
        set: Option<usize>,
    ) -> Inst<'a> {
        let mut inst = Inst {
            depth,
            proto,
            rows,
            label,
            set,
            children: Vec::new(),
            fill: proto.fill.clone().unwrap_or_default(),
            fill_value: None,
            bbox: BBox::default(),
        };
        match proto.kind {
            NodeKind::Leaf => {}
            NodeKind::Glyph => {
                let n = self.t.glyph_sets.len();
                for k in 0..n {
                    let member = self.t.root.nodes_at(depth).into_iter().find_map(|g| {
                        (0..g.children.len())
                            .find(|&j| member_set(&self.t.glyph_sets, g, j) == Some(k))
                            .map(|j| &g.children[j])
                    });
                    if let Some(m) = member {
                        let child = self.build(m, depth + 1, inst.rows.clone(), None, Some(k));
                        inst.children.push(child);
                    }
                }
            }
            NodeKind::Collection => match self.levels.get(&depth) {
                Some(field) => {
                    for (i, value) in self
                        .table
                        .distinct(field, &inst.rows)
                        .into_iter()
                        .enumerate()
                    {
                        let sub: Vec<usize> = inst
                            .rows
                            .iter()
                            .copied()
                            .filter(|&r| self.table.value(field, r) == Some(value.as_str()))
                            .collect();
                        let cp = &proto.children[i % proto.children.len()];
                        inst.children
                            .push(self.build(cp, depth + 1, sub, Some(value), None));
                    }
                }
                None => {
                    for cp in &proto.children {
                        inst.children.push(self.build(
                            cp,
                            depth + 1,
                            inst.rows.clone(),
                            None,
                            None,
                        ));
                    }
                }
            },
        }
        if inst.children.is_empty() {
            self.resolve_fill(&mut inst);
        }
        inst
    }

    fn resolve_fill(&self, inst: &mut Inst) {
        let Some(b) = self.bound.iter().find(|b| b.channel == Channel::Fill) else {
            return;
        };
        if !self.matches(b, inst) && !(b.enc.target == EncodingTarget::Mark && inst.set.is_some()) {
            return;
        }
        if let Some((lo, hi, scale)) = &self.fill_ramp {
            let v = self.aggregate(b.field, &inst.rows);
            inst.fill = lerp_hex(lo, hi, scale.map(v));
        } else if let Some(v) = inst
            .rows
            .first()
            .and_then(|&r| self.table.value(b.field, r))
        {
            if let Some(c) = self.fill_colors.get(v) {
                inst.fill = c.clone();
            }
            inst.fill_value = Some(String::from(v));
        }
    }

    fn vertical_position(&self, inst: &Inst) -> Option<(f64, f64)> {
        let top = self.px(inst, Channel::TopSide);
        let bottom = self.px(inst, Channel::BottomSide);
        let y = self.px(inst, Channel::Y);
        let h = self.px(inst, Channel::Height);
        match (top.or(y), bottom) {
            (Some(t), Some(b)) => Some((t.min(b), (t - b).abs())),
            (Some(t), None) => Some((t, h.unwrap_or(inst.proto.bbox.height))),
            (None, Some(b)) => {
                let h = h.unwrap_or(inst.proto.bbox.height);
                Some((b - h, h))
            }
            (None, None) => None,
        }
    }

    fn horizontal_position(&self, inst: &Inst) -> Option<(f64, f64)> {
        let left = self
            .px(inst, Channel::LeftSide)
            .or(self.px(inst, Channel::X));
        let right = self.px(inst, Channel::RightSide);
        let w = self.px(inst, Channel::Width);
        match (left, right) {
            (Some(l), Some(r)) => Some((l.min(r), (l - r).abs())),
            (Some(l), None) => Some((l, w.unwrap_or(inst.proto.bbox.width))),
            (None, Some(r)) => {
                let w = w.unwrap_or(inst.proto.bbox.width);
                Some((r - w, w))
            }
            (None, None) => None,
        }
    }

    fn measure(&self, inst: &Inst) -> (f64, f64) {
        let p = inst.proto.bbox;
        match inst.proto.kind {
            NodeKind::Leaf => {
                let w = self
                    .horizontal_position(inst)
                    .map(|v| v.1)
                    .or(self.px(inst, Channel::Width))
                    .unwrap_or(p.width);
                let h = self
                    .vertical_position(inst)
                    .map(|v| v.1)
                    .or(self.px(inst, Channel::Height))
                    .unwrap_or(p.height);
                (w, h)
            }
            NodeKind::Glyph => {
                let (mut w, mut h) = (0.0f64, 0.0f64);
                for c in &inst.children {
                    let b = self.member_box(inst, c);
                    w = w.max(b.right());
                    h = h.max(b.bottom());
                }
                (w, h)
            }
            NodeKind::Collection => {
                let Some(rel) = &inst.proto.relationship else {
                    return (p.width, p.height);
                };
                let sizes: Vec<(f64, f64)> =
                    inst.children.iter().map(|c| self.measure(c)).collect();
                match rel.category {
                    RelationCategory::HStack | RelationCategory::VStack => {
                        let horizontal = rel.category == RelationCategory::HStack;
                        let gaps = rel.gap * sizes.len().saturating_sub(1) as f64;
                        let along: f64 = sizes
                            .iter()
                            .map(|s| if horizontal { s.0 } else { s.1 })
                            .sum::<f64>()
                            + gaps;
                        let cross = sizes
                            .iter()
                            .map(|s| if horizontal { s.1 } else { s.0 })
                            .fold(0.0, f64::max);
                        if horizontal {
                            (along, cross)
                        } else {
                            (cross, along)
                        }
                    }
                    RelationCategory::Packing => (
                        self.px(inst, Channel::Width).unwrap_or(p.width),
                        self.px(inst, Channel::Height).unwrap_or(p.height),
                    ),
                    _ => {
                        let boxes = layout_grid(
                            (0.0, 0.0),
                            &sizes,
                            self.grid_cols(inst),
                            rel.gap_x,
                            rel.gap_y,
                            rel.gravity,
                        );
                        let mut w = boxes.iter().map(|b| b.right()).fold(0.0, f64::max);
                        let mut h = boxes.iter().map(|b| b.bottom()).fold(0.0, f64::max);
                        if inst
                            .children
                            .iter()
                            .any(|c| self.vertical_position(c).is_some())
                        {
                            h = p.height;
                        }
                        if inst
                            .children
                            .iter()
                            .any(|c| self.horizontal_position(c).is_some())
                        {
                            w = p.width;
                        }
                        (w, h)
                    }
                }
            }
        }
    }

    fn grid_cols(&self, inst: &Inst) -> usize {
        let rel = inst.proto.relationship.as_ref();
        match rel.map(|r| (r.category, r.rows, r.cols)) {
            Some((RelationCategory::VGrid, _, _)) => 1,
            Some((_, 1, _)) | None => inst.children.len().max(1),
            Some((_, _, cols)) => cols.max(1),
        }
    }

    /// Member box relative to its glyph's origin.
    fn member_box(&self, glyph: &Inst, member: &Inst) -> BBox {
        let (w, h) = self.measure(member);
        let origin = glyph.proto.bbox;
        let mut x = member.proto.bbox.x - origin.x;
        let y = member.proto.bbox.y - origin.y;
        if let Some((l, _)) = self.horizontal_position(member) {
            x = l;
        }
        BBox::new(x, y, w, h)
    }

    fn place(&self, inst: &mut Inst, frame: BBox) {
        inst.bbox = frame;
        match inst.proto.kind {
            NodeKind::Leaf => {}
            NodeKind::Glyph => {
                let boxes: Vec<BBox> = inst
                    .children
                    .iter()
                    .map(|c| self.member_box(inst, c))
                    .collect();
                for (c, b) in inst.children.iter_mut().zip(boxes) {
                    c.bbox = b.translate(frame.x, frame.y);
                }
            }
            NodeKind::Collection => self.place_collection(inst, frame),
        }
    }

    fn place_collection(&self, inst: &mut Inst, frame: BBox) {
        let sizes: Vec<(f64, f64)> = inst.children.iter().map(|c| self.measure(c)).collect();
        let proto = inst.proto;
        let Some(rel) = proto.relationship.clone() else {
            for (i, c) in inst.children.iter_mut().enumerate() {
                let (w, h) = sizes[i];
                let pc = proto.children[i % proto.children.len()].bbox;
                let mut x = frame.x + pc.x - proto.bbox.x;
                let mut y = frame.y + pc.y - proto.bbox.y;
                if let Some(px) = self.px(c, Channel::X) {
                    x = frame.x + px;
                }
                if let Some(py) = self.px(c, Channel::Y) {
                    y = frame.y + py;
                }
                self.place(c, BBox::new(x, y, w, h));
            }
            return;
        };
        match rel.category {
            RelationCategory::HStack | RelationCategory::VStack => {
                let horizontal = rel.category == RelationCategory::HStack;
                let along: Vec<f64> = sizes
                    .iter()
                    .map(|s| if horizontal { s.0 } else { s.1 })
                    .collect();
                let boxes = layout_stack(frame, &along, horizontal, rel.gap);
                for (c, b) in inst.children.iter_mut().zip(boxes) {
                    self.place(c, b);
                }
            }
            RelationCategory::Packing => {
                let areas: Vec<f64> = inst
                    .children
                    .iter()
                    .map(|c| {
                        self.area(c)
                            .unwrap_or_else(|| c.proto.bbox.area().max(1e-9))
                    })
                    .collect();
                let boxes = layout_pack(frame, &areas, rel.gap);
                for (c, b) in inst.children.iter_mut().zip(boxes) {
                    self.place(c, b);
                }
            }
            _ => {
                let cols = self.grid_cols(inst);
                let boxes = layout_grid(
                    (frame.x, frame.y),
                    &sizes,
                    cols,
                    rel.gap_x,
                    rel.gap_y,
                    rel.gravity,
                );
                for (c, mut b) in inst.children.iter_mut().zip(boxes) {
                    if let Some((y, h)) = self.vertical_position(c) {
                        b = BBox::new(b.x, frame.y + y, b.width, h);
                    }
                    if let Some((x, w)) = self.horizontal_position(c) {
                        b = BBox::new(frame.x + x, b.y, w, b.height);
                    }
                    self.place(c, b);
                }
                self.cross_group_align(inst);
            }
        }
    }

    /// Shifts stacked children so their anchor segments share a centre.
    fn cross_group_align(&self, inst: &mut Inst) {
        let Some(c) = self
            .t
            .constraints
            .iter()
            .find(|c| c.kind == ConstraintKind::CrossGroupAlign)
        else {
            return;
        };
        if inst
            .children
            .iter()
            .any(|c| !c.proto.category().is_some_and(|k| k.is_stack()))
        {
            return;
        }
        let horizontal = inst.children.first().and_then(|c| c.proto.category())
            == Some(RelationCategory::HStack);
        let fill_field = self
            .bound
            .iter()
            .find(|b| b.channel == Channel::Fill)
            .map(|b| b.field);
        let anchor_value = fill_field.map(|f| {
            let values = self.table.distinct(f, &inst.rows);
            values.get(values.len() / 2).cloned().unwrap_or_default()
        });
        let is_anchor = |l: &Inst| match &anchor_value {
            Some(v) => l.fill_value.as_deref() == Some(v.as_str()),
            None => Some(l.fill.as_str()) == c.anchor_color.as_deref(),
        };
        let centers: Vec<Option<f64>> = inst
            .children
            .iter()
            .map(|s| {
                s.children.iter().find(|l| is_anchor(l)).map(|l| {
                    if horizontal {
                        l.bbox.center_x()
                    } else {
                        l.bbox.center_y()
                    }
                })
            })
            .collect();
        let target = centers
            .iter()
            .flatten()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        if !target.is_finite() {
            return;
        }
        for (s, c) in inst.children.iter_mut().zip(centers) {
            if let Some(c) = c {
                let d = target - c;
                if horizontal {
                    s.translate(d, 0.0)
                } else {
                    s.translate(0.0, d)
                }
            }
        }
    }
}

/// Pixel extents of the example nodes an encoding targets.
fn example_extent(t: &GrecTemplate, e: &Encoding, horizontal: bool) -> f64 {
    let nodes: Vec<&GroupNode> = match e.target {
        EncodingTarget::Mark => t.root.leaves(),
        EncodingTarget::Level(d) => t.root.nodes_at(d),
        EncodingTarget::GlyphMember(k) => {
            let glyphs = t
                .glyph_depth()
                .map(|d| t.root.nodes_at(d))
                .unwrap_or_default();
            glyphs
                .into_iter()
                .flat_map(|g| {
                    (0..g.children.len())
                        .filter(move |&j| member_set(&t.glyph_sets, g, j) == Some(k))
                        .map(move |j| &g.children[j])
                })
                .collect()
        }
    };
    let pick = |b: &BBox| if horizontal { b.width } else { b.height };
    nodes.iter().map(|n| pick(&n.bbox)).fold(0.0, f64::max)
}

/// Extent of the frame a positional channel moves within.
fn position_extent(t: &GrecTemplate, e: &Encoding, horizontal: bool) -> f64 {
    let depth = match e.target {
        EncodingTarget::Level(d) => d,
        _ => t.leaf_depth(),
    };
    let parents = t.root.nodes_at(depth.saturating_sub(1));
    let pick = |b: &BBox| if horizontal { b.width } else { b.height };
    let frame = parents.iter().map(|n| pick(&n.bbox)).fold(0.0, f64::max);
    let own = match e.target {
        EncodingTarget::Level(d) => t
            .root
            .nodes_at(d)
            .iter()
            .map(|n| pick(&n.bbox))
            .fold(0.0, f64::max),
        _ => 0.0,
    };
    (frame - own).max(1.0)
}

fn example_colors(t: &GrecTemplate) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let legend = t.decoration.legend.entries.iter().map(|e| e.color.clone());
    let leaves = t.root.leaves().into_iter().filter_map(|l| l.fill.clone());
    for c in legend.chain(leaves) {
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    for c in PALETTE {
        if seen.insert(String::from(c)) {
            out.push(String::from(c));
        }
    }
    out
}

fn luminance(c: &str) -> f64 {
    hex_to_rgb(c)
        .map(|(r, g, b)| 0.2126 * r as f64 + 0.7152 * g as f64 + 0.0722 * b as f64)
        .unwrap_or(0.0)
}

fn num(v: f64) -> String {
    let s = format!("{:.2}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        String::from("0")
    } else {
        String::from(s)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

struct Label {
    x: f64,
    y: f64,
    anchor: &'static str,
    text: String,
}

fn collect_labels(ctx: &Ctx, inst: &Inst, plot: BBox, out: &mut Vec<Label>) {
    if let (Some(_), Some(rel)) = (
        ctx.levels.get(&inst.depth),
        inst.proto.relationship.as_ref(),
    ) {
        let horizontal = matches!(rel.category, RelationCategory::HStack)
            || (rel.category == RelationCategory::HGrid && rel.rows == 1);
        let vertical = matches!(
            rel.category,
            RelationCategory::VStack | RelationCategory::VGrid
        );
        let tier_of = |h: bool| {
            ctx.levels
                .keys()
                .filter(|&&d| d > inst.depth)
                .filter(|&&d| {
                    ctx.t
                        .root
                        .nodes_at(d)
                        .first()
                        .and_then(|n| n.relationship.as_ref())
                        .is_some_and(|r| {
                            if h {
                                r.category == RelationCategory::HStack
                                    || (r.category == RelationCategory::HGrid && r.rows == 1)
                            } else {
                                matches!(
                                    r.category,
                                    RelationCategory::VStack | RelationCategory::VGrid
                                )
                            }
                        })
                })
                .count() as f64
        };
        for c in &inst.children {
            let Some(text) = c.label.clone() else {
                continue;
            };
            if horizontal {
                let y = plot.bottom() + LABEL_ROW * (1.0 + tier_of(true));
                out.push(Label {
                    x: c.bbox.center_x(),
                    y,
                    anchor: "middle",
                    text,
                });
            } else if vertical {
                let x = plot.x - 6.0 - LABEL_COL * tier_of(false);
                out.push(Label {
                    x,
                    y: c.bbox.center_y() + 4.0,
                    anchor: "end",
                    text,
                });
            }
        }
    }
    for c in &inst.children {
        collect_labels(ctx, c, plot, out);
    }
}

fn label_tiers(ctx: &Ctx, horizontal: bool) -> usize {
    ctx.levels
        .keys()
        .filter(|&&d| {
            ctx.t
                .root
                .nodes_at(d)
                .first()
                .and_then(|n| n.relationship.as_ref())
                .is_some_and(|r| {
                    let h = r.category == RelationCategory::HStack
                        || (r.category == RelationCategory::HGrid && r.rows == 1);
                    let v = matches!(
                        r.category,
                        RelationCategory::VStack | RelationCategory::VGrid
                    );
                    if horizontal {
                        h
                    } else {
                        v
                    }
                })
        })
        .count()
}

fn write_inst(out: &mut String, ctx: &Ctx, inst: &Inst, opacity: Option<f64>) {
    if inst.children.is_empty() {
        let rows: Vec<String> = inst.rows.iter().take(64).map(|r| format!("{r}")).collect();
        let _ = write!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"",
            num(inst.bbox.x),
            num(inst.bbox.y),
            num(inst.bbox.width.max(0.0)),
            num(inst.bbox.height.max(0.0)),
            escape(&inst.fill)
        );
        if let Some(o) = opacity {
            let _ = write!(out, " opacity=\"{}\"", num(o));
        }
        if !rows.is_empty() && ctx.levels.contains_key(&inst.depth.saturating_sub(1)) {
            let _ = write!(out, " data-rows=\"{}\"", rows.join(","));
        }
        out.push_str("/>\n");
        return;
    }
    let kind = match inst.proto.kind {
        NodeKind::Glyph => "glyph",
        _ => "collection",
    };
    let _ = write!(out, "<g class=\"{kind}\" data-depth=\"{}\"", inst.depth);
    if let Some(l) = &inst.label {
        let _ = write!(out, " data-label=\"{}\"", escape(l));
    }
    out.push_str(">\n");
    for c in &inst.children {
        write_inst(out, ctx, c, opacity);
    }
    out.push_str("</g>\n");
}

fn outline(out: &mut String, inst: &Inst, depth: usize) {
    if inst.depth == depth {
        let b = inst.bbox;
        let _ = writeln!(
            out,
            "<rect class=\"highlight\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#222222\" stroke-width=\"2\"/>",
            num(b.x - 1.0),
            num(b.y - 1.0),
            num(b.width + 2.0),
            num(b.height + 2.0)
        );
        return;
    }
    for c in &inst.children {
        outline(out, c, depth);
    }
}

/// Renders `t` bound to `table` under the answered steps.
pub fn render_chart(
    t: &GrecTemplate,
    table: &DataTable,
    plan: &[ReuseStep],
    choices: &BTreeMap<usize, Choice>,
    mode: RenderMode,
    cfg: &Config,
) -> Result<String, RenderError> {
    if mode == RenderMode::Final {
        if let Some(s) = plan.iter().find(|s| !choices.contains_key(&s.index)) {
            return Err(RenderError::UnboundStep(s.index));
        }
    }
    let mut levels = BTreeMap::new();
    for s in plan.iter().filter(|s| s.kind != StepKind::MapEncoding) {
        if let Some(c) = choices.get(&s.index) {
            levels.insert(s.target_level, c.field.as_str());
        }
    }
    let groups_complete = plan
        .iter()
        .filter(|s| s.kind != StepKind::MapEncoding)
        .all(|s| choices.contains_key(&s.index));
    let mut bound: Vec<Bound> = Vec::new();
    if groups_complete {
        for s in plan.iter().filter(|s| s.kind == StepKind::MapEncoding) {
            let (Some(c), Some(i)) = (choices.get(&s.index), s.encoding) else {
                continue;
            };
            if table.column(&c.field).is_none() {
                continue;
            }
            let enc = &t.encodings[i];
            bound.push(Bound {
                enc,
                channel: c.channel.unwrap_or(enc.channel),
                field: c.field.as_str(),
                scale: None,
            });
        }
    }
    let all_rows: Vec<usize> = (0..table.row_count).collect();
    let mut ctx = Ctx {
        t,
        table,
        cfg,
        levels,
        bound: Vec::new(),
        fill_colors: BTreeMap::new(),
        fill_ramp: None,
    };

    // Fill mapping is settled before instantiation so leaves resolve colours as they are built.
    if let Some(b) = bound.iter().find(|b| b.channel == Channel::Fill) {
        let colors = example_colors(t);
        let quantitative = b.enc.field_type == FieldType::Quantitative
            && table
                .column(b.field)
                .is_some_and(|c| c.field_type == FieldType::Quantitative);
        if quantitative {
            let values: Vec<f64> = all_rows
                .iter()
                .filter_map(|&r| table.number(b.field, r))
                .collect();
            let stops = &t.decoration.legend.gradient_stops;
            let (lo, hi) = if stops.len() >= 2 {
                (stops[0].color.clone(), stops[stops.len() - 1].color.clone())
            } else {
                let mut fills: Vec<String> = colors
                    .iter()
                    .take(colors.len().min(t.root.leaves().len()))
                    .cloned()
                    .collect();
                fills.sort_by(|a, b| luminance(b).total_cmp(&luminance(a)));
                (
                    fills.first().cloned().unwrap_or_default(),
                    fills.last().cloned().unwrap_or_default(),
                )
            };
            let scale = Scale::size(&values, (0.0, 1.0))?;
            ctx.fill_ramp = Some((lo, hi, scale));
        } else {
            for (i, v) in table.distinct(b.field, &all_rows).into_iter().enumerate() {
                ctx.fill_colors.insert(v, colors[i % colors.len()].clone());
            }
        }
    }
    ctx.bound = bound;
    let mut root = ctx.build(&t.root, 0, all_rows, None, None);

    // Scales need the instantiated groups to know their data.
    let mut scales: Vec<Option<Scale>> = Vec::new();
    for b in &ctx.bound {
        let mut insts: Vec<&Inst> = Vec::new();
        fn walk<'x, 'y>(i: &'x Inst<'y>, out: &mut Vec<&'x Inst<'y>>) {
            out.push(i);
            for c in &i.children {
                walk(c, out);
            }
        }
        walk(&root, &mut insts);
        let same_axis = |c: Channel| match b.channel {
            Channel::Y | Channel::TopSide | Channel::BottomSide => {
                matches!(c, Channel::Y | Channel::TopSide | Channel::BottomSide)
            }
            Channel::X | Channel::LeftSide | Channel::RightSide => {
                matches!(c, Channel::X | Channel::LeftSide | Channel::RightSide)
            }
            other => c == other,
        };
        let scale = match b.channel {
            Channel::Width | Channel::Height => {
                let values: Vec<f64> = insts
                    .iter()
                    .filter(|i| ctx.matches(b, i))
                    .map(|i| ctx.aggregate(b.field, &i.rows))
                    .collect();
                let ext = example_extent(t, b.enc, b.channel == Channel::Width);
                Some(Scale::size(&values, (0.0, ext))?)
            }
            Channel::X
            | Channel::Y
            | Channel::TopSide
            | Channel::BottomSide
            | Channel::LeftSide
            | Channel::RightSide => {
                let values: Vec<f64> = ctx
                    .bound
                    .iter()
                    .filter(|o| same_axis(o.channel))
                    .flat_map(|o| {
                        insts
                            .iter()
                            .filter(|i| ctx.matches(o, i))
                            .map(|i| ctx.aggregate(o.field, &i.rows))
                    })
                    .collect();
                let horizontal = matches!(
                    b.channel,
                    Channel::X | Channel::LeftSide | Channel::RightSide
                );
                let ext = position_extent(t, b.enc, horizontal);
                let range = if horizontal { (0.0, ext) } else { (ext, 0.0) };
                Some(Scale::position(&values, range)?)
            }
            _ => None,
        };
        scales.push(scale);
    }
    for (b, s) in ctx.bound.iter_mut().zip(scales) {
        b.scale = s;
    }
    if !ctx.bound.is_empty() {
        root = ctx.build(&t.root, 0, (0..table.row_count).collect(), None, None);
    }

    let h_tiers = label_tiers(&ctx, true) as f64;
    let v_tiers = label_tiers(&ctx, false) as f64;
    let (w, h) = ctx.measure(&root);
    let origin = (20.0 + LABEL_COL * v_tiers, 20.0);
    ctx.place(&mut root, BBox::new(origin.0, origin.1, w, h));
    let plot = BBox::enclosing(root.leaves().iter().map(|l| &l.bbox)).unwrap_or(root.bbox);
    let mut labels = Vec::new();
    collect_labels(&ctx, &root, plot, &mut labels);

    let legend_entries: Vec<(String, String)> =
        match ctx.bound.iter().find(|b| b.channel == Channel::Fill) {
            Some(b) if ctx.fill_ramp.is_none() => table
                .distinct(b.field, &(0..table.row_count).collect::<Vec<_>>())
                .into_iter()
                .map(|v| {
                    let c = ctx.fill_colors.get(&v).cloned().unwrap_or_default();
                    (v, c)
                })
                .collect(),
            _ => Vec::new(),
        };
    let legend_w = if legend_entries.is_empty() && ctx.fill_ramp.is_none() {
        0.0
    } else {
        140.0
    };
    let right = plot.right().max(root.bbox.right());
    let width = right + 20.0 + legend_w;
    let bottom = plot.bottom().max(root.bbox.bottom());
    let height =
        (bottom + 20.0 + LABEL_ROW * h_tiers).max(20.0 + 16.0 * legend_entries.len() as f64 + 20.0);

    let complete = plan.iter().all(|s| choices.contains_key(&s.index));
    let opacity = match mode {
        RenderMode::Partial { .. } if !complete => Some(cfg.fade_opacity),
        _ => None,
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
        num(width),
        num(height),
        num(width),
        num(height)
    );
    let _ = writeln!(out, "<metadata>{}</metadata>", escape(&cfg.fingerprint()));
    if let Some((lo, hi, _)) = &ctx.fill_ramp {
        let _ = writeln!(
            out,
            "<defs><linearGradient id=\"fill-ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\"><stop offset=\"0\" stop-color=\"{lo}\"/><stop offset=\"1\" stop-color=\"{hi}\"/></linearGradient></defs>"
        );
    }
    out.push_str("<g class=\"marks\">\n");
    write_inst(&mut out, &ctx, &root, opacity);
    out.push_str("</g>\n");
    if !labels.is_empty() {
        out.push_str("<g class=\"labels\" font-size=\"11\">\n");
        for l in &labels {
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"{}\">{}</text>",
                num(l.x),
                num(l.y),
                l.anchor,
                escape(&l.text)
            );
        }
        out.push_str("</g>\n");
    }
    let lx = right + 20.0;
    if !legend_entries.is_empty() {
        out.push_str("<g class=\"legend\" font-size=\"11\">\n");
        for (i, (label, color)) in legend_entries.iter().enumerate() {
            let y = origin.1 + 16.0 * i as f64;
            let _ = writeln!(
                out,
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>",
                num(lx),
                num(y),
                color
            );
            let _ = writeln!(
                out,
                "<text x=\"{}\" y=\"{}\">{}</text>",
                num(lx + 14.0),
                num(y + 9.0),
                escape(label)
            );
        }
        out.push_str("</g>\n");
    } else if let Some((_, _, Scale::Linear { domain, .. })) = &ctx.fill_ramp {
        out.push_str("<g class=\"legend\" font-size=\"11\">\n");
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"100\" fill=\"url(#fill-ramp)\"/>",
            num(lx),
            num(origin.1)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            num(lx + 16.0),
            num(origin.1 + 104.0),
            num(domain.0)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\">{}</text>",
            num(lx + 16.0),
            num(origin.1 + 8.0),
            num(domain.1)
        );
        out.push_str("</g>\n");
    }
    if let RenderMode::Partial { current } = mode {
        if let Some(step) = plan.get(current) {
            let depth = if step.kind == StepKind::MapEncoding {
                step.target_level
            } else {
                step.target_level + 1
            };
            out.push_str("<g class=\"highlight\">\n");
            outline(&mut out, &root, depth);
            out.push_str("</g>\n");
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
